#pragma once

#include "mdt/common.hpp"
#include "mdt/cyclo.hpp"
#include "mdt/lambda.hpp"
#include "mdt/mpoly.hpp"
#include "mdt/quiver.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

// Partition functions, DT invariant extraction and the identity checks. Every check
// produces a CheckReport whose rows compare two independently computed exact values.

namespace mdt::dt {

using cyclo::CyclotomicValue;
using lambda::AdamsSequence;
using lambda::TruncatedSeries;
using quiver::Backend;
using quiver::CountOptions;
using quiver::MPoly;
using quiver::Potential;

struct CheckRow {
    unsigned n = 0;
    unsigned k = 0;
    CyclotomicValue lhs;
    CyclotomicValue rhs;
    bool equal = false;
    double ms = 0;
};

class CheckReport {
public:
    CheckReport() = default;
    explicit CheckReport(std::string check) : check_(std::move(check)) {}

    const std::string& check() const { return check_; }
    nlohmann::ordered_json& params() { return params_; }
    const nlohmann::ordered_json& params() const { return params_; }
    const std::vector<CheckRow>& rows() const { return rows_; }

    void add_row(unsigned n, unsigned k, const CyclotomicValue& lhs, const CyclotomicValue& rhs, double ms = 0);
    /// A side condition recorded under params.assertions; it counts toward pass.
    void add_assertion(const std::string& what, unsigned n, unsigned k, bool holds);
    /// Marks the report partial after a budget overrun.
    void mark_budget_exceeded(const std::string& message);

    bool budget_exceeded() const { return budget_error_.has_value(); }
    /// Every row and assertion holds, there is at least one row, and the run completed.
    bool pass() const;

    /// {check, params, rows:[{n,k,lhs,rhs,equal,ms}], pass}; ms is zeroed unless timing.
    nlohmann::ordered_json to_json(bool timing = false) const;
    std::string to_csv() const;
    std::string to_pretty() const;
    std::string format(const std::string& fmt, bool timing = false) const;

private:
    std::string check_;
    nlohmann::ordered_json params_ = nlohmann::ordered_json::object();
    std::vector<CheckRow> rows_;
    bool assertions_hold_ = true;
    std::optional<std::string> budget_error_;
};

// ---------------------------------------------------------------------------
// Weighted functions

struct WeightedFunction {
    std::vector<std::string> names;
    /// fiber[i]: variable i is a fiber coordinate t_j.
    std::vector<bool> fiber;
    MPoly g;

    /// Parses "x^2*t + 3*x*y - 2", with + - * ^ and parentheses. Fiber variables are
    /// those listed, or by default every variable whose name starts with 't'.
    static WeightedFunction parse(const std::string& text, const std::vector<std::string>& fiber_vars = {});
    /// Tr(W) on n x n matrices of the three loops; fiber = entries of `fiber_arrow`.
    static WeightedFunction from_potential(const Potential& w, unsigned n, const std::string& fiber_arrow = "a");

    unsigned base_count() const;
    unsigned fiber_count() const;
    std::string to_string() const { return g.to_string(names); }
};

struct WeightResult {
    bool feasible = false;
    /// One weight per variable, in the order of WeightedFunction::names.
    std::vector<Integer> weights;
    Integer degree = 0;
};

/// Nonnegative integer weights making every monomial of g have the same positive
/// weight, found by exact rational linear programming; infeasible otherwise.
WeightResult check_weights(const WeightedFunction& f);

/// True when every monomial of g has weight exactly `degree` > 0 under `weights`.
bool has_weights(const WeightedFunction& f, const std::vector<Integer>& weights, const Integer& degree);

/// sum_{x,t} psi(g) = q^m sum_{x : g_1 = ... = g_m = 0} psi(g_0) at levels 1..kmax.
CheckReport check_dimred(const WeightedFunction& f, std::uint32_t p, unsigned kmax, const CountOptions& opts = {});

/// Matrix form: sum over all (A, B, C) of psi(Tr([A,B]C + twist)) against
/// q^{n^2} times the commuting count, at levels 1..kmax.
CheckReport check_dimred_matrix(const Potential& twist, unsigned n, std::uint32_t p, unsigned kmax, Backend backend,
                                const CountOptions& opts = {});

// ---------------------------------------------------------------------------
// Partition functions and DT invariants

/// Z_n at level k = commuting_twisted_count(n, p, k, twist) / |GL_n(F_{p^k})|, for
/// n <= nmax with floor(K/n) levels each.
TruncatedSeries<AdamsSequence> partition_function(const Potential& twist, std::uint32_t p, unsigned nmax, unsigned K,
                                                  Backend backend = Backend::classes, const CountOptions& opts = {});

/// Omega_n = LOG(Z)_n (g_k - g_k^{-1}) levelwise; result[n - 1] for n = 1..order.
std::vector<AdamsSequence> extract_dt(const TruncatedSeries<AdamsSequence>& z, std::uint32_t p);

/// L^{1/2} - L^{-1/2} realized with depth K.
AdamsSequence dt_normalization(std::uint32_t p, unsigned K);

/// sum over z in F_{p^k} of psi(Tr(n z^d)).
CyclotomicValue scaled_power_sum(unsigned n, unsigned d, std::uint32_t p, unsigned k);

/// True when n is a d-th power in F_{p^k}.
bool is_dth_power(unsigned n, unsigned d, std::uint32_t p, unsigned k);

CheckReport check_cmps(unsigned d, std::uint32_t p, unsigned nmax, unsigned K, Backend backend = Backend::classes,
                       const CountOptions& opts = {});

/// q runs over prime powers; the brute backend cross-checks n <= brute_nmax.
CheckReport check_feit_fine(const std::vector<unsigned>& q_list, unsigned nmax, unsigned brute_nmax = 2,
                            const CountOptions& opts = {});

/// Framed against unframed times noncommutative Hilbert counts for W = [a,b]c + c^d
/// (d = 0 drops c^d), level 1, n <= nmax.
CheckReport check_wallcross(std::uint32_t p, unsigned nmax, unsigned d = 2, Backend backend = Backend::classes,
                            const CountOptions& opts = {});

/// Commuting counts with twist W' against EXP(sum G_n/(q-1) T^n), G_n the diagonal sum.
CheckReport check_preprojective(const Potential& w_prime, std::uint32_t p, unsigned nmax, unsigned K,
                                Backend backend = Backend::classes, const CountOptions& opts = {});

/// sigma^n(<d>) by Newton against the symmetric-power line sum, n <= nmax, k <= kmax.
CheckReport check_sigma_oracle(unsigned d, std::uint32_t p, unsigned nmax, unsigned kmax, const CountOptions& opts = {});

/// Class sizes partition q^{n^2}; |GL_n| and trace-pairing orthogonality by brute force
/// for n <= brute_nmax.
CheckReport check_classes(const std::vector<unsigned>& q_list, unsigned nmax, unsigned brute_nmax = 2,
                          const CountOptions& opts = {});

/// Splits a potential on the three loops into [a,b]c plus a twist in b, c.
Potential split_tripled(const Potential& w);

/// (p, k) with q = p^k; InvalidParameter if q is not a prime power.
std::pair<std::uint32_t, unsigned> prime_power(unsigned q);

} // namespace mdt::dt
