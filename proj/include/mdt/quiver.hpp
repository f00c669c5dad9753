#pragma once

#include "mdt/common.hpp"
#include "mdt/cyclo.hpp"
#include "mdt/ffield.hpp"
#include "mdt/mpoly.hpp"
#include "mdt/staged_sum.hpp"

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace mdt::quiver {

using cyclo::CyclotomicValue;

// ---------------------------------------------------------------------------
// Quivers and potentials

struct Arrow {
    std::string name;
    std::string source;
    std::string target;
};

class QuiverSpec {
public:
    QuiverSpec() = default;
    QuiverSpec(std::vector<std::string> vertices, std::vector<Arrow> arrows);

    /// One vertex "1" with a loop per name.
    static QuiverSpec loops(const std::vector<std::string>& names);

    const std::vector<std::string>& vertices() const { return vertices_; }
    const std::vector<Arrow>& arrows() const { return arrows_; }
    const Arrow& arrow(const std::string& name) const;
    bool has_arrow(const std::string& name) const;
    bool has_vertex(const std::string& v) const;

private:
    std::vector<std::string> vertices_;
    std::vector<Arrow> arrows_;
};

struct PotentialTerm {
    Integer coeff;
    std::vector<std::string> word;
};

/// Signed sum of cyclic words; Tr(word) = Tr(M_{a1} M_{a2} ... M_{am}).
class Potential {
public:
    Potential() = default;
    explicit Potential(std::vector<PotentialTerm> terms) : terms_(std::move(terms)) {}

    /// "+1 a b c, -1 b a c, +1 c c c"; an empty string is the zero potential.
    static Potential parse(const std::string& text);

    const std::vector<PotentialTerm>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool uses(const std::string& letter) const;
    /// Letters occurring in some word.
    std::vector<std::string> letters() const;
    /// Checks that every word is a closed path of the quiver.
    void validate(const QuiverSpec& q) const;

    Potential operator+(const Potential& o) const;

    std::string to_string() const;

private:
    std::vector<PotentialTerm> terms_;
};

/// [a,b]c, plus c^d when d >= 2.
Potential potential_W(unsigned d = 0);
/// c^d alone (a twist in the letters b, c).
Potential power_twist(unsigned d);

struct QuiverWithPotential {
    QuiverSpec quiver;
    Potential potential;
};

/// Text format: lines "vertices: 1", "arrows: a 1 1, b 1 1, c 1 1",
/// "potential: +1 a b c, -1 b a c". Blank lines and '#' comments are ignored.
QuiverWithPotential parse_quiver(const std::string& text);

/// Three loops a, b, c with W = [a,b]c + c^d (d = 0 or 1 drops the c^d term).
QuiverWithPotential preset_three_loop(unsigned d);

using DimVector = std::map<std::string, unsigned>;

/// Assignment of polynomial variables to matrix entries: var(arrow, row, col).
class VarLayout {
public:
    /// Arrow by arrow in quiver order, row-major.
    static VarLayout row_major(const QuiverSpec& q, const DimVector& dim);

    VarLayout() = default;
    void assign(const std::string& arrow, unsigned rows, unsigned cols, std::vector<unsigned> index);

    unsigned nvars() const { return nvars_; }
    unsigned var(const std::string& arrow, unsigned r, unsigned c) const;
    unsigned rows(const std::string& arrow) const { return shape_.at(arrow).first; }
    unsigned cols(const std::string& arrow) const { return shape_.at(arrow).second; }
    std::vector<std::string> names() const;

private:
    std::map<std::string, std::pair<unsigned, unsigned>> shape_;
    std::map<std::string, std::vector<unsigned>> index_;
    unsigned nvars_ = 0;
};

/// Tr(W) as a polynomial in the matrix entries.
MPoly expand_trace(const QuiverSpec& q, const Potential& w, const DimVector& dim, const VarLayout& layout);

// ---------------------------------------------------------------------------
// Dense matrices over F_q

struct Matrix {
    unsigned rows = 0;
    unsigned cols = 0;
    std::vector<Elem> a;

    Matrix() = default;
    Matrix(unsigned r, unsigned c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0) {}
    static Matrix identity(unsigned n);

    Elem& at(unsigned r, unsigned c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    Elem at(unsigned r, unsigned c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
    bool operator==(const Matrix& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

Matrix mat_mul(const FieldTable& F, const Matrix& x, const Matrix& y);
Matrix mat_add(const FieldTable& F, const Matrix& x, const Matrix& y);
Matrix mat_sub(const FieldTable& F, const Matrix& x, const Matrix& y);
Matrix mat_scale(const FieldTable& F, Elem s, const Matrix& x);
Elem mat_trace(const FieldTable& F, const Matrix& x);
unsigned mat_rank(const FieldTable& F, Matrix x);
/// Basis of the right kernel {v : x v = 0}, as column vectors.
std::vector<std::vector<Elem>> mat_kernel(const FieldTable& F, Matrix x);

/// Tr(W) evaluated on concrete matrices, one per letter.
Elem evaluate_potential(const FieldTable& F, const Potential& w, const std::map<std::string, const Matrix*>& mats);

/// Iterates over all n x n matrices in index order.
void for_each_matrix(const FieldTable& F, unsigned n, const std::function<void(const Matrix&)>& fn);

// ---------------------------------------------------------------------------
// Orders and conjugacy classes

/// |GL_n(F_q)| = prod_{i<n} (q^n - q^i).
Integer gl_order(unsigned n, const Integer& q);

/// Monic polynomial over F_q, low degree first.
using PolyFq = std::vector<Elem>;

/// Monic irreducibles over F_q of each degree 1..max_degree (index 0 unused).
std::vector<std::vector<PolyFq>> monic_irreducibles(const FieldTable& F, unsigned max_degree,
                                                    double budget = kDefaultBudget);

struct ConjClass {
    /// (irreducible f, partition of the multiplicity, parts in decreasing order)
    std::vector<std::pair<PolyFq, std::vector<unsigned>>> blocks;
    Integer class_size;
    Integer centralizer_order;
    /// dim_F Z(C) as an F_q-space.
    unsigned centralizer_dim = 0;

    /// Block diagonal of companion matrices of f^{lambda_i}.
    Matrix representative(const FieldTable& F) const;
};

/// Invariant-factor data of a class from its blocks: centralizer order and dimension.
void fill_centralizer(const FieldTable& F, unsigned n, ConjClass& c);

/// Every conjugacy class of Mat_n(F_q) once. `budget` caps the irreducible sieve.
void for_each_conj_class(const FieldTable& F, unsigned n, const std::function<void(const ConjClass&)>& fn,
                         double budget = kDefaultBudget);
std::vector<ConjClass> conj_classes(const FieldTable& F, unsigned n, double budget = kDefaultBudget);

// ---------------------------------------------------------------------------
// Counting backends

enum class Backend { brute, classes };
Backend parse_backend(const std::string& s);
std::string to_string(Backend b);

struct CountOptions {
    double budget = kDefaultBudget;
    unsigned threads = 1;
};

/// sum over X_gamma(F_{p^k}) of psi(Tr W).
CyclotomicValue rep_space_twisted_sum(const QuiverSpec& q, const Potential& w, const DimVector& dim, std::uint32_t p,
                                      unsigned k, const CountOptions& opts = {});

/// sum over commuting (B, C) in Mat_n(F_{p^k})^2 of psi(Tr twist(B, C)); the twist uses
/// only the letters b and c.
CyclotomicValue commuting_twisted_count(unsigned n, std::uint32_t p, unsigned k, const Potential& twist,
                                        Backend backend, const CountOptions& opts = {});

/// sum over stable framed (A, B, C, v) of psi(Tr W), divided by |GL_n|. W is a
/// potential on the three loops a, b, c.
CyclotomicValue nc_hilb_twisted_count(unsigned n, std::uint32_t p, unsigned k, const Potential& w,
                                      const CountOptions& opts = {});

/// Same quantity without the orbit reduction: v runs over all of F^n and stability is
/// tested on every tuple. Reference implementation for small cases.
CyclotomicValue nc_hilb_twisted_count_full(unsigned n, std::uint32_t p, unsigned k, const Potential& w,
                                           const CountOptions& opts = {});

/// Raw stable sum (no division by |GL_n|): sum over stable (A, B, C, v) of psi(Tr W).
CyclotomicValue stable_framed_sum(unsigned n, std::uint32_t p, unsigned k, const Potential& w,
                                  const CountOptions& opts = {});

/// True when the words in the matrices applied to v span F^n (breadth-first closure).
bool is_cyclic(const FieldTable& F, const std::vector<const Matrix*>& mats, const std::vector<Elem>& v);

/// Newton power sum p_d of the roots of t^n + a_{n-1} t^{n-1} + ... + a_0, as a
/// polynomial in (a_{n-1}, ..., a_0).
MPoly newton_power_sum(unsigned d, unsigned n);

/// sum over monic degree-n polynomials over F_{p^k} of psi(Tr p_d(roots)).
CyclotomicValue sym_line_twisted_count(unsigned d, unsigned n, std::uint32_t p, unsigned k,
                                       const CountOptions& opts = {});

/// sum over A in Mat_n(F_q) of psi(Tr(A M)).
CyclotomicValue trace_pairing_sum(const FieldTable& F, const Matrix& m, double budget = kDefaultBudget);

} // namespace mdt::quiver
