#pragma once

#include "mdt/common.hpp"
#include "mdt/ffield.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

// Exact arithmetic in Q(zeta_p), the ring every exponential sum lands in.
//
// A value is stored in the basis zeta^0, ..., zeta^{p-2}; zeta^{p-1} is rewritten
// as -(1 + zeta + ... + zeta^{p-2}). For p = 2 the field degenerates to Q
// (zeta = -1), which lets untwisted point counts over F_{2^k} share the type.

namespace mdt::cyclo {

class CyclotomicValue {
public:
    CyclotomicValue() = default;
    /// Zero of Q(zeta_p).
    explicit CyclotomicValue(std::uint32_t p);
    CyclotomicValue(std::uint32_t p, const Rational& constant);
    /// Reduces a polynomial sum_i c_i zeta^i of any length.
    static CyclotomicValue from_powers(std::uint32_t p, const std::vector<Rational>& coeffs_by_power);
    /// zeta^e.
    static CyclotomicValue zeta_power(std::uint32_t p, std::int64_t e);

    std::uint32_t conductor() const { return p_; }
    const std::vector<Rational>& coeffs() const { return coeffs_; }

    bool is_zero() const;
    /// True when the value lies in Q; sets *out to it.
    bool is_rational(Rational* out = nullptr) const;
    bool has_integer_coeffs() const;

    CyclotomicValue& operator+=(const CyclotomicValue& o);
    CyclotomicValue& operator-=(const CyclotomicValue& o);
    CyclotomicValue& operator*=(const CyclotomicValue& o);
    CyclotomicValue& operator*=(const Rational& r);
    CyclotomicValue& operator/=(const Rational& r);

    friend CyclotomicValue operator+(CyclotomicValue a, const CyclotomicValue& b) { return a += b; }
    friend CyclotomicValue operator-(CyclotomicValue a, const CyclotomicValue& b) { return a -= b; }
    friend CyclotomicValue operator*(CyclotomicValue a, const CyclotomicValue& b) { return a *= b; }
    friend CyclotomicValue operator*(CyclotomicValue a, const Rational& r) { return a *= r; }
    friend CyclotomicValue operator*(const Rational& r, CyclotomicValue a) { return a *= r; }
    friend CyclotomicValue operator/(CyclotomicValue a, const Rational& r) { return a /= r; }
    CyclotomicValue operator-() const;

    /// zeta -> zeta^{-1}.
    CyclotomicValue conj() const;
    /// zeta -> zeta^a for a coprime to p.
    CyclotomicValue galois(std::int64_t a) const;

    bool operator==(const CyclotomicValue& o) const;
    bool operator!=(const CyclotomicValue& o) const { return !(*this == o); }

    /// Real and imaginary part under zeta = exp(2 pi i / p); display only.
    double approx_real() const;
    double approx_imag() const;

    std::string to_string() const;

private:
    void check_conductor(const CyclotomicValue& o) const;

    std::uint32_t p_ = 0;
    std::vector<Rational> coeffs_;
};

/// {p, coeffs: ["a/b", ...], approx}; approx is the real part under the standard embedding.
nlohmann::ordered_json to_json(const CyclotomicValue& v);

/// Multiplicities of each residue Tr(value) in F_p; the value of the weighted sum is
/// sum_r count[r] zeta^r. Counts merge by addition, so disjoint chunks of a domain
/// can be reduced independently.
class TraceHistogram {
public:
    explicit TraceHistogram(std::uint32_t p) : counts_(p, 0) {}

    void add(std::uint32_t residue, unsigned __int128 weight = 1) { counts_[residue] += weight; }
    TraceHistogram& operator+=(const TraceHistogram& o);
    std::uint32_t conductor() const { return static_cast<std::uint32_t>(counts_.size()); }
    unsigned __int128 total() const;
    const std::vector<unsigned __int128>& counts() const { return counts_; }

    CyclotomicValue value() const;

private:
    std::vector<unsigned __int128> counts_;
};

/// Same as TraceHistogram but with arbitrary-precision weights.
class BigTraceHistogram {
public:
    explicit BigTraceHistogram(std::uint32_t p) : counts_(p, 0) {}
    void add(std::uint32_t residue, const Integer& weight) { counts_[residue] += weight; }
    BigTraceHistogram& operator+=(const BigTraceHistogram& o);
    CyclotomicValue value() const;

private:
    std::vector<Integer> counts_;
};

Integer to_integer(unsigned __int128 v);

/// sum over t in F_{p^k} of psi(Tr(t^2)); p must be an odd prime.
CyclotomicValue gauss_sum(std::uint32_t p, unsigned k);

/// sum over t in F_{p^k} of psi(Tr(t^d)).
CyclotomicValue power_character_sum(unsigned d, std::uint32_t p, unsigned k);

/// gcd(d, p^k - 1): t^d and t^e take every value the same number of times.
unsigned reduced_power(unsigned d, std::uint32_t p, unsigned k);

/// power_character_sum from lower levels: Hasse-Davenport lifting of the Gauss sums of
/// the characters of order dividing e, handled through their elementary symmetric
/// functions so that nothing leaves Q(zeta_p). Used above the enumeration cap.
CyclotomicValue power_character_sum_by_recurrence(unsigned d, std::uint32_t p, unsigned k);

/// sum over x in the domain of zeta^{Tr(value(x))}. `domain` is any range; `value`
/// maps an element to an index of `field`. Chunks of the domain may be summed
/// separately and added.
template <class Range, class ValueFn>
CyclotomicValue twisted_sum(const ff::FieldTable& field, const Range& domain, ValueFn value) {
    TraceHistogram hist(field.p());
    for (const auto& x : domain) hist.add(field.trace(value(x)));
    return hist.value();
}

} // namespace mdt::cyclo
