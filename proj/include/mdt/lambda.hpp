#pragma once

#include "mdt/common.hpp"
#include "mdt/cyclo.hpp"

#include <json.hpp>

#include <climits>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

// The ring of monodromic Tate motives in two forms: a symbolic layer (rational
// functions in x = L^{1/2} plus the symbols <d> = [A^1 -> t^d]) and its realization
// as a sequence of exponential sums S_1, ..., S_K over F_{p^k}. Power series over
// either carry sigma-operations and the plethystic EXP / LOG.

namespace mdt::lambda {

using cyclo::CyclotomicValue;

/// Polynomial over Q, low degree first, no trailing zeros.
class QPoly {
public:
    QPoly() = default;
    explicit QPoly(std::vector<Rational> c);
    static QPoly constant(const Rational& c);
    static QPoly monomial(const Rational& c, unsigned deg);

    const std::vector<Rational>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    Rational lead() const { return c_.empty() ? Rational(0) : c_.back(); }
    Rational coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }

    QPoly operator+(const QPoly& o) const;
    QPoly operator-(const QPoly& o) const;
    QPoly operator*(const QPoly& o) const;
    QPoly operator*(const Rational& r) const;
    QPoly operator-() const { return *this * Rational(-1); }
    bool operator==(const QPoly& o) const { return c_ == o.c_; }

    /// Quotient and remainder; o nonzero.
    void divmod(const QPoly& o, QPoly& quot, QPoly& rem) const;
    static QPoly gcd(QPoly a, QPoly b);

    std::string to_string(const std::string& var = "x") const;

private:
    void trim();
    std::vector<Rational> c_;
};

/// Reduced fraction num/den of polynomials in x, den monic.
class RatFunc {
public:
    RatFunc() : num_(), den_(QPoly::constant(1)) {}
    RatFunc(const Rational& c) : num_(QPoly::constant(c)), den_(QPoly::constant(1)) {}
    RatFunc(const QPoly& num, const QPoly& den = QPoly::constant(1));
    static RatFunc x();
    /// x^e, e may be negative.
    static RatFunc x_pow(int e);

    const QPoly& num() const { return num_; }
    const QPoly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_constant(Rational* out = nullptr) const;
    /// True when only even powers of x occur in numerator and denominator.
    bool is_even() const;

    RatFunc operator+(const RatFunc& o) const;
    RatFunc operator-(const RatFunc& o) const;
    RatFunc operator*(const RatFunc& o) const;
    RatFunc operator/(const RatFunc& o) const;
    RatFunc operator-() const { return {-num_, den_}; }
    RatFunc pow(int e) const;
    bool operator==(const RatFunc& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const RatFunc& o) const { return !(*this == o); }

    /// f(s(x)).
    RatFunc compose(const RatFunc& s) const;

    /// Value at L = x^2 = q of an even function.
    Rational evaluate_at_L(const Rational& q) const;

    std::string to_string() const;

private:
    QPoly num_;
    QPoly den_;
};

/// A class tate(x) + sum_{d >= 3} mono[d](x) <d>. <1> = 0 and <2> = x are folded in.
class MotiveClass {
public:
    MotiveClass() = default;
    MotiveClass(const RatFunc& tate) : tate_(tate) {}
    MotiveClass(const Rational& c) : tate_(c) {}

    static MotiveClass zero() { return {}; }
    static MotiveClass one() { return Rational(1); }
    /// L^{1/2}.
    static MotiveClass x() { return RatFunc::x(); }
    static MotiveClass L() { return RatFunc::x_pow(2); }
    /// [A^1 -> t^d].
    static MotiveClass symbol(unsigned d);

    const RatFunc& tate() const { return tate_; }
    const std::map<unsigned, RatFunc>& mono() const { return mono_; }
    bool is_tate() const { return mono_.empty(); }
    bool is_zero() const { return tate_.is_zero() && mono_.empty(); }

    MotiveClass operator+(const MotiveClass& o) const;
    MotiveClass operator-(const MotiveClass& o) const;
    /// Throws UnsupportedProduct when both factors carry symbols <d>, d >= 3.
    MotiveClass operator*(const MotiveClass& o) const;
    MotiveClass operator*(const Rational& r) const;
    MotiveClass operator-() const { return *this * Rational(-1); }
    bool operator==(const MotiveClass& o) const { return tate_ == o.tate_ && mono_ == o.mono_; }
    bool operator!=(const MotiveClass& o) const { return !(*this == o); }

    std::string to_string() const;

private:
    void normalize();

    RatFunc tate_;
    std::map<unsigned, RatFunc> mono_;
};

nlohmann::ordered_json to_json(const MotiveClass& m);

/// Image of [mu_d] under the translation to monodromic classes: 1 - <d>.
MotiveClass translate_muhat(unsigned d);

/// psi_m on Tate classes: x -> -(-x)^m. Symbols <d> have no symbolic Adams image.
MotiveClass adams(const MotiveClass& a, unsigned m);

/// Coefficient of t^n in exp(sum_k psi_k(a) t^k / k).
MotiveClass sigma_n(const MotiveClass& a, unsigned n);

/// (S_1, ..., S_K): S_k realizes a class as an exponential sum over F_{p^k}.
class AdamsSequence {
public:
    AdamsSequence() = default;
    AdamsSequence(std::uint32_t p, std::vector<CyclotomicValue> values);
    static AdamsSequence constant(std::uint32_t p, const Rational& c, unsigned depth);

    std::uint32_t conductor() const { return p_; }
    unsigned depth() const { return static_cast<unsigned>(values_.size()); }
    /// S_k, k >= 1; LevelOverflow beyond the depth.
    const CyclotomicValue& level(unsigned k) const;
    const std::vector<CyclotomicValue>& values() const { return values_; }

    AdamsSequence truncated(unsigned depth) const;
    bool is_zero() const;

    AdamsSequence operator+(const AdamsSequence& o) const;
    AdamsSequence operator-(const AdamsSequence& o) const;
    AdamsSequence operator*(const AdamsSequence& o) const;
    AdamsSequence operator*(const Rational& r) const;
    AdamsSequence operator/(const Rational& r) const;
    AdamsSequence operator-() const { return *this * Rational(-1); }
    bool operator==(const AdamsSequence& o) const { return p_ == o.p_ && values_ == o.values_; }
    bool operator!=(const AdamsSequence& o) const { return !(*this == o); }

private:
    void check(const AdamsSequence& o) const;
    std::uint32_t p_ = 0;
    std::vector<CyclotomicValue> values_;
};

/// x -> gauss_sum(p, k), <d> -> power_character_sum(d, p, k), L -> q, levels 1..K.
/// Odd powers of x need p = 1 mod 4 (ParityViolation otherwise).
AdamsSequence realize(const MotiveClass& a, std::uint32_t p, unsigned K);

/// Value of a Tate rational function at level k.
CyclotomicValue realize_tate(const RatFunc& f, std::uint32_t p, unsigned k);

/// (S_m, S_2m, ...).
AdamsSequence adams(const AdamsSequence& s, unsigned m);

/// Newton: n sigma^n = sum_{i=1}^n psi_i sigma^{n-i}. Depth of the result is depth/n.
AdamsSequence sigma_n(const AdamsSequence& c, unsigned n);

// ---------------------------------------------------------------------------
// Coefficient traits used by the series code.

inline unsigned coeff_depth(const MotiveClass&) { return UINT_MAX; }
inline unsigned coeff_depth(const AdamsSequence& a) { return a.depth(); }
inline MotiveClass truncate_to(const MotiveClass& a, unsigned) { return a; }
inline AdamsSequence truncate_to(const AdamsSequence& a, unsigned d) { return a.truncated(d); }
inline MotiveClass zero_like(const MotiveClass&, unsigned) { return MotiveClass::zero(); }
inline AdamsSequence zero_like(const AdamsSequence& a, unsigned d) {
    return AdamsSequence::constant(a.conductor(), 0, d);
}
inline MotiveClass one_like(const MotiveClass&, unsigned) { return MotiveClass::one(); }
inline AdamsSequence one_like(const AdamsSequence& a, unsigned d) {
    return AdamsSequence::constant(a.conductor(), 1, d);
}
inline bool coeff_is_zero(const MotiveClass& a) { return a.is_zero(); }
inline bool coeff_is_zero(const AdamsSequence& a) { return a.is_zero(); }
inline bool coeff_is_one(const MotiveClass& a) { return a == MotiveClass::one(); }
inline bool coeff_is_one(const AdamsSequence& a) {
    return a == AdamsSequence::constant(a.conductor(), 1, a.depth());
}

/// c_0 + c_1 T + ... + c_N T^N. For realized coefficients `levels` is the budget K:
/// coefficient T^j carries exactly floor(K / j) levels (T^0 carries K). levels = 0
/// means no level bookkeeping (symbolic coefficients).
template <class C>
struct TruncatedSeries {
    std::vector<C> coeffs;
    unsigned levels = 0;

    unsigned order() const { return static_cast<unsigned>(coeffs.size()) - 1; }
    unsigned depth_of(unsigned j) const {
        if (levels == 0) return UINT_MAX;
        return j == 0 ? levels : levels / j;
    }
    const C& operator[](unsigned j) const { return coeffs.at(j); }
};

int mobius(unsigned n);

namespace detail {

template <class C>
void check_levels(const TruncatedSeries<C>& s) {
    if (s.coeffs.empty()) throw InvalidParameter("empty series");
    for (unsigned j = 1; j < s.coeffs.size(); ++j)
        if (coeff_depth(s.coeffs[j]) < s.depth_of(j))
            throw LevelOverflow("coefficient T^" + std::to_string(j) + " carries " +
                                std::to_string(coeff_depth(s.coeffs[j])) + " levels, needs " +
                                std::to_string(s.depth_of(j)));
}

template <class C>
C adams_of(const C& c, unsigned m, unsigned depth) {
    if (depth == 0) return zero_like(c, 0);
    if constexpr (std::is_same_v<C, AdamsSequence>) return adams(c.truncated(depth * m), m);
    else return adams(c, m);
}

} // namespace detail

/// EXP(S) = exp(sum_m psi_m(S(T^m)) / m); S must have zero constant term.
template <class C>
TruncatedSeries<C> pleth_exp(const TruncatedSeries<C>& s) {
    detail::check_levels(s);
    if (!coeff_is_zero(s.coeffs[0])) throw ConstantTermError("EXP needs a zero constant term");
    const unsigned N = s.order();
    // P_n = sum_{m | n} psi_m(c_{n/m}) / m
    std::vector<C> P(N + 1, zero_like(s.coeffs[0], 0));
    for (unsigned n = 1; n <= N; ++n) {
        const unsigned dn = s.depth_of(n);
        C acc = zero_like(s.coeffs[0], dn == UINT_MAX ? 0 : dn);
        for (unsigned m = 1; m <= n; ++m) {
            if (n % m) continue;
            acc = acc + detail::adams_of(s.coeffs[n / m], m, dn) * Rational(1, m);
        }
        P[n] = truncate_to(acc, dn);
    }
    TruncatedSeries<C> out;
    out.levels = s.levels;
    out.coeffs.push_back(one_like(s.coeffs[0], s.depth_of(0) == UINT_MAX ? 0 : s.depth_of(0)));
    for (unsigned n = 1; n <= N; ++n) {
        const unsigned dn = s.depth_of(n);
        C acc = zero_like(s.coeffs[0], dn == UINT_MAX ? 0 : dn);
        for (unsigned i = 1; i <= n; ++i)
            acc = acc + truncate_to(P[i], dn) * truncate_to(out.coeffs[n - i], dn) * Rational(i);
        out.coeffs.push_back(truncate_to(acc * Rational(1, n), dn));
    }
    return out;
}

/// LOG(Z) = sum_m mu(m)/m psi_m(log Z); Z must have constant term 1.
template <class C>
TruncatedSeries<C> pleth_log(const TruncatedSeries<C>& z) {
    detail::check_levels(z);
    if (!coeff_is_one(z.coeffs[0])) throw ConstantTermError("LOG needs constant term 1");
    const unsigned N = z.order();
    // ordinary log: n L_n = n Z_n - sum_{i<n} i L_i Z_{n-i}
    std::vector<C> L(N + 1, zero_like(z.coeffs[0], 0));
    for (unsigned n = 1; n <= N; ++n) {
        const unsigned dn = z.depth_of(n);
        C acc = truncate_to(z.coeffs[n], dn) * Rational(n);
        for (unsigned i = 1; i < n; ++i)
            acc = acc - truncate_to(L[i], dn) * truncate_to(z.coeffs[n - i], dn) * Rational(i);
        L[n] = truncate_to(acc * Rational(1, n), dn);
    }
    TruncatedSeries<C> out;
    out.levels = z.levels;
    out.coeffs.push_back(zero_like(z.coeffs[0], z.depth_of(0) == UINT_MAX ? 0 : z.depth_of(0)));
    for (unsigned n = 1; n <= N; ++n) {
        const unsigned dn = z.depth_of(n);
        C acc = zero_like(z.coeffs[0], dn == UINT_MAX ? 0 : dn);
        for (unsigned m = 1; m <= n; ++m) {
            if (n % m || mobius(m) == 0) continue;
            acc = acc + detail::adams_of(L[n / m], m, dn) * Rational(mobius(m), m);
        }
        out.coeffs.push_back(truncate_to(acc, dn));
    }
    return out;
}

/// Realizes a symbolic series with budget K.
TruncatedSeries<AdamsSequence> realize(const TruncatedSeries<MotiveClass>& s, std::uint32_t p, unsigned K);

} // namespace mdt::lambda
