#include "mdt/cyclo.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <numbers>
#include <sstream>
#include <tuple>

namespace mdt::cyclo {

namespace {

void check_conductor_prime(std::uint32_t p) {
    if (!is_prime(p)) throw InvalidParameter("conductor " + std::to_string(p) + " is not prime");
}

std::size_t dim_of(std::uint32_t p) {
    return p - 1;
}

} // namespace

CyclotomicValue::CyclotomicValue(std::uint32_t p) : p_(p), coeffs_(dim_of(p), 0) {
    check_conductor_prime(p);
}

CyclotomicValue::CyclotomicValue(std::uint32_t p, const Rational& constant) : CyclotomicValue(p) {
    coeffs_[0] = constant;
}

CyclotomicValue CyclotomicValue::from_powers(std::uint32_t p, const std::vector<Rational>& by_power) {
    CyclotomicValue v(p);
    std::vector<Rational> folded(p, 0);
    for (std::size_t i = 0; i < by_power.size(); ++i) {
        Rational c = by_power[i];
        c.canonicalize();
        folded[i % p] += c;
    }
    // zeta^{p-1} = -(zeta^0 + ... + zeta^{p-2})
    for (std::size_t i = 0; i + 1 < p; ++i) v.coeffs_[i] = folded[i] - folded[p - 1];
    return v;
}

CyclotomicValue CyclotomicValue::zeta_power(std::uint32_t p, std::int64_t e) {
    check_conductor_prime(p);
    std::int64_t r = e % static_cast<std::int64_t>(p);
    if (r < 0) r += p;
    std::vector<Rational> c(p, 0);
    c[static_cast<std::size_t>(r)] = 1;
    return from_powers(p, c);
}

bool CyclotomicValue::is_zero() const {
    for (const auto& c : coeffs_)
        if (c != 0) return false;
    return true;
}

bool CyclotomicValue::is_rational(Rational* out) const {
    for (std::size_t i = 1; i < coeffs_.size(); ++i)
        if (coeffs_[i] != 0) return false;
    if (out) *out = coeffs_.empty() ? Rational(0) : coeffs_[0];
    return true;
}

bool CyclotomicValue::has_integer_coeffs() const {
    for (const auto& c : coeffs_)
        if (c.get_den() != 1) return false;
    return true;
}

void CyclotomicValue::check_conductor(const CyclotomicValue& o) const {
    if (p_ != o.p_) throw InvalidParameter("cyclotomic values with different conductors");
}

CyclotomicValue& CyclotomicValue::operator+=(const CyclotomicValue& o) {
    check_conductor(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
}

CyclotomicValue& CyclotomicValue::operator-=(const CyclotomicValue& o) {
    check_conductor(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
}

CyclotomicValue& CyclotomicValue::operator*=(const CyclotomicValue& o) {
    check_conductor(o);
    std::vector<Rational> prod(p_, 0);
    Rational t;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i] == 0) continue;
        for (std::size_t j = 0; j < o.coeffs_.size(); ++j) {
            if (o.coeffs_[j] == 0) continue;
            t = coeffs_[i] * o.coeffs_[j];
            prod[(i + j) % p_] += t;
        }
    }
    *this = from_powers(p_, prod);
    return *this;
}

CyclotomicValue& CyclotomicValue::operator*=(const Rational& r) {
    for (auto& c : coeffs_) c *= r;
    return *this;
}

CyclotomicValue& CyclotomicValue::operator/=(const Rational& r) {
    if (r == 0) throw InvalidParameter("division by zero");
    for (auto& c : coeffs_) c /= r;
    return *this;
}

CyclotomicValue CyclotomicValue::operator-() const {
    CyclotomicValue v = *this;
    for (auto& c : v.coeffs_) c = -c;
    return v;
}

CyclotomicValue CyclotomicValue::galois(std::int64_t a) const {
    std::int64_t r = a % static_cast<std::int64_t>(p_);
    if (r < 0) r += p_;
    if (r == 0) throw InvalidParameter("galois exponent must be coprime to the conductor");
    std::vector<Rational> c(p_, 0);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) c[(i * static_cast<std::size_t>(r)) % p_] += coeffs_[i];
    return from_powers(p_, c);
}

CyclotomicValue CyclotomicValue::conj() const {
    return galois(-1);
}

bool CyclotomicValue::operator==(const CyclotomicValue& o) const {
    return p_ == o.p_ && coeffs_ == o.coeffs_;
}

double CyclotomicValue::approx_real() const {
    double s = 0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        s += coeffs_[i].get_d() * std::cos(2 * std::numbers::pi * static_cast<double>(i) / p_);
    return s;
}

double CyclotomicValue::approx_imag() const {
    double s = 0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        s += coeffs_[i].get_d() * std::sin(2 * std::numbers::pi * static_cast<double>(i) / p_);
    return s;
}

std::string CyclotomicValue::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        const auto& c = coeffs_[i];
        if (c == 0) continue;
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        first = false;
        const Rational a = abs(c);
        if (i == 0) {
            os << a.get_str();
        } else {
            if (a != 1) os << a.get_str() << "*";
            os << "z";
            if (i > 1) os << "^" << i;
        }
    }
    if (first) os << "0";
    return os.str();
}

nlohmann::ordered_json to_json(const CyclotomicValue& v) {
    nlohmann::ordered_json j;
    j["p"] = v.conductor();
    auto coeffs = nlohmann::ordered_json::array();
    for (const auto& c : v.coeffs()) coeffs.push_back(rational_string(c));
    j["coeffs"] = coeffs;
    j["approx"] = v.approx_real();
    return j;
}

// ---------------------------------------------------------------------------

Integer to_integer(unsigned __int128 v) {
    const auto hi = static_cast<std::uint64_t>(v >> 64);
    const auto lo = static_cast<std::uint64_t>(v);
    Integer r = hi;
    r <<= 64;
    r += Integer(lo);
    return r;
}

TraceHistogram& TraceHistogram::operator+=(const TraceHistogram& o) {
    if (o.counts_.size() != counts_.size()) throw InvalidParameter("histograms with different conductors");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += o.counts_[i];
    return *this;
}

unsigned __int128 TraceHistogram::total() const {
    unsigned __int128 t = 0;
    for (auto c : counts_) t += c;
    return t;
}

CyclotomicValue TraceHistogram::value() const {
    std::vector<Rational> c(counts_.size());
    for (std::size_t i = 0; i < counts_.size(); ++i) c[i] = Rational(to_integer(counts_[i]));
    return CyclotomicValue::from_powers(conductor(), c);
}

BigTraceHistogram& BigTraceHistogram::operator+=(const BigTraceHistogram& o) {
    if (o.counts_.size() != counts_.size()) throw InvalidParameter("histograms with different conductors");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += o.counts_[i];
    return *this;
}

CyclotomicValue BigTraceHistogram::value() const {
    std::vector<Rational> c(counts_.size());
    for (std::size_t i = 0; i < counts_.size(); ++i) c[i] = Rational(counts_[i]);
    return CyclotomicValue::from_powers(static_cast<std::uint32_t>(counts_.size()), c);
}

// ---------------------------------------------------------------------------

namespace {

std::mutex sum_cache_mu;
std::map<std::tuple<unsigned, std::uint32_t, unsigned>, CyclotomicValue> sum_cache;

CyclotomicValue enumerate_power_sum(unsigned d, std::uint32_t p, unsigned k) {
    const auto field = ff::FieldTable::get(p, k);
    TraceHistogram hist(p);
    hist.add(field->trace(field->pow(0, d)));
    const std::uint32_t order = field->q() - 1;
    for (std::uint32_t e = 0; e < order; ++e) {
        const std::uint64_t l = (std::uint64_t{e} * d) % order;
        hist.add(field->trace(field->exp(l)));
    }
    return hist.value();
}

std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = r * b % m;
        b = b * b % m;
        e >>= 1;
    }
    return r;
}

// Largest field enumerated directly; above it the level recurrence takes over.
constexpr std::uint64_t kEnumerateCap = std::uint64_t{1} << 20;

bool within_cap(std::uint32_t p, unsigned k) {
    std::uint64_t q = 1;
    for (unsigned i = 0; i < k; ++i) {
        q *= p;
        if (q > kEnumerateCap) return false;
    }
    return true;
}

} // namespace

unsigned reduced_power(unsigned d, std::uint32_t p, unsigned k) {
    // The multiset {t^d} equals {t^e} for e = gcd(d, q - 1).
    const std::uint64_t qm1 = (pow_mod(p, k, d) + d - 1) % d;
    return std::gcd(d, static_cast<unsigned>(qm1));
}

CyclotomicValue power_character_sum_by_recurrence(unsigned d, std::uint32_t p, unsigned k) {
    const unsigned e = reduced_power(d, p, k);
    if (e == 1) return CyclotomicValue(p);
    unsigned f = 1;
    while (pow_mod(p, f, e) != 1) ++f;
    const unsigned r = k / f;
    // S_{f j} = -sum_chi (-G_f(chi))^j over the e - 1 nontrivial characters of order
    // dividing e; the first e - 1 power sums fix the elementary symmetric functions.
    const unsigned m = e - 1;
    if (r <= m) return enumerate_power_sum(e, p, k);
    std::vector<CyclotomicValue> power(m + 1, CyclotomicValue(p));
    for (unsigned j = 1; j <= m; ++j) power[j] = -power_character_sum(e, p, f * j);
    std::vector<CyclotomicValue> elem(m + 1, CyclotomicValue(p));
    elem[0] = CyclotomicValue(p, 1);
    for (unsigned j = 1; j <= m; ++j) {
        CyclotomicValue acc(p);
        for (unsigned i = 1; i <= j; ++i) {
            const auto term = elem[j - i] * power[i];
            if (i % 2) acc += term;
            else acc -= term;
        }
        elem[j] = acc / Rational(j);
    }
    std::vector<CyclotomicValue> window(power.begin() + 1, power.end());
    for (unsigned j = m + 1; j <= r; ++j) {
        CyclotomicValue next(p);
        for (unsigned i = 1; i <= m; ++i) {
            const auto term = elem[i] * window[m - i];
            if (i % 2) next += term;
            else next -= term;
        }
        window.erase(window.begin());
        window.push_back(next);
    }
    return -window.back();
}

namespace {

CyclotomicValue compute_power_sum(unsigned d, std::uint32_t p, unsigned k) {
    const unsigned e = reduced_power(d, p, k);
    if (e == 1) return CyclotomicValue(p);
    if (within_cap(p, k)) return enumerate_power_sum(e, p, k);
    return power_character_sum_by_recurrence(e, p, k);
}

} // namespace

CyclotomicValue power_character_sum(unsigned d, std::uint32_t p, unsigned k) {
    if (d == 0) throw InvalidParameter("power must be positive");
    if (k == 0) throw InvalidParameter("level must be positive");
    if (!is_prime(p)) throw InvalidParameter("p must be prime");
    {
        std::lock_guard lock(sum_cache_mu);
        auto it = sum_cache.find({d, p, k});
        if (it != sum_cache.end()) return it->second;
    }
    CyclotomicValue v = compute_power_sum(d, p, k);
    std::lock_guard lock(sum_cache_mu);
    sum_cache.emplace(std::make_tuple(d, p, k), v);
    return v;
}

CyclotomicValue gauss_sum(std::uint32_t p, unsigned k) {
    if (p % 2 == 0 || !is_prime(p)) throw InvalidParameter("gauss_sum needs an odd prime, got " + std::to_string(p));
    return power_character_sum(2, p, k);
}

} // namespace mdt::cyclo
