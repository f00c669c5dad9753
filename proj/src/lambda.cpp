#include "mdt/lambda.hpp"

#include <sstream>

namespace mdt::lambda {

// ---------------------------------------------------------------------------
// QPoly

QPoly::QPoly(std::vector<Rational> c) : c_(std::move(c)) {
    for (auto& x : c_) x.canonicalize();
    trim();
}

QPoly QPoly::constant(const Rational& c) {
    return QPoly(std::vector<Rational>{c});
}

QPoly QPoly::monomial(const Rational& c, unsigned deg) {
    std::vector<Rational> v(deg + 1, 0);
    v[deg] = c;
    return QPoly(std::move(v));
}

void QPoly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

QPoly QPoly::operator+(const QPoly& o) const {
    std::vector<Rational> r(std::max(c_.size(), o.c_.size()), 0);
    for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
    for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
    return QPoly(std::move(r));
}

QPoly QPoly::operator-(const QPoly& o) const {
    return *this + (-o);
}

QPoly QPoly::operator*(const QPoly& o) const {
    if (is_zero() || o.is_zero()) return {};
    std::vector<Rational> r(c_.size() + o.c_.size() - 1, 0);
    for (std::size_t i = 0; i < c_.size(); ++i)
        for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    return QPoly(std::move(r));
}

QPoly QPoly::operator*(const Rational& r) const {
    if (r == 0) return {};
    std::vector<Rational> v = c_;
    for (auto& x : v) x *= r;
    return QPoly(std::move(v));
}

void QPoly::divmod(const QPoly& o, QPoly& quot, QPoly& rem) const {
    if (o.is_zero()) throw InvalidParameter("polynomial division by zero");
    std::vector<Rational> r = c_;
    std::vector<Rational> qv(c_.size() >= o.c_.size() ? c_.size() - o.c_.size() + 1 : 0, 0);
    const Rational lead_inv = 1 / o.lead();
    for (std::size_t i = r.size(); i-- >= o.c_.size();) {
        if (r[i] == 0) continue;
        const Rational f = r[i] * lead_inv;
        const std::size_t shift = i - (o.c_.size() - 1);
        qv[shift] = f;
        for (std::size_t j = 0; j < o.c_.size(); ++j) r[shift + j] -= f * o.c_[j];
    }
    quot = QPoly(std::move(qv));
    rem = QPoly(std::move(r));
}

QPoly QPoly::gcd(QPoly a, QPoly b) {
    while (!b.is_zero()) {
        QPoly q, r;
        a.divmod(b, q, r);
        a = std::move(b);
        // monic remainders keep the rational coefficients small
        b = r.is_zero() ? std::move(r) : r * (1 / r.lead());
    }
    if (a.is_zero()) return a;
    return a * (1 / a.lead());
}

std::string QPoly::to_string(const std::string& var) const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = c_.size(); i-- > 0;) {
        const Rational& c = c_[i];
        if (c == 0) continue;
        if (first) {
            if (c < 0) os << "-";
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        first = false;
        const Rational a = abs(c);
        if (i == 0) {
            os << a.get_str();
            continue;
        }
        if (a != 1) os << a.get_str() << "*";
        os << var;
        if (i > 1) os << "^" << i;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// RatFunc

RatFunc::RatFunc(const QPoly& num, const QPoly& den) {
    if (den.is_zero()) throw InvalidParameter("rational function with zero denominator");
    if (num.is_zero()) {
        num_ = QPoly();
        den_ = QPoly::constant(1);
        return;
    }
    const QPoly g = QPoly::gcd(num, den);
    QPoly n, d, r;
    num.divmod(g, n, r);
    den.divmod(g, d, r);
    const Rational l = d.lead();
    num_ = n * (1 / l);
    den_ = d * (1 / l);
}

RatFunc RatFunc::x() {
    return {QPoly::monomial(1, 1)};
}

RatFunc RatFunc::x_pow(int e) {
    if (e >= 0) return {QPoly::monomial(1, static_cast<unsigned>(e))};
    return {QPoly::constant(1), QPoly::monomial(1, static_cast<unsigned>(-e))};
}

bool RatFunc::is_constant(Rational* out) const {
    if (num_.degree() > 0 || den_.degree() > 0) return false;
    if (out) *out = num_.is_zero() ? Rational(0) : num_.coeff(0) / den_.coeff(0);
    return true;
}

bool RatFunc::is_even() const {
    for (std::size_t i = 1; i < num_.coeffs().size(); i += 2)
        if (num_.coeffs()[i] != 0) return false;
    for (std::size_t i = 1; i < den_.coeffs().size(); i += 2)
        if (den_.coeffs()[i] != 0) return false;
    return true;
}

RatFunc RatFunc::operator+(const RatFunc& o) const {
    if (num_.is_zero()) return o;
    if (o.num_.is_zero()) return *this;
    if (den_ == o.den_) return {num_ + o.num_, den_};
    // a/b + c/d over lcm(b, d)
    const QPoly g = QPoly::gcd(den_, o.den_);
    QPoly bg, dg, r;
    den_.divmod(g, bg, r);
    o.den_.divmod(g, dg, r);
    return {num_ * dg + o.num_ * bg, bg * o.den_};
}

RatFunc RatFunc::operator-(const RatFunc& o) const {
    return *this + (-o);
}

RatFunc RatFunc::operator*(const RatFunc& o) const {
    if (num_.is_zero() || o.num_.is_zero()) return {};
    // cancel across before multiplying; both factors are already reduced
    const QPoly g1 = QPoly::gcd(num_, o.den_), g2 = QPoly::gcd(o.num_, den_);
    QPoly a, b, c, d, r;
    num_.divmod(g1, a, r);
    o.den_.divmod(g1, d, r);
    o.num_.divmod(g2, c, r);
    den_.divmod(g2, b, r);
    return {a * c, b * d};
}

RatFunc RatFunc::operator/(const RatFunc& o) const {
    if (o.is_zero()) throw InvalidParameter("rational function division by zero");
    return {num_ * o.den_, den_ * o.num_};
}

RatFunc RatFunc::pow(int e) const {
    if (e < 0) return RatFunc(1) / pow(-e);
    RatFunc r(1), b = *this;
    while (e) {
        if (e & 1) r = r * b;
        b = b * b;
        e >>= 1;
    }
    return r;
}

RatFunc RatFunc::compose(const RatFunc& s) const {
    // f(P/Q) = sum f_i P^i Q^{D-i} / Q^D with D the larger degree
    const QPoly& P = s.num_;
    const QPoly& Q = s.den_;
    const int D = std::max(num_.degree(), den_.degree());
    std::vector<QPoly> ppow{QPoly::constant(1)}, qpow{QPoly::constant(1)};
    for (int i = 1; i <= D; ++i) {
        ppow.push_back(ppow.back() * P);
        qpow.push_back(qpow.back() * Q);
    }
    auto lift = [&](const QPoly& f) {
        QPoly acc;
        for (int i = 0; i <= f.degree(); ++i)
            if (f.coeff(i) != 0) acc = acc + ppow[i] * qpow[D - i] * f.coeff(i);
        return acc;
    };
    return {lift(num_), lift(den_)};
}

Rational RatFunc::evaluate_at_L(const Rational& q) const {
    if (!is_even()) throw ParityViolation("odd power of L^{1/2} cannot be evaluated at L = q");
    auto eval = [&](const QPoly& f) {
        Rational acc = 0;
        for (std::size_t i = f.coeffs().size(); i-- > 0;) {
            if (i % 2) continue;
            acc = acc * q + f.coeffs()[i];
        }
        return acc;
    };
    const Rational d = eval(den_);
    if (d == 0) throw InvalidParameter("denominator vanishes at L = " + q.get_str());
    return eval(num_) / d;
}

std::string RatFunc::to_string() const {
    if (den_.degree() == 0) return num_.to_string();
    return "(" + num_.to_string() + ")/(" + den_.to_string() + ")";
}

// ---------------------------------------------------------------------------
// MotiveClass

MotiveClass MotiveClass::symbol(unsigned d) {
    if (d == 0) throw InvalidParameter("symbol <0> is undefined");
    if (d == 1) return zero();
    if (d == 2) return x();
    MotiveClass m;
    m.mono_[d] = RatFunc(1);
    return m;
}

void MotiveClass::normalize() {
    for (auto it = mono_.begin(); it != mono_.end();) {
        if (it->second.is_zero()) it = mono_.erase(it);
        else ++it;
    }
}

MotiveClass MotiveClass::operator+(const MotiveClass& o) const {
    MotiveClass r = *this;
    r.tate_ = r.tate_ + o.tate_;
    for (const auto& [d, c] : o.mono_) r.mono_[d] = r.mono_[d] + c;
    r.normalize();
    return r;
}

MotiveClass MotiveClass::operator-(const MotiveClass& o) const {
    return *this + (-o);
}

MotiveClass MotiveClass::operator*(const MotiveClass& o) const {
    if (!mono_.empty() && !o.mono_.empty())
        throw UnsupportedProduct("product of two symbols <a><b> with a, b >= 3 is not in the Tate span");
    MotiveClass r;
    r.tate_ = tate_ * o.tate_;
    for (const auto& [d, c] : mono_) r.mono_[d] = c * o.tate_;
    for (const auto& [d, c] : o.mono_) r.mono_[d] = c * tate_;
    r.normalize();
    return r;
}

MotiveClass MotiveClass::operator*(const Rational& s) const {
    return *this * MotiveClass(s);
}

std::string MotiveClass::to_string() const {
    std::string s = tate_.to_string();
    for (const auto& [d, c] : mono_) s += " + (" + c.to_string() + ")*<" + std::to_string(d) + ">";
    return s;
}

nlohmann::ordered_json to_json(const MotiveClass& m) {
    nlohmann::ordered_json j;
    j["tate"] = m.tate().to_string();
    nlohmann::ordered_json mono = nlohmann::ordered_json::object();
    for (const auto& [d, c] : m.mono()) mono[std::to_string(d)] = c.to_string();
    j["mono"] = mono;
    return j;
}

MotiveClass translate_muhat(unsigned d) {
    return MotiveClass::one() - MotiveClass::symbol(d);
}

MotiveClass adams(const MotiveClass& a, unsigned m) {
    if (m == 0) throw InvalidParameter("Adams operation index must be positive");
    if (!a.is_tate()) throw PreconditionError("Adams operations on <d>, d >= 3, exist only after realization");
    // psi_m(x) = -(-x)^m
    const RatFunc image = -(RatFunc(-1) * RatFunc::x()).pow(static_cast<int>(m));
    return a.tate().compose(image);
}

MotiveClass sigma_n(const MotiveClass& a, unsigned n) {
    std::vector<MotiveClass> s{MotiveClass::one()};
    for (unsigned j = 1; j <= n; ++j) {
        MotiveClass acc;
        for (unsigned i = 1; i <= j; ++i) acc = acc + adams(a, i) * s[j - i];
        s.push_back(acc * Rational(1, j));
    }
    return s[n];
}

// ---------------------------------------------------------------------------
// AdamsSequence

AdamsSequence::AdamsSequence(std::uint32_t p, std::vector<CyclotomicValue> values)
    : p_(p), values_(std::move(values)) {
    for (const auto& v : values_)
        if (v.conductor() != p) throw InvalidParameter("level values with mixed conductors");
}

AdamsSequence AdamsSequence::constant(std::uint32_t p, const Rational& c, unsigned depth) {
    if (depth == 0) {
        AdamsSequence s;
        s.p_ = p;
        return s;
    }
    return {p, std::vector<CyclotomicValue>(depth, CyclotomicValue(p, c))};
}

const CyclotomicValue& AdamsSequence::level(unsigned k) const {
    if (k == 0 || k > values_.size())
        throw LevelOverflow("level " + std::to_string(k) + " not available (depth " + std::to_string(values_.size()) + ")");
    return values_[k - 1];
}

AdamsSequence AdamsSequence::truncated(unsigned depth) const {
    if (depth > values_.size())
        throw LevelOverflow("cannot extend a sequence of depth " + std::to_string(values_.size()) + " to " +
                            std::to_string(depth));
    AdamsSequence s = *this;
    s.values_.resize(depth);
    return s;
}

bool AdamsSequence::is_zero() const {
    for (const auto& v : values_)
        if (!v.is_zero()) return false;
    return true;
}

void AdamsSequence::check(const AdamsSequence& o) const {
    if (p_ != o.p_) throw InvalidParameter("sequences with different conductors");
}

AdamsSequence AdamsSequence::operator+(const AdamsSequence& o) const {
    check(o);
    AdamsSequence r = truncated(std::min(depth(), o.depth()));
    for (std::size_t i = 0; i < r.values_.size(); ++i) r.values_[i] += o.values_[i];
    return r;
}

AdamsSequence AdamsSequence::operator-(const AdamsSequence& o) const {
    return *this + (-o);
}

AdamsSequence AdamsSequence::operator*(const AdamsSequence& o) const {
    check(o);
    AdamsSequence r = truncated(std::min(depth(), o.depth()));
    for (std::size_t i = 0; i < r.values_.size(); ++i) r.values_[i] *= o.values_[i];
    return r;
}

AdamsSequence AdamsSequence::operator*(const Rational& c) const {
    AdamsSequence r = *this;
    for (auto& v : r.values_) v *= c;
    return r;
}

AdamsSequence AdamsSequence::operator/(const Rational& c) const {
    AdamsSequence r = *this;
    for (auto& v : r.values_) v /= c;
    return r;
}

AdamsSequence adams(const AdamsSequence& s, unsigned m) {
    if (m == 0) throw InvalidParameter("Adams operation index must be positive");
    if (m > s.depth() && s.depth() > 0)
        throw LevelOverflow("psi_" + std::to_string(m) + " needs level " + std::to_string(m) + ", depth is " +
                            std::to_string(s.depth()));
    std::vector<CyclotomicValue> v;
    for (unsigned k = m; k <= s.depth(); k += m) v.push_back(s.level(k));
    AdamsSequence r(s.conductor(), std::move(v));
    return r;
}

AdamsSequence sigma_n(const AdamsSequence& c, unsigned n) {
    if (n == 0) return AdamsSequence::constant(c.conductor(), 1, c.depth());
    const unsigned depth = c.depth() / n;
    if (depth == 0)
        throw LevelOverflow("sigma^" + std::to_string(n) + " needs depth >= " + std::to_string(n) + ", have " +
                            std::to_string(c.depth()));
    std::vector<AdamsSequence> s{AdamsSequence::constant(c.conductor(), 1, depth)};
    for (unsigned j = 1; j <= n; ++j) {
        AdamsSequence acc = AdamsSequence::constant(c.conductor(), 0, depth);
        for (unsigned i = 1; i <= j; ++i) acc = acc + adams(c.truncated(depth * i), i) * s[j - i];
        s.push_back(acc / Rational(j));
    }
    return s[n];
}

// ---------------------------------------------------------------------------
// Realization

namespace {

void check_parity(std::uint32_t p) {
    if (p % 4 != 1)
        throw ParityViolation("odd powers of L^{1/2} realize consistently only for p = 1 mod 4, got p = " +
                              std::to_string(p));
}

// f(g) for g with g^2 = q: even part at q plus g times odd part at q.
std::pair<Rational, Rational> split_at(const QPoly& f, const Rational& q) {
    Rational even = 0, odd = 0;
    Rational qpow = 1;
    for (std::size_t i = 0; i < f.coeffs().size(); i += 2, qpow *= q) even += f.coeffs()[i] * qpow;
    qpow = 1;
    for (std::size_t i = 1; i < f.coeffs().size(); i += 2, qpow *= q) odd += f.coeffs()[i] * qpow;
    return {even, odd};
}

} // namespace

CyclotomicValue realize_tate(const RatFunc& f, std::uint32_t p, unsigned k) {
    const Rational q(zpow(Integer(p), k));
    if (f.is_even()) return CyclotomicValue(p, f.evaluate_at_L(q));
    check_parity(p);
    const CyclotomicValue g = cyclo::gauss_sum(p, k);
    const auto [ne, no] = split_at(f.num(), q);
    const auto [de, dno] = split_at(f.den(), q);
    // 1/(a + b g) = (a - b g)/(a^2 - b^2 q)
    const Rational norm = de * de - dno * dno * q;
    if (norm == 0) throw InvalidParameter("denominator vanishes at level " + std::to_string(k));
    CyclotomicValue num = CyclotomicValue(p, ne) + g * no;
    CyclotomicValue inv = CyclotomicValue(p, de) - g * dno;
    return num * inv / norm;
}

AdamsSequence realize(const MotiveClass& a, std::uint32_t p, unsigned K) {
    if (!is_prime(p)) throw InvalidParameter("p must be prime");
    std::vector<CyclotomicValue> v;
    for (unsigned k = 1; k <= K; ++k) {
        CyclotomicValue s = realize_tate(a.tate(), p, k);
        for (const auto& [d, c] : a.mono()) s += realize_tate(c, p, k) * cyclo::power_character_sum(d, p, k);
        v.push_back(std::move(s));
    }
    return {p, std::move(v)};
}

TruncatedSeries<AdamsSequence> realize(const TruncatedSeries<MotiveClass>& s, std::uint32_t p, unsigned K) {
    TruncatedSeries<AdamsSequence> out;
    out.levels = K;
    for (unsigned j = 0; j < s.coeffs.size(); ++j) out.coeffs.push_back(realize(s.coeffs[j], p, out.depth_of(j)));
    return out;
}

int mobius(unsigned n) {
    if (n == 0) throw InvalidParameter("mobius(0)");
    int result = 1;
    for (unsigned d = 2; d * d <= n; ++d) {
        if (n % d) continue;
        n /= d;
        if (n % d == 0) return 0;
        result = -result;
    }
    if (n > 1) result = -result;
    return result;
}

} // namespace mdt::lambda
