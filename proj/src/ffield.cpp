#include "mdt/ffield.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>

namespace mdt::ff {

namespace {

Residue inv_mod(Residue a, Residue p) {
    // Fermat; p is prime and a != 0.
    std::uint64_t r = 1, b = a % p;
    std::uint64_t e = p - 2;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return static_cast<Residue>(r);
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

void check_prime(Residue p) {
    if (!is_prime(p)) throw InvalidParameter("characteristic " + std::to_string(p) + " is not prime");
}

} // namespace

void poly_trim(PolyFp& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

PolyFp poly_add(const PolyFp& a, const PolyFp& b, Residue p) {
    PolyFp r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = (r[i] + b[i]) % p;
    poly_trim(r);
    return r;
}

PolyFp poly_sub(const PolyFp& a, const PolyFp& b, Residue p) {
    PolyFp r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = (r[i] + p - b[i]) % p;
    poly_trim(r);
    return r;
}

PolyFp poly_mul(const PolyFp& a, const PolyFp& b, Residue p) {
    if (a.empty() || b.empty()) return {};
    std::vector<std::uint64_t> acc(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) acc[i + j] = (acc[i + j] + std::uint64_t{a[i]} * b[j]) % p;
    }
    PolyFp r(acc.begin(), acc.end());
    poly_trim(r);
    return r;
}

PolyFp poly_mod(const PolyFp& a, const PolyFp& m, Residue p) {
    if (m.empty()) throw InvalidParameter("polynomial division by zero");
    PolyFp r = a;
    poly_trim(r);
    const std::size_t dm = m.size() - 1;
    const Residue lead_inv = inv_mod(m.back(), p);
    while (r.size() > dm) {
        const std::size_t shift = r.size() - 1 - dm;
        const std::uint64_t c = std::uint64_t{r.back()} * lead_inv % p;
        for (std::size_t i = 0; i <= dm; ++i)
            r[shift + i] = static_cast<Residue>((r[shift + i] + (p - c) * m[i]) % p);
        poly_trim(r);
    }
    return r;
}

PolyFp poly_gcd(PolyFp a, PolyFp b, Residue p) {
    poly_trim(a);
    poly_trim(b);
    while (!b.empty()) {
        PolyFp r = poly_mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        const Residue li = inv_mod(a.back(), p);
        for (auto& c : a) c = static_cast<Residue>(std::uint64_t{c} * li % p);
    }
    return a;
}

PolyFp poly_powmod(const PolyFp& base, const Integer& exp, const PolyFp& m, Residue p) {
    PolyFp result{1};
    result = poly_mod(result, m, p);
    PolyFp b = poly_mod(base, m, p);
    const std::size_t bits = mpz_sizeinbase(exp.get_mpz_t(), 2);
    for (std::size_t i = bits; i-- > 0;) {
        result = poly_mod(poly_mul(result, result, p), m, p);
        if (mpz_tstbit(exp.get_mpz_t(), i)) result = poly_mod(poly_mul(result, b, p), m, p);
    }
    return result;
}

bool is_irreducible(const PolyFp& f_in, Residue p) {
    PolyFp f = f_in;
    poly_trim(f);
    if (f.size() < 2) return false;
    const unsigned k = static_cast<unsigned>(f.size() - 1);
    if (k == 1) return true;
    const PolyFp x{0, 1};
    const Integer pz{p};
    if (poly_powmod(x, zpow(pz, k), f, p) != poly_mod(x, f, p)) return false;
    for (auto r : prime_factors(k)) {
        const unsigned j = k / static_cast<unsigned>(r);
        PolyFp h = poly_sub(poly_powmod(x, zpow(pz, j), f, p), x, p);
        if (poly_gcd(f, h, p).size() != 1) return false;
    }
    return true;
}

PolyFp find_irreducible(Residue p, unsigned k) {
    check_prime(p);
    if (k == 0) throw InvalidParameter("extension degree must be positive");
    if (k == 1) return PolyFp{0, 1};
    const std::uint64_t count = ipow(p, k);
    PolyFp f(k + 1, 0);
    f[k] = 1;
    for (std::uint64_t code = 0; code < count; ++code) {
        std::uint64_t c = code;
        for (unsigned i = 0; i < k; ++i) {
            f[i] = static_cast<Residue>(c % p);
            c /= p;
        }
        if (f[0] == 0) continue;
        if (is_irreducible(f, p)) return f;
    }
    throw Error("no irreducible polynomial found"); // unreachable
}

std::string poly_to_string(const PolyFp& f, const std::string& var) {
    if (f.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = f.size(); i-- > 0;) {
        if (f[i] == 0) continue;
        if (!first) os << " + ";
        first = false;
        if (i == 0) {
            os << f[i];
        } else {
            if (f[i] != 1) os << f[i] << "*";
            os << var;
            if (i > 1) os << "^" << i;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------

FieldTower::FieldTower(Residue p, unsigned k) : p_(p), k_(k) {
    check_prime(p);
    if (k == 0) throw InvalidParameter("extension degree must be positive");
    q_ = ipow(p, k);
    modulus_ = find_irreducible(p, k);
}

std::shared_ptr<const FieldTower> FieldTower::get(Residue p, unsigned k) {
    static std::mutex mu;
    static std::map<std::pair<Residue, unsigned>, std::shared_ptr<const FieldTower>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[{p, k}];
    if (!slot) slot = std::make_shared<const FieldTower>(p, k);
    return slot;
}

std::vector<Residue> FieldTower::mul(const std::vector<Residue>& a, const std::vector<Residue>& b) const {
    PolyFp pa(a.begin(), a.end()), pb(b.begin(), b.end());
    poly_trim(pa);
    poly_trim(pb);
    PolyFp r = poly_mod(poly_mul(pa, pb, p_), modulus_, p_);
    r.resize(k_, 0);
    return r;
}

// ---------------------------------------------------------------------------

ExtFieldElement::ExtFieldElement(std::shared_ptr<const FieldTower> tower, std::vector<Residue> coeffs)
    : tower_(std::move(tower)), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != tower_->k()) throw InvalidParameter("coefficient vector has wrong length");
    for (auto& c : coeffs_) c %= tower_->p();
}

ExtFieldElement::ExtFieldElement(std::shared_ptr<const FieldTower> tower, std::uint64_t index)
    : tower_(std::move(tower)), coeffs_(tower_->k(), 0) {
    if (index >= tower_->q()) throw InvalidParameter("element index out of range");
    for (auto& c : coeffs_) {
        c = static_cast<Residue>(index % tower_->p());
        index /= tower_->p();
    }
}

ExtFieldElement ExtFieldElement::zero(std::shared_ptr<const FieldTower> tower) {
    return {std::move(tower), std::uint64_t{0}};
}

ExtFieldElement ExtFieldElement::one(std::shared_ptr<const FieldTower> tower) {
    return {std::move(tower), std::uint64_t{1}};
}

ExtFieldElement ExtFieldElement::generator(std::shared_ptr<const FieldTower> tower) {
    std::vector<Residue> c(tower->k(), 0);
    if (tower->k() == 1) {
        c[0] = 0; // root of t
    } else {
        c[1] = 1;
    }
    return {std::move(tower), std::move(c)};
}

std::uint64_t ExtFieldElement::index() const {
    std::uint64_t idx = 0;
    for (std::size_t i = coeffs_.size(); i-- > 0;) idx = idx * tower_->p() + coeffs_[i];
    return idx;
}

bool ExtFieldElement::is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](Residue c) { return c == 0; });
}

void ExtFieldElement::check_same_tower(const ExtFieldElement& o) const {
    if (tower_ != o.tower_ && (tower_->p() != o.tower_->p() || tower_->modulus() != o.tower_->modulus()))
        throw InvalidParameter("elements belong to different towers");
}

ExtFieldElement ExtFieldElement::operator+(const ExtFieldElement& o) const {
    check_same_tower(o);
    std::vector<Residue> r(coeffs_.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = (coeffs_[i] + o.coeffs_[i]) % tower_->p();
    return {tower_, std::move(r)};
}

ExtFieldElement ExtFieldElement::operator-(const ExtFieldElement& o) const {
    check_same_tower(o);
    std::vector<Residue> r(coeffs_.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = (coeffs_[i] + tower_->p() - o.coeffs_[i]) % tower_->p();
    return {tower_, std::move(r)};
}

ExtFieldElement ExtFieldElement::operator-() const {
    return zero(tower_) - *this;
}

ExtFieldElement ExtFieldElement::operator*(const ExtFieldElement& o) const {
    check_same_tower(o);
    return {tower_, tower_->mul(coeffs_, o.coeffs_)};
}

ExtFieldElement ExtFieldElement::pow(const Integer& e) const {
    if (e < 0) return inverse().pow(-e);
    ExtFieldElement result = one(tower_);
    const std::size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
    for (std::size_t i = bits; i-- > 0;) {
        result = result * result;
        if (mpz_tstbit(e.get_mpz_t(), i)) result = result * *this;
    }
    return result;
}

ExtFieldElement ExtFieldElement::inverse() const {
    if (is_zero()) throw InvalidParameter("zero has no inverse");
    return pow(Integer{tower_->q()} - 2);
}

ExtFieldElement ExtFieldElement::frobenius() const {
    return pow(Integer{tower_->p()});
}

Residue trace(const ExtFieldElement& x) {
    ExtFieldElement acc = ExtFieldElement::zero(x.tower_ptr());
    ExtFieldElement y = x;
    for (unsigned i = 0; i < x.tower().k(); ++i) {
        acc = acc + y;
        y = y.frobenius();
    }
    for (std::size_t i = 1; i < acc.coeffs().size(); ++i)
        if (acc.coeffs()[i] != 0) throw Error("trace left the prime field");
    return acc.coeffs()[0];
}

Residue matrix_trace(const ExtFieldElement& x) {
    const auto& tower = x.tower_ptr();
    const unsigned k = tower->k();
    std::uint64_t tr = 0;
    for (unsigned j = 0; j < k; ++j) {
        std::vector<Residue> basis(k, 0);
        basis[j] = 1;
        ExtFieldElement col = x * ExtFieldElement(tower, std::move(basis));
        tr += col.coeffs()[j];
    }
    return static_cast<Residue>(tr % tower->p());
}

// ---------------------------------------------------------------------------

ElementRange::ElementRange(std::shared_ptr<const FieldTower> tower, std::uint64_t first, std::uint64_t last)
    : tower_(std::move(tower)), first_(first), last_(last) {
    if (first_ > last_ || last_ > tower_->q()) throw InvalidParameter("element range out of bounds");
}

ElementRange ElementRange::slice(std::uint64_t first, std::uint64_t last) const {
    return {tower_, first_ + first, first_ + last};
}

ElementRange enumerate(std::shared_ptr<const FieldTower> tower, double budget) {
    if (static_cast<double>(tower->q()) > budget)
        throw BudgetExceeded("field of size " + std::to_string(tower->q()) + " exceeds the enumeration budget");
    const auto q = tower->q();
    return {std::move(tower), 0, q};
}

// ---------------------------------------------------------------------------

FieldTable::FieldTable(std::shared_ptr<const FieldTower> tower)
    : tower_(std::move(tower)), p_(tower_->p()), k_(tower_->k()) {
    if (tower_->q() > kMaxTableField)
        throw BudgetExceeded("field of size " + std::to_string(tower_->q()) + " is too large for indexed arithmetic");
    q_ = static_cast<std::uint32_t>(tower_->q());
    order_ = q_ - 1;

    // Primitive element: smallest index whose order is q - 1.
    const auto factors = prime_factors(order_);
    ExtFieldElement gen = ExtFieldElement::one(tower_);
    for (std::uint64_t idx = 1; idx < q_; ++idx) {
        ExtFieldElement cand(tower_, idx);
        bool primitive = true;
        for (auto r : factors) {
            if (cand.pow(Integer{order_ / r}) == ExtFieldElement::one(tower_)) {
                primitive = false;
                break;
            }
        }
        if (primitive) {
            gen = cand;
            break;
        }
    }

    exp_.assign(2 * std::size_t{order_} + 1, 0);
    log_.assign(q_, 0);
    {
        ExtFieldElement cur = ExtFieldElement::one(tower_);
        for (std::uint32_t e = 0; e < order_; ++e) {
            const auto idx = static_cast<std::uint32_t>(cur.index());
            exp_[e] = idx;
            log_[idx] = e;
            cur = cur * gen;
        }
        for (std::uint32_t e = order_; e < exp_.size(); ++e) exp_[e] = exp_[e - order_];
    }

    // Negation and "+1" act digitwise on the index.
    neg_.assign(q_, 0);
    for (std::uint32_t a = 0; a < q_; ++a) {
        std::uint32_t x = a, pw = 1, r = 0;
        for (unsigned i = 0; i < k_; ++i) {
            const std::uint32_t d = x % p_;
            x /= p_;
            r += ((p_ - d) % p_) * pw;
            pw *= p_;
        }
        neg_[a] = r;
    }
    auto plus_one = [this](std::uint32_t a) { return (a % p_ == p_ - 1) ? a - (p_ - 1) : a + 1; };
    zech_.assign(order_, -1);
    for (std::uint32_t m = 0; m < order_; ++m) {
        const std::uint32_t s = plus_one(exp_[m]);
        zech_[m] = s == 0 ? -1 : static_cast<std::int64_t>(log_[s]);
    }

    // Trace is F_p-linear: tabulate Tr(t^i), then combine digits.
    std::vector<Residue> basis_trace(k_);
    for (unsigned i = 0; i < k_; ++i) {
        std::vector<Residue> c(k_, 0);
        c[i] = 1;
        basis_trace[i] = ff::trace(ExtFieldElement(tower_, std::move(c)));
    }
    trace_.assign(q_, 0);
    for (std::uint32_t a = 0; a < q_; ++a) {
        std::uint32_t x = a;
        std::uint64_t t = 0;
        for (unsigned i = 0; i < k_; ++i) {
            t += std::uint64_t{x % p_} * basis_trace[i];
            x /= p_;
        }
        trace_[a] = static_cast<Residue>(t % p_);
    }

    if (q_ <= 1024) {
        FieldTable& self = *this;
        std::vector<Elem> add(std::size_t{q_} * q_), mul(std::size_t{q_} * q_);
        for (std::uint32_t a = 0; a < q_; ++a)
            for (std::uint32_t b = 0; b < q_; ++b) {
                add[std::size_t{a} * q_ + b] = self.add(a, b);
                mul[std::size_t{a} * q_ + b] = self.mul(a, b);
            }
        add_ = std::move(add);
        mul_ = std::move(mul);
    }
}

std::shared_ptr<const FieldTable> FieldTable::get(Residue p, unsigned k) {
    static std::mutex mu;
    static std::map<std::pair<Residue, unsigned>, std::shared_ptr<const FieldTable>> cache;
    std::shared_ptr<const FieldTower> tower = FieldTower::get(p, k);
    std::lock_guard lock(mu);
    auto& slot = cache[{p, k}];
    if (!slot) slot = std::make_shared<const FieldTable>(tower);
    return slot;
}

FieldTable::Elem FieldTable::inv(Elem a) const {
    if (a == 0) throw InvalidParameter("zero has no inverse");
    return exp_[(order_ - log_[a]) % order_];
}

FieldTable::Elem FieldTable::pow(Elem a, std::uint64_t e) const {
    if (e == 0) return 1;
    if (a == 0) return 0;
    const std::uint64_t l = (std::uint64_t{log_[a]} * (e % order_)) % order_;
    return exp_[l];
}

} // namespace mdt::ff
