#pragma once

#include "mdt/common.hpp"

#include <cstdint>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

// Prime fields F_p and their extensions F_{p^k}, with the absolute trace to F_p.
//
// Two representations coexist. FieldTower / ExtFieldElement are the reference
// implementation (dense coefficient vectors, schoolbook multiplication, reduction
// by the modulus). FieldTable is the indexed form used by every counting loop:
// an element is the integer sum c_i p^i of its coefficient vector, and the ring
// operations are table lookups built once from the tower.

namespace mdt::ff {

using Residue = std::uint32_t;

/// Polynomial over F_p, coefficients low degree first, no trailing zeros
/// (the zero polynomial is empty).
using PolyFp = std::vector<Residue>;

void poly_trim(PolyFp& a);
PolyFp poly_add(const PolyFp& a, const PolyFp& b, Residue p);
PolyFp poly_sub(const PolyFp& a, const PolyFp& b, Residue p);
PolyFp poly_mul(const PolyFp& a, const PolyFp& b, Residue p);
PolyFp poly_mod(const PolyFp& a, const PolyFp& m, Residue p);
PolyFp poly_gcd(PolyFp a, PolyFp b, Residue p);
PolyFp poly_powmod(const PolyFp& base, const Integer& exp, const PolyFp& m, Residue p);

/// Rabin's test: x^{p^k} = x mod f, and gcd(f, x^{p^{k/r}} - x) = 1 for every prime r | k.
bool is_irreducible(const PolyFp& f, Residue p);

/// Smallest monic irreducible of degree k over F_p, where candidates are ordered by
/// the integer c_0 + c_1 p + ... + c_{k-1} p^{k-1} of their non-leading coefficients.
/// k = 1 returns t.
PolyFp find_irreducible(Residue p, unsigned k);

std::string poly_to_string(const PolyFp& f, const std::string& var = "t");

class FieldTower {
public:
    FieldTower(Residue p, unsigned k);

    /// Shared, memoised tower for (p, k).
    static std::shared_ptr<const FieldTower> get(Residue p, unsigned k);

    Residue p() const { return p_; }
    unsigned k() const { return k_; }
    std::uint64_t q() const { return q_; }
    const PolyFp& modulus() const { return modulus_; }

    /// Product of two coefficient vectors of length k, reduced by the modulus.
    std::vector<Residue> mul(const std::vector<Residue>& a, const std::vector<Residue>& b) const;

private:
    Residue p_;
    unsigned k_;
    std::uint64_t q_;
    PolyFp modulus_;
};

class ExtFieldElement {
public:
    ExtFieldElement(std::shared_ptr<const FieldTower> tower, std::vector<Residue> coeffs);
    ExtFieldElement(std::shared_ptr<const FieldTower> tower, std::uint64_t index);

    static ExtFieldElement zero(std::shared_ptr<const FieldTower> tower);
    static ExtFieldElement one(std::shared_ptr<const FieldTower> tower);
    /// The class of t, i.e. a root of the modulus.
    static ExtFieldElement generator(std::shared_ptr<const FieldTower> tower);

    const FieldTower& tower() const { return *tower_; }
    const std::shared_ptr<const FieldTower>& tower_ptr() const { return tower_; }
    const std::vector<Residue>& coeffs() const { return coeffs_; }
    std::uint64_t index() const;
    bool is_zero() const;

    ExtFieldElement operator+(const ExtFieldElement& o) const;
    ExtFieldElement operator-(const ExtFieldElement& o) const;
    ExtFieldElement operator-() const;
    ExtFieldElement operator*(const ExtFieldElement& o) const;
    ExtFieldElement pow(const Integer& e) const;
    ExtFieldElement inverse() const;
    ExtFieldElement frobenius() const;

    bool operator==(const ExtFieldElement& o) const { return coeffs_ == o.coeffs_; }
    bool operator!=(const ExtFieldElement& o) const { return !(*this == o); }

private:
    void check_same_tower(const ExtFieldElement& o) const;

    std::shared_ptr<const FieldTower> tower_;
    std::vector<Residue> coeffs_;
};

/// Tr(x) = x + x^p + ... + x^{p^{k-1}}.
Residue trace(const ExtFieldElement& x);

/// Trace of the F_p-linear map y -> x*y in the polynomial basis.
Residue matrix_trace(const ExtFieldElement& x);

/// Exhaustive range over the elements of a tower in coefficient-vector order
/// (index order). Sub-ranges partition the element set for parallel consumers.
class ElementRange {
public:
    class iterator {
    public:
        using iterator_category = std::forward_iterator_tag;
        using value_type = ExtFieldElement;
        using difference_type = std::ptrdiff_t;
        using pointer = void;
        using reference = ExtFieldElement;

        iterator(const std::shared_ptr<const FieldTower>* tower, std::uint64_t index)
            : tower_(tower), index_(index) {}
        ExtFieldElement operator*() const { return {*tower_, index_}; }
        iterator& operator++() {
            ++index_;
            return *this;
        }
        iterator operator++(int) {
            auto tmp = *this;
            ++index_;
            return tmp;
        }
        bool operator==(const iterator& o) const { return index_ == o.index_; }
        bool operator!=(const iterator& o) const { return index_ != o.index_; }

    private:
        const std::shared_ptr<const FieldTower>* tower_;
        std::uint64_t index_;
    };

    ElementRange(std::shared_ptr<const FieldTower> tower, std::uint64_t first, std::uint64_t last);

    iterator begin() const { return {&tower_, first_}; }
    iterator end() const { return {&tower_, last_}; }
    std::uint64_t size() const { return last_ - first_; }
    ElementRange slice(std::uint64_t first, std::uint64_t last) const;

private:
    std::shared_ptr<const FieldTower> tower_;
    std::uint64_t first_;
    std::uint64_t last_;
};

/// All p^k elements; throws BudgetExceeded when p^k exceeds the budget.
ElementRange enumerate(std::shared_ptr<const FieldTower> tower, double budget = kDefaultBudget);

/// Largest field the indexed tables are built for.
inline constexpr std::uint64_t kMaxTableField = std::uint64_t{1} << 22;

class FieldTable {
public:
    using Elem = std::uint32_t;

    explicit FieldTable(std::shared_ptr<const FieldTower> tower);

    /// Shared, memoised table for F_{p^k}.
    static std::shared_ptr<const FieldTable> get(Residue p, unsigned k);

    Residue p() const { return p_; }
    unsigned k() const { return k_; }
    std::uint32_t q() const { return q_; }
    const FieldTower& tower() const { return *tower_; }
    const std::shared_ptr<const FieldTower>& tower_ptr() const { return tower_; }

    Elem zero() const { return 0; }
    Elem one() const { return 1; }

    /// Image of an integer in the prime subfield.
    Elem from_int(std::int64_t v) const {
        auto r = v % static_cast<std::int64_t>(p_);
        return static_cast<Elem>(r < 0 ? r + p_ : r);
    }

    Elem add(Elem a, Elem b) const {
        if (!add_.empty()) return add_[static_cast<std::size_t>(a) * q_ + b];
        if (a == 0) return b;
        if (b == 0) return a;
        const std::uint32_t la = log_[a];
        const std::uint32_t lb = log_[b];
        const std::uint32_t d = lb >= la ? lb - la : lb + order_ - la;
        const std::int64_t z = zech_[d];
        if (z < 0) return 0;
        return exp_[la + static_cast<std::uint32_t>(z)];
    }
    Elem neg(Elem a) const { return neg_[a]; }
    Elem sub(Elem a, Elem b) const { return add(a, neg_[b]); }
    Elem mul(Elem a, Elem b) const {
        if (!mul_.empty()) return mul_[static_cast<std::size_t>(a) * q_ + b];
        if (a == 0 || b == 0) return 0;
        return exp_[log_[a] + log_[b]];
    }
    Elem inv(Elem a) const;
    Elem pow(Elem a, std::uint64_t e) const;
    Residue trace(Elem a) const { return trace_[a]; }

    /// Discrete logarithm to the table's primitive element (a != 0).
    std::uint32_t log(Elem a) const { return log_[a]; }
    Elem exp(std::uint64_t e) const { return exp_[e % order_]; }
    Elem primitive() const { return exp_[1 % order_]; }

    ExtFieldElement element(Elem a) const { return {tower_, a}; }
    Elem index_of(const ExtFieldElement& x) const { return static_cast<Elem>(x.index()); }

private:
    std::shared_ptr<const FieldTower> tower_;
    Residue p_;
    unsigned k_;
    std::uint32_t q_;
    std::uint32_t order_; // q - 1
    std::vector<std::uint32_t> exp_; // length 2 * order_
    std::vector<std::uint32_t> log_;
    std::vector<std::int64_t> zech_;
    std::vector<Elem> neg_;
    std::vector<Residue> trace_;
    std::vector<Elem> add_; // full tables for small fields
    std::vector<Elem> mul_;
};

} // namespace mdt::ff
