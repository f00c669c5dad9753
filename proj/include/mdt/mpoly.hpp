#pragma once

#include "mdt/common.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

// Multivariate polynomials with integer coefficients in a fixed number of variables.
// Used to express traces of potentials in matrix entries and Newton power sums
// before they are reduced mod p and summed.

namespace mdt::quiver {

class MPoly {
public:
    using Exponents = std::vector<std::uint16_t>;

    MPoly() = default;
    explicit MPoly(unsigned nvars) : nvars_(nvars) {}
    static MPoly constant(unsigned nvars, const Integer& c);
    static MPoly var(unsigned nvars, unsigned i);

    unsigned nvars() const { return nvars_; }
    const std::map<Exponents, Integer>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    unsigned total_degree() const;
    unsigned degree_in(unsigned v) const;

    MPoly operator+(const MPoly& o) const;
    MPoly operator-(const MPoly& o) const;
    MPoly operator*(const MPoly& o) const;
    MPoly operator*(const Integer& c) const;
    MPoly& operator+=(const MPoly& o);
    bool operator==(const MPoly& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }

    void add_term(const Exponents& e, const Integer& c);

    std::string to_string(const std::vector<std::string>& names) const;

private:
    void check(const MPoly& o) const;

    unsigned nvars_ = 0;
    std::map<Exponents, Integer> terms_;
};

} // namespace mdt::quiver
