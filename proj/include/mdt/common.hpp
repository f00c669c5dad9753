#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mdt {

using Integer = mpz_class;
using Rational = mpq_class;

/// Base of every error the library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// An enumeration would visit more points than the configured cap allows.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

/// A realization was asked for a level it does not carry.
class LevelOverflow : public Error {
public:
    using Error::Error;
};

/// Product of two monodromic symbols <a><b> with a, b >= 3.
class UnsupportedProduct : public Error {
public:
    using Error::Error;
};

/// Realizing an odd power of L^{1/2} needs p = 1 mod 4.
class ParityViolation : public Error {
public:
    using Error::Error;
};

class ConstantTermError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Default cap on the number of points any single enumeration may visit.
inline constexpr double kDefaultBudget = 1e10;

bool is_prime(std::uint64_t n);

/// Integer power; overflow of 64 bits is an InvalidParameter.
std::uint64_t ipow(std::uint64_t base, unsigned exp);

Integer zpow(const Integer& base, unsigned exp);

/// Canonical "a/b" string of a rational (denominator always printed).
std::string rational_string(const Rational& r);

} // namespace mdt
