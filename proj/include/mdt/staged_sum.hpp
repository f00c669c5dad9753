#pragma once

#include "mdt/cyclo.hpp"
#include "mdt/ffield.hpp"
#include "mdt/mpoly.hpp"

#include <functional>
#include <memory>
#include <vector>

// Exhaustive exponential sum  sum_{v in F_q^N} psi(Tr P(v))  for a polynomial P with
// integer coefficients, by depth-first substitution of the variables in index order.
//
// The polynomial is compiled once into per-depth monomial slots: after fixing
// v_0..v_{i-1} the remaining polynomial is a vector of coefficients indexed by the
// distinct monomials in v_i..v_{N-1}. Substituting v_i folds each slot into its
// parent slot with the factor v_i^e. The last variable is summed in a tight loop, and
// once no variable is left in the remaining polynomial the rest of the subtree
// contributes q^{remaining} copies of the constant.

namespace mdt::quiver {

using ff::FieldTable;
using Elem = FieldTable::Elem;

struct SumOptions {
    double budget = kDefaultBudget;
    unsigned threads = 1;
    /// When set, called once the first `filter_depth` variables are fixed, with a
    /// pointer to their values; subtrees where it returns false are skipped.
    std::function<bool(const Elem*)> filter;
    unsigned filter_depth = 0;
};

class StagedSum {
public:
    StagedSum(std::shared_ptr<const FieldTable> field, const MPoly& poly);

    unsigned nvars() const { return nvars_; }
    /// Points the sum ranges over, q^N (as a double, for budget checks).
    double points() const;

    cyclo::TraceHistogram run(const SumOptions& opts = {}) const;

private:
    struct Worker;

    std::shared_ptr<const FieldTable> field_;
    unsigned nvars_;
    unsigned max_degree_ = 0;
    // slots_[i]: number of distinct monomials in v_i..v_{N-1}
    std::vector<unsigned> slots_;
    // for depth i < N: parent slot at depth i+1 and exponent of v_i, per slot
    std::vector<std::vector<unsigned>> parent_;
    std::vector<std::vector<unsigned>> exponent_;
    // constant-slot index per depth, and whether the depth has non-constant slots
    std::vector<int> const_slot_;
    std::vector<Elem> initial_;
    // pow_[e * q + v] = v^e
    std::vector<Elem> pow_;
};

} // namespace mdt::quiver
