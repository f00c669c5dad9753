#include "mdt/staged_sum.hpp"

#include <cmath>
#include <map>
#include <thread>

namespace mdt::quiver {

StagedSum::StagedSum(std::shared_ptr<const FieldTable> field, const MPoly& poly)
    : field_(std::move(field)), nvars_(poly.nvars()) {
    const unsigned N = nvars_;
    const unsigned p = field_->p();

    // depth-0 slots are the monomials themselves
    std::vector<MPoly::Exponents> keys;
    for (const auto& [e, c] : poly.terms()) {
        const Elem coeff = field_->from_int(static_cast<std::int64_t>(mpz_fdiv_ui(c.get_mpz_t(), p)));
        if (coeff == 0) continue;
        keys.push_back(e);
        initial_.push_back(coeff);
        for (auto x : e) max_degree_ = std::max<unsigned>(max_degree_, x);
    }
    if (keys.empty()) {
        keys.push_back(MPoly::Exponents(N, 0));
        initial_.push_back(0);
    }

    auto is_const = [](const MPoly::Exponents& e) {
        for (auto x : e)
            if (x) return false;
        return true;
    };

    slots_.assign(N + 1, 0);
    parent_.assign(N, {});
    exponent_.assign(N, {});
    const_slot_.assign(N + 1, -1);
    slots_[0] = static_cast<unsigned>(keys.size());
    for (unsigned s = 0; s < keys.size(); ++s)
        if (is_const(keys[s])) const_slot_[0] = static_cast<int>(s);

    for (unsigned i = 0; i < N; ++i) {
        std::map<MPoly::Exponents, unsigned> next;
        std::vector<MPoly::Exponents> next_keys;
        parent_[i].resize(keys.size());
        exponent_[i].resize(keys.size());
        for (unsigned s = 0; s < keys.size(); ++s) {
            MPoly::Exponents k = keys[s];
            exponent_[i][s] = k[i];
            k[i] = 0;
            auto [it, inserted] = next.emplace(k, static_cast<unsigned>(next_keys.size()));
            if (inserted) next_keys.push_back(k);
            parent_[i][s] = it->second;
        }
        keys = std::move(next_keys);
        slots_[i + 1] = static_cast<unsigned>(keys.size());
        for (unsigned s = 0; s < keys.size(); ++s)
            if (is_const(keys[s])) const_slot_[i + 1] = static_cast<int>(s);
    }

    const std::uint32_t q = field_->q();
    pow_.assign(static_cast<std::size_t>(max_degree_ + 1) * q, 0);
    for (std::uint32_t v = 0; v < q; ++v) {
        Elem acc = 1;
        for (unsigned e = 0; e <= max_degree_; ++e) {
            pow_[static_cast<std::size_t>(e) * q + v] = acc;
            acc = field_->mul(acc, v);
        }
    }
}

double StagedSum::points() const {
    return std::pow(static_cast<double>(field_->q()), nvars_);
}

struct StagedSum::Worker {
    const StagedSum& s;
    const SumOptions& opts;
    const FieldTable& F;
    std::vector<std::vector<Elem>> coef;
    std::vector<Elem> vals;
    std::vector<unsigned __int128> qpow;
    cyclo::TraceHistogram hist;

    Worker(const StagedSum& st, const SumOptions& o)
        : s(st), opts(o), F(*st.field_), coef(st.nvars_ + 1), vals(st.nvars_ + 1, 0), qpow(st.nvars_ + 1, 1),
          hist(st.field_->p()) {
        for (unsigned i = 0; i <= s.nvars_; ++i) coef[i].assign(s.slots_[i], 0);
        coef[0] = s.initial_;
        for (unsigned i = 1; i <= s.nvars_; ++i) qpow[i] = qpow[i - 1] * F.q();
    }

    bool filter_pending(unsigned i) const { return opts.filter && i < opts.filter_depth; }

    // Handles the filter and the free-subtree shortcut; true when depth i is settled.
    bool settle(unsigned i) {
        if (opts.filter && i == opts.filter_depth && !opts.filter(vals.data())) return true;
        if (filter_pending(i)) return false;
        const auto& c = coef[i];
        const int cs = s.const_slot_[i];
        for (unsigned k = 0; k < c.size(); ++k)
            if (static_cast<int>(k) != cs && c[k] != 0) return false;
        hist.add(F.trace(cs >= 0 ? c[cs] : 0), qpow[s.nvars_ - i]);
        return true;
    }

    void substitute(unsigned i, Elem v) {
        auto& next = coef[i + 1];
        std::fill(next.begin(), next.end(), 0);
        const auto& c = coef[i];
        const auto& par = s.parent_[i];
        const auto& ex = s.exponent_[i];
        const std::uint32_t q = F.q();
        for (unsigned k = 0; k < c.size(); ++k) {
            if (c[k] == 0) continue;
            const Elem pw = s.pow_[static_cast<std::size_t>(ex[k]) * q + v];
            if (pw == 0) continue;
            next[par[k]] = F.add(next[par[k]], F.mul(c[k], pw));
        }
    }

    void last(unsigned i) {
        const auto& c = coef[i];
        const auto& ex = s.exponent_[i];
        const std::uint32_t q = F.q();
        for (Elem v = 0; v < q; ++v) {
            Elem acc = 0;
            for (unsigned k = 0; k < c.size(); ++k) {
                if (c[k] == 0) continue;
                acc = F.add(acc, F.mul(c[k], s.pow_[static_cast<std::size_t>(ex[k]) * q + v]));
            }
            hist.add(F.trace(acc));
        }
    }

    void dfs(unsigned i) {
        if (settle(i)) return;
        if (i + 1 == s.nvars_ && (!opts.filter || opts.filter_depth <= i)) {
            last(i);
            return;
        }
        for (Elem v = 0; v < F.q(); ++v) {
            vals[i] = v;
            substitute(i, v);
            dfs(i + 1);
        }
    }
};

cyclo::TraceHistogram StagedSum::run(const SumOptions& opts) const {
    if (points() > opts.budget)
        throw BudgetExceeded("exponential sum over " + std::to_string(field_->q()) + "^" + std::to_string(nvars_) +
                             " points exceeds the budget");
    if (points() > 1e36) throw BudgetExceeded("point count overflows the accumulator");
    const unsigned threads = std::max(1u, opts.threads);
    if (threads == 1 || nvars_ < 2 || (opts.filter && opts.filter_depth <= 1)) {
        Worker w(*this, opts);
        w.dfs(0);
        return w.hist;
    }
    Worker root(*this, opts);
    if (root.settle(0)) return root.hist;
    // split the first variable across workers; exact sums merge in any order
    std::vector<Worker> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) workers.emplace_back(*this, opts);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            auto& w = workers[t];
            for (Elem v = t; v < field_->q(); v += threads) {
                w.vals[0] = v;
                w.substitute(0, v);
                w.dfs(1);
            }
        });
    for (auto& th : pool) th.join();
    cyclo::TraceHistogram total(field_->p());
    for (auto& w : workers) total += w.hist;
    return total;
}

} // namespace mdt::quiver
