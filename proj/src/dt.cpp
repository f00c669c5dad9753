#include "mdt/dt.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <map>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

namespace mdt::dt {

using lambda::MotiveClass;
using lambda::RatFunc;
using quiver::FieldTable;
using quiver::Matrix;
using Elem = FieldTable::Elem;
using json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <class Fn>
void guarded(CheckReport& r, Fn fn) {
    try {
        fn();
    } catch (const BudgetExceeded& e) {
        r.mark_budget_exceeded(e.what());
    }
}

Integer qpow(std::uint32_t p, unsigned k) {
    return zpow(Integer(p), k);
}

CyclotomicValue gauss(std::uint32_t p, unsigned k) {
    return cyclo::gauss_sum(p, k);
}

void require_prime(std::uint32_t p) {
    if (!is_prime(p)) throw InvalidParameter("p = " + std::to_string(p) + " is not prime");
}

void require_one_mod_four(std::uint32_t p) {
    require_prime(p);
    if (p % 4 != 1) throw ParityViolation("p = " + std::to_string(p) + " is not 1 mod 4");
}

void require_small_n(unsigned nmax, std::uint32_t p) {
    if (nmax >= p) throw InvalidParameter("nmax must be below p");
}

Elem elem_of(const FieldTable& F, const Integer& c) {
    return F.from_int(static_cast<std::int64_t>(mpz_fdiv_ui(c.get_mpz_t(), F.p())));
}

// A polynomial with coefficients reduced into a fixed field, for pointwise evaluation.
struct CompiledPoly {
    std::vector<std::pair<Elem, MPoly::Exponents>> terms;

    CompiledPoly(const FieldTable& F, const MPoly& g) {
        for (const auto& [e, c] : g.terms()) {
            const Elem x = elem_of(F, c);
            if (x) terms.emplace_back(x, e);
        }
    }

    Elem eval(const FieldTable& F, const std::vector<Elem>& v) const {
        Elem acc = 0;
        for (const auto& [c, e] : terms) {
            Elem t = c;
            for (std::size_t i = 0; i < e.size() && t; ++i)
                if (e[i]) t = F.mul(t, F.pow(v[i], e[i]));
            acc = F.add(acc, t);
        }
        return acc;
    }
};

} // namespace

// ---------------------------------------------------------------------------
// CheckReport

void CheckReport::add_row(unsigned n, unsigned k, const CyclotomicValue& lhs, const CyclotomicValue& rhs, double ms) {
    rows_.push_back({n, k, lhs, rhs, lhs == rhs, ms});
}

void CheckReport::add_assertion(const std::string& what, unsigned n, unsigned k, bool holds) {
    if (!params_.contains("assertions")) params_["assertions"] = json::array();
    params_["assertions"].push_back({{"what", what}, {"n", n}, {"k", k}, {"holds", holds}});
    assertions_hold_ = assertions_hold_ && holds;
}

void CheckReport::mark_budget_exceeded(const std::string& message) {
    budget_error_ = message;
    params_["partial"] = true;
    params_["error"] = message;
}

bool CheckReport::pass() const {
    if (budget_error_ || rows_.empty() || !assertions_hold_) return false;
    return std::all_of(rows_.begin(), rows_.end(), [](const CheckRow& r) { return r.equal; });
}

json CheckReport::to_json(bool timing) const {
    json rows = json::array();
    for (const auto& r : rows_) {
        json row;
        row["n"] = r.n;
        row["k"] = r.k;
        row["lhs"] = cyclo::to_json(r.lhs);
        row["rhs"] = cyclo::to_json(r.rhs);
        row["equal"] = r.equal;
        if (timing) row["ms"] = std::round(r.ms * 1000.0) / 1000.0;
        else row["ms"] = 0;
        rows.push_back(std::move(row));
    }
    json out;
    out["check"] = check_;
    out["params"] = params_;
    out["rows"] = std::move(rows);
    out["pass"] = pass();
    return out;
}

std::string CheckReport::to_csv() const {
    std::ostringstream os;
    os << std::setprecision(12);
    os << "n,k,lhs,rhs,lhs_exact,rhs_exact,equal\n";
    for (const auto& r : rows_) {
        os << r.n << ',' << r.k << ',' << r.lhs.approx_real() << ',' << r.rhs.approx_real() << ','
           << (r.lhs.is_rational() ? 1 : 0) << ',' << (r.rhs.is_rational() ? 1 : 0) << ',' << (r.equal ? 1 : 0)
           << '\n';
    }
    return os.str();
}

std::string CheckReport::to_pretty() const {
    std::vector<std::array<std::string, 5>> cells;
    cells.push_back({"n", "k", "lhs", "rhs", "equal"});
    for (const auto& r : rows_)
        cells.push_back({std::to_string(r.n), std::to_string(r.k), r.lhs.to_string(), r.rhs.to_string(),
                         r.equal ? "yes" : "NO"});
    std::array<std::size_t, 5> width{};
    for (const auto& row : cells)
        for (std::size_t i = 0; i < 5; ++i) width[i] = std::max(width[i], row[i].size());
    std::ostringstream os;
    os << check_ << "  " << params_.dump() << "\n";
    for (std::size_t r = 0; r < cells.size(); ++r) {
        for (std::size_t i = 0; i < 5; ++i) {
            os << std::left << std::setw(static_cast<int>(width[i])) << cells[r][i];
            os << (i + 1 < 5 ? " | " : "\n");
        }
        if (r == 0) {
            for (std::size_t i = 0; i < 5; ++i) os << std::string(width[i], '-') << (i + 1 < 5 ? "-+-" : "\n");
        }
    }
    os << "pass: " << (pass() ? "yes" : "no") << "\n";
    return os.str();
}

std::string CheckReport::format(const std::string& fmt, bool timing) const {
    if (fmt == "json") return to_json(timing).dump(2) + "\n";
    if (fmt == "csv") return to_csv();
    if (fmt == "pretty") return to_pretty();
    throw InvalidParameter("unknown format " + fmt);
}

// ---------------------------------------------------------------------------
// Polynomial parsing

namespace {

struct PolyParser {
    struct Token {
        char kind; // 'n' number, 'v' identifier, or the operator character
        std::string text;
    };
    std::vector<Token> toks;
    std::size_t pos = 0;
    std::vector<std::string> names;
    unsigned N = 0;

    explicit PolyParser(const std::string& s) {
        std::size_t i = 0;
        while (i < s.size()) {
            const char c = s[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t j = i;
                while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
                toks.push_back({'n', s.substr(i, j - i)});
                i = j;
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t j = i;
                while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
                toks.push_back({'v', s.substr(i, j - i)});
                if (std::find(names.begin(), names.end(), toks.back().text) == names.end())
                    names.push_back(toks.back().text);
                i = j;
            } else if (std::string("+-*^()").find(c) != std::string::npos) {
                toks.push_back({c, std::string(1, c)});
                ++i;
            } else {
                throw InvalidParameter(std::string("unexpected character '") + c + "' in polynomial");
            }
        }
        N = static_cast<unsigned>(names.size());
    }

    bool peek(char k) const { return pos < toks.size() && toks[pos].kind == k; }
    const Token& next() {
        if (pos >= toks.size()) throw InvalidParameter("polynomial ends unexpectedly");
        return toks[pos++];
    }

    MPoly expr() {
        MPoly acc = term();
        while (peek('+') || peek('-')) {
            const bool minus = next().kind == '-';
            MPoly t = term();
            acc = minus ? acc - t : acc + t;
        }
        return acc;
    }
    MPoly term() {
        MPoly acc = unary();
        while (peek('*')) {
            next();
            acc = acc * unary();
        }
        return acc;
    }
    MPoly unary() {
        if (peek('-')) {
            next();
            return unary() * Integer(-1);
        }
        if (peek('+')) {
            next();
            return unary();
        }
        return power();
    }
    MPoly power() {
        MPoly base = atom();
        if (!peek('^')) return base;
        next();
        const auto& e = next();
        if (e.kind != 'n') throw InvalidParameter("exponent must be a nonnegative integer");
        const unsigned long ex = std::stoul(e.text);
        if (ex > 1000) throw InvalidParameter("exponent too large");
        MPoly r = MPoly::constant(N, 1);
        for (unsigned long i = 0; i < ex; ++i) r = r * base;
        return r;
    }
    MPoly atom() {
        const auto& t = next();
        if (t.kind == 'n') return MPoly::constant(N, Integer(t.text));
        if (t.kind == 'v') {
            const auto idx = std::find(names.begin(), names.end(), t.text) - names.begin();
            return MPoly::var(N, static_cast<unsigned>(idx));
        }
        if (t.kind == '(') {
            MPoly e = expr();
            if (!peek(')')) throw InvalidParameter("missing ')' in polynomial");
            next();
            return e;
        }
        throw InvalidParameter("unexpected '" + t.text + "' in polynomial");
    }
};

} // namespace

WeightedFunction WeightedFunction::parse(const std::string& text, const std::vector<std::string>& fiber_vars) {
    PolyParser parser(text);
    if (parser.toks.empty()) throw InvalidParameter("empty polynomial");
    WeightedFunction f;
    f.g = parser.expr();
    if (parser.pos != parser.toks.size()) throw InvalidParameter("trailing input in polynomial");
    f.names = parser.names;
    f.fiber.assign(f.names.size(), false);
    for (const auto& v : fiber_vars) {
        const auto it = std::find(f.names.begin(), f.names.end(), v);
        if (it == f.names.end()) throw InvalidParameter("fiber variable " + v + " does not occur");
        f.fiber[it - f.names.begin()] = true;
    }
    if (fiber_vars.empty())
        for (std::size_t i = 0; i < f.names.size(); ++i) f.fiber[i] = f.names[i][0] == 't';
    return f;
}

WeightedFunction WeightedFunction::from_potential(const Potential& w, unsigned n, const std::string& fiber_arrow) {
    const auto q = quiver::QuiverSpec::loops({"a", "b", "c"});
    const quiver::DimVector dim{{"1", n}};
    const auto layout = quiver::VarLayout::row_major(q, dim);
    WeightedFunction f;
    f.g = quiver::expand_trace(q, w, dim, layout);
    f.names = layout.names();
    f.fiber.assign(f.names.size(), false);
    if (!fiber_arrow.empty())
        for (unsigned r = 0; r < n; ++r)
            for (unsigned c = 0; c < n; ++c) f.fiber[layout.var(fiber_arrow, r, c)] = true;
    return f;
}

unsigned WeightedFunction::base_count() const {
    return static_cast<unsigned>(std::count(fiber.begin(), fiber.end(), false));
}

unsigned WeightedFunction::fiber_count() const {
    return static_cast<unsigned>(std::count(fiber.begin(), fiber.end(), true));
}

// ---------------------------------------------------------------------------
// Weights: feasibility of A w = 1, w >= 0 by the two-phase simplex (phase I only),
// Bland's rule, exact rationals.

WeightResult check_weights(const WeightedFunction& f) {
    if (f.g.is_zero()) throw InvalidParameter("weights of the zero polynomial");
    const unsigned r = static_cast<unsigned>(f.names.size());
    std::vector<MPoly::Exponents> rows;
    for (const auto& [e, c] : f.g.terms()) rows.push_back(e);
    const unsigned m = static_cast<unsigned>(rows.size());
    const unsigned cols = r + m; // variables then artificials
    std::vector<std::vector<Rational>> T(m, std::vector<Rational>(cols + 1, 0));
    for (unsigned i = 0; i < m; ++i) {
        for (unsigned j = 0; j < r; ++j) T[i][j] = rows[i][j];
        T[i][r + i] = 1;
        T[i][cols] = 1;
    }
    std::vector<unsigned> basis(m);
    std::iota(basis.begin(), basis.end(), r);
    // reduced costs of the phase I objective sum of artificials
    std::vector<Rational> cost(cols + 1, 0);
    for (unsigned i = 0; i < m; ++i)
        for (unsigned j = 0; j <= cols; ++j)
            if (j < r || j == cols) cost[j] -= T[i][j];
    while (true) {
        unsigned enter = cols;
        for (unsigned j = 0; j < cols; ++j)
            if (cost[j] < 0) {
                enter = j;
                break;
            }
        if (enter == cols) break;
        unsigned leave = m;
        Rational best;
        for (unsigned i = 0; i < m; ++i) {
            if (T[i][enter] <= 0) continue;
            const Rational ratio = T[i][cols] / T[i][enter];
            if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave == m) break; // unbounded direction cannot occur in phase I
        const Rational piv = T[leave][enter];
        for (auto& x : T[leave]) x /= piv;
        for (unsigned i = 0; i < m; ++i) {
            if (i == leave || T[i][enter] == 0) continue;
            const Rational fct = T[i][enter];
            for (unsigned j = 0; j <= cols; ++j) T[i][j] -= fct * T[leave][j];
        }
        if (cost[enter] != 0) {
            const Rational fct = cost[enter];
            for (unsigned j = 0; j <= cols; ++j) cost[j] -= fct * T[leave][j];
        }
        basis[leave] = enter;
    }
    WeightResult res;
    if (cost[cols] != 0) return res; // positive artificial sum left
    std::vector<Rational> w(r, 0);
    for (unsigned i = 0; i < m; ++i)
        if (basis[i] < r) w[basis[i]] = T[i][cols];
    Integer den = 1;
    for (const auto& x : w) den = lcm(den, Integer(x.get_den()));
    std::vector<Integer> iw(r);
    Integer g = den;
    for (unsigned j = 0; j < r; ++j) {
        const Rational scaled = w[j] * den;
        iw[j] = scaled.get_num();
        g = gcd(g, iw[j]);
    }
    for (auto& x : iw) x /= g;
    res.feasible = true;
    res.weights = iw;
    res.degree = den / g;
    return res;
}

bool has_weights(const WeightedFunction& f, const std::vector<Integer>& weights, const Integer& degree) {
    if (weights.size() != f.names.size()) throw InvalidParameter("one weight per variable expected");
    if (degree <= 0) return false;
    for (const auto& w : weights)
        if (w < 0) return false;
    for (const auto& [e, c] : f.g.terms()) {
        Integer s = 0;
        for (std::size_t i = 0; i < e.size(); ++i) s += weights[i] * e[i];
        if (s != degree) return false;
    }
    return true;
}

namespace {

json weights_json(const WeightedFunction& f, const WeightResult& w) {
    json j;
    j["feasible"] = w.feasible;
    if (w.feasible) {
        json ws = json::object();
        for (std::size_t i = 0; i < f.names.size(); ++i) ws[f.names[i]] = w.weights[i].get_str();
        j["weights"] = ws;
        j["degree"] = w.degree.get_str();
    }
    return j;
}

} // namespace

CheckReport check_dimred(const WeightedFunction& f, std::uint32_t p, unsigned kmax, const CountOptions& opts) {
    require_prime(p);
    CheckReport rep("dimred");
    std::vector<std::string> fib;
    for (std::size_t i = 0; i < f.names.size(); ++i)
        if (f.fiber[i]) fib.push_back(f.names[i]);
    const auto weights = check_weights(f);
    rep.params()["poly"] = f.to_string();
    rep.params()["fiber"] = fib;
    rep.params()["p"] = p;
    rep.params()["kmax"] = kmax;
    rep.params()["weights"] = weights_json(f, weights);

    // g = g_0 + sum_j g_j t_j, with g_0, g_j in the base variables
    const unsigned N = static_cast<unsigned>(f.names.size());
    std::vector<unsigned> base_index(N, 0), fiber_index(N, 0);
    unsigned r = 0, m = 0;
    for (unsigned i = 0; i < N; ++i) (f.fiber[i] ? fiber_index[i] = m++ : base_index[i] = r++);
    MPoly g0(r);
    std::vector<MPoly> gj(m, MPoly(r));
    for (const auto& [e, c] : f.g.terms()) {
        MPoly::Exponents be(r, 0);
        int which = -1;
        unsigned fdeg = 0;
        for (unsigned i = 0; i < N; ++i) {
            if (!e[i]) continue;
            if (f.fiber[i]) {
                fdeg += e[i];
                which = static_cast<int>(fiber_index[i]);
            } else {
                be[base_index[i]] = e[i];
            }
        }
        if (fdeg > 1) throw InvalidParameter("g is not linear in the fiber variables");
        (which < 0 ? g0 : gj[which]).add_term(be, c);
    }

    guarded(rep, [&] {
        for (unsigned k = 1; k <= kmax; ++k) {
            const auto t0 = Clock::now();
            const auto F = FieldTable::get(p, k);
            quiver::SumOptions so;
            so.budget = opts.budget;
            so.threads = opts.threads;
            const auto lhs = quiver::StagedSum(F, f.g).run(so).value();

            if (std::pow(static_cast<double>(F->q()), r) > opts.budget)
                throw BudgetExceeded("base enumeration exceeds the budget");
            const CompiledPoly c0(*F, g0);
            std::vector<CompiledPoly> cj;
            for (const auto& g : gj) cj.emplace_back(*F, g);
            cyclo::TraceHistogram hist(p);
            std::vector<Elem> x(r, 0);
            while (true) {
                bool on_zero_locus = true;
                for (const auto& c : cj)
                    if (c.eval(*F, x) != 0) {
                        on_zero_locus = false;
                        break;
                    }
                if (on_zero_locus) hist.add(F->trace(c0.eval(*F, x)));
                unsigned i = 0;
                while (i < r) {
                    if (++x[i] < F->q()) break;
                    x[i] = 0;
                    ++i;
                }
                if (i == r) break;
            }
            const auto rhs = hist.value() * Rational(zpow(Integer(F->q()), m));
            rep.add_row(0, k, lhs, rhs, since(t0));
        }
    });
    return rep;
}

CheckReport check_dimred_matrix(const Potential& twist, unsigned n, std::uint32_t p, unsigned kmax, Backend backend,
                                const CountOptions& opts) {
    require_prime(p);
    CheckReport rep("dimred");
    const Potential w = quiver::potential_W(0) + twist;
    const auto f = WeightedFunction::from_potential(w, n, "a");
    rep.params()["potential"] = w.to_string();
    rep.params()["n"] = n;
    rep.params()["p"] = p;
    rep.params()["kmax"] = kmax;
    rep.params()["backend"] = quiver::to_string(backend);
    rep.params()["weights"] = weights_json(f, check_weights(f));
    // the weighting (d-1, 0, 1) on (A, B, C) for a twist c^d
    const auto& terms = twist.terms();
    if (terms.size() == 1 && terms[0].coeff == 1 &&
        std::all_of(terms[0].word.begin(), terms[0].word.end(), [](const std::string& l) { return l == "c"; })) {
        const unsigned d = static_cast<unsigned>(terms[0].word.size());
        std::vector<Integer> given(f.names.size());
        for (std::size_t i = 0; i < f.names.size(); ++i)
            given[i] = f.names[i][0] == 'a' ? Integer(d - 1) : f.names[i][0] == 'b' ? Integer(0) : Integer(1);
        rep.add_assertion("weights (d-1, 0, 1) give degree d", n, 0, has_weights(f, given, d));
    }
    const auto q = quiver::QuiverSpec::loops({"a", "b", "c"});
    guarded(rep, [&] {
        for (unsigned k = 1; k <= kmax; ++k) {
            const auto t0 = Clock::now();
            const auto lhs = quiver::rep_space_twisted_sum(q, w, {{"1", n}}, p, k, opts);
            const auto comm = quiver::commuting_twisted_count(n, p, k, twist, backend, opts);
            const auto rhs = comm * Rational(zpow(qpow(p, k), n * n));
            rep.add_row(n, k, lhs, rhs, since(t0));
        }
    });
    return rep;
}

// ---------------------------------------------------------------------------
// Partition functions

namespace {

TruncatedSeries<AdamsSequence> partition_function_timed(const Potential& twist, std::uint32_t p, unsigned nmax,
                                                        unsigned K, Backend backend, const CountOptions& opts,
                                                        std::map<std::pair<unsigned, unsigned>, double>* ms) {
    require_prime(p);
    if (nmax > K) throw InvalidParameter("nmax must not exceed the level budget");
    TruncatedSeries<AdamsSequence> z;
    z.levels = K;
    z.coeffs.push_back(AdamsSequence::constant(p, 1, K));
    for (unsigned n = 1; n <= nmax; ++n) {
        std::vector<CyclotomicValue> vals;
        for (unsigned k = 1; k <= z.depth_of(n); ++k) {
            const auto t0 = Clock::now();
            vals.push_back(quiver::commuting_twisted_count(n, p, k, twist, backend, opts) /
                           Rational(quiver::gl_order(n, qpow(p, k))));
            if (ms) (*ms)[{n, k}] = since(t0);
        }
        z.coeffs.emplace_back(p, std::move(vals));
    }
    return z;
}

} // namespace

TruncatedSeries<AdamsSequence> partition_function(const Potential& twist, std::uint32_t p, unsigned nmax, unsigned K,
                                                  Backend backend, const CountOptions& opts) {
    return partition_function_timed(twist, p, nmax, K, backend, opts, nullptr);
}

AdamsSequence dt_normalization(std::uint32_t p, unsigned K) {
    require_one_mod_four(p);
    std::vector<CyclotomicValue> v;
    for (unsigned k = 1; k <= K; ++k) {
        const auto g = gauss(p, k);
        v.push_back(g - g.conj() / Rational(qpow(p, k)));
    }
    return AdamsSequence(p, std::move(v));
}

std::vector<AdamsSequence> extract_dt(const TruncatedSeries<AdamsSequence>& z, std::uint32_t p) {
    require_one_mod_four(p);
    const auto log = lambda::pleth_log(z);
    const unsigned K = std::max(1u, z.levels);
    const auto norm = dt_normalization(p, K);
    std::vector<AdamsSequence> out;
    for (unsigned n = 1; n <= log.order(); ++n) out.push_back(log.coeffs[n] * norm);
    return out;
}

CyclotomicValue scaled_power_sum(unsigned n, unsigned d, std::uint32_t p, unsigned k) {
    const auto F = FieldTable::get(p, k);
    const Elem s = F->from_int(n);
    cyclo::TraceHistogram hist(p);
    for (Elem z = 0; z < F->q(); ++z) hist.add(F->trace(F->mul(s, F->pow(z, d))));
    return hist.value();
}

bool is_dth_power(unsigned n, unsigned d, std::uint32_t p, unsigned k) {
    const auto F = FieldTable::get(p, k);
    const Elem s = F->from_int(n);
    if (s == 0) return true;
    const std::uint64_t order = F->q() - 1;
    return F->pow(s, order / std::gcd<std::uint64_t>(d, order)) == 1;
}

CheckReport check_cmps(unsigned d, std::uint32_t p, unsigned nmax, unsigned K, Backend backend,
                       const CountOptions& opts) {
    require_one_mod_four(p);
    require_small_n(nmax, p);
    if (d == 0) throw InvalidParameter("d must be positive");
    CheckReport rep("cmps");
    rep.params()["d"] = d;
    rep.params()["p"] = p;
    rep.params()["nmax"] = nmax;
    rep.params()["kmax"] = K;
    rep.params()["backend"] = quiver::to_string(backend);
    guarded(rep, [&] {
        std::map<std::pair<unsigned, unsigned>, double> ms;
        const auto z = partition_function_timed(quiver::power_twist(d), p, nmax, K, backend, opts, &ms);
        const auto omega = extract_dt(z, p);
        for (unsigned n = 1; n <= nmax; ++n)
            for (unsigned k = 1; k <= z.depth_of(n); ++k) {
                const auto t0 = Clock::now();
                const auto g = gauss(p, k);
                const auto& lhs = omega[n - 1].level(k);
                const auto rhs = g * scaled_power_sum(n, d, p, k);
                if (is_dth_power(n, d, p, k))
                    rep.add_assertion("n-independent form g_k <d>_k", n, k,
                                      lhs == g * cyclo::power_character_sum(d, p, k));
                rep.add_row(n, k, lhs, rhs, ms[{n, k}] + since(t0));
            }
    });
    return rep;
}

std::pair<std::uint32_t, unsigned> prime_power(unsigned q) {
    if (q < 2) throw InvalidParameter("q must be a prime power");
    std::uint32_t p = 2;
    while (q % p) ++p;
    unsigned k = 0;
    unsigned r = q;
    while (r % p == 0) {
        r /= p;
        ++k;
    }
    if (r != 1) throw InvalidParameter(std::to_string(q) + " is not a prime power");
    return {p, k};
}

CheckReport check_feit_fine(const std::vector<unsigned>& q_list, unsigned nmax, unsigned brute_nmax,
                            const CountOptions& opts) {
    CheckReport rep("feit-fine");
    rep.params()["q"] = q_list;
    rep.params()["nmax"] = nmax;
    rep.params()["brute_nmax"] = brute_nmax;
    // EXP(sum_n L^2/(L-1) T^n) with L = x^2
    TruncatedSeries<MotiveClass> s;
    s.coeffs.push_back(MotiveClass::zero());
    const RatFunc term = RatFunc::x_pow(4) / (RatFunc::x_pow(2) - RatFunc(1));
    for (unsigned n = 1; n <= nmax; ++n) s.coeffs.push_back(term);
    const auto e = lambda::pleth_exp(s);
    guarded(rep, [&] {
        for (unsigned q : q_list) {
            const auto [p, k] = prime_power(q);
            for (unsigned n = 1; n <= nmax; ++n) {
                const auto t0 = Clock::now();
                const auto count = quiver::commuting_twisted_count(n, p, k, Potential(), Backend::classes, opts);
                const auto lhs = count / Rational(quiver::gl_order(n, q));
                const auto rhs = CyclotomicValue(p, e.coeffs[n].tate().evaluate_at_L(q));
                if (n <= brute_nmax)
                    rep.add_assertion("brute force count agrees (q=" + std::to_string(q) + ")", n, k,
                                      quiver::commuting_twisted_count(n, p, k, Potential(), Backend::brute, opts) ==
                                          count);
                rep.add_row(n, k, lhs, rhs, since(t0));
            }
        }
    });
    return rep;
}

CheckReport check_wallcross(std::uint32_t p, unsigned nmax, unsigned d, Backend backend, const CountOptions& opts) {
    require_one_mod_four(p);
    require_small_n(nmax, p);
    const Potential w = quiver::potential_W(d);
    const Potential twist = d >= 2 ? quiver::power_twist(d) : Potential();
    CheckReport rep("wallcross");
    rep.params()["p"] = p;
    rep.params()["nmax"] = nmax;
    rep.params()["potential"] = w.to_string();
    rep.params()["backend"] = quiver::to_string(backend);

    auto xp = [&](int e) { return lambda::realize_tate(RatFunc::x_pow(e), p, 1); };
    auto ni = [](unsigned n) { return static_cast<int>(n); };
    const quiver::QuiverSpec framed({"0", "1"},
                                    {{"a", "1", "1"}, {"b", "1", "1"}, {"c", "1", "1"}, {"j", "0", "1"}});
    guarded(rep, [&] {
        std::vector<CyclotomicValue> nc, unframed;
        for (unsigned i = 0; i <= nmax; ++i) {
            const Rational gl(quiver::gl_order(i, p));
            nc.push_back(xp(-2 * ni(i) * ni(i) - ni(i)) * quiver::stable_framed_sum(i, p, 1, w, opts) / gl);
            unframed.push_back(xp(-ni(i)) * quiver::commuting_twisted_count(i, p, 1, twist, backend, opts) / gl);
        }
        for (unsigned n = 0; n <= nmax; ++n) {
            const auto t0 = Clock::now();
            const auto framed_sum = quiver::rep_space_twisted_sum(framed, w, {{"0", 1}, {"1", n}}, p, 1, opts);
            const auto lhs =
                xp(-2 * ni(n) * ni(n) - ni(n)) * framed_sum / Rational(quiver::gl_order(n, p));
            CyclotomicValue rhs(p);
            for (unsigned i = 0; i <= n; ++i) rhs += nc[i] * unframed[n - i];
            rep.add_row(n, 1, lhs, rhs, since(t0));
        }
    });
    return rep;
}

namespace {

bool is_cb2(const Potential& w) {
    if (w.terms().size() != 1 || w.terms()[0].coeff != 1) return false;
    const auto& word = w.terms()[0].word;
    const std::vector<std::vector<std::string>> rotations{{"c", "b", "b"}, {"b", "c", "b"}, {"b", "b", "c"}};
    return std::find(rotations.begin(), rotations.end(), word) != rotations.end();
}

} // namespace

CheckReport check_preprojective(const Potential& w_prime, std::uint32_t p, unsigned nmax, unsigned K, Backend backend,
                                const CountOptions& opts) {
    require_one_mod_four(p);
    require_small_n(nmax, p);
    for (const auto& l : w_prime.letters())
        if (l != "b" && l != "c") throw InvalidParameter("W' may only use the letters b and c");
    const auto tripled = WeightedFunction::from_potential(quiver::potential_W(0) + w_prime, 2, "");
    if (!w_prime.is_zero() && !check_weights(tripled).feasible)
        throw PreconditionError("[a,b]c + W' is not quasihomogeneous");
    CheckReport rep("preproj");
    rep.params()["twist"] = w_prime.to_string();
    rep.params()["p"] = p;
    rep.params()["nmax"] = nmax;
    rep.params()["kmax"] = K;
    rep.params()["backend"] = quiver::to_string(backend);
    guarded(rep, [&] {
        std::map<std::pair<unsigned, unsigned>, double> ms;
        const auto z = partition_function_timed(w_prime, p, nmax, K, backend, opts, &ms);
        // G_n / (q - 1), G_n = sum over scalar (y, z) of psi(Tr W'(y I_n, z I_n))
        TruncatedSeries<AdamsSequence> s;
        s.levels = K;
        s.coeffs.push_back(AdamsSequence::constant(p, 0, K));
        for (unsigned n = 1; n <= nmax; ++n) {
            std::vector<CyclotomicValue> vals;
            for (unsigned k = 1; k <= s.depth_of(n); ++k) {
                const auto F = FieldTable::get(p, k);
                cyclo::TraceHistogram hist(p);
                Matrix Y = Matrix::identity(n), Zm = Matrix::identity(n);
                for (Elem y = 0; y < F->q(); ++y)
                    for (Elem zz = 0; zz < F->q(); ++zz) {
                        for (unsigned i = 0; i < n; ++i) {
                            Y.at(i, i) = y;
                            Zm.at(i, i) = zz;
                        }
                        hist.add(F->trace(quiver::evaluate_potential(*F, w_prime, {{"b", &Y}, {"c", &Zm}})));
                    }
                vals.push_back(hist.value() / Rational(qpow(p, k) - 1));
            }
            s.coeffs.emplace_back(p, std::move(vals));
        }
        const auto e = lambda::pleth_exp(s);
        std::vector<AdamsSequence> omega;
        const bool cb2 = is_cb2(w_prime);
        if (cb2) omega = extract_dt(z, p);
        for (unsigned n = 1; n <= nmax; ++n)
            for (unsigned k = 1; k <= z.depth_of(n); ++k) {
                if (cb2) rep.add_assertion("Omega_n = g_k", n, k, omega[n - 1].level(k) == gauss(p, k));
                rep.add_row(n, k, z.coeffs[n].level(k), e.coeffs[n].level(k), ms[{n, k}]);
            }
    });
    return rep;
}

CheckReport check_sigma_oracle(unsigned d, std::uint32_t p, unsigned nmax, unsigned kmax, const CountOptions& opts) {
    require_prime(p);
    if (d == 0) throw InvalidParameter("d must be positive");
    CheckReport rep("sigma-oracle");
    rep.params()["d"] = d;
    rep.params()["p"] = p;
    rep.params()["nmax"] = nmax;
    rep.params()["kmax"] = kmax;
    const unsigned K = nmax * kmax;
    if (d == 2 && p % 4 == 1 && nmax >= 2) {
        // sigma^2 of L^{1/2} vanishes, symbolically and in realization
        const bool sym = lambda::sigma_n(MotiveClass::x(), 2).is_zero();
        const bool real = lambda::sigma_n(lambda::realize(MotiveClass::x(), p, 2 * kmax), 2).is_zero();
        rep.add_assertion("sigma^2(L^{1/2}) = 0", 2, 0, sym && real);
    }
    guarded(rep, [&] {
        std::vector<CyclotomicValue> base;
        for (unsigned k = 1; k <= K; ++k) base.push_back(cyclo::power_character_sum(d, p, k));
        const AdamsSequence symbol(p, base);
        for (unsigned n = 1; n <= nmax; ++n) {
            const auto s = lambda::sigma_n(symbol, n);
            for (unsigned k = 1; k <= kmax; ++k) {
                const auto t0 = Clock::now();
                const auto rhs = quiver::sym_line_twisted_count(d, n, p, k, opts);
                rep.add_row(n, k, s.level(k), rhs, since(t0));
            }
        }
    });
    return rep;
}

CheckReport check_classes(const std::vector<unsigned>& q_list, unsigned nmax, unsigned brute_nmax,
                          const CountOptions& opts) {
    CheckReport rep("classes");
    rep.params()["q"] = q_list;
    rep.params()["nmax"] = nmax;
    rep.params()["brute_nmax"] = brute_nmax;
    guarded(rep, [&] {
        for (unsigned q : q_list) {
            const auto [p, k] = prime_power(q);
            const auto F = FieldTable::get(p, k);
            for (unsigned n = 1; n <= nmax; ++n) {
                const auto t0 = Clock::now();
                Integer total = 0;
                std::size_t number = 0;
                quiver::for_each_conj_class(
                    *F, n,
                    [&](const quiver::ConjClass& c) {
                        total += c.class_size;
                        ++number;
                    },
                    opts.budget);
                rep.add_row(n, k, CyclotomicValue(p, Rational(total)), CyclotomicValue(p, Rational(zpow(Integer(q), n * n))),
                            since(t0));
                if (n > brute_nmax) continue;
                if (std::pow(static_cast<double>(q), 2.0 * n * n) > opts.budget)
                    throw BudgetExceeded("brute structural checks exceed the budget");
                Integer invertible = 0;
                std::size_t orthogonal = 0, matrices = 0;
                const Integer full = zpow(Integer(q), n * n);
                quiver::for_each_matrix(*F, n, [&](const Matrix& m) {
                    if (quiver::mat_rank(*F, m) == n) ++invertible;
                    const bool zero = std::all_of(m.a.begin(), m.a.end(), [](Elem x) { return x == 0; });
                    const auto s = quiver::trace_pairing_sum(*F, m, opts.budget);
                    if (s == CyclotomicValue(p, zero ? Rational(full) : Rational(0))) ++orthogonal;
                    ++matrices;
                });
                rep.add_assertion("|GL_n| by brute force (q=" + std::to_string(q) + ")", n, k,
                                  invertible == quiver::gl_order(n, q));
                rep.add_assertion("trace pairing orthogonality (q=" + std::to_string(q) + ")", n, k,
                                  orthogonal == matrices);
            }
        }
    });
    return rep;
}

Potential split_tripled(const Potential& w) {
    auto canonical = [](std::vector<std::string> word) {
        auto best = word;
        for (std::size_t i = 1; i < word.size(); ++i) {
            std::rotate(word.begin(), word.begin() + 1, word.end());
            best = std::min(best, word);
        }
        return best;
    };
    std::map<std::vector<std::string>, Integer> with_a;
    std::vector<quiver::PotentialTerm> rest;
    for (const auto& t : w.terms()) {
        for (const auto& l : t.word)
            if (l != "a" && l != "b" && l != "c") throw InvalidParameter("potential uses a letter outside a, b, c");
        if (std::find(t.word.begin(), t.word.end(), "a") != t.word.end()) with_a[canonical(t.word)] += t.coeff;
        else rest.push_back(t);
    }
    for (auto it = with_a.begin(); it != with_a.end();)
        it = it->second == 0 ? with_a.erase(it) : std::next(it);
    const std::map<std::vector<std::string>, Integer> expect{{{"a", "b", "c"}, 1}, {{"a", "c", "b"}, -1}};
    if (with_a != expect) throw InvalidParameter("potential is not [a,b]c plus a twist in b, c");
    return Potential(rest);
}

} // namespace mdt::dt
