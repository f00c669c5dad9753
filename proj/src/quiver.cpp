#include "mdt/quiver.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace mdt::quiver {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

std::vector<std::string> tokens(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

bool parse_integer(const std::string& t, Integer& out) {
    if (t.empty()) return false;
    std::size_t i = (t[0] == '+' || t[0] == '-') ? 1 : 0;
    if (i == t.size()) return false;
    for (std::size_t j = i; j < t.size(); ++j)
        if (!std::isdigit(static_cast<unsigned char>(t[j]))) return false;
    out = Integer(t[0] == '+' ? t.substr(1) : t);
    return true;
}

double dpow(double b, double e) {
    return std::pow(b, e);
}

} // namespace

// ---------------------------------------------------------------------------
// QuiverSpec

QuiverSpec::QuiverSpec(std::vector<std::string> vertices, std::vector<Arrow> arrows)
    : vertices_(std::move(vertices)), arrows_(std::move(arrows)) {
    std::set<std::string> vs(vertices_.begin(), vertices_.end());
    if (vs.size() != vertices_.size()) throw InvalidParameter("duplicate vertex");
    std::set<std::string> names;
    for (const auto& a : arrows_) {
        if (!names.insert(a.name).second) throw InvalidParameter("duplicate arrow name " + a.name);
        if (!vs.count(a.source) || !vs.count(a.target))
            throw InvalidParameter("arrow " + a.name + " has an end outside the vertex set");
    }
}

QuiverSpec QuiverSpec::loops(const std::vector<std::string>& names) {
    std::vector<Arrow> arrows;
    for (const auto& n : names) arrows.push_back({n, "1", "1"});
    return {{"1"}, arrows};
}

const Arrow& QuiverSpec::arrow(const std::string& name) const {
    for (const auto& a : arrows_)
        if (a.name == name) return a;
    throw InvalidParameter("unknown arrow " + name);
}

bool QuiverSpec::has_arrow(const std::string& name) const {
    for (const auto& a : arrows_)
        if (a.name == name) return true;
    return false;
}

bool QuiverSpec::has_vertex(const std::string& v) const {
    return std::find(vertices_.begin(), vertices_.end(), v) != vertices_.end();
}

// ---------------------------------------------------------------------------
// Potential

Potential Potential::parse(const std::string& text) {
    std::vector<PotentialTerm> terms;
    if (trim(text).empty()) return {};
    for (const auto& part : split(text, ',')) {
        auto toks = tokens(part);
        if (toks.empty()) throw InvalidParameter("empty potential term");
        PotentialTerm t;
        std::size_t start = 0;
        if (parse_integer(toks[0], t.coeff)) {
            start = 1;
        } else {
            t.coeff = 1;
        }
        for (std::size_t i = start; i < toks.size(); ++i) t.word.push_back(toks[i]);
        if (t.word.empty()) throw InvalidParameter("potential term without a word: '" + part + "'");
        if (t.coeff != 0) terms.push_back(std::move(t));
    }
    return Potential(std::move(terms));
}

bool Potential::uses(const std::string& letter) const {
    for (const auto& t : terms_)
        for (const auto& l : t.word)
            if (l == letter) return true;
    return false;
}

std::vector<std::string> Potential::letters() const {
    std::set<std::string> s;
    for (const auto& t : terms_) s.insert(t.word.begin(), t.word.end());
    return {s.begin(), s.end()};
}

void Potential::validate(const QuiverSpec& q) const {
    for (const auto& t : terms_) {
        for (const auto& l : t.word)
            if (!q.has_arrow(l)) throw InvalidParameter("potential uses unknown arrow " + l);
        for (std::size_t i = 0; i < t.word.size(); ++i) {
            const auto& a = q.arrow(t.word[i]);
            const auto& b = q.arrow(t.word[(i + 1) % t.word.size()]);
            if (a.source != b.target) throw InvalidParameter("potential word is not a closed path");
        }
    }
}

Potential Potential::operator+(const Potential& o) const {
    auto t = terms_;
    t.insert(t.end(), o.terms_.begin(), o.terms_.end());
    return Potential(std::move(t));
}

std::string Potential::to_string() const {
    std::string s;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i) s += ", ";
        const auto& c = terms_[i].coeff;
        s += (c >= 0 ? "+" : "") + c.get_str();
        for (const auto& l : terms_[i].word) s += " " + l;
    }
    return s;
}

Potential potential_W(unsigned d) {
    Potential w = Potential::parse("+1 a b c, -1 b a c");
    if (d >= 2) w = w + power_twist(d);
    return w;
}

Potential power_twist(unsigned d) {
    if (d == 0) throw InvalidParameter("power twist needs d >= 1");
    PotentialTerm t{1, std::vector<std::string>(d, "c")};
    return Potential({t});
}

QuiverWithPotential parse_quiver(const std::string& text) {
    std::vector<std::string> vertices;
    std::vector<Arrow> arrows;
    std::string potential;
    bool have_vertices = false;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos) throw InvalidParameter("quiver line without a key: " + line);
        const std::string key = trim(line.substr(0, colon));
        const std::string value = trim(line.substr(colon + 1));
        if (key == "vertices") {
            for (const auto& part : split(value, ','))
                for (const auto& v : tokens(part)) vertices.push_back(v);
            have_vertices = true;
        } else if (key == "arrows") {
            for (const auto& part : split(value, ',')) {
                auto t = tokens(part);
                if (t.size() != 3) throw InvalidParameter("arrow must read 'name source target': " + part);
                arrows.push_back({t[0], t[1], t[2]});
            }
        } else if (key == "potential") {
            potential = value;
        } else {
            throw InvalidParameter("unknown quiver key " + key);
        }
    }
    if (!have_vertices) throw InvalidParameter("quiver text has no vertices line");
    QuiverWithPotential qp{QuiverSpec(vertices, arrows), Potential::parse(potential)};
    qp.potential.validate(qp.quiver);
    return qp;
}

QuiverWithPotential preset_three_loop(unsigned d) {
    return {QuiverSpec::loops({"a", "b", "c"}), potential_W(d)};
}

// ---------------------------------------------------------------------------
// Variable layout and trace expansion

VarLayout VarLayout::row_major(const QuiverSpec& q, const DimVector& dim) {
    VarLayout l;
    unsigned next = 0;
    for (const auto& a : q.arrows()) {
        const unsigned r = dim.count(a.target) ? dim.at(a.target) : 0;
        const unsigned c = dim.count(a.source) ? dim.at(a.source) : 0;
        std::vector<unsigned> idx(static_cast<std::size_t>(r) * c);
        for (auto& i : idx) i = next++;
        l.assign(a.name, r, c, std::move(idx));
    }
    return l;
}

void VarLayout::assign(const std::string& arrow, unsigned rows, unsigned cols, std::vector<unsigned> index) {
    if (index.size() != static_cast<std::size_t>(rows) * cols) throw InvalidParameter("layout size mismatch");
    shape_[arrow] = {rows, cols};
    for (auto i : index) nvars_ = std::max(nvars_, i + 1);
    index_[arrow] = std::move(index);
}

unsigned VarLayout::var(const std::string& arrow, unsigned r, unsigned c) const {
    const auto& sh = shape_.at(arrow);
    return index_.at(arrow)[static_cast<std::size_t>(r) * sh.second + c];
}

std::vector<std::string> VarLayout::names() const {
    std::vector<std::string> n(nvars_);
    for (const auto& [a, sh] : shape_)
        for (unsigned r = 0; r < sh.first; ++r)
            for (unsigned c = 0; c < sh.second; ++c)
                n[var(a, r, c)] = a + std::to_string(r + 1) + std::to_string(c + 1);
    return n;
}

MPoly expand_trace(const QuiverSpec& q, const Potential& w, const DimVector& dim, const VarLayout& layout) {
    w.validate(q);
    const unsigned N = layout.nvars();
    MPoly total(N);
    auto dim_of = [&](const std::string& v) { return dim.count(v) ? dim.at(v) : 0u; };
    for (const auto& term : w.terms()) {
        // running product as a dense matrix of polynomials
        const auto& first = q.arrow(term.word[0]);
        unsigned rows = dim_of(first.target);
        std::vector<MPoly> cur;
        unsigned cols = rows;
        cur.assign(static_cast<std::size_t>(rows) * cols, MPoly(N));
        for (unsigned i = 0; i < rows; ++i) cur[static_cast<std::size_t>(i) * cols + i] = MPoly::constant(N, 1);
        for (const auto& letter : term.word) {
            const auto& a = q.arrow(letter);
            const unsigned ar = dim_of(a.target), ac = dim_of(a.source);
            if (ar != cols) throw InvalidParameter("dimension mismatch in potential word");
            std::vector<MPoly> next(static_cast<std::size_t>(rows) * ac, MPoly(N));
            for (unsigned i = 0; i < rows; ++i)
                for (unsigned k = 0; k < ar; ++k) {
                    const MPoly& x = cur[static_cast<std::size_t>(i) * cols + k];
                    if (x.is_zero()) continue;
                    for (unsigned j = 0; j < ac; ++j)
                        next[static_cast<std::size_t>(i) * ac + j] += x * MPoly::var(N, layout.var(letter, k, j));
                }
            cur = std::move(next);
            cols = ac;
        }
        for (unsigned i = 0; i < rows; ++i) total += cur[static_cast<std::size_t>(i) * cols + i] * term.coeff;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Matrices

Matrix Matrix::identity(unsigned n) {
    Matrix m(n, n);
    for (unsigned i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

Matrix mat_mul(const FieldTable& F, const Matrix& x, const Matrix& y) {
    if (x.cols != y.rows) throw InvalidParameter("matrix shape mismatch");
    Matrix r(x.rows, y.cols);
    for (unsigned i = 0; i < x.rows; ++i)
        for (unsigned k = 0; k < x.cols; ++k) {
            const Elem a = x.at(i, k);
            if (a == 0) continue;
            for (unsigned j = 0; j < y.cols; ++j) r.at(i, j) = F.add(r.at(i, j), F.mul(a, y.at(k, j)));
        }
    return r;
}

Matrix mat_add(const FieldTable& F, const Matrix& x, const Matrix& y) {
    Matrix r = x;
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = F.add(x.a[i], y.a[i]);
    return r;
}

Matrix mat_sub(const FieldTable& F, const Matrix& x, const Matrix& y) {
    Matrix r = x;
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = F.sub(x.a[i], y.a[i]);
    return r;
}

Matrix mat_scale(const FieldTable& F, Elem s, const Matrix& x) {
    Matrix r = x;
    for (auto& v : r.a) v = F.mul(s, v);
    return r;
}

Elem mat_trace(const FieldTable& F, const Matrix& x) {
    Elem t = 0;
    for (unsigned i = 0; i < std::min(x.rows, x.cols); ++i) t = F.add(t, x.at(i, i));
    return t;
}

namespace {

// Row reduction in place; returns pivot columns.
std::vector<unsigned> row_reduce(const FieldTable& F, Matrix& m) {
    std::vector<unsigned> pivots;
    unsigned row = 0;
    for (unsigned col = 0; col < m.cols && row < m.rows; ++col) {
        unsigned piv = row;
        while (piv < m.rows && m.at(piv, col) == 0) ++piv;
        if (piv == m.rows) continue;
        if (piv != row)
            for (unsigned j = 0; j < m.cols; ++j) std::swap(m.at(piv, j), m.at(row, j));
        const Elem inv = F.inv(m.at(row, col));
        for (unsigned j = 0; j < m.cols; ++j) m.at(row, j) = F.mul(inv, m.at(row, j));
        for (unsigned r = 0; r < m.rows; ++r) {
            if (r == row || m.at(r, col) == 0) continue;
            const Elem f = m.at(r, col);
            for (unsigned j = 0; j < m.cols; ++j) m.at(r, j) = F.sub(m.at(r, j), F.mul(f, m.at(row, j)));
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

} // namespace

unsigned mat_rank(const FieldTable& F, Matrix x) {
    return static_cast<unsigned>(row_reduce(F, x).size());
}

std::vector<std::vector<Elem>> mat_kernel(const FieldTable& F, Matrix x) {
    const auto pivots = row_reduce(F, x);
    std::vector<bool> is_pivot(x.cols, false);
    for (auto c : pivots) is_pivot[c] = true;
    std::vector<std::vector<Elem>> basis;
    for (unsigned free = 0; free < x.cols; ++free) {
        if (is_pivot[free]) continue;
        std::vector<Elem> v(x.cols, 0);
        v[free] = 1;
        for (unsigned r = 0; r < pivots.size(); ++r) v[pivots[r]] = F.neg(x.at(r, free));
        basis.push_back(std::move(v));
    }
    return basis;
}

Elem evaluate_potential(const FieldTable& F, const Potential& w, const std::map<std::string, const Matrix*>& mats) {
    Elem total = 0;
    for (const auto& t : w.terms()) {
        const Matrix* first = mats.at(t.word[0]);
        Matrix prod = *first;
        for (std::size_t i = 1; i < t.word.size(); ++i) prod = mat_mul(F, prod, *mats.at(t.word[i]));
        const Elem c = F.from_int(static_cast<std::int64_t>(mpz_fdiv_ui(t.coeff.get_mpz_t(), F.p())));
        total = F.add(total, F.mul(c, mat_trace(F, prod)));
    }
    return total;
}

void for_each_matrix(const FieldTable& F, unsigned n, const std::function<void(const Matrix&)>& fn) {
    Matrix m(n, n);
    const std::size_t len = m.a.size();
    while (true) {
        fn(m);
        std::size_t i = 0;
        while (i < len) {
            if (++m.a[i] < F.q()) break;
            m.a[i] = 0;
            ++i;
        }
        if (i == len) break;
    }
}

// ---------------------------------------------------------------------------
// Orders and classes

Integer gl_order(unsigned n, const Integer& q) {
    Integer r = 1;
    const Integer qn = zpow(q, n);
    for (unsigned i = 0; i < n; ++i) r *= qn - zpow(q, i);
    return r;
}

namespace {

PolyFq poly_mul_fq(const FieldTable& F, const PolyFq& a, const PolyFq& b) {
    PolyFq r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = F.add(r[i + j], F.mul(a[i], b[j]));
    return r;
}

PolyFq monic_from_index(std::uint64_t idx, unsigned deg, std::uint32_t q) {
    PolyFq f(deg + 1, 0);
    for (unsigned i = 0; i < deg; ++i) {
        f[i] = static_cast<Elem>(idx % q);
        idx /= q;
    }
    f[deg] = 1;
    return f;
}

std::uint64_t monic_index(const PolyFq& f, std::uint32_t q) {
    std::uint64_t idx = 0;
    for (std::size_t i = f.size() - 1; i-- > 0;) idx = idx * q + f[i];
    return idx;
}

Matrix companion(const FieldTable& F, const PolyFq& h) {
    const unsigned m = static_cast<unsigned>(h.size()) - 1;
    Matrix c(m, m);
    for (unsigned i = 1; i < m; ++i) c.at(i, i - 1) = 1;
    for (unsigned i = 0; i < m; ++i) c.at(i, m - 1) = F.neg(h[i]);
    return c;
}

void partitions(unsigned n, unsigned max_part, std::vector<unsigned>& cur,
                const std::function<void(const std::vector<unsigned>&)>& fn) {
    if (n == 0) {
        fn(cur);
        return;
    }
    for (unsigned p = std::min(n, max_part); p >= 1; --p) {
        cur.push_back(p);
        partitions(n - p, p, cur, fn);
        cur.pop_back();
    }
}

} // namespace

std::vector<std::vector<PolyFq>> monic_irreducibles(const FieldTable& F, unsigned max_degree, double budget) {
    const std::uint32_t q = F.q();
    std::vector<std::vector<PolyFq>> out(max_degree + 1);
    for (unsigned m = 1; m <= max_degree; ++m) {
        const double size = dpow(q, m);
        if (size * m > budget) throw BudgetExceeded("irreducible sieve of degree " + std::to_string(m) + " exceeds the budget");
        if (m == 1) {
            for (Elem c = 0; c < q; ++c) out[1].push_back({c, 1});
            continue;
        }
        const auto count = static_cast<std::uint64_t>(size);
        std::vector<bool> reducible(count, false);
        for (unsigned a = 1; 2 * a <= m; ++a) {
            const auto other = static_cast<std::uint64_t>(dpow(q, m - a));
            for (const auto& f : out[a])
                for (std::uint64_t gi = 0; gi < other; ++gi)
                    reducible[monic_index(poly_mul_fq(F, f, monic_from_index(gi, m - a, q)), q)] = true;
        }
        for (std::uint64_t i = 0; i < count; ++i)
            if (!reducible[i]) out[m].push_back(monic_from_index(i, m, q));
    }
    return out;
}

Matrix ConjClass::representative(const FieldTable& F) const {
    unsigned n = 0;
    std::vector<Matrix> blocks_m;
    for (const auto& [f, lambda] : blocks)
        for (unsigned part : lambda) {
            PolyFq h{1};
            for (unsigned i = 0; i < part; ++i) h = poly_mul_fq(F, h, f);
            blocks_m.push_back(companion(F, h));
            n += blocks_m.back().rows;
        }
    Matrix m(n, n);
    unsigned off = 0;
    for (const auto& b : blocks_m) {
        for (unsigned i = 0; i < b.rows; ++i)
            for (unsigned j = 0; j < b.cols; ++j) m.at(off + i, off + j) = b.at(i, j);
        off += b.rows;
    }
    return m;
}

void fill_centralizer(const FieldTable& F, unsigned n, ConjClass& c) {
    Integer order = 1;
    unsigned dim = 0;
    for (const auto& [f, lambda] : c.blocks) {
        const unsigned deg = static_cast<unsigned>(f.size()) - 1;
        const Integer Q = zpow(Integer(F.q()), deg);
        // conjugate partition and multiplicities
        const unsigned largest = lambda.empty() ? 0 : lambda.front();
        std::vector<unsigned> conj(largest, 0), mult(largest + 1, 0);
        for (unsigned part : lambda) {
            ++mult[part];
            for (unsigned i = 0; i < part; ++i) ++conj[i];
        }
        unsigned long sq = 0;
        for (auto x : conj) sq += static_cast<unsigned long>(x) * x;
        unsigned long tri = 0;
        for (unsigned i = 1; i <= largest; ++i) tri += static_cast<unsigned long>(mult[i]) * (mult[i] + 1) / 2;
        order *= zpow(Q, static_cast<unsigned>(sq - tri));
        for (unsigned i = 1; i <= largest; ++i)
            for (unsigned j = 1; j <= mult[i]; ++j) order *= zpow(Q, j) - 1;
        dim += deg * static_cast<unsigned>(sq);
    }
    c.centralizer_order = order;
    c.centralizer_dim = dim;
    c.class_size = gl_order(n, Integer(F.q())) / order;
}

void for_each_conj_class(const FieldTable& F, unsigned n, const std::function<void(const ConjClass&)>& fn,
                         double budget) {
    const auto irr = monic_irreducibles(F, n, budget);
    std::vector<const PolyFq*> flat;
    std::vector<unsigned> degs;
    for (unsigned d = 1; d <= n; ++d)
        for (const auto& f : irr[d]) {
            flat.push_back(&f);
            degs.push_back(d);
        }
    ConjClass cur;
    std::function<void(std::size_t, unsigned)> rec = [&](std::size_t start, unsigned remaining) {
        if (remaining == 0) {
            ConjClass c = cur;
            fill_centralizer(F, n, c);
            fn(c);
            return;
        }
        for (std::size_t i = start; i < flat.size(); ++i) {
            const unsigned d = degs[i];
            if (d > remaining) break;
            for (unsigned s = 1; s * d <= remaining; ++s) {
                std::vector<unsigned> part;
                partitions(s, s, part, [&](const std::vector<unsigned>& lambda) {
                    cur.blocks.emplace_back(*flat[i], lambda);
                    rec(i + 1, remaining - s * d);
                    cur.blocks.pop_back();
                });
            }
        }
    };
    rec(0, n);
}

std::vector<ConjClass> conj_classes(const FieldTable& F, unsigned n, double budget) {
    std::vector<ConjClass> out;
    for_each_conj_class(F, n, [&](const ConjClass& c) { out.push_back(c); }, budget);
    return out;
}

// ---------------------------------------------------------------------------
// Counting backends

Backend parse_backend(const std::string& s) {
    if (s == "brute") return Backend::brute;
    if (s == "classes") return Backend::classes;
    throw InvalidParameter("unknown backend " + s);
}

std::string to_string(Backend b) {
    return b == Backend::brute ? "brute" : "classes";
}

CyclotomicValue rep_space_twisted_sum(const QuiverSpec& q, const Potential& w, const DimVector& dim, std::uint32_t p,
                                      unsigned k, const CountOptions& opts) {
    const auto F = FieldTable::get(p, k);
    const auto layout = VarLayout::row_major(q, dim);
    StagedSum sum(F, expand_trace(q, w, dim, layout));
    SumOptions so;
    so.budget = opts.budget;
    so.threads = opts.threads;
    return sum.run(so).value();
}

namespace {

void check_twist_letters(const Potential& twist) {
    for (const auto& l : twist.letters())
        if (l != "b" && l != "c") throw InvalidParameter("commuting twist may only use the letters b and c, got " + l);
}

CyclotomicValue commuting_brute(const FieldTable& F, unsigned n, const Potential& twist, const CountOptions& opts) {
    if (dpow(F.q(), 2.0 * n * n) > opts.budget) throw BudgetExceeded("brute commuting count exceeds the budget");
    cyclo::TraceHistogram hist(F.p());
    for_each_matrix(F, n, [&](const Matrix& C) {
        for_each_matrix(F, n, [&](const Matrix& B) {
            if (mat_mul(F, B, C) != mat_mul(F, C, B)) return;
            hist.add(F.trace(evaluate_potential(F, twist, {{"b", &B}, {"c", &C}})));
        });
    });
    return hist.value();
}

Matrix ad_matrix(const FieldTable& F, const Matrix& C) {
    // B -> BC - CB on row-major vectorized B
    const unsigned n = C.rows;
    Matrix ad(n * n, n * n);
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = 0; j < n; ++j) {
            const unsigned row = i * n + j;
            for (unsigned k = 0; k < n; ++k) {
                // (BC)_ij = sum_k B_ik C_kj
                ad.at(row, i * n + k) = F.add(ad.at(row, i * n + k), C.at(k, j));
                // (CB)_ij = sum_k C_ik B_kj
                ad.at(row, k * n + j) = F.sub(ad.at(row, k * n + j), C.at(i, k));
            }
        }
    return ad;
}

CyclotomicValue commuting_classes(const FieldTable& F, unsigned n, const Potential& twist, const CountOptions& opts) {
    const bool uses_b = twist.uses("b");
    if (uses_b && dpow(F.q(), static_cast<double>(n) * n + n) > opts.budget)
        throw BudgetExceeded("centralizer enumeration exceeds the budget");
    cyclo::BigTraceHistogram total(F.p());
    const Matrix zero(n, n);
    for_each_conj_class(
        F, n,
        [&](const ConjClass& cls) {
            const Matrix C = cls.representative(F);
            if (!uses_b) {
                const Elem v = evaluate_potential(F, twist, {{"b", &zero}, {"c", &C}});
                total.add(F.trace(v), cls.class_size * zpow(Integer(F.q()), cls.centralizer_dim));
                return;
            }
            const auto basis = mat_kernel(F, ad_matrix(F, C));
            if (basis.size() != cls.centralizer_dim)
                throw std::logic_error("centralizer dimension disagrees with the invariant-factor formula");
            cyclo::TraceHistogram local(F.p());
            std::vector<Elem> lambda(basis.size(), 0);
            Matrix B(n, n);
            while (true) {
                std::fill(B.a.begin(), B.a.end(), 0);
                for (std::size_t i = 0; i < basis.size(); ++i) {
                    if (lambda[i] == 0) continue;
                    for (std::size_t e = 0; e < B.a.size(); ++e) B.a[e] = F.add(B.a[e], F.mul(lambda[i], basis[i][e]));
                }
                local.add(F.trace(evaluate_potential(F, twist, {{"b", &B}, {"c", &C}})));
                std::size_t i = 0;
                while (i < lambda.size()) {
                    if (++lambda[i] < F.q()) break;
                    lambda[i] = 0;
                    ++i;
                }
                if (i == lambda.size()) break;
            }
            for (std::uint32_t r = 0; r < F.p(); ++r)
                if (local.counts()[r]) total.add(r, cyclo::to_integer(local.counts()[r]) * cls.class_size);
        },
        opts.budget);
    return total.value();
}

} // namespace

CyclotomicValue commuting_twisted_count(unsigned n, std::uint32_t p, unsigned k, const Potential& twist,
                                        Backend backend, const CountOptions& opts) {
    check_twist_letters(twist);
    const auto F = FieldTable::get(p, k);
    if (n == 0) return CyclotomicValue(p, 1);
    if (backend == Backend::brute) return commuting_brute(*F, n, twist, opts);
    return commuting_classes(*F, n, twist, opts);
}

bool is_cyclic(const FieldTable& F, const std::vector<const Matrix*>& mats, const std::vector<Elem>& v) {
    const unsigned n = static_cast<unsigned>(v.size());
    if (n == 0) return true;
    // echelon basis of the span found so far, reduced against pivots
    std::vector<std::vector<Elem>> basis;
    std::vector<unsigned> pivot;
    std::vector<std::vector<Elem>> queue{v};
    auto reduce = [&](std::vector<Elem> w) {
        for (std::size_t b = 0; b < basis.size(); ++b) {
            const Elem f = w[pivot[b]];
            if (f == 0) continue;
            for (unsigned j = 0; j < n; ++j) w[j] = F.sub(w[j], F.mul(f, basis[b][j]));
        }
        return w;
    };
    for (std::size_t head = 0; head < queue.size(); ++head) {
        auto w = reduce(queue[head]);
        unsigned pv = 0;
        while (pv < n && w[pv] == 0) ++pv;
        if (pv == n) continue;
        const Elem inv = F.inv(w[pv]);
        for (auto& x : w) x = F.mul(inv, x);
        for (auto& b : basis) {
            const Elem f = b[pv];
            if (f == 0) continue;
            for (unsigned j = 0; j < n; ++j) b[j] = F.sub(b[j], F.mul(f, w[j]));
        }
        basis.push_back(w);
        pivot.push_back(pv);
        if (basis.size() == n) return true;
        for (const Matrix* m : mats) {
            std::vector<Elem> img(n, 0);
            for (unsigned i = 0; i < n; ++i)
                for (unsigned j = 0; j < n; ++j) img[i] = F.add(img[i], F.mul(m->at(i, j), w[j]));
            queue.push_back(std::move(img));
        }
    }
    return false;
}

namespace {

void check_loop_potential(const Potential& w) {
    for (const auto& l : w.letters())
        if (l != "a" && l != "b" && l != "c") throw InvalidParameter("potential on the three loops uses letter " + l);
}

// Sum over (A, B, C) with e_1 cyclic.
CyclotomicValue stable_e1_sum(const std::shared_ptr<const FieldTable>& F, unsigned n, const Potential& w,
                              const CountOptions& opts) {
    const QuiverSpec q = QuiverSpec::loops({"a", "b", "c"});
    const DimVector dim{{"1", n}};
    // first columns first, so that stability is decided early for n <= 2
    VarLayout layout;
    unsigned next = 0;
    std::map<std::string, std::vector<unsigned>> idx;
    for (const auto& a : {"a", "b", "c"}) idx[a].assign(static_cast<std::size_t>(n) * n, 0);
    for (const auto& a : {"a", "b", "c"})
        for (unsigned r = 0; r < n; ++r) idx[a][static_cast<std::size_t>(r) * n] = next++;
    for (const auto& a : {"a", "b", "c"})
        for (unsigned r = 0; r < n; ++r)
            for (unsigned c = 1; c < n; ++c) idx[a][static_cast<std::size_t>(r) * n + c] = next++;
    for (const auto& a : {"a", "b", "c"}) layout.assign(a, n, n, idx[a]);

    StagedSum sum(F, expand_trace(q, w, dim, layout));
    SumOptions so;
    so.budget = opts.budget;
    so.threads = opts.threads;
    const FieldTable& Fr = *F;
    if (n == 2) {
        // with v = e_1 the span of {e_1, A e_1, B e_1, C e_1} is everything unless all
        // three first columns lie on e_1, in which case span(e_1) is invariant
        so.filter_depth = 3 * n;
        so.filter = [](const Elem* vals) { return vals[1] != 0 || vals[3] != 0 || vals[5] != 0; };
    } else if (n > 2) {
        so.filter_depth = 3 * n * n;
        so.filter = [&Fr, n, idx](const Elem* vals) {
            Matrix A(n, n), B(n, n), C(n, n);
            for (std::size_t e = 0; e < A.a.size(); ++e) {
                A.a[e] = vals[idx.at("a")[e]];
                B.a[e] = vals[idx.at("b")[e]];
                C.a[e] = vals[idx.at("c")[e]];
            }
            std::vector<Elem> v(n, 0);
            v[0] = 1;
            return is_cyclic(Fr, {&A, &B, &C}, v);
        };
    }
    return sum.run(so).value();
}

} // namespace

CyclotomicValue stable_framed_sum(unsigned n, std::uint32_t p, unsigned k, const Potential& w, const CountOptions& opts) {
    check_loop_potential(w);
    if (n == 0) return CyclotomicValue(p, 1);
    const auto F = FieldTable::get(p, k);
    // GL_n moves any nonzero v to e_1 and preserves Tr W
    const Integer orbit = zpow(Integer(F->q()), n) - 1;
    return stable_e1_sum(F, n, w, opts) * Rational(orbit);
}

CyclotomicValue nc_hilb_twisted_count(unsigned n, std::uint32_t p, unsigned k, const Potential& w,
                                      const CountOptions& opts) {
    const auto S = stable_framed_sum(n, p, k, w, opts);
    return S / Rational(gl_order(n, zpow(Integer(p), k)));
}

CyclotomicValue nc_hilb_twisted_count_full(unsigned n, std::uint32_t p, unsigned k, const Potential& w,
                                           const CountOptions& opts) {
    check_loop_potential(w);
    if (n == 0) return CyclotomicValue(p, 1);
    const auto F = FieldTable::get(p, k);
    const QuiverSpec q = QuiverSpec::loops({"a", "b", "c"});
    const DimVector dim{{"1", n}};
    const VarLayout base = VarLayout::row_major(q, dim);
    const unsigned nv = base.nvars() + n;
    MPoly poly = expand_trace(q, w, dim, base);
    // widen to include the framing vector as trailing variables
    MPoly wide(nv);
    for (const auto& [e, c] : poly.terms()) {
        MPoly::Exponents ex(e);
        ex.resize(nv, 0);
        wide.add_term(ex, c);
    }
    StagedSum sum(F, wide);
    SumOptions so;
    so.budget = opts.budget;
    so.threads = opts.threads;
    so.filter_depth = nv;
    const FieldTable& Fr = *F;
    so.filter = [&Fr, n, &base](const Elem* vals) {
        Matrix A(n, n), B(n, n), C(n, n);
        for (unsigned r = 0; r < n; ++r)
            for (unsigned c = 0; c < n; ++c) {
                A.at(r, c) = vals[base.var("a", r, c)];
                B.at(r, c) = vals[base.var("b", r, c)];
                C.at(r, c) = vals[base.var("c", r, c)];
            }
        std::vector<Elem> v(vals + base.nvars(), vals + base.nvars() + n);
        return is_cyclic(Fr, {&A, &B, &C}, v);
    };
    const auto S = sum.run(so).value();
    return S / Rational(gl_order(n, Integer(F->q())));
}

MPoly newton_power_sum(unsigned d, unsigned n) {
    // variable j stands for a_{n-1-j}; e_i = (-1)^i a_{n-i}
    auto e = [&](unsigned i) {
        if (i == 0) return MPoly::constant(n, 1);
        if (i > n) return MPoly(n);
        return MPoly::var(n, i - 1) * Integer(i % 2 ? -1 : 1);
    };
    std::vector<MPoly> p(d + 1, MPoly(n));
    for (unsigned k = 1; k <= d; ++k) {
        MPoly acc = e(k) * Integer(k % 2 ? static_cast<long>(k) : -static_cast<long>(k));
        for (unsigned i = 1; i < k; ++i) acc += e(i) * p[k - i] * Integer(i % 2 ? 1 : -1);
        p[k] = acc;
    }
    return p[d];
}

CyclotomicValue sym_line_twisted_count(unsigned d, unsigned n, std::uint32_t p, unsigned k, const CountOptions& opts) {
    if (d == 0) throw InvalidParameter("power must be positive");
    const auto F = FieldTable::get(p, k);
    if (n == 0) return CyclotomicValue(p, 1);
    StagedSum sum(F, newton_power_sum(d, n));
    SumOptions so;
    so.budget = opts.budget;
    so.threads = opts.threads;
    return sum.run(so).value();
}

CyclotomicValue trace_pairing_sum(const FieldTable& F, const Matrix& m, double budget) {
    const unsigned n = m.rows;
    if (dpow(F.q(), static_cast<double>(n) * n) > budget) throw BudgetExceeded("trace pairing sum exceeds the budget");
    cyclo::TraceHistogram hist(F.p());
    for_each_matrix(F, n, [&](const Matrix& A) { hist.add(F.trace(mat_trace(F, mat_mul(F, A, m)))); });
    return hist.value();
}

} // namespace mdt::quiver
