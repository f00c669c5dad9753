#include "mdt/lambda.hpp"
#include "mdt/quiver.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace mdt;
using namespace mdt::quiver;
using cyclo::CyclotomicValue;

namespace {

// Direct evaluation of an integer polynomial over every point of F^N.
CyclotomicValue naive_sum(const FieldTable& F, const MPoly& poly, const std::function<bool(const Elem*)>& filter = {}) {
    const unsigned N = poly.nvars();
    std::vector<Elem> v(N, 0);
    cyclo::TraceHistogram hist(F.p());
    while (true) {
        if (!filter || filter(v.data())) {
            Elem acc = 0;
            for (const auto& [e, c] : poly.terms()) {
                Elem t = F.from_int(static_cast<std::int64_t>(mpz_fdiv_ui(c.get_mpz_t(), F.p())));
                for (unsigned i = 0; i < N; ++i) t = F.mul(t, F.pow(v[i], e[i]));
                acc = F.add(acc, t);
            }
            hist.add(F.trace(acc));
        }
        unsigned i = 0;
        while (i < N) {
            if (++v[i] < F.q()) break;
            v[i] = 0;
            ++i;
        }
        if (i == N) break;
    }
    return hist.value();
}

unsigned necklace(unsigned q, unsigned m) {
    // number of monic irreducibles of degree m over F_q
    long total = 0;
    for (unsigned d = 1; d <= m; ++d) {
        if (m % d) continue;
        long pw = 1;
        for (unsigned i = 0; i < m / d; ++i) pw *= q;
        total += mdt::lambda::mobius(d) * pw;
    }
    return static_cast<unsigned>(total / m);
}

} // namespace

TEST_CASE("potential parsing") {
    auto w = Potential::parse("+1 a b c, -1 b a c");
    REQUIRE(w.terms().size() == 2);
    CHECK(w.terms()[1].coeff == -1);
    CHECK(w.terms()[1].word == std::vector<std::string>{"b", "a", "c"});
    CHECK(w.to_string() == "+1 a b c, -1 b a c");
    CHECK(Potential::parse("c c c").terms()[0].coeff == 1);
    CHECK(Potential::parse("").is_zero());
    CHECK(Potential::parse("0 a b").is_zero());
    CHECK(potential_W(3).to_string() == "+1 a b c, -1 b a c, +1 c c c");
    CHECK(potential_W(1).terms().size() == 2);
    CHECK(w.uses("a"));
    CHECK_FALSE(power_twist(2).uses("a"));
    CHECK_THROWS_AS(Potential::parse("+2"), InvalidParameter);
    CHECK_THROWS_AS(Potential::parse("a b,,c"), InvalidParameter);
    CHECK_THROWS_AS(power_twist(0), InvalidParameter);
}

TEST_CASE("quiver text and validation") {
    auto qp = parse_quiver("# framed\nvertices: 0, 1\narrows: a 1 1, j 0 1\npotential: +1 a a\n");
    CHECK(qp.quiver.vertices().size() == 2);
    CHECK(qp.quiver.arrow("j").target == "1");
    CHECK_THROWS_AS(parse_quiver("arrows: a 1 1\n"), InvalidParameter);
    CHECK_THROWS_AS(parse_quiver("vertices: 1\narrows: a 1 2\n"), InvalidParameter);
    CHECK_THROWS_AS(parse_quiver("vertices: 0, 1\narrows: j 0 1\npotential: +1 j\n"), InvalidParameter);
    CHECK_THROWS_AS(parse_quiver("vertices: 1\nfoo: bar\n"), InvalidParameter);
    CHECK_THROWS_AS(Potential::parse("x").validate(QuiverSpec::loops({"a"})), InvalidParameter);
    CHECK_THROWS_AS(QuiverSpec({"1", "1"}, {}), InvalidParameter);
}

TEST_CASE("trace expansion") {
    const auto q = QuiverSpec::loops({"a", "b", "c"});
    // [a,b]c vanishes on 1x1 matrices
    auto l1 = VarLayout::row_major(q, {{"1", 1}});
    CHECK(expand_trace(q, potential_W(0), {{"1", 1}}, l1).is_zero());
    auto cube = expand_trace(q, potential_W(3), {{"1", 1}}, l1);
    CHECK(cube.to_string(l1.names()) == "c11^3");
    // Tr(c^2) for 2x2
    auto l2 = VarLayout::row_major(q, {{"1", 2}});
    auto sq = expand_trace(q, power_twist(2), {{"1", 2}}, l2);
    MPoly expect = MPoly::var(12, l2.var("c", 0, 0)) * MPoly::var(12, l2.var("c", 0, 0)) +
                   MPoly::var(12, l2.var("c", 1, 1)) * MPoly::var(12, l2.var("c", 1, 1)) +
                   MPoly::var(12, l2.var("c", 0, 1)) * MPoly::var(12, l2.var("c", 1, 0)) * Integer(2);
    CHECK(sq == expect);
    // non-square arrows
    QuiverSpec framed({"0", "1"}, {{"a", "1", "1"}, {"j", "0", "1"}, {"k", "1", "0"}});
    DimVector dv{{"0", 1}, {"1", 2}};
    auto lf = VarLayout::row_major(framed, dv);
    CHECK(lf.rows("j") == 2);
    CHECK(lf.cols("j") == 1);
    auto t = expand_trace(framed, Potential::parse("+1 k a j"), dv, lf);
    CHECK(t.total_degree() == 3);
    CHECK(t.terms().size() == 4);
}

TEST_CASE("staged sum against direct evaluation") {
    std::mt19937 rng(7);
    for (auto [p, k] : {std::pair{5u, 1u}, std::pair{3u, 2u}, std::pair{2u, 2u}}) {
        const auto F = FieldTable::get(p, k);
        for (int trial = 0; trial < 6; ++trial) {
            const unsigned N = 4;
            MPoly poly(N);
            for (int t = 0; t < 5; ++t) {
                MPoly::Exponents e(N);
                for (auto& x : e) x = static_cast<std::uint16_t>(rng() % 4);
                poly.add_term(e, Integer(static_cast<long>(rng() % 7) - 3));
            }
            StagedSum s(F, poly);
            CHECK(s.run().value() == naive_sum(*F, poly));
            SumOptions two;
            two.threads = 2;
            CHECK(s.run(two).value() == naive_sum(*F, poly));
            SumOptions filtered;
            filtered.filter_depth = 2;
            filtered.filter = [](const Elem* v) { return v[0] != v[1]; };
            CHECK(s.run(filtered).value() == naive_sum(*F, poly, [](const Elem* v) { return v[0] != v[1]; }));
            SumOptions at_leaf;
            at_leaf.filter_depth = N;
            at_leaf.filter = [](const Elem* v) { return v[3] != v[0]; };
            CHECK(s.run(at_leaf).value() == naive_sum(*F, poly, [](const Elem* v) { return v[3] != v[0]; }));
        }
    }
    // free variables contribute q each
    const auto F = FieldTable::get(5, 1);
    StagedSum zero(F, MPoly(3));
    CHECK(zero.run().value() == CyclotomicValue(5, 125));
    SumOptions tiny;
    tiny.budget = 100;
    CHECK_THROWS_AS(zero.run(tiny), BudgetExceeded);
}

TEST_CASE("matrix helpers") {
    const auto F = FieldTable::get(5, 1);
    Matrix m(2, 3);
    m.at(0, 0) = 1;
    m.at(0, 1) = 2;
    m.at(1, 0) = 2;
    m.at(1, 1) = 4;
    m.at(1, 2) = 1;
    CHECK(mat_rank(*F, m) == 2);
    auto ker = mat_kernel(*F, m);
    REQUIRE(ker.size() == 1);
    Matrix v(3, 1);
    for (unsigned i = 0; i < 3; ++i) v.at(i, 0) = ker[0][i];
    CHECK(mat_mul(*F, m, v) == Matrix(2, 1));
    CHECK(mat_rank(*F, Matrix(3, 3)) == 0);
    CHECK(mat_rank(*F, Matrix::identity(3)) == 3);
    CHECK(mat_kernel(*F, Matrix::identity(2)).empty());
    CHECK(mat_trace(*F, mat_scale(*F, 3, Matrix::identity(2))) == 1);
    CHECK(mat_sub(*F, m, m) == Matrix(2, 3));
    CHECK_THROWS_AS(mat_mul(*F, m, m), InvalidParameter);

    unsigned count = 0;
    for_each_matrix(*FieldTable::get(2, 1), 2, [&](const Matrix&) { ++count; });
    CHECK(count == 16);
    CHECK(gl_order(2, 2) == 6);
    CHECK(gl_order(3, 5) == Integer(1488000));
    CHECK(gl_order(0, 7) == 1);
}

TEST_CASE("monic irreducibles") {
    for (auto [p, k, m] : {std::tuple{2u, 1u, 6u}, std::tuple{3u, 1u, 4u}, std::tuple{2u, 2u, 3u}, std::tuple{5u, 1u, 3u}}) {
        const auto F = FieldTable::get(p, k);
        auto irr = monic_irreducibles(*F, m);
        for (unsigned d = 1; d <= m; ++d) CHECK(irr[d].size() == necklace(F->q(), d));
    }
    CHECK_THROWS_AS(monic_irreducibles(*FieldTable::get(5, 1), 8, 1e4), BudgetExceeded);
}

TEST_CASE("conjugacy classes") {
    const auto F2 = FieldTable::get(2, 1);
    auto cls = conj_classes(*F2, 2);
    std::vector<Integer> sizes;
    for (const auto& c : cls) sizes.push_back(c.class_size);
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<Integer>{1, 1, 2, 3, 3, 6});

    for (auto [p, k, n] : {std::tuple{2u, 1u, 3u}, std::tuple{3u, 1u, 2u}, std::tuple{3u, 1u, 3u}, std::tuple{2u, 2u, 2u},
                           std::tuple{5u, 1u, 2u}, std::tuple{2u, 1u, 4u}}) {
        const auto F = FieldTable::get(p, k);
        Integer total = 0;
        unsigned number = 0;
        for_each_conj_class(*F, n, [&](const ConjClass& c) {
            total += c.class_size;
            ++number;
            CHECK(c.class_size * c.centralizer_order == gl_order(n, F->q()));
            auto rep = c.representative(*F);
            CHECK(rep.rows == n);
        });
        CHECK(total == zpow(Integer(F->q()), n * n));
        if (n == 2) CHECK(number == F->q() * F->q() + F->q());
    }
}

TEST_CASE("centralizers against brute force") {
    const auto F = FieldTable::get(3, 1);
    for (const auto& c : conj_classes(*F, 2)) {
        const auto C = c.representative(*F);
        unsigned commuting = 0, invertible = 0;
        for_each_matrix(*F, 2, [&](const Matrix& B) {
            if (mat_mul(*F, B, C) != mat_mul(*F, C, B)) return;
            ++commuting;
            if (mat_rank(*F, B) == 2) ++invertible;
        });
        CHECK(Integer(invertible) == c.centralizer_order);
        CHECK(Integer(commuting) == zpow(Integer(3), c.centralizer_dim));
    }
}

TEST_CASE("commuting counts") {
    // commuting pairs in Mat_2(F_2)
    CHECK(commuting_twisted_count(2, 2, 1, Potential(), Backend::classes) == CyclotomicValue(2, 88));
    CHECK(commuting_twisted_count(2, 2, 1, Potential(), Backend::brute) == CyclotomicValue(2, 88));
    CHECK(commuting_twisted_count(2, 2, 1, Potential(), Backend::classes) / Rational(gl_order(2, 2)) ==
          CyclotomicValue(2, Rational(44, 3)));
    CHECK(commuting_twisted_count(0, 5, 1, power_twist(3), Backend::brute) == CyclotomicValue(5, 1));

    for (auto [p, k, n] : {std::tuple{3u, 1u, 2u}, std::tuple{5u, 1u, 2u}, std::tuple{2u, 1u, 3u}}) {
        for (const auto& twist : {power_twist(2), power_twist(3), Potential::parse("+1 b c c"),
                                  Potential::parse("+1 b b, -1 c")}) {
            CHECK(commuting_twisted_count(n, p, k, twist, Backend::brute) ==
                  commuting_twisted_count(n, p, k, twist, Backend::classes));
        }
    }
    CHECK_THROWS_AS(commuting_twisted_count(2, 3, 1, Potential::parse("a a"), Backend::classes), InvalidParameter);
    CountOptions tiny;
    tiny.budget = 10;
    CHECK_THROWS_AS(commuting_twisted_count(2, 3, 1, Potential(), Backend::brute, tiny), BudgetExceeded);
    CHECK(parse_backend("brute") == Backend::brute);
    CHECK(to_string(Backend::classes) == "classes");
    CHECK_THROWS_AS(parse_backend("gpu"), InvalidParameter);
}

TEST_CASE("one-dimensional twisted sums") {
    const auto q3 = preset_three_loop(3);
    auto v = rep_space_twisted_sum(q3.quiver, q3.potential, {{"1", 1}}, 7, 1);
    CHECK(v == cyclo::power_character_sum(3, 7, 1) * Rational(49));
    // Tr c^d on 1x1 commuting pairs
    CHECK(commuting_twisted_count(1, 7, 1, power_twist(3), Backend::classes) ==
          cyclo::power_character_sum(3, 7, 1) * Rational(7));
}

TEST_CASE("cyclicity") {
    const auto F = FieldTable::get(3, 1);
    Matrix shift(3, 3);
    shift.at(1, 0) = 1;
    shift.at(2, 1) = 1;
    CHECK(is_cyclic(*F, {&shift}, {1, 0, 0}));
    CHECK_FALSE(is_cyclic(*F, {&shift}, {0, 1, 0}));
    CHECK_FALSE(is_cyclic(*F, {}, {1, 0}));
    CHECK(is_cyclic(*F, {}, {2}));
    CHECK_FALSE(is_cyclic(*F, {&shift}, {0, 0, 0}));
}

TEST_CASE("framed stable sums") {
    for (auto [p, n, d] : {std::tuple{3u, 1u, 3u}, std::tuple{3u, 2u, 0u}, std::tuple{3u, 2u, 2u}, std::tuple{2u, 2u, 3u}}) {
        const auto w = potential_W(d);
        CHECK(nc_hilb_twisted_count(n, p, 1, w) == nc_hilb_twisted_count_full(n, p, 1, w));
    }
    // n = 1: every nonzero v is cyclic
    CHECK(stable_framed_sum(1, 5, 1, Potential()) == CyclotomicValue(5, 4 * 125));
    CHECK(nc_hilb_twisted_count(0, 5, 1, potential_W(3)) == CyclotomicValue(5, 1));
    CHECK_THROWS_AS(nc_hilb_twisted_count(1, 5, 1, Potential::parse("x")), InvalidParameter);
}

TEST_CASE("newton power sums") {
    // n = 2: p_2 = a_1^2 - 2 a_0, p_3 = -a_1^3 + 3 a_1 a_0
    auto a1 = MPoly::var(2, 0), a0 = MPoly::var(2, 1);
    CHECK(newton_power_sum(2, 2) == a1 * a1 - a0 * Integer(2));
    CHECK(newton_power_sum(3, 2) == a1 * a0 * Integer(3) - a1 * a1 * a1);
    CHECK(newton_power_sum(1, 3) == MPoly::var(3, 0) * Integer(-1));
    // n = 1 sums (-a)^d over the line
    CHECK(sym_line_twisted_count(3, 1, 7, 1) == cyclo::power_character_sum(3, 7, 1));
    CHECK(sym_line_twisted_count(3, 0, 7, 1) == CyclotomicValue(7, 1));
    CHECK_THROWS_AS(sym_line_twisted_count(0, 2, 7, 1), InvalidParameter);
}

TEST_CASE("sym line matches root enumeration") {
    // split polynomials over F_p: product over multisets of roots; checks the Newton
    // identities on the subset of monic polynomials that split
    const std::uint32_t p = 7;
    const auto F = FieldTable::get(p, 1);
    const unsigned d = 4;
    auto pd = newton_power_sum(d, 2);
    for (Elem r = 0; r < p; ++r)
        for (Elem s = r; s < p; ++s) {
            // t^2 - (r+s) t + rs
            const Elem a1 = F->neg(F->add(r, s)), a0 = F->mul(r, s);
            Elem acc = 0;
            for (const auto& [e, c] : pd.terms()) {
                Elem t = F->from_int(static_cast<std::int64_t>(mpz_fdiv_ui(c.get_mpz_t(), p)));
                t = F->mul(t, F->mul(F->pow(a1, e[0]), F->pow(a0, e[1])));
                acc = F->add(acc, t);
            }
            CHECK(acc == F->add(F->pow(r, d), F->pow(s, d)));
        }
}

TEST_CASE("trace pairing orthogonality") {
    const auto F = FieldTable::get(3, 1);
    CHECK(trace_pairing_sum(*F, Matrix(2, 2)) == CyclotomicValue(3, 81));
    CHECK(trace_pairing_sum(*F, Matrix::identity(2)).is_zero());
    Matrix e(2, 2);
    e.at(0, 1) = 2;
    CHECK(trace_pairing_sum(*F, e).is_zero());
    CHECK_THROWS_AS(trace_pairing_sum(*F, Matrix(3, 3), 100), BudgetExceeded);
}
