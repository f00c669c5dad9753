#include "mdt/dt.hpp"

#include <doctest.h>

#include <random>

using namespace mdt;
using namespace mdt::dt;
using lambda::MotiveClass;
using lambda::RatFunc;

namespace {

CyclotomicValue cv(std::uint32_t p, const Rational& r) { return CyclotomicValue(p, r); }

} // namespace

TEST_CASE("polynomial parsing") {
    auto f = WeightedFunction::parse("x^2*t + x");
    CHECK(f.names == std::vector<std::string>{"x", "t"});
    CHECK(f.fiber == std::vector<bool>{false, true});
    CHECK(f.to_string().size() > 0);
    auto g = WeightedFunction::parse("-(x + y)^2 + 2*x*y", {"y"});
    CHECK(g.fiber == std::vector<bool>{false, true});
    CHECK(g.g == WeightedFunction::parse("-x^2 - y^2").g);
    CHECK(WeightedFunction::parse("3").g.total_degree() == 0);
    CHECK_THROWS_AS(WeightedFunction::parse(""), InvalidParameter);
    CHECK_THROWS_AS(WeightedFunction::parse("x +"), InvalidParameter);
    CHECK_THROWS_AS(WeightedFunction::parse("x ^ y"), InvalidParameter);
    CHECK_THROWS_AS(WeightedFunction::parse("(x"), InvalidParameter);
    CHECK_THROWS_AS(WeightedFunction::parse("x / 2"), InvalidParameter);
    CHECK_THROWS_AS(WeightedFunction::parse("x", {"t"}), InvalidParameter);
}

TEST_CASE("weights") {
    auto w = check_weights(WeightedFunction::parse("x*t + x^2"));
    REQUIRE(w.feasible);
    CHECK(w.weights == std::vector<Integer>{1, 1});
    CHECK(w.degree == 2);
    CHECK_FALSE(check_weights(WeightedFunction::parse("x^2*t + x")).feasible);
    CHECK_FALSE(check_weights(WeightedFunction::parse("x + 1")).feasible);
    CHECK_FALSE(check_weights(WeightedFunction::parse("x + x^2")).feasible);
    auto y = check_weights(WeightedFunction::parse("x^3 + y^2 + z*x*y"));
    REQUIRE(y.feasible);
    CHECK(has_weights(WeightedFunction::parse("x^3 + y^2 + z*x*y"), y.weights, y.degree));
    CHECK_THROWS_AS(check_weights(WeightedFunction::parse("x - x")), InvalidParameter);

    // family x^a t + x^b: feasible exactly when b >= a
    for (int a = 1; a <= 4; ++a)
        for (int b = 1; b <= 4; ++b) {
            auto f = WeightedFunction::parse("x^" + std::to_string(a) + "*t + x^" + std::to_string(b));
            auto r = check_weights(f);
            CHECK(r.feasible == (b >= a));
            if (r.feasible) CHECK(has_weights(f, r.weights, r.degree));
        }

    // Tr([A,B]C + C^d) with weights (d-1, 0, 1) on the entries
    for (unsigned d : {2u, 3u, 4u}) {
        auto f = WeightedFunction::from_potential(quiver::potential_W(d), 2);
        std::vector<Integer> given;
        for (const auto& n : f.names) given.push_back(n[0] == 'a' ? d - 1 : n[0] == 'b' ? 0 : 1);
        CHECK(has_weights(f, given, d));
        CHECK_FALSE(has_weights(f, given, d + 1));
        CHECK(check_weights(f).feasible);
        CHECK(f.fiber_count() == 4);
        CHECK(f.base_count() == 8);
    }
}

TEST_CASE("dimensional reduction shadow") {
    auto r = check_dimred(WeightedFunction::parse("x*t + x^2"), 3, 1);
    REQUIRE(r.rows().size() == 1);
    CHECK(r.rows()[0].lhs == cv(3, 3));
    CHECK(r.pass());
    CHECK(r.params()["weights"]["feasible"] == true);

    auto s = check_dimred(WeightedFunction::parse("x^2*t + x"), 3, 2);
    CHECK(s.rows()[0].lhs == cv(3, 3));
    CHECK(s.rows()[0].rhs == cv(3, 3));
    CHECK(s.pass());
    CHECK(s.params()["weights"]["feasible"] == false);

    // several fiber variables and a twisted g_0
    CHECK(check_dimred(WeightedFunction::parse("x*t1 + y*t2 + x^3 + y*x"), 5, 2).pass());
    CHECK(check_dimred(WeightedFunction::parse("u^2 + v^3"), 7, 1).pass());
    CHECK_THROWS_AS(check_dimred(WeightedFunction::parse("x*t^2"), 3, 1), InvalidParameter);
    CHECK_THROWS_AS(check_dimred(WeightedFunction::parse("x*t"), 4, 1), InvalidParameter);

    CountOptions tiny;
    tiny.budget = 5;
    auto b = check_dimred(WeightedFunction::parse("x*t"), 3, 1, tiny);
    CHECK(b.budget_exceeded());
    CHECK_FALSE(b.pass());
    CHECK(b.to_json()["params"]["partial"] == true);
}

TEST_CASE("matrix dimensional reduction at small size") {
    auto r = check_dimred_matrix(quiver::power_twist(2), 1, 5, 2, Backend::classes);
    CHECK(r.pass());
    auto s = check_dimred_matrix(quiver::power_twist(2), 2, 3, 1, Backend::brute);
    CHECK(s.pass());
    CHECK(s.params()["assertions"][0]["holds"] == true);
}

TEST_CASE("partition function") {
    // n = 1: q <d>_k / (q - 1)
    for (auto [d, p] : {std::pair{2u, 5u}, std::pair{3u, 7u}, std::pair{3u, 5u}}) {
        auto z = partition_function(quiver::power_twist(d), p, 1, 3);
        CHECK(z.coeffs[0].level(1) == cv(p, 1));
        for (unsigned k = 1; k <= 3; ++k) {
            const Rational q(zpow(Integer(p), k));
            CHECK(z.coeffs[1].level(k) == cyclo::power_character_sum(d, p, k) * q / (q - 1));
        }
    }
    // gcd(3, 5 - 1) = 1: z -> z^3 is a bijection of F_5
    CHECK(partition_function(quiver::power_twist(3), 5, 1, 1).coeffs[1].level(1).is_zero());
    // untwisted, q = 2
    auto z = partition_function(Potential(), 2, 2, 2);
    CHECK(z.coeffs[2].level(1) == cv(2, Rational(44, 3)));
    CHECK(z.coeffs[2].depth() == 1);
    CHECK_THROWS_AS(partition_function(Potential(), 5, 3, 2), InvalidParameter);
}

TEST_CASE("extracting DT invariants") {
    const std::uint32_t p = 5;
    const unsigned K = 4;
    // Z = 1
    lambda::TruncatedSeries<AdamsSequence> one;
    one.levels = K;
    one.coeffs.push_back(AdamsSequence::constant(p, 1, K));
    for (unsigned n = 1; n <= 3; ++n) one.coeffs.push_back(AdamsSequence::constant(p, 0, K / n));
    for (const auto& o : extract_dt(one, p)) CHECK(o.is_zero());

    // Z = EXP(c x/(x^2-1) T) gives Omega_1 = c
    lambda::TruncatedSeries<MotiveClass> s;
    s.coeffs = {MotiveClass::zero(), RatFunc(Rational(3)) * (RatFunc::x() / (RatFunc::x_pow(2) - RatFunc(1)))};
    auto ez = lambda::realize(lambda::pleth_exp(s), p, K);
    auto om = extract_dt(ez, p);
    CHECK(om[0] == AdamsSequence::constant(p, 3, K));

    // Omega_1 at level 1 of the d = 2 partition function
    auto z = partition_function(quiver::power_twist(2), p, 2, 2);
    CHECK(extract_dt(z, p)[0].level(1) == cv(p, 5));

    CHECK_THROWS_AS(extract_dt(z, 7), ParityViolation);
    auto bad = z;
    bad.coeffs[0] = AdamsSequence::constant(p, 2, 2);
    CHECK_THROWS_AS(extract_dt(bad, p), ConstantTermError);
}

TEST_CASE("EXP and extract_dt are inverse") {
    std::mt19937 rng(11);
    const std::uint32_t p = 13;
    const unsigned K = 6, N = 6;
    const auto norm_inv = lambda::realize(MotiveClass(RatFunc::x() / (RatFunc::x_pow(2) - RatFunc(1))), p, K);
    for (int trial = 0; trial < 3; ++trial) {
        lambda::TruncatedSeries<AdamsSequence> s;
        s.levels = K;
        s.coeffs.push_back(AdamsSequence::constant(p, 0, K));
        std::vector<AdamsSequence> omega;
        for (unsigned n = 1; n <= N; ++n) {
            std::vector<CyclotomicValue> v;
            for (unsigned k = 1; k <= K / n; ++k) {
                std::vector<Rational> c(p - 1);
                for (auto& x : c) x = Rational(static_cast<long>(rng() % 9) - 4, 1 + rng() % 3);
                v.push_back(CyclotomicValue::from_powers(p, c));
            }
            omega.emplace_back(p, v);
            s.coeffs.push_back(omega.back() * norm_inv);
        }
        auto back = extract_dt(lambda::pleth_exp(s), p);
        for (unsigned n = 1; n <= N; ++n) CHECK(back[n - 1] == omega[n - 1]);
    }
}

TEST_CASE("power residues and scaled sums") {
    CHECK(is_dth_power(1, 2, 5, 1));
    CHECK_FALSE(is_dth_power(2, 2, 5, 1));
    CHECK(is_dth_power(2, 2, 5, 2));
    CHECK(is_dth_power(5, 3, 5, 1));
    CHECK(is_dth_power(2, 3, 5, 1)); // cubing is a bijection of F_5
    CHECK_FALSE(is_dth_power(2, 3, 13, 1));
    CHECK(is_dth_power(5, 3, 13, 1)); // 5 = 7^3 mod 13
    CHECK(scaled_power_sum(1, 2, 5, 1) == cyclo::gauss_sum(5, 1));
    CHECK(scaled_power_sum(2, 2, 5, 1) == -cyclo::gauss_sum(5, 1));
    CHECK(scaled_power_sum(3, 1, 7, 2).is_zero());
}

TEST_CASE("DT invariants of the c^2 twist at p = 5") {
    auto r = check_cmps(2, 5, 2, 4);
    CHECK(r.pass());
    for (const auto& row : r.rows()) {
        if (row.n == 1 && row.k == 1) CHECK(row.lhs == cv(5, 5));
        if (row.n == 2 && row.k == 1) CHECK(row.lhs == cv(5, -5));
        if (row.n == 2 && row.k == 2) CHECK(row.lhs == cv(5, 25));
    }
    // (2, 1) is not a residue cell, (2, 2) is
    bool saw22 = false;
    for (const auto& a : r.params()["assertions"]) {
        CHECK(!(a["n"] == 2 && a["k"] == 1));
        saw22 = saw22 || (a["n"] == 2 && a["k"] == 2);
    }
    CHECK(saw22);
    // backend independence
    auto brute = check_cmps(2, 5, 2, 2, Backend::brute);
    auto cls = check_cmps(2, 5, 2, 2, Backend::classes);
    REQUIRE(brute.rows().size() == cls.rows().size());
    for (std::size_t i = 0; i < brute.rows().size(); ++i) CHECK(brute.rows()[i].lhs == cls.rows()[i].lhs);
    CHECK_THROWS_AS(check_cmps(2, 7, 1, 1), ParityViolation);
    CHECK_THROWS_AS(check_cmps(2, 5, 5, 5), InvalidParameter);
    CHECK_THROWS_AS(check_cmps(2, 9, 1, 1), InvalidParameter);
}

TEST_CASE("Feit-Fine") {
    auto r = check_feit_fine({2, 3, 4}, 2);
    CHECK(r.pass());
    CHECK(r.rows()[1].lhs == cv(2, Rational(44, 3)));
    CHECK(r.rows()[0].lhs == cv(2, 4));
    CHECK_THROWS_AS(check_feit_fine({6}, 1), InvalidParameter);
    CHECK(prime_power(125) == std::pair<std::uint32_t, unsigned>{5, 3});
}

TEST_CASE("wall-crossing in low degree") {
    auto r = check_wallcross(5, 1);
    CHECK(r.pass());
    REQUIRE(r.rows().size() == 2);
    CHECK(r.rows()[0].lhs == cv(5, 1));
    CHECK(check_wallcross(5, 1, 0).pass());
    CHECK(check_wallcross(13, 1, 3).pass());
}

TEST_CASE("preprojective shadow") {
    auto r = check_preprojective(Potential::parse("c b b"), 5, 1, 2);
    CHECK(r.pass());
    CHECK(r.params()["assertions"].size() == 2);
    // W' = c^d gives the same series as check_cmps
    auto pre = check_preprojective(quiver::power_twist(2), 5, 2, 2);
    auto z = partition_function(quiver::power_twist(2), 5, 2, 2);
    CHECK(pre.pass());
    for (const auto& row : pre.rows()) CHECK(row.lhs == z.coeffs[row.n].level(row.k));
    // W' = 0 is the Feit-Fine series
    auto zero = check_preprojective(Potential(), 5, 2, 2);
    auto ff = check_feit_fine({5, 25}, 2, 0);
    CHECK(zero.pass());
    CHECK(zero.rows()[0].lhs == ff.rows()[0].lhs);
    CHECK(zero.rows()[2].lhs == ff.rows()[1].lhs);
    CHECK_THROWS_AS(check_preprojective(Potential::parse("a"), 5, 1, 1), InvalidParameter);
    CHECK_THROWS_AS(check_preprojective(Potential::parse("c, +1 c c"), 5, 1, 1), PreconditionError);
}

TEST_CASE("sigma oracle") {
    for (unsigned d = 1; d <= 3; ++d) CHECK(check_sigma_oracle(d, 5, 3, 1).pass());
    auto r = check_sigma_oracle(2, 5, 2, 1);
    CHECK(r.params()["assertions"][0]["holds"] == true);
    for (const auto& row : r.rows())
        if (row.n == 2) CHECK(row.lhs.is_zero());
    CHECK(check_sigma_oracle(2, 7, 2, 2).pass());
}

TEST_CASE("structural counts") {
    auto r = check_classes({2, 3}, 2);
    CHECK(r.pass());
    CHECK(r.rows().size() == 4);
}

TEST_CASE("tripled potentials") {
    auto t = split_tripled(Potential::parse("+1 b c a, -1 c b a, +1 c c c"));
    CHECK(t.to_string() == "+1 c c c");
    CHECK(split_tripled(quiver::potential_W(0)).is_zero());
    CHECK_THROWS_AS(split_tripled(Potential::parse("a b c")), InvalidParameter);
    CHECK_THROWS_AS(split_tripled(Potential::parse("a b c, -1 b a c, x")), InvalidParameter);
}

TEST_CASE("report serialization") {
    CheckReport r("demo");
    r.params()["p"] = 5;
    r.add_row(1, 1, cv(5, 1), cv(5, 1), 12.5);
    auto j = r.to_json();
    CHECK(j["check"] == "demo");
    CHECK(j["rows"][0]["ms"] == 0);
    CHECK(j["rows"][0]["equal"] == true);
    CHECK(j["pass"] == true);
    CHECK(r.to_json(true)["rows"][0]["ms"] == 12.5);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{"check", "params", "rows", "pass"});
    CHECK(r.to_csv() == "n,k,lhs,rhs,lhs_exact,rhs_exact,equal\n1,1,1,1,1,1,1\n");
    CHECK(r.to_pretty().find("pass: yes") != std::string::npos);
    CHECK(r.format("json") == r.format("json"));
    CHECK_THROWS_AS(r.format("xml"), InvalidParameter);
    r.add_row(2, 1, cv(5, 1), cv(5, 2));
    CHECK_FALSE(r.pass());
    CheckReport empty("none");
    CHECK_FALSE(empty.pass());
    CheckReport a("a");
    a.add_row(1, 1, cv(5, 0), cv(5, 0));
    a.add_assertion("side", 1, 1, false);
    CHECK_FALSE(a.pass());
}
