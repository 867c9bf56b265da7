#include <catch2/catch_amalgamated.hpp>

#include "bdhvar/field.hpp"

using namespace bdhvar;

namespace {
const char* kCatalog[] = {"Q", "Q(i)", "quad:5", "quad:-3", "cyc:5", "cyc:8", "cyc:12"};
}

TEST_CASE("build_field populates invariants") {
    FieldSpec qi = build_quadratic(-1);
    REQUIRE(qi.degree == 2);
    REQUIRE(qi.m_k == 4);
    REQUIRE(qi.ramified == std::vector<u64>{2});

    FieldSpec q = build_rational();
    REQUIRE(q.degree == 1);
    REQUIRE(q.m_k == 1);
    REQUIRE(q.ramified.empty());

    FieldSpec c5 = build_cyclotomic(5);
    REQUIRE(c5.degree == 4);
    REQUIRE(c5.m_k == 5);
    REQUIRE(c5.ramified == std::vector<u64>{5});

    FieldSpec r5 = build_quadratic(5);
    REQUIRE(r5.m_k == 5);  // d == 1 mod 4
    FieldSpec rm3 = build_quadratic(-3);
    REQUIRE(rm3.m_k == 3);
}

TEST_CASE("build_field rejects bad descriptors") {
    REQUIRE_THROWS_AS(build_quadratic(0), std::invalid_argument);
    REQUIRE_THROWS_AS(build_quadratic(1), std::invalid_argument);
    REQUIRE_THROWS_AS(build_quadratic(12), std::invalid_argument);   // not squarefree
    REQUIRE_THROWS_AS(build_quadratic(-12), std::invalid_argument);
    REQUIRE_THROWS_AS(build_cyclotomic(2), std::invalid_argument);
    REQUIRE_THROWS_AS(build_cyclotomic(6), std::invalid_argument);   // 2 mod 4
    REQUIRE_THROWS_AS(build_cyclotomic(-4), std::invalid_argument);
    REQUIRE_THROWS_AS(build_galois({1, 2}, 0, {}), std::invalid_argument);      // m_K <= 0
    REQUIRE_THROWS_AS(build_galois({2, 0, 3}, 8, {2}), std::invalid_argument);  // non-monic
    REQUIRE_THROWS_AS(build_galois({1}, 1, {}), std::invalid_argument);         // degree 0
    // x^2 squarefree nowhere
    REQUIRE_THROWS_AS(build_galois({0, 0, 1}, 4, {2}), std::invalid_argument);
}

TEST_CASE("splitting closed forms") {
    FieldSpec qi = build_quadratic(-1);
    auto s = splitting(qi, 5);
    REQUIRE((s.e == 1 && s.f == 1 && s.g == 2));
    s = splitting(qi, 2);
    REQUIRE((s.e == 2 && s.f == 1 && s.g == 1));
    s = splitting(qi, 3);
    REQUIRE((s.e == 1 && s.f == 2 && s.g == 1));

    FieldSpec c5 = build_cyclotomic(5);
    s = splitting(c5, 19);
    REQUIRE((s.e == 1 && s.f == 2 && s.g == 2));
    s = splitting(c5, 5);
    REQUIRE((s.e == 4 && s.f == 1 && s.g == 1));
    s = splitting(c5, 11);
    REQUIRE((s.e == 1 && s.f == 1 && s.g == 4));

    FieldSpec c12 = build_cyclotomic(12);
    s = splitting(c12, 3);  // 3 || 12: e = phi(3), f = ord_4(3)
    REQUIRE((s.e == 2 && s.f == 2 && s.g == 1));
    s = splitting(c12, 2);  // 4 || 12: e = phi(4), f = ord_3(2)
    REQUIRE((s.e == 2 && s.f == 2 && s.g == 1));

    REQUIRE_THROWS_AS(splitting(qi, 10), std::invalid_argument);
    REQUIRE_THROWS_AS(splitting(qi, 1), std::invalid_argument);
}

TEST_CASE("e*f*g = degree and ramified set, p <= 1e4") {
    for (const char* name : kCatalog) {
        FieldSpec F = parse_field(name);
        std::vector<u64> seen;
        for_each_prime(10000, [&](u64 p) {
            SplittingDatum s = splitting(F, p);
            REQUIRE(s.e * s.f * s.g == F.degree);
            if (s.e > 1) seen.push_back(p);
        });
        std::vector<u64> expected;
        for (u64 p : F.ramified)
            if (p <= 10000) expected.push_back(p);
        REQUIRE(seen == expected);
    }
}

TEST_CASE("closed-form splitting matches polynomial factorization") {
    // quadratic: the minimal polynomial of a ring-of-integers generator
    // (x^2 - x + (1-d)/4 when d == 1 mod 4, else x^2 - d -- plain x^2 - d
    // has index 2 at p = 2 in that case);  cyclotomic: Phi_n
    struct Probe {
        FieldSpec F;
        std::vector<long long> poly;
    };
    std::vector<Probe> probes;
    probes.push_back({build_quadratic(-1), {1, 0, 1}});
    probes.push_back({build_quadratic(5), {-1, -1, 1}});
    probes.push_back({build_quadratic(-3), {1, -1, 1}});
    probes.push_back({build_cyclotomic(5), cyclotomic_polynomial(5)});
    probes.push_back({build_cyclotomic(8), cyclotomic_polynomial(8)});
    probes.push_back({build_cyclotomic(12), cyclotomic_polynomial(12)});

    for (const auto& pr : probes) {
        for_each_prime(10000, [&](u64 p) {
            if (pr.F.is_ramified(p)) return;
            SplittingDatum s = splitting(pr.F, p);
            auto probe = distinct_degree_probe(pr.poly, p);
            REQUIRE(probe.degree == s.f);
            REQUIRE(probe.full_split);  // all factors share the degree
        });
    }
}

TEST_CASE("generic galois kind reproduces cyclotomic(8) splitting") {
    FieldSpec g = build_galois({1, 0, 0, 0, 1}, 8, {2});  // x^4 + 1
    FieldSpec c8 = build_cyclotomic(8);
    REQUIRE(g.degree == 4);
    for_each_prime(2000, [&](u64 p) {
        if (p == 2) {
            REQUIRE_FALSE(splitting(g, p).known);  // no table: conservative flag
            return;
        }
        SplittingDatum a = splitting(g, p);
        SplittingDatum b = splitting(c8, p);
        REQUIRE(a.f == b.f);
        REQUIRE(a.g == b.g);
        REQUIRE(a.known);
    });
}

TEST_CASE("galois ramification table is honored") {
    std::map<u64, SplittingDatum> table;
    table[2] = {2, 4, 1, 1, true};  // e=4, f=1, g=1, matches cyc:8
    FieldSpec g = build_galois({1, 0, 0, 0, 1}, 8, {2}, table);
    SplittingDatum s = splitting(g, 2);
    REQUIRE(s.known);
    REQUIRE((s.e == 4 && s.f == 1 && s.g == 1));
    // table rows must keep e*f*g = degree
    std::map<u64, SplittingDatum> bad;
    bad[2] = {2, 2, 1, 1, true};
    REQUIRE_THROWS_AS(build_galois({1, 0, 0, 0, 1}, 8, {2}, bad), std::invalid_argument);
}

TEST_CASE("descriptor parsing round trip") {
    REQUIRE(parse_field("Q").kind == FieldKind::rational);
    REQUIRE(parse_field("Q(i)").d == -1);
    REQUIRE(parse_field("quad:-7").m_k == 7);
    REQUIRE(parse_field("cyc:12").degree == 4);
    FieldSpec s3 = parse_field("galois:108,0,0,0,0,0,1;3;2,3");
    REQUIRE(s3.degree == 6);
    REQUIRE(s3.m_k == 3);
    REQUIRE(s3.ramified == std::vector<u64>{2, 3});

    REQUIRE_THROWS_AS(parse_field(""), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_field("Q(j)"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_field("quad:abc"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_field("galois:1,0,1"), std::invalid_argument);      // missing mK
    REQUIRE_THROWS_AS(parse_field("galois:1,0,1;4;6"), std::invalid_argument);  // 6 not prime
}

TEST_CASE("cyclotomic polynomials") {
    REQUIRE(cyclotomic_polynomial(1) == std::vector<long long>{-1, 1});
    REQUIRE(cyclotomic_polynomial(8) == std::vector<long long>{1, 0, 0, 0, 1});
    REQUIRE(cyclotomic_polynomial(12) == std::vector<long long>{1, 0, -1, 0, 1});
    REQUIRE(cyclotomic_polynomial(5) == std::vector<long long>{1, 1, 1, 1, 1});
}
