#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "c34/divisor.hpp"

using namespace c34;

namespace {
constexpr std::uint64_t P = 1009;

Curve34 test_curve() {
    // y^3 = x^4 plus assorted lower-order terms
    return Curve34::from_int_coeffs(P, {1, 2, 3, 4, 5, 6, 7, 8, 9});
}
}  // namespace

TEST_CASE("random_typical: certified typical, IGS window shape") {
    Curve34 c = test_curve();
    std::mt19937_64 rng(1);
    OpCounter ctx;
    for (int k = 0; k < 50; ++k) {
        TypicalDivisor D = random_typical(c, rng);
        CHECK(!D.a().is_zero());
        TypicalityCheck tc = check_typical(c, D.F_element(), D.G_element());
        CHECK(tc.typical);
        CHECK(tc.semi_typical);
        EchelonSubspace w = wnd_basis(c, D, 12, ctx);
        CHECK(w.pivot_degrees() ==
              std::vector<int>{6, 7, 8, 9, 10, 11, 12});
    }
}

TEST_CASE("window dimensions: dim W^{6+j}_D = j + 1 for j = -1..4") {
    Curve34 c = test_curve();
    std::mt19937_64 rng(2);
    OpCounter ctx;
    for (int k = 0; k < 30; ++k) {
        TypicalDivisor D = random_typical(c, rng);
        for (int j = -1; j <= 4; ++j)
            CHECK(wnd_basis(c, D, 6 + j, ctx).dim() == j + 1);
    }
}

TEST_CASE("make_H: monic of degree 8 and lies in the ideal window") {
    Curve34 c = test_curve();
    std::mt19937_64 rng(3);
    OpCounter ctx;
    for (int k = 0; k < 30; ++k) {
        TypicalDivisor D = random_typical(c, rng);
        RingElement H = make_H(c, D, ctx);
        CHECK(H.degree() == 8);
        CHECK(H.leading_coeff() == Fp::one(P));
        // the defining identity: a H = yF - xG exactly
        RingElement yF = ring_mul(c, RingElement::monomial(P, 4),
                                  D.F_element(), ctx);
        RingElement xG = ring_mul(c, RingElement::monomial(P, 3),
                                  D.G_element(), ctx);
        CHECK(scale(H, D.a(), ctx) == yF - xG);
        // H lies in the ideal of D: reduce against a generous multiple span
        EchelonSubspace w16 = span_of_multiples(
            c, {D.F_element(), D.G_element()}, 16, ctx);
        CHECK(w16.reduce(H).is_zero());
    }
}

TEST_CASE("wnd_basis equals the raw multiple span of (F, G)") {
    Curve34 c = test_curve();
    std::mt19937_64 rng(4);
    OpCounter ctx;
    for (int k = 0; k < 20; ++k) {
        TypicalDivisor D = random_typical(c, rng);
        // {F, xF, yF, x^2 F, G, xG, yG} spans W^12_D for typical D
        EchelonSubspace raw = span_of_multiples(
            c, {D.F_element(), D.G_element()}, 12, ctx);
        CHECK(raw == wnd_basis(c, D, 12, ctx));
    }
}

TEST_CASE("check_typical rejects malformed pairs") {
    Curve34 c = test_curve();
    std::mt19937_64 rng(5);
    OpCounter ctx;
    TypicalDivisor D = random_typical(c, rng);
    RingElement F = D.F_element(), G = D.G_element();
    // wrong degrees
    CHECK(!check_typical(c, G, F).typical);
    CHECK(!check_typical(c, G, F).semi_typical);
    // a = 0 pair built from unrelated F', G (generically not semi-typical
    // either, but at minimum not typical)
    RingElement F0 = F;
    F0.set_coeff(4, Fp::zero(P));
    CHECK(!check_typical(c, F0, G).typical);
}

TEST_CASE("triple negation swaps D and its flip and is an involution") {
    std::mt19937_64 rng(6);
    OpCounter ctx;
    TypicalDivisor base(Fp(5, P), Fp(6, P), Fp(7, P), Fp(8, P), Fp(9, P),
                        Fp(10, P), ctx);
    DivisorTriple t{base, Fp(11, P), Fp(12, P), Fp(13, P)};
    DivisorTriple n = t.negated();
    CHECK(n.base == t.flip_divisor());
    CHECK(n.negated() == t);
    CHECK(n.base.a() == base.a());  // shared F is untouched
    (void)rng;
}

TEST_CASE("divisor text round trip") {
    OpCounter ctx;
    TypicalDivisor base(Fp(5, P), Fp(0, P), Fp(7, P), Fp(8, P), Fp(0, P),
                        Fp(10, P), ctx);
    JacobianElement x = JacobianElement::typical(base);
    std::string text = serialize_divisor(x);
    CHECK(text == "div a=5 b=0 c=7 d=8 e=0 f=10");
    CHECK(parse_divisor(text, P) == x);

    JacobianElement xt = JacobianElement::typical(
        DivisorTriple{base, Fp(1, P), Fp(2, P), Fp(3, P)});
    std::string tt = serialize_divisor(xt);
    CHECK(tt == "div a=5 b=0 c=7 d=8 e=0 f=10 d1=1 e1=2 f1=3");
    JacobianElement back = parse_divisor(tt, P);
    CHECK(back == xt);
    CHECK(back.has_triple());
    CHECK(back.triple() == xt.triple());

    CHECK(serialize_divisor(JacobianElement::zero()) == "zero");
    CHECK(parse_divisor("zero", P).is_zero());
}

TEST_CASE("divisor parsing rejects bad input") {
    CHECK_THROWS_AS(parse_divisor("", P), ParseError);
    CHECK_THROWS_AS(parse_divisor("divisor a=1", P), ParseError);
    CHECK_THROWS_AS(parse_divisor("div a=1 b=2 c=3", P), ParseError);
    CHECK_THROWS_AS(parse_divisor("div a=1 b=2 c=3 d=4 e=5 g=6", P),
                    ParseError);
    CHECK_THROWS_AS(parse_divisor("div a=1 b=x c=3 d=4 e=5 f=6", P),
                    ParseError);
    // a = 0 breaks the typicality invariant and must be refused at parse
    CHECK_THROWS_AS(parse_divisor("div a=0 b=2 c=3 d=4 e=5 f=6", P),
                    ParseError);
    // triple part must be complete
    CHECK_THROWS_AS(parse_divisor("div a=1 b=2 c=3 d=4 e=5 f=6 d1=7", P),
                    ParseError);
}

TEST_CASE("element evaluation matches term-by-term computation") {
    std::mt19937_64 rng(7);
    OpCounter scratch;
    RingElement f(P);
    f.set_coeff(0, Fp(3, P));   // 3
    f.set_coeff(3, Fp(5, P));   // 5x
    f.set_coeff(4, Fp(7, P));   // 7y
    f.set_coeff(10, Fp(2, P));  // 2 x^2 y
    Fp x0(11, P), y0(13, P);
    Fp want = Fp(3, P) + mul(Fp(5, P), x0, scratch) +
              mul(Fp(7, P), y0, scratch) +
              mul(mul(mul(Fp(2, P), x0, scratch), x0, scratch), y0, scratch);
    CHECK(evaluate_at(f, x0, y0) == want);
    (void)rng;
}

TEST_CASE("interpolated divisor vanishes on its sampled points") {
    // re-derive points of a sampled divisor: F and G must vanish together on
    // exactly three affine points (counted via brute-force x-scan resultant)
    Curve34 c = Curve34::from_int_coeffs(P, {1, 0, 0, 0, 0, 0, 0, 0, 0});
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        TypicalDivisor D = random_typical(c, rng);
        RingElement F = D.F_element(), G = D.G_element();
        int common = 0;
        for (std::uint64_t xv = 0; xv < P; ++xv) {
            Fp x0(xv, P);
            for (Fp y0 : curve_points_above(c, x0, rng))
                if (evaluate_at(F, x0, y0).is_zero() &&
                    evaluate_at(G, x0, y0).is_zero())
                    ++common;
        }
        CHECK(common == 3);
    }
}

TEST_CASE("sampling throws when the field is too small") {
    Curve34 tiny = Curve34::from_int_coeffs(7, {1, 0, 0, 0, 0, 0, 0, 0, 0});
    std::mt19937_64 rng(9);
    CHECK_THROWS_AS(random_typical(tiny, rng), SamplingExhausted);
}
