#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crforge/ideal.hpp"
#include "crforge/series.hpp"
#include "oracle_dense.hpp"

using namespace crforge;
using namespace crforge::testing;

namespace {

Series var(int nv, int k, int i) { return Series::variable(nv, k, i); }
Series cst(int nv, int k, long v) { return Series::constant(nv, k, Coeff(v)); }

} // namespace

TEST_CASE("ring basics: (1+x)(1-x) and the geometric inverse") {
    Series x = var(1, 5, 0), one = cst(1, 5, 1);
    Series p = (one + x) * (one - x);
    CHECK(p.coeff(Mono(1)) == Coeff(1));
    CHECK(p.coeff(Mono::unit(1, 0, 1)) == Coeff(0));
    CHECK(p.coeff(Mono::unit(1, 0, 2)) == Coeff(-1));
    CHECK(p.term_count() == 2);

    Series g = (cst(1, 3, 1) - var(1, 3, 0)).unit_inverse();
    for (std::uint32_t k = 0; k <= 3; ++k) CHECK(g.coeff(Mono::unit(1, 0, k)) == Coeff(1));
    CHECK((g * (cst(1, 3, 1) - var(1, 3, 0))).truncated(3) ==
          cst(1, 3, 1));

    CHECK_THROWS_AS(var(1, 3, 0).unit_inverse(), std::domain_error);
    CHECK_THROWS_AS(var(1, 3, 0) * var(2, 3, 0), std::invalid_argument);
}

TEST_CASE("multiplication matches the dense schoolbook oracle") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        int nv = 1 + static_cast<int>(rng() % 3);
        int order = 8;
        Series a = random_series(rng, nv, order, 4, false);
        Series b = random_series(rng, nv, order, 4, false);
        Dense da = dense_from_series(a, order);
        Dense db = dense_from_series(b, order);
        CHECK(dense_matches(a * b, dense_mul(da, db), order));
    }
}

TEST_CASE("ring axioms on random samples") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        int nv = 1 + static_cast<int>(rng() % 3);
        Series a = random_series(rng, nv, 6, 3, false);
        Series b = random_series(rng, nv, 6, 3, false);
        Series c = random_series(rng, nv, 6, 3, false);
        CHECK((a * b) == (b * a));
        CHECK(((a * b) * c) == (a * (b * c)));
        CHECK((a * (b + c)) == (a * b + a * c));
    }
}

TEST_CASE("raw derivatives") {
    // d/dx (x^2 y) = 2 x y
    Series f = Series::monomial(2, 5, Mono(std::vector<std::uint32_t>{2, 1}), Coeff(1));
    Series df = f.derivative(0);
    CHECK(df.coeff(Mono(std::vector<std::uint32_t>{1, 1})) == Coeff(2));
    CHECK(df.term_count() == 1);

    // d^(1,1) (x y) = 1
    Series g = Series::monomial(2, 4, Mono(std::vector<std::uint32_t>{1, 1}), Coeff(1));
    CHECK(g.derivative(Mono(std::vector<std::uint32_t>{1, 1})) ==
          cst(2, 2, 1));

    // d^2 of the exp-truncation sum x^n/n!, n <= 6, equals itself to order 4
    Series e(1, 6);
    mpz_class fact = 1;
    for (int n = 0; n <= 6; ++n) {
        if (n > 0) fact *= n;
        e.set_coeff(Mono::unit(1, 0, static_cast<std::uint32_t>(n)), Coeff(mpq_class(1, fact)));
    }
    Series d2 = e.derivative(Mono::unit(1, 0, 2));
    CHECK(d2.order() == 4);
    CHECK(Series::equal_mod(d2, e.truncated(4), 4));

    CHECK_THROWS_AS(cst(1, 2, 1).derivative(Mono::unit(1, 0, 3)), std::domain_error);
}

TEST_CASE("composition: examples and the dense multinomial oracle") {
    // compose(f, identity) = f
    std::mt19937_64 rng(23);
    Series f = random_series(rng, 2, 6, 4, false);
    CHECK(compose(f, SeriesMap::identity(2, 6)) == f);

    // y^2 o (x + x^2) = x^2 + 2x^3 + x^4
    Series y2 = Series::monomial(1, 4, Mono::unit(1, 0, 2), Coeff(1));
    Series inner = var(1, 4, 0) + Series::monomial(1, 4, Mono::unit(1, 0, 2), Coeff(1));
    Series comp = compose(y2, SeriesMap({inner}));
    CHECK(comp.coeff(Mono::unit(1, 0, 2)) == Coeff(1));
    CHECK(comp.coeff(Mono::unit(1, 0, 3)) == Coeff(2));
    CHECK(comp.coeff(Mono::unit(1, 0, 4)) == Coeff(1));

    // exp-truncation composed with x + y against the dense oracle
    Series e(1, 5);
    mpz_class fact = 1;
    for (int n = 0; n <= 5; ++n) {
        if (n > 0) fact *= n;
        e.set_coeff(Mono::unit(1, 0, static_cast<std::uint32_t>(n)), Coeff(mpq_class(1, fact)));
    }
    Series xy = var(2, 5, 0) + var(2, 5, 1);
    Series comp2 = compose(e, SeriesMap({xy}));
    Dense de = dense_from_series(e, 5);
    Dense dxy = dense_from_series(xy, 5);
    CHECK(dense_matches(comp2, dense_compose(de, {dxy}), 5));

    // random compositions against the oracle
    for (int trial = 0; trial < 20; ++trial) {
        int nv_in = 1 + static_cast<int>(rng() % 2);
        int nv_out = 1 + static_cast<int>(rng() % 2);
        int order = 6;
        Series ff = random_series(rng, nv_in, order, 3, false);
        std::vector<Series> args;
        std::vector<Dense> dargs;
        for (int i = 0; i < nv_in; ++i) {
            Series g = random_series(rng, nv_out, order, 3, true);
            dargs.push_back(dense_from_series(g, order));
            args.push_back(std::move(g));
        }
        Series got = compose(ff, SeriesMap(args));
        CHECK(dense_matches(got, dense_compose(dense_from_series(ff, order), dargs), order));
    }

    CHECK_THROWS_AS(compose(f, SeriesMap({cst(1, 6, 1), cst(1, 6, 0)})), std::domain_error);
}

TEST_CASE("compose is associative where defined") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        Series f = random_series(rng, 2, 6, 3, false);
        SeriesMap g({random_series(rng, 2, 6, 3, true), random_series(rng, 2, 6, 3, true)});
        SeriesMap h({random_series(rng, 2, 6, 3, true), random_series(rng, 2, 6, 3, true)});
        Series lhs = compose(compose(f, g), h);
        Series rhs = compose(f, g.after(h));
        CHECK(Series::equal_mod(lhs, rhs, std::min(lhs.order(), rhs.order())));
    }
}

TEST_CASE("implicit function solver") {
    // already-solved form: w - tau - 2i z chi, unknown w
    {
        // ring (z, w, chi, tau)
        Series rho = var(4, 6, 1) - var(4, 6, 3) -
                     (var(4, 6, 0) * var(4, 6, 2)).scaled(Coeff(0, 1, 2, 1));
        SeriesMap u = implicit_solve(SeriesMap({rho}), {1});
        // result in (z, chi, tau): u = tau + 2i z chi
        CHECK(u[0].coeff(Mono(std::vector<std::uint32_t>{0, 0, 1})) == Coeff(1));
        CHECK(u[0].coeff(Mono(std::vector<std::uint32_t>{1, 1, 0})) == Coeff(0, 1, 2, 1));
        CHECK(u[0].term_count() == 2);
    }
    // y - x - y^2: Catalan coefficients 1, 1, 2, 5
    {
        Series rho = var(2, 4, 1) - var(2, 4, 0) -
                     Series::monomial(2, 4, Mono(std::vector<std::uint32_t>{0, 2}), Coeff(1));
        SeriesMap u = implicit_solve(SeriesMap({rho}), {1});
        CHECK(u[0].coeff(Mono::unit(1, 0, 1)) == Coeff(1));
        CHECK(u[0].coeff(Mono::unit(1, 0, 2)) == Coeff(1));
        CHECK(u[0].coeff(Mono::unit(1, 0, 3)) == Coeff(2));
        CHECK(u[0].coeff(Mono::unit(1, 0, 4)) == Coeff(5));
        // re-substitution vanishes
        std::vector<Series> args = {var(1, 4, 0), u[0]};
        CHECK(rho.subst(args).is_zero());
    }
    // pure linear case: u = -(d rho/d y)^{-1} (d rho/d x) x
    {
        // rho = (y1 + 2 y2 - x, y2 - 3 x)
        Series r1 = var(3, 3, 1) + var(3, 3, 2).scaled(Coeff(2)) - var(3, 3, 0);
        Series r2 = var(3, 3, 2) - var(3, 3, 0).scaled(Coeff(3));
        SeriesMap u = implicit_solve(SeriesMap({r1, r2}), {1, 2});
        CHECK(u[0] == (var(1, 3, 0) - var(1, 3, 0).scaled(Coeff(6))));
        CHECK(u[1] == var(1, 3, 0).scaled(Coeff(3)));
    }
    CHECK_THROWS(implicit_solve(SeriesMap({var(2, 3, 0)}), {1})); // singular d/dy
    CHECK_THROWS_AS(implicit_solve(SeriesMap({cst(2, 3, 1) + var(2, 3, 1)}), {1}),
                    std::domain_error); // rho(0) != 0
}

TEST_CASE("map inversion") {
    CHECK(invert_map(SeriesMap::identity(2, 4)).components() ==
          SeriesMap::identity(2, 4).components());

    Series f = var(1, 4, 0) + Series::monomial(1, 4, Mono::unit(1, 0, 2), Coeff(1));
    SeriesMap g = invert_map(SeriesMap({f}));
    CHECK(g[0].coeff(Mono::unit(1, 0, 1)) == Coeff(1));
    CHECK(g[0].coeff(Mono::unit(1, 0, 2)) == Coeff(-1));
    CHECK(g[0].coeff(Mono::unit(1, 0, 3)) == Coeff(2));
    CHECK(g[0].coeff(Mono::unit(1, 0, 4)) == Coeff(-5));

    // pure linear map: the inverse is the inverse matrix
    {
        SeriesMap A(2, 4, 2);
        A[0] = var(2, 4, 0).scaled(Coeff(2)) + var(2, 4, 1);
        A[1] = var(2, 4, 1).scaled(Coeff(3));
        SeriesMap Ainv = invert_map(A);
        // inverse of [[2,1],[0,3]] is [[1/2,-1/6],[0,1/3]]
        CHECK(Ainv[0] == (var(2, 4, 0).scaled(Coeff(1, 2)) + var(2, 4, 1).scaled(Coeff(-1, 6))));
        CHECK(Ainv[1] == var(2, 4, 1).scaled(Coeff(1, 3)));
    }

    // linear map inverse and the double-sided composite identity
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 8; ++trial) {
        SeriesMap F({random_series(rng, 2, 5, 3, true), random_series(rng, 2, 5, 3, true)});
        // force an invertible linear part
        F[0] += var(2, 5, 0).scaled(Coeff(5));
        F[1] += var(2, 5, 1).scaled(Coeff(5));
        SeriesMap G = invert_map(F);
        SeriesMap GF = G.after(F);
        SeriesMap FG = F.after(G);
        for (int i = 0; i < 2; ++i) {
            CHECK(Series::equal_mod(GF[i], var(2, 5, i), 5));
            CHECK(Series::equal_mod(FG[i], var(2, 5, i), 5));
        }
    }
}

TEST_CASE("sigma conjugation") {
    VariableSplit sp = VariableSplit::pairing(2); // (Z1,Z2 | zeta1,zeta2)
    // sigma(i Z1 zeta2) = -i zeta1 Z2
    Series f = Series::monomial(4, 4, Mono(std::vector<std::uint32_t>{1, 0, 0, 1}), Coeff::i());
    Series sf = sigma_conjugate(f, sp);
    CHECK(sf.coeff(Mono(std::vector<std::uint32_t>{0, 1, 1, 0})) == -Coeff::i());
    CHECK(sf.term_count() == 1);

    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 10; ++trial) {
        Series a = random_series(rng, 4, 5, 3, false);
        Series b = random_series(rng, 4, 5, 3, false);
        CHECK(sigma_conjugate(sigma_conjugate(a, sp), sp) == a); // involution
        CHECK(sigma_conjugate(a * b, sp) ==
              sigma_conjugate(a, sp) * sigma_conjugate(b, sp)); // ring morphism
    }
    VariableSplit bad;
    bad.blocks = {{"A", {0}}, {"B", {1, 2}}};
    CHECK_THROWS_AS(Series(3, 2).sigma(bad), std::invalid_argument);
}

TEST_CASE("generic rank") {
    CHECK(generic_rank(SeriesMap::identity(3, 4)).rank == 3);

    // H = (Z1, Z1 Z2, Z3): rank 3
    SeriesMap H(3, 6, 3);
    H[0] = var(3, 6, 0);
    H[1] = var(3, 6, 0) * var(3, 6, 1);
    H[2] = var(3, 6, 2);
    CHECK(generic_rank(H).rank == 3);

    // (x^2, x y): Jacobian [[2x, 0], [y, x]], det 2x^2: rank 2
    SeriesMap F(2, 6, 2);
    F[0] = Series::monomial(2, 6, Mono(std::vector<std::uint32_t>{2, 0}), Coeff(1));
    F[1] = var(2, 6, 0) * var(2, 6, 1);
    CHECK(generic_rank(F).rank == 2);

    // a map too large for symbolic minors takes the curve route
    {
        SeriesMap big(6, 5, 6);
        big[0] = Series::monomial(6, 5, Mono::unit(6, 0, 2), Coeff(1));
        big[1] = var(6, 5, 0) * var(6, 5, 1);
        for (int i = 2; i < 6; ++i) big[i] = var(6, 5, i);
        RankReport rr = generic_rank(big);
        CHECK(rr.route == "curve");
        CHECK(rr.rank == 6);
    }

    // invariance under invertible linear pre/post composition
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 6; ++trial) {
        SeriesMap A = SeriesMap::identity(2, 6);
        A[0] += var(2, 6, 1).scaled(random_small_coeff(rng));
        SeriesMap B = SeriesMap::identity(2, 6);
        B[1] += var(2, 6, 0).scaled(random_small_coeff(rng));
        SeriesMap FA = F.after(A);
        SeriesMap BFA = B.after(FA.truncated(FA.order()));
        CHECK(generic_rank(BFA).rank == 2);
    }
}

TEST_CASE("ideal membership") {
    // x^2 in (x)
    Series x = var(2, 5, 0);
    Series x2 = Series::monomial(2, 5, Mono(std::vector<std::uint32_t>{2, 0}), Coeff(1));
    auto r = ideal_membership(x2, {x}, 5);
    REQUIRE(r.member);
    CHECK(r.witness[0].coeff(Mono::unit(2, 0)) == Coeff(1));

    // x not in (x^2, y): obstruction at degree 1
    Series y = var(2, 5, 1);
    auto r2 = ideal_membership(x, {x2, y}, 5);
    CHECK(!r2.member);
    CHECK(r2.obstruction_degree == 1);

    // witness re-multiplication reproduces f mod degrees beyond k
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 8; ++trial) {
        Series g1 = random_series(rng, 2, 6, 2, true);
        Series g2 = random_series(rng, 2, 6, 2, true);
        Series h1 = random_series(rng, 2, 6, 2, false);
        Series h2 = random_series(rng, 2, 6, 2, false);
        Series f = g1 * h1 + g2 * h2;
        auto mem = ideal_membership(f, {g1, g2}, 5);
        REQUIRE(mem.member);
        Series rebuilt = g1 * mem.witness[0] + g2 * mem.witness[1];
        CHECK(Series::equal_mod(rebuilt, f, 5));
    }
}

TEST_CASE("quotient basis for finite and non-finite ideals") {
    // (z1^2, z2): standard monomials {1, z1}
    Series z1sq = Series::monomial(2, 6, Mono(std::vector<std::uint32_t>{2, 0}), Coeff(1));
    Series z2 = var(2, 6, 1);
    auto qb = quotient_basis({z1sq, z2}, 6);
    REQUIRE(qb.finite);
    CHECK(qb.multiplicity == 2);
    CHECK(qb.exact);

    // (Z1, Z1 Z2, Z3) in C^3: powers of Z2 survive
    Series Z1 = var(3, 5, 0), Z3 = var(3, 5, 2);
    Series Z12 = var(3, 5, 0) * var(3, 5, 1);
    auto qb2 = quotient_basis({Z1, Z12, Z3}, 5);
    CHECK(!qb2.finite);
    CHECK(!qb2.surviving.empty());
}

TEST_CASE("serialization is graded-lex and deterministic") {
    Series f(2, 4);
    f.set_coeff(Mono(std::vector<std::uint32_t>{2, 0}), Coeff(1, 2));
    f.set_coeff(Mono(std::vector<std::uint32_t>{0, 1}), Coeff(0, 1, -3, 4));
    CHECK(f.str() == "(0-3/4*i)*x2 + (1/2)*x1^2");
}
