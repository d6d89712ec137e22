#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "oracle_dense.hpp"

#include "crforge/jets.hpp"
#include "route_oracle.hpp"

using namespace crforge;
using namespace crforge::testing;

namespace {

std::vector<int> iota_vec(int n) {
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = i;
    return v;
}

} // namespace

TEST_CASE("jets of maps: identity and x^2") {
    SeriesMap id = SeriesMap::identity(2, 5);
    JetValue j = jet_of_map(id, 1, iota_vec(2));
    CHECK(j.at(Mono(2))[0] == Series::variable(2, 5, 0));
    CHECK(j.at(Mono(2))[1] == Series::variable(2, 5, 1));
    CHECK(j.at(Mono::unit(2, 0))[0] == Series::constant(2, 4, Coeff(1)));
    CHECK(j.at(Mono::unit(2, 0))[1].is_zero());
    CHECK(j.at(Mono::unit(2, 1))[1] == Series::constant(2, 4, Coeff(1)));

    SeriesMap f(1, 5, 1);
    f[0] = Series::monomial(1, 5, Mono::unit(1, 0, 2), Coeff(1));
    JetValue j2 = jet_of_map(f, 2, iota_vec(1));
    CHECK(j2.at(Mono(1))[0] == f[0]);
    CHECK(j2.at(Mono::unit(1, 0))[0] == Series::variable(1, 4, 0).scaled(Coeff(2)));
    CHECK(j2.at(Mono::unit(1, 0, 2))[0] == Series::constant(1, 3, Coeff(2)));

    CHECK_THROWS_AS(jet_of_map(f, 7, iota_vec(1)), std::domain_error);
}

TEST_CASE("prolongation of y^2 at k = 1, l = 1 and of the identity") {
    SeriesMap phi(1, 5, 1);
    phi[0] = Series::monomial(1, 5, Mono::unit(1, 0, 2), Coeff(1));
    Prolongation pr = prolong(phi, 1, 1);
    // nu = 0 component: Lambda_0^2 (coefficient-only)
    {
        const JetPolynomial& p = pr.at(Mono(1))[0];
        REQUIRE(p.terms.size() == 1);
        CHECK(p.terms.begin()->first.empty());
        CHECK(p.terms.begin()->second ==
              Series::monomial(1, 5, Mono::unit(1, 0, 2), Coeff(1)));
    }
    // nu = 1 component: 2 Lambda_0 Lambda_1
    {
        const JetPolynomial& p = pr.at(Mono::unit(1, 0))[0];
        JetShape sh(1, 1, 1);
        JMono lam1{{sh.var_id(Mono::unit(1, 0), 0), 1}};
        auto it = p.terms.find(lam1);
        REQUIRE(it != p.terms.end());
        CHECK(it->second == Series::variable(1, 4, 0).scaled(Coeff(2)));
    }
    // the identity map prolongs to the identity on jet coordinates
    Prolongation pid = prolong(SeriesMap::identity(2, 4), 2, 3);
    JetShape sh(3, 2, 2);
    for (const auto& nu : pid.idx) {
        for (int c = 0; c < 2; ++c) {
            const JetPolynomial& p = pid.at(nu)[c];
            if (nu.deg() == 0) {
                REQUIRE(p.terms.size() == 1);
                CHECK(p.terms.begin()->second == Series::variable(2, 4, c));
            } else {
                // exactly the jet coordinate Lambda_{nu, c}
                int nonzero = 0;
                for (const auto& [m, coeff] : p.terms) {
                    if (coeff.is_zero()) continue;
                    ++nonzero;
                    CHECK(m == JMono{{sh.var_id(nu, c), 1}});
                    CHECK(coeff.constant_term() == Coeff(1));
                }
                CHECK(nonzero == 1);
            }
        }
    }
    CHECK_THROWS_AS(prolong(SeriesMap({Series::constant(1, 3, Coeff(1))}), 1, 1),
                    std::domain_error);
}

TEST_CASE("defining identity j^l(phi o F) = phi^(l)(j^l F) on random pairs") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 25; ++trial) {
        int k = 1 + static_cast<int>(rng() % 2);
        int r = 1 + static_cast<int>(rng() % 2);
        int s = 1 + static_cast<int>(rng() % 2);
        int l = 1 + static_cast<int>(rng() % 2);
        int order = 6;
        std::vector<Series> phic, Fc;
        for (int i = 0; i < s; ++i) phic.push_back(random_series(rng, r, order, 3, true));
        for (int i = 0; i < r; ++i) Fc.push_back(random_series(rng, k, order, 3, true));
        SeriesMap phi(phic), F(Fc);

        JetValue jF = jet_of_map(F, l, iota_vec(k));
        JetValue lhs = jet_of_map(SeriesMap(phi).after(F), l, iota_vec(k));
        JetValue rhs = evaluate_prolongation(prolong(phi, l, k), jF);
        for (std::size_t p = 0; p < lhs.idx.size(); ++p)
            for (int c = 0; c < s; ++c) {
                int cmp = std::min(lhs.entries[p][c].order(), rhs.entries[p][c].order());
                CHECK(Series::equal_mod(lhs.entries[p][c], rhs.entries[p][c], cmp));
            }
    }
}

TEST_CASE("parameter form of the defining identity") {
    // j_x^l(phi(G(x, t))) = phi^(l)(j_x^l G(x, t)) with a spare parameter
    std::mt19937_64 rng(103);
    SeriesMap phi({random_series(rng, 1, 6, 3, true)});
    SeriesMap G({random_series(rng, 2, 6, 3, true)}); // variables (x, t)
    JetValue jG = jet_of_map(G, 2, {0});
    JetValue lhs = jet_of_map(phi.after(G), 2, {0});
    JetValue rhs = evaluate_prolongation(prolong(phi, 2, 1), jG);
    for (std::size_t p = 0; p < lhs.idx.size(); ++p) {
        int cmp = std::min(lhs.entries[p][0].order(), rhs.entries[p][0].order());
        CHECK(Series::equal_mod(lhs.entries[p][0], rhs.entries[p][0], cmp));
    }
}

TEST_CASE("jet of a composite along the Segre parametrization") {
    // j^l(H o v^1) computed directly equals the prolongation applied to j^l v^1
    GenericManifold M = quadric(8);
    SegreTower tower(M, SegreMapping::standard(M), 1);
    const SeriesMap& v1 = tower.v(1);
    std::mt19937_64 rng(211);
    SeriesMap H({random_series(rng, 2, 8, 3, true), random_series(rng, 2, 8, 3, true)});
    JetValue jv = jet_of_map(v1, 2, iota_vec(1));
    JetValue lhs = jet_of_map(H.after(v1), 2, iota_vec(1));
    JetValue rhs = evaluate_prolongation(prolong(H, 2, 1), jv);
    for (std::size_t p = 0; p < lhs.idx.size(); ++p)
        for (int c = 0; c < 2; ++c) {
            int cmp = std::min(lhs.entries[p][c].order(), rhs.entries[p][c].order());
            CHECK(Series::equal_mod(lhs.entries[p][c], rhs.entries[p][c], cmp));
        }
}

TEST_CASE("triangularity: phi^(l)_nu uses only Lambda_alpha with alpha <= nu") {
    std::mt19937_64 rng(107);
    for (int trial = 0; trial < 6; ++trial) {
        SeriesMap phi({random_series(rng, 2, 6, 3, true), random_series(rng, 2, 6, 3, true)});
        Prolongation pr = prolong(phi, 2, 2);
        for (std::size_t p = 0; p < pr.idx.size(); ++p)
            for (const auto& jp : pr.comps[p]) CHECK(jp.triangular_in(pr.idx[p]));
    }
}

TEST_CASE("inverse compatibility (phi^(l))^{-1} = (phi^{-1})^(l)") {
    std::mt19937_64 rng(109);
    for (int trial = 0; trial < 10; ++trial) {
        // invertible phi on C^2
        SeriesMap phi({random_series(rng, 2, 6, 3, true), random_series(rng, 2, 6, 3, true)});
        phi[0] += Series::variable(2, 6, 0).scaled(Coeff(4));
        phi[1] += Series::variable(2, 6, 1).scaled(Coeff(4));
        SeriesMap phinv = invert_map(phi);
        Prolongation pr = prolong(phi, 1, 2);
        Prolongation printv = prolong(phinv, 1, 2);
        SeriesMap F({random_series(rng, 2, 6, 3, true), random_series(rng, 2, 6, 3, true)});
        JetValue jF = jet_of_map(F, 1, iota_vec(2));
        JetValue round = evaluate_prolongation(printv, evaluate_prolongation(pr, jF));
        for (std::size_t p = 0; p < jF.idx.size(); ++p)
            for (int c = 0; c < 2; ++c) {
                int cmp = std::min(round.entries[p][c].order(), jF.entries[p][c].order());
                CHECK(Series::equal_mod(round.entries[p][c], jF.entries[p][c], cmp));
            }
    }
}

TEST_CASE("universal polynomial identities") {
    const auto& uni = universal_polynomials(2, 2, 3);
    // P_{nu 0 nu} = 1 for nu = (2, 0) (and in fact for every nu)
    for (const auto& nu : monos_upto(2, 3)) {
        const LamPoly* p = uni.lookupP(nu, Mono(2), nu);
        REQUIRE(p != nullptr);
        CHECK(p->is_one());
    }
    // R_00 = 1, R_{beta 0} = 0 for beta != 0
    const LamPoly* r00 = uni.lookupR(Mono(2), Mono(2));
    REQUIRE(r00 != nullptr);
    CHECK(r00->is_one());
    for (const auto& beta : monos_upto(2, 3)) {
        if (beta.deg() == 0) continue;
        const LamPoly* r = uni.lookupR(beta, Mono(2));
        CHECK((r == nullptr || r->is_zero()));
    }
    // N = N' = 1, beta = (2): d^2[g(f(x))] = g''(f')^2 + g' f''
    const auto& uni1 = universal_polynomials(1, 1, 2);
    JetShape sh(1, 1, 2);
    const LamPoly* r21 = uni1.lookupR(Mono::unit(1, 0, 2), Mono::unit(1, 0, 1));
    REQUIRE(r21 != nullptr);
    CHECK(r21->terms.size() == 1);
    CHECK(r21->terms.begin()->first == JMono{{sh.var_id(Mono::unit(1, 0, 2), 0), 1}});
    CHECK(r21->terms.begin()->second == Coeff(1));
    const LamPoly* r22 = uni1.lookupR(Mono::unit(1, 0, 2), Mono::unit(1, 0, 1).operator+(
                                                               Mono::unit(1, 0, 1)));
    REQUIRE(r22 != nullptr);
    CHECK(r22->terms.size() == 1);
    CHECK(r22->terms.begin()->first == JMono{{sh.var_id(Mono::unit(1, 0, 1), 0), 2}});
    CHECK(r22->terms.begin()->second == Coeff(1));
}

TEST_CASE("ideal prolongation: coordinate ideal and quadric") {
    // I = (y) in C^1, k = 1, l = 1: generators (Lambda_0, Lambda_1)
    SeriesMap gen({Series::variable(1, 4, 0)});
    auto gens = ideal_prolong(gen, 1, 1);
    REQUIRE(gens.size() == 2);
    CHECK(gens[0].terms.begin()->first.empty());
    CHECK(gens[0].terms.begin()->second == Series::variable(1, 4, 0));
    {
        JetShape sh(1, 1, 1);
        auto it = gens[1].terms.find(JMono{{sh.var_id(Mono::unit(1, 0), 0), 1}});
        REQUIRE(it != gens[1].terms.end());
        CHECK(it->second.constant_term() == Coeff(1));
    }

    // quadric: l = 1 gives 1 + N = 3 generators
    GenericManifold M = quadric(8);
    auto qgens = ideal_prolong(M.rho_tilde(), 1, 2);
    CHECK(qgens.size() == 3);

    // not a manifold ideal: dependent differentials
    CHECK_THROWS_AS(ideal_prolong(SeriesMap({Series::variable(1, 4, 0),
                                             Series::variable(1, 4, 0).scaled(Coeff(2))}),
                                  1, 1),
                    std::domain_error);
}

TEST_CASE("Lemma on generator equality: the two ideals I^(l) coincide (mutual membership)") {
    // flatten the prolonged generators of rho' and rho_tilde' on the quadric
    GenericManifold M = quadric(6);
    const int N = 2;
    Prolongation prp = prolong(M.rho(), 1, N);
    Prolongation prt = prolong(M.rho_tilde(), 1, N);
    std::vector<Series> gens_p, gens_t;
    const int flat_order = 3;
    for (const auto& nu : prp.idx) {
        gens_p.push_back(prp.at(nu)[0].flatten(flat_order));
        gens_t.push_back(prt.at(nu)[0].flatten(flat_order));
    }
    for (const auto& f : gens_p) {
        auto r = ideal_membership(f, gens_t, flat_order);
        CHECK(r.member);
    }
    for (const auto& f : gens_t) {
        auto r = ideal_membership(f, gens_p, flat_order);
        CHECK(r.member);
    }
}

TEST_CASE("expansion routes for rho'^(l) agree with the direct prolongation") {
    for (const GenericManifold& Mp : {quadric(8), twist_manifold(8), nonfinite_Mp(8)}) {
        const int N = Mp.N();
        const int l = 2;
        Prolongation direct = prolong(Mp.rho(), l, N);
        for (const auto& nu : direct.idx) {
            auto r1 = assemble_route(Mp, N, l, nu, true);
            auto r2 = assemble_route(Mp, N, l, nu, false);
            for (int c = 0; c < Mp.d(); ++c) {
                CHECK(JetPolynomial::equal_mod(direct.at(nu)[c], r1[c], Mp.order() - l));
                CHECK(JetPolynomial::equal_mod(direct.at(nu)[c], r2[c], Mp.order() - l));
            }
        }
    }
}

TEST_CASE("rank fact for the jet-space test map") {
    // phi(A, x) = (d^alpha_x(x_1 sum_nu A_nu x^nu))_{|alpha| <= l} has
    // generic rank dim J^l_0(C^k, C^r) at small sizes
    auto build_and_check = [](int k, int l, int r) {
        auto nus = monos_upto(k, static_cast<std::uint32_t>(l));
        const int mdim = static_cast<int>(nus.size()) * r;
        const int nv = mdim + k; // A-coordinates then x
        // the certifying minor can reach degree ~ mdim (l+1); keep room
        const int order = l + 2 * mdim * (l + 1);
        // s_i = x_1 sum_nu A_{nu, i} x^nu
        std::vector<Series> s(r, Series(nv, order));
        for (int i = 0; i < r; ++i) {
            for (std::size_t p = 0; p < nus.size(); ++p) {
                Mono m(nv);
                m.set(static_cast<int>(p) * r + i, 1);
                m.set(mdim, m[mdim] + nus[p][0] + 1); // x_1^{nu_1 + 1}
                for (int v = 1; v < k; ++v) m.set(mdim + v, nus[p][v]);
                s[i].set_coeff(m, Coeff(1));
            }
        }
        std::vector<Series> comps;
        for (const auto& alpha : nus) {
            Mono full(nv);
            for (int v = 0; v < k; ++v) full.set(mdim + v, alpha[v]);
            for (int i = 0; i < r; ++i)
                comps.push_back(s[i].derivative(full).truncated(order - l));
        }
        RankReport rr = generic_rank(SeriesMap(comps));
        CHECK(rr.rank == mdim);
    };
    build_and_check(1, 1, 1);
    build_and_check(1, 2, 1);
    build_and_check(2, 1, 1);
    build_and_check(1, 1, 2);
}
