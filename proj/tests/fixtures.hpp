#ifndef CRFORGE_TESTS_FIXTURES_HPP
#define CRFORGE_TESTS_FIXTURES_HPP

// Hand-built complexified defining systems for the example manifolds
// of the fixture corpus, constructed directly (independent of the manifest parser).

#include "crforge/manifold.hpp"
#include "crforge/reflection.hpp"

namespace crforge::testing {

// ring layout for N=2, d=1: z=0, w=1, chi=2, tau=3
inline GenericManifold quadric(int order = 10) {
    Series rho = (Series::variable(4, order, 1) - Series::variable(4, order, 3))
                     .scaled(Coeff(0, 1, -1, 2)) // (w - tau) / 2i
                 - Series::variable(4, order, 0) * Series::variable(4, order, 2);
    return GenericManifold::from_defining(SeriesMap({rho}), 2, 1, order, "quadric");
}

inline GenericManifold hyperplane(int order = 10) {
    Series rho = (Series::variable(4, order, 1) - Series::variable(4, order, 3))
                     .scaled(Coeff(0, 1, -1, 2));
    return GenericManifold::from_defining(SeriesMap({rho}), 2, 1, order, "hyperplane");
}

// ring layout for N=3, d=1: Z1=0, Z2=1, Z3=2, zeta1=3, zeta2=4, zeta3=5
inline GenericManifold twist_manifold(int order = 10) {
    auto v = [&](int i) { return Series::variable(6, order, i); };
    Series rho = (v(2) - v(5)).scaled(Coeff(0, 1, -1, 2)) - v(0) * v(1) * v(3) * v(4);
    return GenericManifold::from_defining(SeriesMap({rho}), 3, 1, order, "twist");
}

// Im Z3 = |Z1^2 Z2|^2 + |Z1|^2
inline GenericManifold nonfinite_M(int order = 10) {
    auto v = [&](int i) { return Series::variable(6, order, i); };
    Series rho = (v(2) - v(5)).scaled(Coeff(0, 1, -1, 2)) -
                 v(0) * v(0) * v(1) * v(3) * v(3) * v(4) - v(0) * v(3);
    return GenericManifold::from_defining(SeriesMap({rho}), 3, 1, order, "nonfiniteM");
}

// Im Z3 = |Z1 Z2|^2 + |Z1|^2
inline GenericManifold nonfinite_Mp(int order = 10) {
    auto v = [&](int i) { return Series::variable(6, order, i); };
    Series rho = (v(2) - v(5)).scaled(Coeff(0, 1, -1, 2)) - v(0) * v(1) * v(3) * v(4) -
                 v(0) * v(3);
    return GenericManifold::from_defining(SeriesMap({rho}), 3, 1, order, "nonfiniteMp");
}

inline MapGerm identity_germ(int N, int order) {
    return MapGerm(SeriesMap::identity(N, order), N, N);
}

// H = (Z1 e^h, Z2 e^{-h}, Z3) with h the truncation of sum n! x^n
inline MapGerm twist_map_fixture(int order = 10) {
    Series h(3, order);
    mpz_class fact = 1;
    for (int nn = 1; nn <= order; ++nn) {
        fact *= nn;
        h.set_coeff(Mono::unit(3, 0, static_cast<std::uint32_t>(nn)), Coeff(mpq_class(fact)));
    }
    Series eh = h.exp();
    Series emh = (-h).exp();
    SeriesMap H(3, order, 3);
    H[0] = Series::variable(3, order, 0) * eh;
    H[1] = Series::variable(3, order, 1) * emh;
    H[2] = Series::variable(3, order, 2);
    return MapGerm(std::move(H), 3, 3);
}

// H = (Z1, Z1 Z2, Z3)
inline MapGerm nonfinite_map(int order = 10) {
    SeriesMap H(3, order, 3);
    H[0] = Series::variable(3, order, 0);
    H[1] = Series::variable(3, order, 0) * Series::variable(3, order, 1);
    H[2] = Series::variable(3, order, 2);
    return MapGerm(std::move(H), 3, 3);
}

} // namespace crforge::testing

#endif
