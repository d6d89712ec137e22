#ifndef CRFORGE_TESTS_ORACLE_DENSE_HPP
#define CRFORGE_TESTS_ORACLE_DENSE_HPP

// Brute-force dense polynomial arithmetic over Coeff, independent of the
// sparse Series implementation it cross-checks. Exponents are bounded by
// `cap` in every variable, which is enough for total-degree-truncated
// comparisons with cap >= order.

#include "crforge/series.hpp"

#include <random>
#include <vector>

namespace crforge::testing {

struct Dense {
    int nvars;
    int cap; // exponents range over [0, cap]
    std::vector<Coeff> c;

    Dense(int nv, int cap_) : nvars(nv), cap(cap_) {
        std::size_t size = 1;
        for (int i = 0; i < nv; ++i) size *= static_cast<std::size_t>(cap + 1);
        c.assign(size, Coeff::zero());
    }

    std::size_t index(const std::vector<int>& e) const {
        std::size_t idx = 0;
        for (int i = 0; i < nvars; ++i) idx = idx * (cap + 1) + e[i];
        return idx;
    }

    Coeff& at(const std::vector<int>& e) { return c[index(e)]; }
    const Coeff& at(const std::vector<int>& e) const { return c[index(e)]; }

    template <typename F> void for_each(F&& f) const {
        std::vector<int> e(nvars, 0);
        while (true) {
            f(e, at(e));
            int i = nvars - 1;
            while (i >= 0 && e[i] == cap) e[i--] = 0;
            if (i < 0) break;
            ++e[i];
        }
    }
};

inline Dense dense_mul(const Dense& a, const Dense& b) {
    Dense r(a.nvars, a.cap);
    a.for_each([&](const std::vector<int>& ea, const Coeff& ca) {
        if (ca.is_zero()) return;
        b.for_each([&](const std::vector<int>& eb, const Coeff& cb) {
            if (cb.is_zero()) return;
            std::vector<int> e(a.nvars);
            for (int i = 0; i < a.nvars; ++i) {
                e[i] = ea[i] + eb[i];
                if (e[i] > a.cap) return;
            }
            r.at(e) += ca * cb;
        });
    });
    return r;
}

inline Dense dense_from_series(const Series& s, int cap) {
    Dense d(s.nvars(), cap);
    for (const auto& [m, coeff] : s.terms()) {
        std::vector<int> e(s.nvars());
        bool fits = true;
        for (int i = 0; i < s.nvars(); ++i) {
            e[i] = static_cast<int>(m[i]);
            if (e[i] > cap) fits = false;
        }
        if (fits) d.at(e) += coeff;
    }
    return d;
}

/// Compare a Series against a dense polynomial on all monomials of total
/// degree <= deg_bound.
inline bool dense_matches(const Series& s, const Dense& d, int deg_bound) {
    bool ok = true;
    d.for_each([&](const std::vector<int>& e, const Coeff& dc) {
        int deg = 0;
        for (int v : e) deg += v;
        if (deg > deg_bound) return;
        Mono m(static_cast<std::size_t>(s.nvars()));
        for (int i = 0; i < s.nvars(); ++i) m.set(i, static_cast<std::uint32_t>(e[i]));
        if (!(s.coeff(m) == dc)) ok = false;
    });
    return ok;
}

/// Dense composition f(g_1, ..., g_m) truncated to total degree cap.
inline Dense dense_compose(const Dense& f, const std::vector<Dense>& args) {
    Dense r(args[0].nvars, args[0].cap);
    f.for_each([&](const std::vector<int>& e, const Coeff& fc) {
        if (fc.is_zero()) return;
        Dense prod(args[0].nvars, args[0].cap);
        prod.at(std::vector<int>(args[0].nvars, 0)) = fc;
        for (int i = 0; i < f.nvars; ++i)
            for (int k = 0; k < e[i]; ++k) prod = dense_mul(prod, args[i]);
        for (std::size_t idx = 0; idx < r.c.size(); ++idx) r.c[idx] += prod.c[idx];
    });
    return r;
}

inline Coeff random_small_coeff(std::mt19937_64& rng, bool complex_part = true) {
    std::uniform_int_distribution<int> num(-4, 4);
    std::uniform_int_distribution<int> den(1, 3);
    return Coeff(num(rng), den(rng), complex_part ? num(rng) : 0, den(rng));
}

inline Series random_series(std::mt19937_64& rng, int nvars, int order, int maxdeg,
                            bool fix_origin, double density = 0.7) {
    Series s(nvars, order);
    std::uniform_real_distribution<double> gate(0.0, 1.0);
    for (const auto& m : monos_upto(nvars, static_cast<std::uint32_t>(maxdeg))) {
        if (fix_origin && m.deg() == 0) continue;
        if (gate(rng) > density) continue;
        s.set_coeff(m, random_small_coeff(rng));
    }
    return s;
}

} // namespace crforge::testing

#endif
