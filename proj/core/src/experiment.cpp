#include "crforge/linalg.hpp"
#include "crforge/reflection.hpp"

#include <cstdlib>
#include <cstdio>
#include <memory>
#include <random>

namespace crforge {

namespace {

std::vector<int> iota_map(int count, int offset = 0) {
    std::vector<int> m(count);
    for (int i = 0; i < count; ++i) m[i] = offset + i;
    return m;
}

/// Residual of the parametrized sends-into condition for a candidate map.
std::vector<Series> sends_residual(const GenericManifold& M, const GenericManifold& Mp,
                                   const SeriesMap& Hcomp) {
    MapGerm g(Hcomp, M.N(), Mp.N());
    SegreMapping gamma = SegreMapping::standard(M);
    SeriesMap W = Hcomp.bar().subst(gamma.gamma_bar().components());
    const int nv = M.N() + M.n();
    const int order = std::min(M.order(), Mp.order());
    SeriesMap Hl = Hcomp.lift(nv, iota_map(M.N())).truncated(order);

    std::vector<Series> args(2 * Mp.N(), Series(nv, order));
    for (int i = 0; i < Mp.n(); ++i) args[Mp.zvar(i)] = Hl[i];
    for (int k = 0; k < Mp.d(); ++k) args[Mp.wvar(k)] = Hl[Mp.n() + k];
    for (int i = 0; i < Mp.n(); ++i) args[Mp.chivar(i)] = W[i].truncated(order);
    std::vector<Series> out;
    for (int k = 0; k < Mp.d(); ++k)
        out.push_back(W[Mp.n() + k].truncated(order) - Mp.Qbar()[k].subst(args));
    return out;
}

Coeff small_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-3, 3);
    std::uniform_int_distribution<int> den(1, 3);
    return Coeff(num(rng), den(rng), num(rng), den(rng));
}

} // namespace

namespace {

/// Fixed linearization data for repeated sampling around H0: columns are
/// the exact directional derivatives of the sends-into residual along unit
/// perturbations of each free coefficient (degrees K+1..order, split into
/// real and imaginary parts).
struct SelfMapSampler {
    const GenericManifold* M;
    const GenericManifold* Mp;
    MapGerm H0;
    int K;
    int order;

    struct Dir {
        int comp;
        Mono m;
        bool imag;
        int stage = 0; // first residual degree this coefficient can touch
    };
    std::vector<Dir> dirs;
    // residual rows ordered by degree so valuation thresholds are prefixes
    std::vector<std::pair<int, Mono>> rows; // (residual comp, monomial)
    std::map<std::pair<int, Mono>, int> rowpos;
    Matrix A;
    struct Stage {
        std::vector<int> cols;    // dirs assigned to this stage
        std::vector<int> row_ids; // rows of this degree
        std::unique_ptr<LinearSolver> solver;
    };
    mutable std::map<int, Stage> stages;

    SelfMapSampler(const GenericManifold& M_, const GenericManifold& Mp_, const MapGerm& H0_,
                   int K_)
        : M(&M_), Mp(&Mp_), H0(H0_), K(K_), order(std::min(M_.order(), Mp_.order())) {
        const int N = M->N(), n = M->n(), dp = Mp->d();
        for (int c = 0; c < Mp->N(); ++c)
            for (const auto& m : monos_upto(N, static_cast<std::uint32_t>(order)))
                if (static_cast<int>(m.deg()) > K)
                    for (int part = 0; part < 2; ++part)
                        dirs.push_back({c, m, part == 1, 0});
        for (int deg = K + 1; deg <= order; ++deg)
            for (int c = 0; c < dp; ++c)
                for (const auto& m : monos_of_degree(N + n, static_cast<std::uint32_t>(deg))) {
                    rowpos.emplace(std::make_pair(c, m), static_cast<int>(rows.size()));
                    rows.emplace_back(c, m);
                }

        // exact linearization of the residual at H0:
        //   L(P) = sum_c drho'/dZ'_c (H0, W0) P_c(Z)
        //        + sum_c drho'/dzeta'_c (H0, W0) conj(P)_c(gammabar)
        const int Np = Mp->N();
        const int nv = N + n;
        SegreMapping gamma = SegreMapping::standard(*M);
        SeriesMap gbar = gamma.gamma_bar();
        SeriesMap W0 = H0.H.bar().subst(gbar.components()).truncated(order);
        SeriesMap H0l = H0.H.lift(nv, iota_map(N)).truncated(order);
        std::vector<Series> at(2 * Np);
        for (int c = 0; c < Np; ++c) at[c] = H0l[c];
        for (int c = 0; c < Np; ++c) at[Np + c] = W0[c];
        SeriesMap rhop = Mp->rho().truncated(order);
        std::vector<std::vector<Series>> dZp(dp), dZe(dp);
        for (int k = 0; k < dp; ++k) {
            dZp[k].resize(Np);
            dZe[k].resize(Np);
            for (int c = 0; c < Np; ++c) {
                dZp[k][c] = rhop[k].derivative(c).subst(at);
                dZe[k][c] = rhop[k].derivative(Np + c).subst(at);
            }
        }
        std::map<Mono, Series> gbar_pow; // gammabar^m per perturbation monomial
        auto gpow = [&](const Mono& m) -> const Series& {
            auto it = gbar_pow.find(m);
            if (it != gbar_pow.end()) return it->second;
            Series prod = Series::constant(nv, order, Coeff::one());
            for (int v = 0; v < N; ++v)
                for (std::uint32_t e = 0; e < m[v]; ++e) prod = prod * gbar[v];
            return gbar_pow.emplace(m, std::move(prod)).first->second;
        };

        A = Matrix(static_cast<int>(rows.size()) * 2, static_cast<int>(dirs.size()));
        for (std::size_t col = 0; col < dirs.size(); ++col) {
            const Dir& dir = dirs[col];
            Coeff coeff = dir.imag ? Coeff::i() : Coeff::one();
            Series pz = Series::monomial(N, order, dir.m, coeff).lift(nv, iota_map(N));
            Series pbar = gpow(dir.m).scaled(coeff.conj());
            for (int k = 0; k < dp; ++k) {
                Series L = dZp[k][dir.comp] * pz + dZe[k][dir.comp] * pbar;
                for (const auto& [m, v] : L.terms()) {
                    auto it = rowpos.find({k, m});
                    if (it == rowpos.end()) continue;
                    A.at(2 * it->second, static_cast<int>(col)) = Coeff(v.re());
                    A.at(2 * it->second + 1, static_cast<int>(col)) = Coeff(v.im());
                }
            }
        }

        // a coefficient of degree d on component c first meets the residual
        // at degree d + lag(c), where lag(c) is the valuation of the
        // corresponding derivative factor of rho'
        std::vector<int> lag(Np, order + 1);
        for (int c = 0; c < Np; ++c)
            for (int k = 0; k < dp; ++k) {
                lag[c] = std::min(lag[c], dZp[k][c].valuation());
                lag[c] = std::min(lag[c], dZe[k][c].valuation());
            }
        for (auto& d : dirs) d.stage = static_cast<int>(d.m.deg()) + lag[d.comp];
    }

    // residual degree e is affine in the stage-e coefficients once all
    // lower stages are pinned; higher stages cannot reach degree e
    const Stage& stage_system(int e) const {
        auto it = stages.find(e);
        if (it != stages.end()) return it->second;
        Stage st;
        for (std::size_t c = 0; c < dirs.size(); ++c)
            if (dirs[c].stage == e) st.cols.push_back(static_cast<int>(c));
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (static_cast<int>(rows[r].second.deg()) == e)
                st.row_ids.push_back(static_cast<int>(r));
        Matrix sub(static_cast<int>(st.row_ids.size()) * 2, static_cast<int>(st.cols.size()));
        for (std::size_t i = 0; i < st.row_ids.size(); ++i)
            for (std::size_t j = 0; j < st.cols.size(); ++j) {
                sub.at(static_cast<int>(2 * i), static_cast<int>(j)) =
                    A.at(2 * st.row_ids[i], st.cols[j]);
                sub.at(static_cast<int>(2 * i + 1), static_cast<int>(j)) =
                    A.at(2 * st.row_ids[i] + 1, st.cols[j]);
            }
        st.solver = std::make_unique<LinearSolver>(sub);
        return stages.emplace(e, std::move(st)).first->second;
    }

    std::optional<MapGerm> sample(int perturbation_degree, unsigned seed) const {
        {
            auto base = sends_residual(*M, *Mp, H0.H.truncated(order));
            for (const auto& r : base)
                if (!r.is_zero()) return std::nullopt; // H0 must itself send M into M'
        }
        // first try a random direction in all free degrees and project it;
        // if that jet turns out obstructed, fall back to directions whose
        // first effect lies beyond the truncation order (pure kernel)
        for (int attempt = 0; attempt < 2; ++attempt) {
            auto r = sample_attempt(perturbation_degree, seed + 1000003u * attempt,
                                    attempt == 1);
            if (r) return r;
        }
        return MapGerm(H0.H.truncated(order), M->N(), Mp->N());
    }

    std::optional<MapGerm> sample_attempt(int perturbation_degree, unsigned seed,
                                          bool kernel_only) const {
        std::mt19937_64 rng(seed);
        SeriesMap cur = H0.H.truncated(order);
        std::uniform_int_distribution<int> gate(0, 2);
        for (const auto& dir : dirs) {
            if (dir.imag) continue; // both parts drawn together below
            if (static_cast<int>(dir.m.deg()) > perturbation_degree) continue;
            if (kernel_only && dir.stage <= order) continue;
            if (gate(rng) == 0) cur[dir.comp].add_to_coeff(dir.m, small_rational(rng));
        }

        // staged sweep over residual degrees
        for (int e = K + 1; e <= order; ++e) {
            const Stage& st = stage_system(e);
            auto resid = sends_residual(*M, *Mp, cur);
            int val = order + 1;
            for (const auto& r : resid)
                if (!r.is_zero()) val = std::min(val, r.valuation());
            if (std::getenv("CRFORGE_SAMPLER_TRACE"))
                fprintf(stderr, "[sampler] stage %d val %d cols %d\n", e, val,
                        static_cast<int>(st.cols.size()));
            if (val > order) break;
            if (val <= K) return std::nullopt;
            if (val > e) continue;
            if (val < e) return std::nullopt; // stage invariant broken
            std::vector<Coeff> b(st.row_ids.size() * 2, Coeff::zero());
            for (std::size_t i = 0; i < st.row_ids.size(); ++i) {
                Coeff v = resid[rows[st.row_ids[i]].first].coeff(rows[st.row_ids[i]].second);
                b[2 * i] = -Coeff(v.re());
                b[2 * i + 1] = -Coeff(v.im());
            }
            auto s = st.solver->solve(b);
            if (!s) {
                if (std::getenv("CRFORGE_SAMPLER_TRACE"))
                    fprintf(stderr, "[sampler] obstructed at degree %d\n", e);
                return std::nullopt; // this jet does not extend
            }
            for (std::size_t k2 = 0; k2 < st.cols.size(); ++k2) {
                if ((*s)[k2].is_zero()) continue;
                const Dir& dir = dirs[st.cols[k2]];
                Coeff add = dir.imag ? Coeff(mpq_class(0), (*s)[k2].re())
                                     : Coeff((*s)[k2].re(), mpq_class(0));
                cur[dir.comp].add_to_coeff(dir.m, add);
            }
        }
        {
            auto resid = sends_residual(*M, *Mp, cur);
            for (const auto& r : resid)
                if (!r.is_zero()) return std::nullopt;
        }
        return MapGerm(cur, M->N(), Mp->N());
    }
};

} // namespace

std::optional<MapGerm> sample_self_map(const GenericManifold& M, const GenericManifold& Mp,
                                       const MapGerm& H0, int K, int perturbation_degree,
                                       unsigned seed) {
    SelfMapSampler s(M, Mp, H0, K);
    return s.sample(perturbation_degree, seed);
}

DeterminationReport determination_experiment(const GenericManifold& M,
                                             const GenericManifold& Mp, const MapGerm& H0,
                                             int K, int trials, int perturbation_degree,
                                             unsigned seed) {
    DeterminationReport rep;
    rep.trials = trials;
    rep.K = K;
    rep.margin_order = K;
    rep.working_order = std::min(M.order(), Mp.order());
    rep.seed = seed;

    // preconditions of the experiment (reported, not silently assumed)
    SendsIntoReport s0 = sends_into(M, Mp, H0);
    if (!s0.holds)
        throw std::domain_error("determination_experiment: H0 does not send M into M'");

    int j0 = 2;
    {
        FiniteTypeReport ft = finite_type_check(M, FiniteTypeRoute::Segre);
        if (ft.verdict == Verdict::Affirmative) j0 = ft.segre_j0;
    }

    const bool self = M.N() == Mp.N() && M.d() == Mp.d();
    std::unique_ptr<SelfMapSampler> sampler;
    if (self && trials > 1) sampler = std::make_unique<SelfMapSampler>(M, Mp, H0, K);
    std::mt19937_64 seeder(seed);
    for (int t = 0; t < trials; ++t) {
        TrialOutcome out;
        out.trial = t;
        unsigned tseed = static_cast<unsigned>(seeder());
        std::mt19937_64 rng(tseed);

        SeriesMap cand = H0.H.truncated(rep.working_order);
        bool constructed = self && (t % 2 == 1);
        out.constructed = constructed;
        if (constructed) {
            auto s = sampler->sample(perturbation_degree, tseed);
            if (s) cand = s->H;
        } else {
            for (int c = 0; c < cand.size(); ++c)
                for (int D = K + 1; D <= perturbation_degree; ++D)
                    for (const auto& m :
                         monos_of_degree(M.N(), static_cast<std::uint32_t>(D))) {
                        std::uniform_int_distribution<int> gate(0, 3);
                        if (gate(rng) == 0) cand[c].add_to_coeff(m, small_rational(rng));
                    }
        }

        MapGerm Hc(cand, M.N(), Mp.N());
        SendsIntoReport s = sends_into(M, Mp, Hc);
        out.survivor = s.holds;
        if (out.survivor) {
            ++rep.survivors;
            out.ideal_equal = ideal_equal(Mp, Hc, H0).equal;
            bool level_ok = true;
            for (int j = 0; j < j0; ++j) {
                int hyp = reflection_jet_agreement(M, Mp, Hc, H0, j, K);
                int concl = reflection_jet_agreement(M, Mp, Hc, H0, j + 1, K);
                out.level_orders.emplace_back(hyp, concl);
                if (hyp >= K && concl < std::min(K, rep.margin_order)) level_ok = false;
            }
            out.counterexample = !out.ideal_equal || !level_ok;
            if (out.counterexample)
                ++rep.counterexamples;
            else
                ++rep.passes;
        }
        rep.outcomes.push_back(std::move(out));
    }
    rep.vacuous = rep.survivors == 0;
    return rep;
}

} // namespace crforge
