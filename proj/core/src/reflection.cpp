#include "crforge/reflection.hpp"
#include "crforge/linalg.hpp"

namespace crforge {

// ---- map germs ---------------------------------------------------------

MapGerm::MapGerm(SeriesMap H_, int srcN_, int tgtN_) : H(std::move(H_)), srcN(srcN_), tgtN(tgtN_) {
    if (H.nvars() != srcN || H.size() != tgtN)
        throw std::invalid_argument("MapGerm: component/variable counts disagree");
    if (!H.fixes_origin())
        throw std::invalid_argument("MapGerm: map must fix the origin");
}

SeriesMap MapGerm::complexification() const {
    const int order = H.order();
    std::vector<int> zmap(srcN), zetamap(srcN);
    for (int i = 0; i < srcN; ++i) {
        zmap[i] = i;
        zetamap[i] = srcN + i;
    }
    std::vector<Series> comps;
    comps.reserve(2 * tgtN);
    for (const auto& c : H.lift(2 * srcN, zmap)) comps.push_back(c);
    for (const auto& c : H.bar().lift(2 * srcN, zetamap)) comps.push_back(c);
    (void)order;
    return SeriesMap(std::move(comps));
}

// ---- small ring helpers -------------------------------------------------

namespace {

std::vector<int> iota_map(int count, int offset = 0) {
    std::vector<int> m(count);
    for (int i = 0; i < count; ++i) m[i] = offset + i;
    return m;
}

/// Qbar'(chi'_args, Z'_args) with the arguments already living in a common
/// target ring.
std::vector<Series> qbar_at(const GenericManifold& Mp, const std::vector<Series>& zp,
                            const std::vector<Series>& chip) {
    const int Np = Mp.N(), np = Mp.n(), dp = Mp.d();
    const int nv = zp[0].nvars();
    const int order = zp[0].order();
    std::vector<Series> args(2 * Np, Series(nv, order));
    for (int i = 0; i < np; ++i) args[Mp.zvar(i)] = zp[i];
    for (int k = 0; k < dp; ++k) args[Mp.wvar(k)] = zp[np + k];
    for (int i = 0; i < np; ++i) args[Mp.chivar(i)] = chip[i];
    // Qbar' never depends on tau'
    std::vector<Series> out;
    out.reserve(dp);
    for (int k = 0; k < dp; ++k) out.push_back(Mp.Qbar()[k].subst(args));
    return out;
}

/// W = Hbar(gammabar(Z, t)) in the (Z, t) ring.
SeriesMap pulled_back_conjugate(const MapGerm& H, const SegreMapping& gamma) {
    SeriesMap gbar = gamma.gamma_bar(); // N comps in (Z, t)
    return H.H.bar().subst(gbar.components());
}

} // namespace

// ---- sends_into ----------------------------------------------------------

SendsIntoReport sends_into(const GenericManifold& M, const GenericManifold& Mp,
                           const MapGerm& H) {
    if (H.srcN != M.N() || H.tgtN != Mp.N())
        throw std::invalid_argument("sends_into: map dimensions do not match the manifolds");
    const int N = M.N(), n = M.n(), np = Mp.n(), dp = Mp.d();
    const int nv = N + n;
    const int order = std::min(M.order(), Mp.order());

    SegreMapping gamma = SegreMapping::standard(M);
    SeriesMap W = pulled_back_conjugate(H, gamma); // N' comps in (Z, t)
    SeriesMap Hl = H.H.lift(nv, iota_map(N)).truncated(order);

    std::vector<Series> zp(Hl.components().begin(), Hl.components().end());
    std::vector<Series> chip;
    for (int i = 0; i < np; ++i) chip.push_back(W[i].truncated(order));
    auto q = qbar_at(Mp, zp, chip);

    SendsIntoReport rep;
    rep.holds = true;
    rep.order = order;
    for (int k = 0; k < dp; ++k) {
        Series resid = W[np + k].truncated(order) - q[k];
        rep.order = std::min(rep.order, resid.order());
        if (!resid.is_zero()) {
            rep.holds = false;
            auto low = resid.lowest_term();
            rep.obstruction_degree = static_cast<int>(low->first.deg());
            rep.obstruction_mono = low->first;
            rep.witness = low->second;
            return rep;
        }
    }
    return rep;
}

// ---- reflection ideal ------------------------------------------------------

ReflectionIdeal reflection_generators(const GenericManifold& Mp, const MapGerm& H) {
    const int N = H.srcN, Np = Mp.N(), np = Mp.n(), dp = Mp.d();
    const int nv = N + Np; // [Z][zeta']
    const int order = std::min(H.H.order(), Mp.order());

    SeriesMap Hl = H.H.lift(nv, iota_map(N)).truncated(order);
    std::vector<Series> zp(Hl.components().begin(), Hl.components().end());
    std::vector<Series> chip;
    for (int i = 0; i < np; ++i) chip.push_back(Series::variable(nv, order, N + i));
    auto q = qbar_at(Mp, zp, chip);

    ReflectionIdeal out;
    out.order = order;
    out.provenance = "tau' - Qbar'(chi', " + std::string("H") + "(Z)) relative to " + Mp.name();
    std::vector<Series> gens;
    for (int k = 0; k < dp; ++k) {
        Series g = Series::variable(nv, order, N + np + k) - q[k];
        out.max_term_degree = std::max(out.max_term_degree, g.max_term_degree());
        gens.push_back(std::move(g));
    }
    out.degree_stabilized = out.max_term_degree < order;
    out.gens = SeriesMap(std::move(gens));
    return out;
}

IdealEqualReport ideal_equal(const GenericManifold& Mp, const MapGerm& H, const MapGerm& H0) {
    if (H.srcN != H0.srcN || H.tgtN != H0.tgtN)
        throw std::invalid_argument("ideal_equal: maps must share source and target");
    ReflectionIdeal a = reflection_generators(Mp, H);
    ReflectionIdeal b = reflection_generators(Mp, H0);
    IdealEqualReport rep;
    rep.order = std::min(a.order, b.order);
    rep.equal = true;
    for (int k = 0; k < a.gens.size(); ++k) {
        Series diff = a.gens[k].truncated(rep.order) - b.gens[k].truncated(rep.order);
        if (!diff.is_zero()) {
            rep.equal = false;
            int d = diff.valuation();
            if (rep.first_difference_degree < 0 || d < rep.first_difference_degree)
                rep.first_difference_degree = d;
        }
    }
    return rep;
}

TotalDegeneracyReport not_totally_degenerate(const GenericManifold& M,
                                             const GenericManifold& Mp, const MapGerm& H) {
    SegreMapping gamma = SegreMapping::standard(M);
    SegreTower tower(M, gamma, 1);
    SeriesMap Hv1 = H.H.subst(tower.v(1).components());
    TotalDegeneracyReport rep;
    rep.rank_report = generic_rank(Hv1);
    rep.rank = rep.rank_report.rank;
    rep.required = Mp.n();
    rep.certified = rep.rank >= rep.required;
    return rep;
}

FiniteMapReport finite_map_check(const MapGerm& H, int order) {
    QuotientBasis qb = quotient_basis(H.H.truncated(std::min(order, H.H.order())).components(),
                                      std::min(order, H.H.order()));
    FiniteMapReport rep;
    rep.finite = qb.finite;
    rep.multiplicity = qb.multiplicity;
    rep.exact = qb.exact;
    rep.stabilization_degree = qb.stabilization_degree;
    rep.order = qb.order;
    rep.std_monos = qb.std_monos;
    rep.surviving = qb.surviving;
    return rep;
}

// ---- constraint systems ------------------------------------------------

int ConstraintSystem::coeff_nvars() const {
    switch (kind) {
    case SystemKind::Phi: return Np + N + n;
    case SystemKind::Psi: return Np + n * (j + 2);
    case SystemKind::Theta: return Np + n * (j + 1);
    }
    return 0;
}

ConstraintSystem build_system(const GenericManifold& M, const GenericManifold& Mp,
                              const MapGerm& H, SystemKind kind, int l, int j,
                              int epsilon_bound, bool with_omega) {
    const int N = M.N(), n = M.n(), Np = Mp.N(), dp = Mp.d();
    const int order = std::min(M.order(), Mp.order());
    if (order < l + epsilon_bound)
        throw std::domain_error("build_system: truncation budget is below l + epsilon bound");

    ConstraintSystem sys;
    sys.kind = kind;
    sys.l = l;
    sys.j = j;
    sys.epsilon_bound = epsilon_bound;
    sys.N = N;
    sys.Np = Np;
    sys.dp = dp;
    sys.n = n;
    sys.nu_idx = monos_upto(N, static_cast<std::uint32_t>(l));

    SegreMapping gamma = SegreMapping::standard(M);

    // paired prolongations of the two generator families over base Z
    Prolongation prp = prolong(Mp.rho().truncated(order), l, N);
    Prolongation prt = prolong(Mp.rho_tilde().truncated(order), l, N);

    // Lambda^2 block data: jets of W = Hbar(gammabar(Z, t)) over Z
    SeriesMap W = pulled_back_conjugate(H, gamma).truncated(order);
    JetValue Wj = jet_of_map(W, l, iota_map(N));
    JetShape paired(N, 2 * Np, l);
    std::vector<Series> hat_sub(paired.nvars(), Series(N + n, order));
    for (const auto& alpha : paired.hat)
        for (int c = 0; c < Np; ++c)
            hat_sub[paired.var_id(alpha, Np + c)] = Wj.at(alpha)[c];
    std::vector<Series> cv_sub(W.components().begin(), W.components().end());

    auto build_phi = [&](const Prolongation& pr) {
        std::vector<std::vector<JetPolynomial>> out;
        for (const auto& nu : sys.nu_idx) {
            std::vector<JetPolynomial> per;
            for (const auto& jp : pr.at(nu))
                per.push_back(jp.substitute_upper_block(Np, Np, N + n, hat_sub, cv_sub));
            out.push_back(std::move(per));
        }
        return out;
    };
    auto phi_plain = build_phi(prp);
    auto phi_tilde = build_phi(prt);

    // c_{beta delta}(Z, t): chain coefficients of gammabar, independent of H
    {
        const auto& uni = universal_polynomials(N, N, l);
        JetShape gsh(N, N, l);
        JetValue gj = jet_of_map(gamma.gamma_bar().truncated(order), l, iota_map(N));
        std::vector<Series> ghat = gj.hat_values(gsh);
        for (const auto& beta : sys.nu_idx)
            for (const auto& delta : monos_upto(N, beta.deg())) {
                const LamPoly* rp = uni.lookupR(beta, delta);
                if (!rp) continue;
                sys.c_table[{beta, delta}] = rp->eval(ghat, N + n, order - l);
            }
    }

    if (kind == SystemKind::Phi) {
        sys.plain = std::move(phi_plain);
        sys.tilde = std::move(phi_tilde);
        return sys;
    }

    // psi: (Z, t) -> (v^{j+1}(t^[j+1]), t^{j+2})
    SegreTower tower(M, gamma, j + 2);
    const int psi_nv = Np + n * (j + 2);
    std::vector<Series> cargs(Np + N + n);
    for (int v = 0; v < Np; ++v) cargs[v] = Series::variable(psi_nv, order, v);
    SeriesMap vj1 = tower.v(j + 1).lift(psi_nv, iota_map(n * (j + 1), Np));
    for (int i = 0; i < N; ++i) cargs[Np + i] = vj1[i];
    for (int i = 0; i < n; ++i)
        cargs[Np + N + i] = Series::variable(psi_nv, order, Np + n * (j + 1) + i);

    auto to_psi = [&](const std::vector<std::vector<JetPolynomial>>& phi) {
        std::vector<std::vector<JetPolynomial>> out;
        for (const auto& per : phi) {
            std::vector<JetPolynomial> row;
            for (const auto& jp : per) row.push_back(jp.with_coeffs(psi_nv, cargs));
            out.push_back(std::move(row));
        }
        return out;
    };
    auto psi_plain = to_psi(phi_plain);
    auto psi_tilde = to_psi(phi_tilde);

    // u^j_{beta delta}(t^[j+2]) = c_{beta delta}(v^{j+1}, t^{j+2})
    {
        const int unv = n * (j + 2);
        std::vector<Series> uargs(N + n);
        SeriesMap vl = tower.v(j + 1).lift(unv, iota_map(n * (j + 1)));
        for (int i = 0; i < N; ++i) uargs[i] = vl[i];
        for (int i = 0; i < n; ++i)
            uargs[N + i] = Series::variable(unv, order, n * (j + 1) + i);
        for (const auto& [key, c] : sys.c_table) sys.u_table[key] = c.subst(uargs);
    }

    if (kind == SystemKind::Psi) {
        sys.plain = std::move(psi_plain);
        sys.tilde = std::move(psi_tilde);
        return sys;
    }

    // theta: d^eps_{t^{j+2}} then t^{j+2} -> xi^j
    const int theta_nv = Np + n * (j + 1);
    std::vector<Series> targs(psi_nv);
    for (int v = 0; v < Np + n * (j + 1); ++v)
        targs[v] = Series::variable(theta_nv, order, v);
    SeriesMap xi = tower.xi(j).lift(theta_nv, iota_map(n * (j + 1), Np));
    for (int i = 0; i < n; ++i) targs[Np + n * (j + 1) + i] = xi[i];

    auto theta_of = [&](const std::vector<std::vector<JetPolynomial>>& psi,
                        std::map<std::pair<Mono, Mono>, std::vector<JetPolynomial>>& store) {
        for (std::size_t p = 0; p < sys.nu_idx.size(); ++p) {
            for (const auto& eps : monos_upto(n, static_cast<std::uint32_t>(epsilon_bound))) {
                std::vector<JetPolynomial> row;
                for (const auto& jp : psi[p]) {
                    JetPolynomial cur = jp;
                    for (int m = 0; m < n; ++m)
                        for (std::uint32_t rep = 0; rep < eps[m]; ++rep)
                            cur = cur.coeff_derivative(Np + n * (j + 1) + m);
                    row.push_back(cur.with_coeffs(theta_nv, targs));
                }
                store[{sys.nu_idx[p], eps}] = std::move(row);
            }
        }
    };
    sys.plain = psi_plain; // keep psi entries available on theta systems
    sys.tilde = psi_tilde;
    theta_of(psi_plain, sys.theta_plain);
    theta_of(psi_tilde, sys.theta_tilde);

    if (with_omega) {
        // omega^j_{nu eps alpha delta} = sum_beta P_{nu alpha beta}(hat L^1)
        //   * [d^eps_{t^{j+2}} chain through vbar^{j+2}]_delta at t^{j+2}=xi^j
        const auto& uni = universal_polynomials(N, Np, l);
        JetShape lam1(N, Np, l);
        SeriesMap vbar = tower.v(j + 2).bar();
        const int unv = n * (j + 2);
        // substitution t^{j+2} -> xi^j into the (t^[j+2]) ring
        std::vector<Series> sargs(unv);
        for (int v = 0; v < n * (j + 1); ++v)
            sargs[v] = Series::variable(n * (j + 1), order, v);
        SeriesMap xis = tower.xi(j);
        for (int i = 0; i < n; ++i) sargs[n * (j + 1) + i] = xis[i];

        for (const auto& beta : sys.nu_idx) {
            // E^{beta, eps}_delta by stepwise differentiation
            std::map<Mono, std::map<Mono, Series>> Estore;
            std::map<Mono, Series> E0;
            for (const auto& delta : monos_upto(N, beta.deg())) {
                auto it = sys.u_table.find({beta, delta});
                if (it != sys.u_table.end()) E0[delta] = it->second;
            }
            Estore[Mono(n)] = std::move(E0);
            for (const auto& eps : monos_upto(n, static_cast<std::uint32_t>(epsilon_bound))) {
                if (eps.deg() == 0) continue;
                int m = 0;
                while (eps[m] == 0) ++m;
                Mono prev = eps;
                prev.bump(m, -1);
                const auto& Eprev = Estore.at(prev);
                std::map<Mono, Series> Enext;
                const int var = n * (j + 1) + m;
                for (const auto& [delta, e] : Eprev) {
                    // (d_m e_delta) W_delta + e_delta sum_k W_{delta+e_k} d_m vbar_k
                    if (e.order() >= 1) {
                        auto [it, fresh] = Enext.emplace(delta, e.derivative(var));
                        if (!fresh) it->second += e.derivative(var);
                    }
                    for (int k2 = 0; k2 < N; ++k2) {
                        Mono d2 = delta;
                        d2.bump(k2, +1);
                        Series t = e * vbar[k2].derivative(var);
                        auto [it, fresh] = Enext.emplace(d2, t);
                        if (!fresh) it->second += t;
                    }
                }
                Estore[eps] = std::move(Enext);
            }
            for (const auto& [eps, Emap] : Estore) {
                for (const auto& [delta, e] : Emap) {
                    Series esub = e.subst(sargs); // in t^[j+1]
                    for (const auto& nu : sys.nu_idx) {
                        if (!beta.divides(nu)) continue;
                        auto pit = uni.P.find(nu);
                        if (pit == uni.P.end()) continue;
                        for (const auto& [ab, poly] : pit->second) {
                            if (!(ab.second == beta)) continue;
                            const Mono& alpha = ab.first;
                            auto key = std::make_tuple(nu, eps, alpha, delta);
                            auto oit = sys.omega_table.find(key);
                            if (oit == sys.omega_table.end())
                                oit = sys.omega_table
                                          .emplace(key, JetPolynomial(lam1, n * (j + 1)))
                                          .first;
                            for (const auto& [jm, pc] : poly.terms)
                                oit->second.add_term(jm, esub.scaled(pc));
                        }
                    }
                }
            }
        }
    }
    return sys;
}

JetValue canonical_jet_solution(const GenericManifold& M, const MapGerm& H,
                                const ConstraintSystem& sys) {
    JetValue jz = jet_of_map(H.H.truncated(std::min(H.H.order(), M.order())), sys.l,
                             iota_map(M.N()));
    if (sys.kind == SystemKind::Phi) return jz;
    SegreTower tower(M, SegreMapping::standard(M), sys.j + 1);
    const auto& v = tower.v(sys.j + 1);
    JetValue out = jz;
    for (auto& entry : out.entries)
        for (auto& s : entry) s = s.subst(v.components());
    return out;
}

SystemCheckReport check_jet_solution(const ConstraintSystem& sys, const JetValue& S) {
    const int Np = sys.Np, N = sys.N, n = sys.n;
    int eval_nv = 0;
    std::vector<int> smap; // ring embedding for S's entries
    switch (sys.kind) {
    case SystemKind::Phi:
        eval_nv = N + n;
        smap = iota_map(N);
        break;
    case SystemKind::Psi:
        eval_nv = n * (sys.j + 2);
        smap = iota_map(n * (sys.j + 1));
        break;
    case SystemKind::Theta:
        eval_nv = n * (sys.j + 1);
        smap = iota_map(n * (sys.j + 1));
        break;
    }
    if (!S.at(Mono(S.k)).empty() && !S.at(Mono(S.k))[0].constant_term().is_zero())
        throw std::domain_error("check_jet_solution: S_0 must vanish at the origin");

    int order = S.entries.back().empty() ? 0 : S.entries.back()[0].order();
    for (const auto& e : S.entries)
        for (const auto& s : e) order = std::min(order, s.order());

    JetShape lam1(N, Np, sys.l);
    std::vector<Series> hat = S.hat_values(lam1, eval_nv, smap);
    std::vector<Series> cargs(sys.coeff_nvars());
    const auto& S0 = S.at(Mono(S.k));
    for (int c = 0; c < Np; ++c) cargs[c] = S0[c].lift(eval_nv, smap);
    for (int v = Np; v < sys.coeff_nvars(); ++v)
        cargs[v] = Series::variable(eval_nv, order, v - Np);

    SystemCheckReport rep;
    rep.plain_vanishes = true;
    rep.tilde_vanishes = true;
    rep.certified_order = order;
    auto run = [&](const std::vector<std::vector<JetPolynomial>>& entries, bool& ok) {
        for (std::size_t p = 0; p < entries.size(); ++p)
            for (const auto& jp : entries[p]) {
                Series r = jp.evaluate(cargs, hat);
                rep.certified_order = std::min(rep.certified_order, r.order());
                if (!r.is_zero()) {
                    ok = false;
                    rep.first_failure_nu = sys.nu_idx[p];
                }
            }
    };
    if (sys.kind == SystemKind::Theta) {
        auto run_theta = [&](const auto& store, bool& ok) {
            for (const auto& [key, row] : store)
                for (const auto& jp : row) {
                    Series r = jp.evaluate(cargs, hat);
                    rep.certified_order = std::min(rep.certified_order, r.order());
                    if (!r.is_zero()) {
                        ok = false;
                        rep.first_failure_nu = key.first;
                    }
                }
        };
        run_theta(sys.theta_plain, rep.plain_vanishes);
        run_theta(sys.theta_tilde, rep.tilde_vanishes);
    } else {
        run(sys.plain, rep.plain_vanishes);
        run(sys.tilde, rep.tilde_vanishes);
    }
    return rep;
}

// ---- key identity --------------------------------------------------------

KeyIdentityReport key_identity_check(const GenericManifold& M, const GenericManifold& Mp,
                                     const MapGerm& H, const JetValue& S, int l, int j,
                                     const MapGerm* H0) {
    const int N = M.N(), n = M.n(), Np = Mp.N(), np = Mp.n(), dp = Mp.d();
    const int order = std::min(M.order(), Mp.order());
    KeyIdentityReport rep;

    ConstraintSystem psi = build_system(M, Mp, H, SystemKind::Psi, l, j);
    SystemCheckReport pre = check_jet_solution(psi, S);
    rep.precondition_ok = pre.plain_vanishes && pre.tilde_vanishes;
    if (!rep.precondition_ok) return rep;

    const int nvp = n * (j + 1);
    const int R1 = nvp + Np; // [t^[j+1]][zeta']
    SegreTower tower(M, SegreMapping::standard(M), j + 1);
    SeriesMap vj1 = tower.v(j + 1).lift(R1, iota_map(nvp));

    // ^H rho'(Z, zeta') in the [Z][zeta'] ring
    auto rhoH = [&](const MapGerm& F) {
        const int nv = N + Np;
        SeriesMap Fl = F.H.lift(nv, iota_map(N)).truncated(order);
        std::vector<Series> zp(Fl.components().begin(), Fl.components().end());
        std::vector<Series> chip;
        for (int i = 0; i < np; ++i) chip.push_back(Series::variable(nv, order, N + i));
        auto q = qbar_at(Mp, zp, chip);
        std::vector<Series> out;
        for (int k = 0; k < dp; ++k)
            out.push_back(Series::variable(nv, order, N + np + k) - q[k]);
        return SeriesMap(std::move(out));
    };
    SeriesMap rH = rhoH(H);

    // substitution (Z, zeta') -> (v^{j+1}, zeta') into the R1 ring
    std::vector<Series> sub(N + Np);
    for (int i = 0; i < N; ++i) sub[i] = vj1[i];
    for (int i = 0; i < Np; ++i) sub[N + i] = Series::variable(R1, order, nvp + i);

    const auto& uni = universal_polynomials(N, Np, l);
    JetShape lam1(N, Np, l);
    std::vector<Series> hatS = S.hat_values(lam1, R1, iota_map(nvp));
    const auto& S0 = S.at(Mono(S.k));
    std::vector<Series> S0l;
    for (int c = 0; c < Np; ++c) S0l.push_back(S0[c].lift(R1, iota_map(nvp)));

    rep.key_holds = true;
    rep.certified_order = order;
    for (const auto& nu : monos_upto(N, static_cast<std::uint32_t>(l))) {
        // LHS: d^nu_Z of ^H rho', then Z -> v^{j+1}
        std::vector<Series> lhs(dp);
        {
            Mono full(N + Np);
            for (int i = 0; i < N; ++i) full.set(i, nu[i]);
            for (int k = 0; k < dp; ++k) lhs[k] = rH[k].derivative(full).subst(sub);
        }
        // RHS: sum_{|mu| <= |nu|} R_{nu mu}(hat S) rho'_{Z'^mu}(S_0, zeta')
        std::vector<Series> rhs(dp, Series(R1, order - l));
        for (const auto& mu : monos_upto(Np, nu.deg())) {
            const LamPoly* rp = uni.lookupR(nu, mu);
            if (!rp || rp->is_zero()) continue;
            Series rval = rp->eval(hatS, R1, order - static_cast<int>(nu.deg()));
            // rho'_{Z'^mu} in the 2N' ring, evaluated at (S_0, zeta')
            Mono dmu(2 * Np);
            for (int i = 0; i < Np; ++i) dmu.set(i, mu[i]);
            std::vector<Series> args(2 * Np);
            for (int i = 0; i < Np; ++i) args[i] = S0l[i];
            for (int i = 0; i < Np; ++i) args[Np + i] = Series::variable(R1, order, nvp + i);
            for (int k = 0; k < dp; ++k) {
                Series part = Mp.rho()[k].derivative(dmu).subst(args);
                rhs[k] += rval * part;
            }
        }
        for (int k = 0; k < dp; ++k) {
            int cmp = std::min(lhs[k].order(), rhs[k].order());
            rep.certified_order = std::min(rep.certified_order, cmp);
            if (!Series::equal_mod(lhs[k], rhs[k], cmp)) {
                rep.key_holds = false;
                rep.first_failure_nu = nu;
            }
        }
    }

    if (H0) {
        rep.reformulation_checked = true;
        rep.reformulation_holds = true;
        SeriesMap rH0 = rhoH(*H0);
        for (const auto& nu : monos_upto(N, static_cast<std::uint32_t>(l))) {
            Mono full(N + Np);
            for (int i = 0; i < N; ++i) full.set(i, nu[i]);
            for (int k = 0; k < dp; ++k) {
                Series a = rH[k].derivative(full).subst(sub);
                Series b = rH0[k].derivative(full).subst(sub);
                int cmp = std::min(a.order(), b.order());
                if (!Series::equal_mod(a, b, cmp)) {
                    rep.reformulation_holds = false;
                    rep.first_failure_nu = nu;
                }
            }
        }
    }
    return rep;
}

// ---- nondegeneracy certificate --------------------------------------------

NondegCertificate nondegeneracy_certificate(const GenericManifold& Mp, const MapGerm& H0,
                                            int alpha_degree_bound) {
    alpha_degree_bound = std::min(alpha_degree_bound, Mp.order() - 1);
    NondegCertificate cert;
    cert.bound = alpha_degree_bound;
    const int Np = Mp.N();
    cert.rank_H0 = generic_rank(H0.H).rank;
    if (cert.rank_H0 < Np)
        cert.note = "Rk H0 below N' at this order; determinant search may be vacuous";

    auto qtab = Mp.qbar_coefficients(alpha_degree_bound);
    std::vector<std::pair<Mono, int>> pool_idx;
    std::vector<std::vector<Series>> pool_rows;
    for (const auto& [alpha, q] : qtab)
        for (int jcomp = 0; jcomp < Mp.d(); ++jcomp) {
            if (q[jcomp].order() < 1) continue;
            std::vector<Series> row(Np);
            bool nonzero = false;
            for (int m = 0; m < Np; ++m) {
                Series g = q[jcomp].derivative(m); // in the N'-variable Z' ring
                row[m] = g.subst(H0.H.truncated(g.order()).components());
                if (!row[m].is_zero()) nonzero = true;
            }
            if (!nonzero) continue;
            pool_idx.emplace_back(alpha, jcomp);
            pool_rows.push_back(std::move(row));
        }

    const int P = static_cast<int>(pool_rows.size());
    if (P >= Np) {
        std::vector<int> sel(Np);
        for (int i = 0; i < Np; ++i) sel[i] = i;
        bool more = true;
        while (more) {
            std::vector<std::vector<Series>> sub;
            for (int i : sel) sub.push_back(pool_rows[i]);
            Series det = series_det(sub);
            if (!det.is_zero()) {
                cert.found = true;
                for (int i : sel) cert.indices.push_back(pool_idx[i]);
                cert.det = det;
                return cert;
            }
            int i = Np - 1;
            while (i >= 0 && sel[i] == P - Np + i) --i;
            if (i < 0) more = false;
            else {
                ++sel[i];
                for (int k = i + 1; k < Np; ++k) sel[k] = sel[k - 1] + 1;
            }
        }
    }
    cert.found = false;
    if (cert.note.empty()) cert.note = "search bound exhausted";
    return cert;
}

// ---- reflection jet agreement ----------------------------------------------

int reflection_jet_agreement(const GenericManifold& M, const GenericManifold& Mp,
                             const MapGerm& H, const MapGerm& H0, int level_j, int upto) {
    const int N = M.N(), n = M.n(), np = Mp.n();
    const int order = std::min(M.order(), Mp.order());
    // D = Qbar'(chi', H) - Qbar'(chi', H0) in the [Z][chi'] ring
    const int nv = N + np;
    SeriesMap Hl = H.H.lift(nv, iota_map(N)).truncated(order);
    SeriesMap H0l = H0.H.lift(nv, iota_map(N)).truncated(order);
    std::vector<Series> chip;
    for (int i = 0; i < np; ++i) chip.push_back(Series::variable(nv, order, N + i));
    auto qa = qbar_at(Mp, std::vector<Series>(Hl.components().begin(), Hl.components().end()), chip);
    auto qb = qbar_at(Mp, std::vector<Series>(H0l.components().begin(), H0l.components().end()), chip);

    SegreTower tower(M, SegreMapping::standard(M), std::max(level_j, 1));
    const int tv = n * level_j;
    const int R1 = tv + np;
    std::vector<Series> sub(nv);
    if (level_j == 0) {
        for (int i = 0; i < N; ++i) sub[i] = Series(R1, order);
    } else {
        SeriesMap vl = tower.v(level_j).lift(R1, iota_map(tv));
        for (int i = 0; i < N; ++i) sub[i] = vl[i];
    }
    for (int i = 0; i < np; ++i) sub[N + i] = Series::variable(R1, order, tv + i);

    int best = -1;
    for (int k = 0; k <= upto; ++k) {
        bool ok = true;
        for (const auto& delta : monos_of_degree(N, static_cast<std::uint32_t>(k))) {
            Mono full(nv);
            for (int i = 0; i < N; ++i) full.set(i, delta[i]);
            for (int c = 0; c < Mp.d(); ++c) {
                Series diff = (qa[c] - qb[c]).derivative(full).subst(sub);
                if (!diff.is_zero()) ok = false;
            }
            if (!ok) break;
        }
        if (!ok) break;
        best = k;
    }
    return best;
}

} // namespace crforge
