#include "crforge/manifold.hpp"
#include "crforge/linalg.hpp"

#include <algorithm>

namespace crforge {

// ---- GenericManifold --------------------------------------------------

GenericManifold GenericManifold::from_defining(const SeriesMap& rho, int N, int d,
                                               int order, std::string name) {
    if (rho.size() != d || rho.nvars() != 2 * N)
        throw std::invalid_argument("from_defining: expected d series in the 2N-variable ring");
    const int n = N - d;
    if (n < 0) throw std::invalid_argument("from_defining: codimension exceeds dimension");

    if (!rho.fixes_origin())
        throw DefiningError(DefiningError::Kind::NotVanishing,
                            "defining series do not vanish at the origin");

    auto J = rho.jacobian_at0();
    {
        Matrix full(d, 2 * N);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < 2 * N; ++j) full.at(i, j) = J[i][j];
        if (rank(full) != d)
            throw DefiningError(DefiningError::Kind::DependentDifferentials,
                                "differentials of the defining series are dependent at 0");
        Matrix zblock(d, N);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < N; ++j) zblock.at(i, j) = J[i][j];
        if (rank(zblock) != d)
            throw DefiningError(DefiningError::Kind::NotGeneric,
                                "rank of d rho/d Z(0) is below the codimension");
        Matrix wblock(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) wblock.at(i, j) = J[i][n + j];
        if (rank(wblock) != d)
            throw DefiningError(DefiningError::Kind::NotAdapted,
                                "d rho/d w(0) is singular; pick coordinates whose last d "
                                "Z-components graph the manifold");
    }

    GenericManifold M;
    M.name_ = std::move(name);
    M.N_ = N;
    M.d_ = d;
    M.n_ = n;
    M.order_ = order;

    SeriesMap rho_o = rho.truncated(order);
    std::vector<int> wvars(d);
    for (int j = 0; j < d; ++j) wvars[j] = n + j;
    SeriesMap Qred = implicit_solve(rho_o, wvars); // in the (z, chi, tau) ring
    std::vector<int> back(2 * N - d);
    for (int i = 0; i < n; ++i) back[i] = i;
    for (int i = 0; i < N; ++i) back[n + i] = N + i;
    M.Q_ = Qred.lift(2 * N, back);
    M.Qbar_ = SeriesMap([&] {
        std::vector<Series> qs;
        VariableSplit sp = VariableSplit::pairing(N);
        for (int j = 0; j < d; ++j) qs.push_back(M.Q_[j].sigma(sp));
        return qs;
    }());

    // reality of the ideal: sigma of each generator must vanish on the graph
    for (int j = 0; j < d; ++j) {
        Series img = rho_o[j].sigma(M.pairing());
        Series resid = M.graph_substitute(img);
        if (!resid.is_zero())
            throw DefiningError(DefiningError::Kind::NotReal,
                                "ideal is not real: sigma-image of generator " +
                                    std::to_string(j + 1) + " fails membership at degree " +
                                    std::to_string(resid.valuation()),
                                j, resid.valuation());
    }

    // internal consistency: Q(z, chi, Qbar(chi, z, w)) = w mod degree > order
    for (const auto& r : M.reality_residual())
        if (!r.is_zero())
            throw DefiningError(DefiningError::Kind::NotReal,
                                "reality identity fails at degree " +
                                    std::to_string(r.valuation()),
                                -1, r.valuation());
    return M;
}

GenericManifold GenericManifold::truncated(int k) const {
    if (k > order_)
        throw std::invalid_argument("GenericManifold::truncated: cannot raise the order");
    GenericManifold M = *this;
    M.order_ = k;
    M.Q_ = Q_.truncated(k);
    M.Qbar_ = Qbar_.truncated(k);
    return M;
}

SeriesMap GenericManifold::rho() const {
    std::vector<Series> out;
    for (int j = 0; j < d_; ++j)
        out.push_back(Series::variable(2 * N_, order_, tauvar(j)) - Qbar_[j]);
    return SeriesMap(std::move(out));
}

SeriesMap GenericManifold::rho_tilde() const {
    std::vector<Series> out;
    for (int j = 0; j < d_; ++j)
        out.push_back(Series::variable(2 * N_, order_, wvar(j)) - Q_[j]);
    return SeriesMap(std::move(out));
}

std::vector<std::string> GenericManifold::var_names() const {
    std::vector<std::string> names(2 * N_);
    for (int i = 0; i < n_; ++i) names[zvar(i)] = n_ == 1 ? "z" : "z" + std::to_string(i + 1);
    for (int j = 0; j < d_; ++j) names[wvar(j)] = d_ == 1 ? "w" : "w" + std::to_string(j + 1);
    for (int i = 0; i < n_; ++i) names[chivar(i)] = n_ == 1 ? "chi" : "chi" + std::to_string(i + 1);
    for (int j = 0; j < d_; ++j) names[tauvar(j)] = d_ == 1 ? "tau" : "tau" + std::to_string(j + 1);
    return names;
}

SeriesMap GenericManifold::reality_residual() const {
    std::vector<Series> args(2 * N_);
    for (int i = 0; i < n_; ++i) args[zvar(i)] = Series::variable(2 * N_, order_, zvar(i));
    for (int j = 0; j < d_; ++j) args[wvar(j)] = Series::variable(2 * N_, order_, wvar(j));
    for (int i = 0; i < n_; ++i) args[chivar(i)] = Series::variable(2 * N_, order_, chivar(i));
    for (int j = 0; j < d_; ++j) args[tauvar(j)] = Qbar_[j];
    std::vector<Series> out;
    for (int j = 0; j < d_; ++j)
        out.push_back(Q_[j].subst(args) - Series::variable(2 * N_, order_, wvar(j)));
    return SeriesMap(std::move(out));
}

Series GenericManifold::graph_substitute(const Series& f) const {
    std::vector<Series> args(2 * N_);
    for (int i = 0; i < n_; ++i) args[zvar(i)] = Series::variable(2 * N_, order_, zvar(i));
    for (int j = 0; j < d_; ++j) args[wvar(j)] = Q_[j];
    for (int i = 0; i < n_; ++i) args[chivar(i)] = Series::variable(2 * N_, order_, chivar(i));
    for (int j = 0; j < d_; ++j) args[tauvar(j)] = Series::variable(2 * N_, order_, tauvar(j));
    return f.subst(args);
}

std::map<Mono, std::vector<Series>> GenericManifold::qbar_coefficients(int chi_bound) const {
    chi_bound = std::min(chi_bound, order_ - 1);
    std::map<Mono, std::vector<Series>> table;
    for (int j = 0; j < d_; ++j) {
        for (const auto& [m, c] : Qbar_[j].terms()) {
            Mono alpha(n_);
            Mono zm(N_);
            bool skip = false;
            for (int i = 0; i < n_; ++i) alpha.set(i, m[chivar(i)]);
            if (static_cast<int>(alpha.deg()) > chi_bound) continue;
            for (int i = 0; i < n_; ++i) zm.set(i, m[zvar(i)]);
            for (int k = 0; k < d_; ++k) zm.set(n_ + k, m[wvar(k)]);
            for (int k = 0; k < d_; ++k)
                if (m[tauvar(k)] != 0) skip = true; // Qbar never depends on tau
            if (skip) continue;
            auto it = table.find(alpha);
            if (it == table.end()) {
                int ord = order_ - static_cast<int>(alpha.deg());
                it = table.emplace(alpha, std::vector<Series>(d_, Series(N_, ord))).first;
            }
            it->second[j].add_to_coeff(zm, c);
        }
    }
    // make sure every |alpha| <= chi_bound appears, even when zero
    for (const auto& alpha : monos_upto(n_, static_cast<std::uint32_t>(chi_bound)))
        if (!table.count(alpha))
            table.emplace(alpha, std::vector<Series>(d_, Series(N_, order_ - alpha.deg())));
    return table;
}

// ---- SegreMapping -----------------------------------------------------

SegreMapping SegreMapping::standard(const GenericManifold& M) {
    const int N = M.N(), n = M.n(), order = M.order();
    SeriesMap mu(N + n, order, n);
    for (int i = 0; i < n; ++i) mu[i] = Series::variable(N + n, order, N + i);
    return with_mu(M, mu);
}

SegreMapping SegreMapping::with_mu(const GenericManifold& M, const SeriesMap& mu) {
    const int N = M.N(), n = M.n(), d = M.d(), order = M.order();
    if (mu.size() != n || mu.nvars() != N + n)
        throw std::invalid_argument("SegreMapping: mu needs n components in the (zeta, t) ring");
    if (!mu.fixes_origin())
        throw std::invalid_argument("SegreMapping: mu must fix the origin");
    {
        Matrix JT(n, n);
        auto J = mu.jacobian_at0();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) JT.at(i, j) = J[i][N + j];
        if (rank(JT) != n)
            throw std::invalid_argument("SegreMapping: rank d mu/d t(0) must be n");
    }

    SegreMapping g;
    g.N_ = N;
    g.n_ = n;
    g.d_ = d;
    g.order_ = order;
    bool std_mu = true;
    for (int i = 0; i < n; ++i)
        if (!(mu[i] == Series::variable(N + n, order, N + i))) std_mu = false;
    g.standard_ = std_mu;
    g.mu_ = mu;

    // nu = Q(mu(zeta, t), zeta): substitute into Q over the (zeta, t) ring
    std::vector<Series> args(2 * N);
    for (int i = 0; i < n; ++i) args[M.zvar(i)] = mu[i];
    for (int j = 0; j < d; ++j) args[M.wvar(j)] = Series(N + n, order);
    for (int i = 0; i < n; ++i) args[M.chivar(i)] = Series::variable(N + n, order, i);
    for (int j = 0; j < d; ++j) args[M.tauvar(j)] = Series::variable(N + n, order, n + j);
    std::vector<Series> nu;
    for (int j = 0; j < d; ++j) nu.push_back(M.Q()[j].subst(args));
    g.nu_ = SeriesMap(nu);

    std::vector<Series> full(mu.components());
    full.insert(full.end(), nu.begin(), nu.end());
    g.gamma_ = SeriesMap(std::move(full));
    return g;
}

SeriesMap SegreMapping::gamma_bar() const { return gamma_.bar(); }

std::vector<Series> SegreMapping::generator_residuals(const GenericManifold& M) const {
    // h(gamma(zeta, t), zeta) for h among both generator families
    const int N = N_, n = n_;
    std::vector<Series> args(2 * N);
    for (int i = 0; i < N; ++i) args[i] = gamma_[i];
    for (int i = 0; i < N; ++i) args[N + i] = Series::variable(N + n, order_, i);
    std::vector<Series> out;
    for (const auto& h : M.rho_tilde()) out.push_back(h.subst(args));
    for (const auto& h : M.rho()) out.push_back(h.subst(args));
    return out;
}

// ---- SegreTower -------------------------------------------------------

SegreTower::SegreTower(const GenericManifold& M, const SegreMapping& gamma, int levels)
    : M_(&M), gamma_(gamma) {
    const int N = M.N(), n = M.n(), order = M.order();
    v_.reserve(levels + 1);
    v_.emplace_back(0, order, N); // v^0 = 0 in the empty ring
    for (int j = 1; j <= levels; ++j) {
        const int nv = n * j;
        std::vector<int> idmap(n * (j - 1));
        for (std::size_t i = 0; i < idmap.size(); ++i) idmap[i] = static_cast<int>(i);
        SeriesMap prev_bar = v_[j - 1].bar().lift(nv, idmap);
        std::vector<Series> args(N + n);
        for (int i = 0; i < N; ++i) args[i] = prev_bar[i].truncated(order);
        for (int i = 0; i < n; ++i) args[N + i] = Series::variable(nv, order, n * (j - 1) + i);
        v_.push_back(gamma_.gamma().subst(args));
    }

    // retractions xi^j for j = 0..levels-2 via the pi construction:
    // solve mu(gamma_bar(Z, t), s) = z for s in the (Z, t, s) ring.
    if (levels >= 2) {
        const int nv = N + 2 * n;
        SeriesMap gbar = gamma_.gamma_bar(); // in (Z, t)
        std::vector<int> zt_map(N + n);
        for (int i = 0; i < N + n; ++i) zt_map[i] = i;
        SeriesMap gbar_l = gbar.lift(nv, zt_map);
        std::vector<Series> margs(N + n);
        for (int i = 0; i < N; ++i) margs[i] = gbar_l[i];
        for (int i = 0; i < n; ++i) margs[N + i] = Series::variable(nv, M.order(), N + n + i);
        std::vector<Series> eqs;
        for (int i = 0; i < n; ++i)
            eqs.push_back(gamma_.mu()[i].subst(margs) - Series::variable(nv, M.order(), i));
        std::vector<int> svars(n);
        for (int i = 0; i < n; ++i) svars[i] = N + n + i;
        SeriesMap pi = implicit_solve(SeriesMap(std::move(eqs)), svars); // in (Z, t)

        for (int j = 0; j + 2 <= levels; ++j) {
            const int nv_out = n * (j + 1);
            std::vector<int> idmap(n * j);
            for (std::size_t i = 0; i < idmap.size(); ++i) idmap[i] = static_cast<int>(i);
            SeriesMap vj = v_[j].lift(nv_out, idmap);
            std::vector<Series> pargs(N + n);
            for (int i = 0; i < N; ++i) pargs[i] = vj[i];
            for (int i = 0; i < n; ++i) pargs[N + i] = Series::variable(nv_out, M.order(), n * j + i);
            xi_.push_back(pi.subst(pargs));
        }
    }
}

std::vector<Series> SegreTower::iteration_residuals(int j) const {
    const GenericManifold& M = *M_;
    const int N = M.N(), n = M.n();
    if (j + 1 > levels()) throw std::invalid_argument("iteration_residuals: tower too short");
    const int nv = n * (j + 1);
    std::vector<int> idmap(n * j);
    for (std::size_t i = 0; i < idmap.size(); ++i) idmap[i] = static_cast<int>(i);
    SeriesMap vj = v_[j].lift(nv, idmap);
    SeriesMap vbar = v_[j + 1].bar();
    std::vector<Series> args(2 * N);
    for (int i = 0; i < N; ++i) args[i] = vj[i];
    for (int i = 0; i < N; ++i) args[N + i] = vbar[i];
    std::vector<Series> out;
    for (const auto& h : M.rho_tilde()) out.push_back(h.subst(args));
    for (const auto& h : M.rho()) out.push_back(h.subst(args));
    return out;
}

std::vector<Series> SegreTower::retraction_residuals(int j) const {
    const GenericManifold& M = *M_;
    const int n = M.n();
    if (j >= xi_count()) throw std::invalid_argument("retraction_residuals: xi not built");
    const int nv = n * (j + 1);
    std::vector<Series> args(n * (j + 2));
    for (int i = 0; i < nv; ++i) args[i] = Series::variable(nv, M.order(), i);
    for (int i = 0; i < n; ++i) args[nv + i] = xi_[j][i];
    std::vector<int> idmap(n * j);
    for (std::size_t i = 0; i < idmap.size(); ++i) idmap[i] = static_cast<int>(i);
    SeriesMap vj = v_[j].lift(nv, idmap);
    std::vector<Series> out;
    for (int c = 0; c < M.N(); ++c) out.push_back(v_[j + 2][c].subst(args) - vj[c]);
    return out;
}

// ---- vector fields ----------------------------------------------------

Series VectorField::apply(const Series& f) const {
    Series acc;
    bool first = true;
    for (int k = 0; k < coeffs.size(); ++k) {
        if (coeffs[k].is_zero()) continue;
        Series t = coeffs[k] * f.derivative(k);
        if (first) {
            acc = t;
            first = false;
        } else {
            acc += t;
        }
    }
    if (first) return Series(f.nvars(), f.order() - 1);
    return acc;
}

std::vector<Coeff> VectorField::at0() const {
    std::vector<Coeff> v(coeffs.size());
    for (int k = 0; k < coeffs.size(); ++k) v[k] = coeffs[k].constant_term();
    return v;
}

VectorField bracket(const VectorField& a, const VectorField& b) {
    std::vector<Series> out;
    out.reserve(a.coeffs.size());
    for (int k = 0; k < a.coeffs.size(); ++k)
        out.push_back(a.apply(b.coeffs[k]) - b.apply(a.coeffs[k]));
    return VectorField{SeriesMap(std::move(out))};
}

CrBasis cr_vector_fields(const GenericManifold& M) {
    const int N = M.N(), n = M.n(), d = M.d();
    const int nv = 2 * N, ord = M.order() - 1;
    CrBasis out;
    for (int i = 0; i < n; ++i) {
        SeriesMap c(nv, ord, nv);
        c[M.zvar(i)] = Series::constant(nv, ord, Coeff::one());
        for (int j = 0; j < d; ++j) c[M.wvar(j)] = M.Q()[j].derivative(M.zvar(i));
        out.basis_10.push_back(VectorField{c});
    }
    for (int i = 0; i < n; ++i) {
        SeriesMap c(nv, ord, nv);
        c[M.chivar(i)] = Series::constant(nv, ord, Coeff::one());
        for (int j = 0; j < d; ++j) c[M.tauvar(j)] = M.Qbar()[j].derivative(M.chivar(i));
        out.basis_01.push_back(VectorField{c});
    }
    // tangency sanity check against the opposite generator family
    for (const auto& X : out.basis_10)
        for (const auto& g : M.rho())
            if (!M.graph_substitute(X.apply(g)).is_zero())
                throw std::logic_error("cr_vector_fields: (1,0) field not tangent");
    for (const auto& Y : out.basis_01)
        for (const auto& g : M.rho_tilde())
            if (!M.graph_substitute(Y.apply(g)).is_zero())
                throw std::logic_error("cr_vector_fields: (0,1) field not tangent");
    return out;
}

// ---- finite type ------------------------------------------------------

FiniteTypeReport finite_type_check(const GenericManifold& M, FiniteTypeRoute route,
                                   int depth_bound, int j_bound) {
    FiniteTypeReport rep;
    const int N = M.N(), d = M.d();
    rep.target_dim = 2 * N - d;
    rep.certified_order = M.order();
    if (depth_bound < 0) depth_bound = 2 * N - d + 1;
    if (j_bound < 0) j_bound = d + 1;

    if (route == FiniteTypeRoute::Segre || route == FiniteTypeRoute::Both) {
        SegreTower tower(M, SegreMapping::standard(M), j_bound);
        for (int j = 1; j <= j_bound; ++j) {
            RankReport rr = generic_rank(tower.v(j));
            if (rr.rank == N) {
                rep.segre_verdict = Verdict::Affirmative;
                rep.segre_j0 = j;
                rep.rank_at_j0 = rr.rank;
                break;
            }
        }
        // rank failure at truncation cannot refute finite type
        if (rep.segre_verdict != Verdict::Affirmative) rep.segre_verdict = Verdict::Inconclusive;
    }

    if (route == FiniteTypeRoute::Lie || route == FiniteTypeRoute::Both) {
        CrBasis basis = cr_vector_fields(M);
        std::vector<VectorField> gens = basis.basis_10;
        gens.insert(gens.end(), basis.basis_01.begin(), basis.basis_01.end());

        std::vector<std::vector<Coeff>> span_rows;
        auto span_dim = [&] {
            Matrix m(static_cast<int>(span_rows.size()), 2 * N);
            for (std::size_t i = 0; i < span_rows.size(); ++i)
                for (int j = 0; j < 2 * N; ++j) m.at(static_cast<int>(i), j) = span_rows[i][j];
            return rank(m);
        };

        for (const auto& g : gens) span_rows.push_back(g.at0());
        int dim = span_dim();
        int depth = 1;
        std::vector<VectorField> level = gens;
        bool closed = gens.empty();
        while (dim < rep.target_dim && depth < depth_bound && !closed) {
            if (!level.empty() && level[0].coeffs.order() < 1) {
                rep.note = "lie route stopped by truncation budget";
                break;
            }
            std::vector<VectorField> next;
            bool any_nonzero = false;
            for (const auto& g : gens)
                for (const auto& f : level) {
                    VectorField br = bracket(g, f);
                    bool zero = true;
                    for (const auto& c : br.coeffs)
                        if (!c.is_zero()) zero = false;
                    if (zero) continue;
                    any_nonzero = true;
                    span_rows.push_back(br.at0());
                    next.push_back(std::move(br));
                    if (next.size() > 400) break; // combinatorial guard
                }
            ++depth;
            dim = span_dim();
            if (!any_nonzero) closed = true;
            level = std::move(next);
        }
        rep.lie_dim = dim;
        rep.depth_used = depth;
        if (dim >= rep.target_dim)
            rep.lie_verdict = Verdict::Affirmative;
        else if (closed)
            rep.lie_verdict = Verdict::Negative; // bracket closure reached, span short
        else
            rep.lie_verdict = Verdict::Inconclusive;
    }

    switch (route) {
    case FiniteTypeRoute::Lie:
        rep.verdict = rep.lie_verdict;
        break;
    case FiniteTypeRoute::Segre:
        rep.verdict = rep.segre_verdict;
        break;
    case FiniteTypeRoute::Both:
        rep.routes_agree = !(rep.lie_verdict == Verdict::Affirmative &&
                             rep.segre_verdict == Verdict::Negative) &&
                           !(rep.lie_verdict == Verdict::Negative &&
                             rep.segre_verdict == Verdict::Affirmative);
        if (!rep.routes_agree)
            throw std::logic_error("finite_type_check: routes disagree on a definite verdict");
        if (rep.lie_verdict == Verdict::Affirmative || rep.segre_verdict == Verdict::Affirmative)
            rep.verdict = Verdict::Affirmative;
        else if (rep.lie_verdict == Verdict::Negative)
            rep.verdict = Verdict::Negative;
        else
            rep.verdict = Verdict::Inconclusive;
        break;
    }
    return rep;
}

// ---- holomorphic nondegeneracy ----------------------------------------

HoloNondegReport holo_nondegeneracy_check(const GenericManifold& M, int alpha_degree_bound) {
    alpha_degree_bound = std::min(alpha_degree_bound, M.order() - 1);
    HoloNondegReport rep;
    rep.alpha_bound = alpha_degree_bound;
    const int N = M.N(), d = M.d();

    auto qtab = M.qbar_coefficients(alpha_degree_bound);

    // pool of gradient rows in graded-lex-then-component order
    std::vector<std::pair<Mono, int>> pool_idx;
    std::vector<std::vector<Series>> pool_rows;
    for (const auto& [alpha, q] : qtab) {
        for (int j = 0; j < d; ++j) {
            if (q[j].order() < 1) continue;
            std::vector<Series> grad(N);
            bool nonzero = false;
            for (int m = 0; m < N; ++m) {
                grad[m] = q[j].derivative(m);
                if (!grad[m].is_zero()) nonzero = true;
            }
            if (!nonzero) continue;
            pool_idx.emplace_back(alpha, j);
            pool_rows.push_back(std::move(grad));
        }
    }

    // first N-subset (in pool order) with a nonzero determinant wins
    const int P = static_cast<int>(pool_rows.size());
    if (P >= N) {
        std::vector<int> sel(N);
        for (int i = 0; i < N; ++i) sel[i] = i;
        bool more = true;
        while (more) {
            std::vector<std::vector<Series>> sub;
            for (int i : sel) sub.push_back(pool_rows[i]);
            Series det = series_det(sub);
            if (!det.is_zero()) {
                rep.verdict = Verdict::Affirmative;
                for (int i : sel) rep.cert_indices.push_back(pool_idx[i]);
                rep.cert_det = det;
                rep.certified_order = det.order();
                return rep;
            }
            int i = N - 1;
            while (i >= 0 && sel[i] == P - N + i) --i;
            if (i < 0) more = false;
            else {
                ++sel[i];
                for (int k = i + 1; k < N; ++k) sel[k] = sel[k - 1] + 1;
            }
        }
    }

    // degeneracy attempt: a(Z) with sum_m a_m dQbar_j/dZ_m = 0 mod high degrees
    const int eq_order = M.order() - 1;
    const int adeg = eq_order;
    std::vector<std::vector<Series>> B(d, std::vector<Series>(N));
    for (int j = 0; j < d; ++j)
        for (int m = 0; m < N; ++m) {
            int zv = m < M.n() ? M.zvar(m) : M.wvar(m - M.n());
            B[j][m] = M.Qbar()[j].derivative(zv);
        }

    auto amonos = monos_upto(N, static_cast<std::uint32_t>(adeg));
    struct ColKey { int m; Mono nu; };
    std::vector<ColKey> colkeys;
    std::map<std::pair<int, Mono>, int> rowpos; // (j, product monomial) -> row
    std::vector<std::vector<std::pair<int, Coeff>>> cols;
    for (int m = 0; m < N; ++m) {
        for (const auto& nu : amonos) {
            std::vector<std::pair<int, Coeff>> col;
            for (int j = 0; j < d; ++j) {
                for (const auto& [bm, bc] : B[j][m].terms()) {
                    Mono prod = bm; // in the 2N ring
                    for (int v = 0; v < N; ++v) {
                        int zv = v < M.n() ? M.zvar(v) : M.wvar(v - M.n());
                        prod.set(zv, prod[zv] + nu[v]);
                    }
                    if (static_cast<int>(prod.deg()) > eq_order) continue;
                    auto key = std::make_pair(j, prod);
                    auto it = rowpos.find(key);
                    if (it == rowpos.end())
                        it = rowpos.emplace(key, static_cast<int>(rowpos.size())).first;
                    col.emplace_back(it->second, bc);
                }
            }
            colkeys.push_back({m, nu});
            cols.push_back(std::move(col));
        }
    }
    Matrix A(static_cast<int>(rowpos.size()), static_cast<int>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (const auto& [r, v] : cols[c]) {
            A.at(r, static_cast<int>(c)) += v;
        }
    auto null_basis = nullspace(A);
    if (!null_basis.empty()) {
        const auto& sol = null_basis.front();
        std::vector<Series> a(N, Series(N, adeg));
        for (std::size_t c = 0; c < colkeys.size(); ++c)
            if (!sol[c].is_zero()) a[colkeys[c].m].add_to_coeff(colkeys[c].nu, sol[c]);
        rep.verdict = Verdict::Negative;
        rep.degeneracy_field = std::move(a);
        rep.certified_order = eq_order;
        return rep;
    }

    rep.verdict = Verdict::Inconclusive;
    rep.certified_order = eq_order;
    rep.note = "no determinant certificate below the alpha bound and no tangent field "
               "at this order";
    return rep;
}

} // namespace crforge
