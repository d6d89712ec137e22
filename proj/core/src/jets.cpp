#include "crforge/jets.hpp"
#include "crforge/linalg.hpp"

#include <memory>
#include <mutex>
#include <sstream>
#include <tuple>

namespace crforge {

// ---- JetShape / JMono --------------------------------------------------

JetShape::JetShape(int k_, int r_, int l_) : k(k_), r(r_), l(l_) {
    for (const auto& m : monos_upto(k, static_cast<std::uint32_t>(l)))
        if (m.deg() >= 1) {
            pos[m] = static_cast<int>(hat.size());
            hat.push_back(m);
        }
}

int jmono_degree(const JMono& m) {
    int d = 0;
    for (const auto& [v, e] : m) d += e;
    return d;
}

bool jmono_less(const JMono& a, const JMono& b) {
    int da = jmono_degree(a), db = jmono_degree(b);
    if (da != db) return da < db;
    return a < b;
}

static JMono jmono_mul_var(const JMono& m, int id, int e = 1) {
    JMono out = m;
    auto it = std::lower_bound(out.begin(), out.end(), id,
                               [](const auto& p, int v) { return p.first < v; });
    if (it != out.end() && it->first == id)
        it->second += e;
    else
        out.insert(it, {id, e});
    return out;
}

// ---- LamPoly ------------------------------------------------------------

bool LamPoly::is_one() const {
    return terms.size() == 1 && terms.begin()->first.empty() &&
           terms.begin()->second == Coeff::one();
}

void LamPoly::add(const JMono& m, const Coeff& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = terms.emplace(m, c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) terms.erase(it);
    }
}

Series LamPoly::eval(const std::vector<Series>& hat_vals, int nvars, int order) const {
    Series acc(nvars, order);
    for (const auto& [m, c] : terms) {
        Series prod = Series::constant(nvars, order, c);
        for (const auto& [vid, e] : m)
            for (int t = 0; t < e; ++t) prod = prod * hat_vals[vid];
        acc += prod;
    }
    return acc;
}

std::string LamPoly::str() const {
    if (terms.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.str() << ")";
        for (const auto& [vid, e] : m) {
            os << "*L" << vid;
            if (e > 1) os << "^" << e;
        }
    }
    return os.str();
}

// ---- chain-rule engine ---------------------------------------------------
//
// Differentiates a placeholder composite u(F(x), x) symbolically. Terms are
// (monomial in hatted jet coordinates of F) x (opaque derivative symbol
// u_{y^a x^b}); the derivation is
//   d_j Lambda_{alpha,i} = Lambda_{alpha+e_j,i}
//   d_j u_{a,b}          = u_{a,b+e_j} + sum_i u_{a+e_i,b} Lambda_{e_j,i}.

namespace {

struct ChainKey {
    JMono lam;
    Mono a; // slot derivative, in N^r
    Mono b; // explicit derivative, in N^k (empty when absent)

    bool operator<(const ChainKey& o) const {
        if (lam != o.lam) return lam < o.lam;
        if (!(a == o.a)) return a < o.a;
        return b < o.b;
    }
};

using ChainExpr = std::map<ChainKey, Coeff>;

ChainExpr chain_diff(const ChainExpr& E, int xj, const JetShape& sh, int explicit_dim) {
    ChainExpr out;
    auto acc = [&out](ChainKey k, const Coeff& c) {
        if (c.is_zero()) return;
        auto [it, fresh] = out.emplace(std::move(k), c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) out.erase(it);
        }
    };
    for (const auto& [key, c] : E) {
        // product rule over the jet-coordinate factors
        for (std::size_t idx = 0; idx < key.lam.size(); ++idx) {
            auto [vid, e] = key.lam[idx];
            auto [alpha, comp] = sh.var_of(vid);
            Mono alpha2 = alpha;
            alpha2.bump(xj, +1);
            JMono lam = key.lam;
            if (--lam[idx].second == 0) lam.erase(lam.begin() + idx);
            lam = jmono_mul_var(lam, sh.var_id(alpha2, comp));
            acc({std::move(lam), key.a, key.b}, c * Coeff(e));
        }
        // explicit x-slot of the symbol
        if (explicit_dim > 0) {
            Mono b2 = key.b;
            b2.bump(xj, +1);
            acc({key.lam, key.a, std::move(b2)}, c);
        }
        // chain through the map slot
        for (int i = 0; i < sh.r; ++i) {
            JMono lam = jmono_mul_var(key.lam, sh.var_id(Mono::unit(sh.k, xj), i));
            Mono a2 = key.a;
            a2.bump(i, +1);
            acc({std::move(lam), std::move(a2), key.b}, c);
        }
    }
    return out;
}

/// ChainExpr for every |nu| <= l, built by successive differentiation.
std::map<Mono, ChainExpr> chain_table(const JetShape& sh, int explicit_dim) {
    std::map<Mono, ChainExpr> table;
    ChainExpr start;
    start[{JMono{}, Mono(sh.r), Mono(explicit_dim > 0 ? sh.k : 0)}] = Coeff::one();
    table[Mono(sh.k)] = std::move(start);
    for (const auto& nu : monos_upto(sh.k, static_cast<std::uint32_t>(sh.l))) {
        if (nu.deg() == 0) continue;
        int j = 0;
        while (nu[j] == 0) ++j;
        Mono prev = nu;
        prev.bump(j, -1);
        table[nu] = chain_diff(table.at(prev), j, sh, explicit_dim);
    }
    return table;
}

} // namespace

// ---- universal polynomials ----------------------------------------------

const UniversalPolys& universal_polynomials(int k, int r, int l) {
    static std::mutex mtx;
    static std::map<std::tuple<int, int, int>, std::unique_ptr<UniversalPolys>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_tuple(k, r, l);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;

    auto up = std::make_unique<UniversalPolys>();
    up->shape = JetShape(k, r, l);
    auto ptable = chain_table(up->shape, k);
    for (const auto& [nu, expr] : ptable)
        for (const auto& [ckey, c] : expr)
            up->P[nu][{ckey.a, ckey.b}].add(ckey.lam, c);
    auto rtable = chain_table(up->shape, 0);
    for (const auto& [beta, expr] : rtable)
        for (const auto& [ckey, c] : expr)
            up->R[beta][ckey.a].add(ckey.lam, c);
    auto& ref = *up;
    cache.emplace(key, std::move(up));
    return ref;
}

const LamPoly* UniversalPolys::lookupP(const Mono& nu, const Mono& alpha,
                                       const Mono& beta) const {
    auto it = P.find(nu);
    if (it == P.end()) return nullptr;
    auto jt = it->second.find({alpha, beta});
    return jt == it->second.end() ? nullptr : &jt->second;
}

const LamPoly* UniversalPolys::lookupR(const Mono& beta, const Mono& mu) const {
    auto it = R.find(beta);
    if (it == R.end()) return nullptr;
    auto jt = it->second.find(mu);
    return jt == it->second.end() ? nullptr : &jt->second;
}

// ---- jets of maps ---------------------------------------------------------

const std::vector<Series>& JetValue::at(const Mono& nu) const {
    for (std::size_t i = 0; i < idx.size(); ++i)
        if (idx[i] == nu) return entries[i];
    throw std::invalid_argument("JetValue::at: index out of range");
}

std::vector<Series>& JetValue::at(const Mono& nu) {
    for (std::size_t i = 0; i < idx.size(); ++i)
        if (idx[i] == nu) return entries[i];
    throw std::invalid_argument("JetValue::at: index out of range");
}

std::vector<Series> JetValue::hat_values(const JetShape& shape, int new_nvars,
                                         const std::vector<int>& var_map) const {
    if (shape.k != k || shape.r != r || shape.l > l)
        throw std::invalid_argument("JetValue::hat_values: shape mismatch");
    std::vector<Series> vals(shape.nvars());
    for (const auto& alpha : shape.hat)
        for (int c = 0; c < r; ++c) {
            Series s = at(alpha)[c];
            if (new_nvars >= 0) s = s.lift(new_nvars, var_map);
            vals[shape.var_id(alpha, c)] = std::move(s);
        }
    return vals;
}

JetValue jet_of_map(const SeriesMap& F, int l, const std::vector<int>& base_vars) {
    if (l > F.order())
        throw std::domain_error("jet_of_map: jet order exceeds the truncation budget");
    JetValue jv;
    jv.k = static_cast<int>(base_vars.size());
    jv.r = F.size();
    jv.l = l;
    jv.idx = monos_upto(jv.k, static_cast<std::uint32_t>(l));
    for (const auto& nu : jv.idx) {
        Mono full(F.nvars());
        for (int i = 0; i < jv.k; ++i) full.set(base_vars[i], nu[i]);
        std::vector<Series> entry;
        entry.reserve(F.size());
        for (int c = 0; c < F.size(); ++c) entry.push_back(F[c].derivative(full));
        jv.entries.push_back(std::move(entry));
    }
    return jv;
}

// ---- JetPolynomial --------------------------------------------------------

void JetPolynomial::add_term(const JMono& m, const Series& c) {
    // zero coefficients are kept so the truncation order stays tracked
    auto [it, fresh] = terms.emplace(m, c);
    if (!fresh) it->second += c;
}

JetPolynomial& JetPolynomial::operator+=(const JetPolynomial& o) {
    if (!(shape == o.shape) || coeff_nvars != o.coeff_nvars)
        throw std::invalid_argument("JetPolynomial: shape mismatch in +=");
    for (const auto& [m, c] : o.terms) add_term(m, c);
    return *this;
}

JetPolynomial JetPolynomial::scaled(const Series& s) const {
    JetPolynomial out(shape, coeff_nvars);
    for (const auto& [m, c] : terms) out.add_term(m, c * s);
    return out;
}

bool JetPolynomial::is_zero() const {
    for (const auto& [m, c] : terms)
        if (!c.is_zero()) return false;
    return true;
}

Series JetPolynomial::evaluate(const std::vector<Series>& coeff_args,
                               const std::vector<Series>& hat_vals) const {
    if (static_cast<int>(coeff_args.size()) != coeff_nvars)
        throw std::invalid_argument("JetPolynomial::evaluate: bad coefficient assignment");
    int nvars = coeff_args.empty() ? 0 : coeff_args[0].nvars();
    int order = coeff_args.empty() ? 0 : coeff_args[0].order();
    for (const auto& h : hat_vals) order = std::min(order, h.order());
    Series acc(nvars, order);
    for (const auto& [m, c] : terms) {
        Series prod = c.subst(coeff_args);
        for (const auto& [vid, e] : m)
            for (int t = 0; t < e; ++t) prod = prod * hat_vals[vid];
        acc += prod;
    }
    return acc;
}

JetPolynomial JetPolynomial::substitute_upper_block(int comp_lo, int cv_lo, int sub_nvars,
                                                    const std::vector<Series>& hat_sub,
                                                    const std::vector<Series>& cv_sub) const {
    JetShape new_shape(shape.k, comp_lo, shape.l);
    const int new_cnv = cv_lo + sub_nvars;
    JetPolynomial out(new_shape, new_cnv);

    int ord = 0;
    bool have = false;
    for (const auto& s : cv_sub) {
        ord = have ? std::min(ord, s.order()) : s.order();
        have = true;
    }
    if (!have)
        for (const auto& [m, c] : terms) {
            ord = have ? std::min(ord, c.order()) : c.order();
            have = true;
        }

    // kept coefficient vars stay in front; dropped ones take the provided
    // series, which live in the appended sub ring
    std::vector<int> sub_map(sub_nvars);
    for (int i = 0; i < sub_nvars; ++i) sub_map[i] = cv_lo + i;
    std::vector<Series> cargs(coeff_nvars);
    for (int v = 0; v < cv_lo; ++v) cargs[v] = Series::variable(new_cnv, ord, v);
    for (int v = cv_lo; v < coeff_nvars; ++v)
        cargs[v] = cv_sub[v - cv_lo].lift(new_cnv, sub_map);

    for (const auto& [m, c] : terms) {
        JMono kept;
        Series prod = c.subst(cargs);
        for (const auto& [vid, e] : m) {
            auto [alpha, comp] = shape.var_of(vid);
            if (comp < comp_lo) {
                kept = jmono_mul_var(kept, new_shape.var_id(alpha, comp), e);
            } else {
                const Series& val = hat_sub[vid];
                for (int t = 0; t < e; ++t) prod = prod * val.lift(new_cnv, sub_map);
            }
        }
        out.add_term(kept, prod);
    }
    return out;
}

JetPolynomial JetPolynomial::with_coeffs(int new_nvars, const std::vector<Series>& args) const {
    JetPolynomial out(shape, new_nvars);
    for (const auto& [m, c] : terms) out.add_term(m, c.subst(args));
    return out;
}

JetPolynomial JetPolynomial::coeff_derivative(int var) const {
    JetPolynomial out(shape, coeff_nvars);
    for (const auto& [m, c] : terms) out.add_term(m, c.derivative(var));
    return out;
}

bool JetPolynomial::triangular_in(const Mono& nu) const {
    for (const auto& [m, c] : terms) {
        if (c.is_zero()) continue;
        for (const auto& [vid, e] : m) {
            auto [alpha, comp] = shape.var_of(vid);
            if (!alpha.divides(nu)) return false;
        }
    }
    return true;
}

Series JetPolynomial::flatten(int order) const {
    const int nv = coeff_nvars + shape.nvars();
    std::vector<int> cmap(coeff_nvars);
    for (int i = 0; i < coeff_nvars; ++i) cmap[i] = i;
    Series acc(nv, order);
    for (const auto& [m, c] : terms) {
        Series prod = c.truncated(std::min(order, c.order())).lift(nv, cmap).truncated(order);
        for (const auto& [vid, e] : m)
            prod = prod * Series::variable(nv, order, coeff_nvars + vid).pow(e);
        acc += prod;
    }
    return acc;
}

bool JetPolynomial::equal_mod(const JetPolynomial& a, const JetPolynomial& b, int cmp_order) {
    if (!(a.shape == b.shape) || a.coeff_nvars != b.coeff_nvars) return false;
    auto check = [&](const JetPolynomial& x, const JetPolynomial& y) {
        for (const auto& [m, c] : x.terms) {
            auto it = y.terms.find(m);
            Series other = it == y.terms.end() ? Series(x.coeff_nvars, cmp_order) : it->second;
            int k = std::min({cmp_order, c.order(), other.order()});
            if (!Series::equal_mod(c, other, k)) return false;
        }
        return true;
    };
    return check(a, b) && check(b, a);
}

// ---- prolongation ---------------------------------------------------------

const std::vector<JetPolynomial>& Prolongation::at(const Mono& nu) const {
    for (std::size_t i = 0; i < idx.size(); ++i)
        if (idx[i] == nu) return comps[i];
    throw std::invalid_argument("Prolongation::at: index out of range");
}

Prolongation prolong(const SeriesMap& phi, int l, int base_dim) {
    if (!phi.fixes_origin())
        throw std::domain_error("prolong: phi must fix the origin");
    if (l > phi.order())
        throw std::domain_error("prolong: jet order exceeds phi's truncation order");
    const int r = phi.nvars();
    JetShape sh(base_dim, r, l);
    auto table = chain_table(sh, 0);

    Prolongation pr;
    pr.base_dim = base_dim;
    pr.l = l;
    pr.idx = monos_upto(base_dim, static_cast<std::uint32_t>(l));
    for (const auto& nu : pr.idx) {
        const ChainExpr& expr = table.at(nu);
        std::vector<JetPolynomial> per_comp(phi.size(), JetPolynomial(sh, r));
        for (const auto& [key, c] : expr) {
            for (int comp = 0; comp < phi.size(); ++comp) {
                Series part = phi[comp].derivative(key.a).scaled(c);
                per_comp[comp].add_term(key.lam, part);
            }
        }
        pr.comps.push_back(std::move(per_comp));
    }
    return pr;
}

JetValue evaluate_prolongation(const Prolongation& pr, const JetValue& jet) {
    if (jet.k != pr.base_dim || jet.l < pr.l)
        throw std::invalid_argument("evaluate_prolongation: jet shape mismatch");
    JetShape sh(pr.base_dim, jet.r, pr.l);
    std::vector<Series> hat = jet.hat_values(sh);
    std::vector<Series> coeff_args = jet.at(Mono(jet.k)); // Lambda_0 block

    JetValue out;
    out.k = jet.k;
    out.r = static_cast<int>(pr.comps[0].size());
    out.l = pr.l;
    out.idx = pr.idx;
    for (std::size_t i = 0; i < pr.idx.size(); ++i) {
        std::vector<Series> entry;
        for (const auto& jp : pr.comps[i]) entry.push_back(jp.evaluate(coeff_args, hat));
        out.entries.push_back(std::move(entry));
    }
    return out;
}

std::vector<JetPolynomial> ideal_prolong(const SeriesMap& gens, int l, int base_dim) {
    // manifold ideal precondition: independent differentials at 0
    auto J = gens.jacobian_at0();
    Matrix jac(gens.size(), gens.nvars());
    for (int i = 0; i < gens.size(); ++i)
        for (int j = 0; j < gens.nvars(); ++j) jac.at(i, j) = J[i][j];
    if (rank(jac) != gens.size())
        throw std::domain_error("ideal_prolong: generators are not a manifold ideal "
                                "(dependent differentials at 0)");
    Prolongation pr = prolong(gens, l, base_dim);
    std::vector<JetPolynomial> out;
    for (const auto& vec : pr.comps)
        for (const auto& jp : vec) out.push_back(jp);
    return out;
}

} // namespace crforge
