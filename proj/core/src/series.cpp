#include "crforge/series.hpp"
#include "crforge/linalg.hpp"

#include <random>
#include <sstream>

namespace crforge {

// ---- Mono helpers -----------------------------------------------------

std::string Mono::str(const std::vector<std::string>& names) const {
    std::string s;
    for (std::size_t i = 0; i < e_.size(); ++i) {
        if (e_[i] == 0) continue;
        if (!s.empty()) s += "*";
        s += names.empty() ? "x" + std::to_string(i + 1) : names[i];
        if (e_[i] > 1) s += "^" + std::to_string(e_[i]);
    }
    return s.empty() ? "1" : s;
}

static void monos_rec(std::size_t nvars, std::uint32_t deg, std::size_t pos,
                      Mono& cur, std::vector<Mono>& out) {
    if (pos + 1 == nvars) {
        cur.set(pos, deg);
        out.push_back(cur);
        cur.set(pos, 0);
        return;
    }
    for (std::uint32_t e = 0; e <= deg; ++e) {
        cur.set(pos, e);
        monos_rec(nvars, deg - e, pos + 1, cur, out);
    }
    cur.set(pos, 0);
}

std::vector<Mono> monos_of_degree(std::size_t nvars, std::uint32_t deg) {
    std::vector<Mono> out;
    if (nvars == 0) {
        if (deg == 0) out.push_back(Mono());
        return out;
    }
    Mono cur(nvars);
    monos_rec(nvars, deg, 0, cur, out);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Mono> monos_upto(std::size_t nvars, std::uint32_t maxdeg) {
    std::vector<Mono> out;
    for (std::uint32_t d = 0; d <= maxdeg; ++d) {
        auto layer = monos_of_degree(nvars, d);
        out.insert(out.end(), layer.begin(), layer.end());
    }
    return out;
}

// ---- VariableSplit ----------------------------------------------------

const std::vector<int>& VariableSplit::block(const std::string& name) const {
    for (const auto& b : blocks)
        if (b.first == name) return b.second;
    throw std::invalid_argument("VariableSplit: no block named " + name);
}

std::size_t VariableSplit::nvars() const {
    std::size_t n = 0;
    for (const auto& b : blocks) n += b.second.size();
    return n;
}

void VariableSplit::validate() const {
    std::vector<char> seen(nvars(), 0);
    for (const auto& b : blocks)
        for (int i : b.second) {
            if (i < 0 || static_cast<std::size_t>(i) >= seen.size() || seen[i])
                throw std::invalid_argument("VariableSplit: blocks must partition variables");
            seen[i] = 1;
        }
}

VariableSplit VariableSplit::pairing(int N) {
    VariableSplit s;
    std::vector<int> a(N), b(N);
    for (int i = 0; i < N; ++i) { a[i] = i; b[i] = N + i; }
    s.blocks = {{"Z", a}, {"zeta", b}};
    return s;
}

// ---- Series basics ----------------------------------------------------

Series Series::constant(int nvars, int order, const Coeff& c) {
    Series s(nvars, order);
    s.set_coeff(Mono(nvars), c);
    return s;
}

Series Series::variable(int nvars, int order, int var) {
    Series s(nvars, order);
    s.set_coeff(Mono::unit(nvars, var), Coeff::one());
    return s;
}

Series Series::monomial(int nvars, int order, const Mono& m, const Coeff& c) {
    Series s(nvars, order);
    s.set_coeff(m, c);
    return s;
}

Coeff Series::coeff(const Mono& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Coeff::zero() : it->second;
}

void Series::set_coeff(const Mono& m, const Coeff& c) {
    if (static_cast<int>(m.nvars()) != nvars_)
        throw std::invalid_argument("Series::set_coeff: variable count mismatch");
    if (static_cast<int>(m.deg()) > order_) {
        if (!c.is_zero())
            throw std::invalid_argument("Series::set_coeff: degree beyond truncation order");
        return;
    }
    if (c.is_zero())
        terms_.erase(m);
    else
        terms_[m] = c;
}

void Series::add_to_coeff(const Mono& m, const Coeff& c) {
    if (static_cast<int>(m.deg()) > order_ || c.is_zero()) return;
    auto [it, fresh] = terms_.emplace(m, c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

int Series::valuation() const {
    if (terms_.empty()) return order_ + 1;
    return static_cast<int>(terms_.begin()->first.deg());
}

int Series::max_term_degree() const {
    if (terms_.empty()) return -1;
    return static_cast<int>(terms_.rbegin()->first.deg());
}

std::optional<std::pair<Mono, Coeff>> Series::lowest_term() const {
    if (terms_.empty()) return std::nullopt;
    return *terms_.begin();
}

Series Series::truncated(int new_order) const {
    if (new_order >= order_) {
        Series s = *this;
        s.order_ = new_order > order_ ? order_ : new_order;
        return s;
    }
    Series s(nvars_, new_order);
    for (const auto& [m, c] : terms_) {
        if (static_cast<int>(m.deg()) > new_order) break;
        s.terms_.emplace(m, c);
    }
    return s;
}

void Series::check_same_ring(const Series& o) const {
    if (nvars_ != o.nvars_)
        throw std::invalid_argument("Series: variable count mismatch");
}

Series Series::operator-() const {
    Series s = *this;
    for (auto& [m, c] : s.terms_) c = -c;
    return s;
}

Series& Series::operator+=(const Series& o) {
    check_same_ring(o);
    if (o.order_ < order_) *this = truncated(o.order_);
    for (const auto& [m, c] : o.terms_) {
        if (static_cast<int>(m.deg()) > order_) break;
        add_to_coeff(m, c);
    }
    return *this;
}

Series& Series::operator-=(const Series& o) {
    check_same_ring(o);
    if (o.order_ < order_) *this = truncated(o.order_);
    for (const auto& [m, c] : o.terms_) {
        if (static_cast<int>(m.deg()) > order_) break;
        add_to_coeff(m, -c);
    }
    return *this;
}

Series operator*(const Series& a, const Series& b) {
    a.check_same_ring(b);
    int order = std::min(a.order(), b.order());
    Series r(a.nvars(), order);
    for (const auto& [ma, ca] : a.terms()) {
        int da = static_cast<int>(ma.deg());
        if (da > order) break;
        for (const auto& [mb, cb] : b.terms()) {
            if (da + static_cast<int>(mb.deg()) > order) break;
            r.add_to_coeff(ma + mb, ca * cb);
        }
    }
    return r;
}

Series Series::scaled(const Coeff& c) const {
    Series s(nvars_, order_);
    if (c.is_zero()) return s;
    for (const auto& [m, v] : terms_) s.terms_.emplace(m, v * c);
    return s;
}

Series Series::unit_inverse() const {
    Coeff c0 = constant_term();
    if (c0.is_zero())
        throw std::domain_error("unit_inverse: series has zero constant term");
    // g <- g*(2 - a*g), doubling the number of correct degrees each round
    Series g = Series::constant(nvars_, order_, c0.inv());
    Series two = Series::constant(nvars_, order_, Coeff(2));
    int correct = 0;
    while (correct < order_) {
        g = g * (two - (*this) * g);
        correct = correct == 0 ? 1 : 2 * correct + 1;
    }
    return g;
}

Series Series::derivative(int var) const {
    if (order_ < 1)
        throw std::domain_error("derivative: truncation order exhausted");
    Series r(nvars_, order_ - 1);
    for (const auto& [m, c] : terms_) {
        std::uint32_t e = m[var];
        if (e == 0) continue;
        Mono dm = m;
        dm.bump(var, -1);
        r.add_to_coeff(dm, c * Coeff(static_cast<long>(e)));
    }
    return r;
}

Series Series::derivative(const Mono& times) const {
    if (static_cast<int>(times.deg()) > order_)
        throw std::domain_error("derivative: |times| exceeds truncation order");
    Series r = *this;
    for (std::size_t v = 0; v < times.nvars(); ++v)
        for (std::uint32_t k = 0; k < times[v]; ++k) r = r.derivative(static_cast<int>(v));
    return r;
}

Series Series::subst(const std::vector<Series>& args) const {
    if (static_cast<int>(args.size()) != nvars_)
        throw std::invalid_argument("subst: arity mismatch");
    int target_nvars = nvars_ == 0 ? 0 : args[0].nvars();
    int order = order_;
    for (const auto& g : args) {
        if (g.nvars() != target_nvars)
            throw std::invalid_argument("subst: arguments live in different rings");
        if (!g.constant_term().is_zero())
            throw std::domain_error("subst: substituted map must fix the origin");
        order = std::min(order, g.order());
    }
    Series r(target_nvars, order);
    // cache powers of each argument as needed
    std::vector<std::vector<Series>> pow(args.size());
    auto power = [&](std::size_t i, std::uint32_t k) -> const Series& {
        auto& cache = pow[i];
        if (cache.empty()) cache.push_back(Series::constant(target_nvars, order, Coeff::one()));
        while (cache.size() <= k) cache.push_back(cache.back() * args[i]);
        return cache[k];
    };
    for (const auto& [m, c] : terms_) {
        // args fix the origin, so a degree-|m| term contributes from valuation |m| on
        if (static_cast<int>(m.deg()) > order) break;
        Series prod = Series::constant(target_nvars, order, c);
        for (std::size_t v = 0; v < m.nvars(); ++v)
            if (m[v] > 0) prod = prod * power(v, m[v]);
        r += prod;
    }
    return r;
}

Series Series::conj_coeffs() const {
    Series s = *this;
    for (auto& [m, c] : s.terms_) c = c.conj();
    return s;
}

Series Series::sigma(const VariableSplit& split) const {
    const auto& A = split.block(split.blocks[0].first);
    const auto& B = split.block(split.blocks[1].first);
    if (A.size() != B.size())
        throw std::invalid_argument("sigma: blocks must have equal sizes");
    std::vector<int> swap(nvars_);
    for (int i = 0; i < nvars_; ++i) swap[i] = i;
    for (std::size_t i = 0; i < A.size(); ++i) {
        swap[A[i]] = B[i];
        swap[B[i]] = A[i];
    }
    Series s(nvars_, order_);
    for (const auto& [m, c] : terms_) {
        Mono sm(nvars_);
        for (int v = 0; v < nvars_; ++v) sm.set(swap[v], m[v]);
        s.terms_.emplace(sm, c.conj());
    }
    return s;
}

Series Series::lift(int new_nvars, const std::vector<int>& var_map) const {
    if (static_cast<int>(var_map.size()) != nvars_)
        throw std::invalid_argument("lift: var_map size mismatch");
    Series s(new_nvars, order_);
    for (const auto& [m, c] : terms_) {
        Mono lm(new_nvars);
        for (int v = 0; v < nvars_; ++v)
            if (m[v] > 0) lm.set(var_map[v], lm[var_map[v]] + m[v]);
        s.terms_.emplace(lm, c);
    }
    return s;
}

Series Series::exp() const {
    if (!constant_term().is_zero())
        throw std::domain_error("exp: series must vanish at the origin");
    Series r = Series::constant(nvars_, order_, Coeff::one());
    Series term = r;
    mpz_class fact = 1;
    for (int k = 1; k <= order_; ++k) {
        term = term * (*this);
        fact *= k;
        r += term.scaled(Coeff(mpq_class(1, fact)));
    }
    return r;
}

Series Series::pow(std::uint32_t k) const {
    Series r = Series::constant(nvars_, order_, Coeff::one());
    for (std::uint32_t j = 0; j < k; ++j) r = r * (*this);
    return r;
}

bool Series::equal_mod(const Series& a, const Series& b, int cmp_order) {
    if (a.nvars_ != b.nvars_) return false;
    if (cmp_order > a.order_ || cmp_order > b.order_)
        throw std::invalid_argument("equal_mod: comparison order exceeds truncation");
    Series d = a.truncated(cmp_order) - b.truncated(cmp_order);
    return d.is_zero();
}

std::string Series::str(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.str() << ")";
        if (!m.is_zero()) os << "*" << m.str(names);
    }
    return os.str();
}

// ---- SeriesMap --------------------------------------------------------

SeriesMap::SeriesMap(std::vector<Series> comps) : comps_(std::move(comps)) {
    for (const auto& c : comps_)
        if (c.nvars() != comps_[0].nvars() || c.order() != comps_[0].order())
            throw std::invalid_argument("SeriesMap: components disagree on ring or order");
}

SeriesMap::SeriesMap(int nvars, int order, int ncomps)
    : comps_(ncomps, Series(nvars, order)) {}

SeriesMap SeriesMap::identity(int nvars, int order) {
    SeriesMap m(nvars, order, nvars);
    for (int i = 0; i < nvars; ++i) m[i] = Series::variable(nvars, order, i);
    return m;
}

int SeriesMap::nvars() const { return comps_.empty() ? 0 : comps_[0].nvars(); }
int SeriesMap::order() const { return comps_.empty() ? 0 : comps_[0].order(); }

bool SeriesMap::fixes_origin() const {
    for (const auto& c : comps_)
        if (!c.constant_term().is_zero()) return false;
    return true;
}

SeriesMap SeriesMap::bar() const {
    std::vector<Series> out;
    out.reserve(comps_.size());
    for (const auto& c : comps_) out.push_back(c.conj_coeffs());
    return SeriesMap(std::move(out));
}

SeriesMap SeriesMap::truncated(int k) const {
    std::vector<Series> out;
    out.reserve(comps_.size());
    for (const auto& c : comps_) out.push_back(c.truncated(k));
    return SeriesMap(std::move(out));
}

SeriesMap SeriesMap::lift(int new_nvars, const std::vector<int>& var_map) const {
    std::vector<Series> out;
    out.reserve(comps_.size());
    for (const auto& c : comps_) out.push_back(c.lift(new_nvars, var_map));
    return SeriesMap(std::move(out));
}

SeriesMap SeriesMap::subst(const std::vector<Series>& args) const {
    std::vector<Series> out;
    out.reserve(comps_.size());
    for (const auto& c : comps_) out.push_back(c.subst(args));
    return SeriesMap(std::move(out));
}

SeriesMap SeriesMap::after(const SeriesMap& inner) const {
    return subst(inner.components());
}

std::vector<std::vector<Coeff>> SeriesMap::jacobian_at0() const {
    std::vector<std::vector<Coeff>> J(comps_.size(), std::vector<Coeff>(nvars()));
    for (std::size_t i = 0; i < comps_.size(); ++i)
        for (int j = 0; j < nvars(); ++j)
            J[i][j] = comps_[i].coeff(Mono::unit(nvars(), j));
    return J;
}

// ---- operations -------------------------------------------------------

Series compose(const Series& f, const SeriesMap& g) {
    if (g.size() != f.nvars())
        throw std::invalid_argument("compose: arity mismatch");
    if (!g.fixes_origin())
        throw std::domain_error("compose: inner map must fix the origin");
    return f.subst(g.components());
}

SeriesMap implicit_solve(const SeriesMap& rho, const std::vector<int>& y_vars) {
    const int d = static_cast<int>(y_vars.size());
    if (rho.size() != d)
        throw std::invalid_argument("implicit_solve: need as many equations as unknowns");
    if (!rho.fixes_origin())
        throw std::domain_error("implicit_solve: rho(0) != 0");
    const int nv = rho.nvars();
    const int order = rho.order();

    std::vector<char> is_y(nv, 0);
    for (int v : y_vars) is_y[v] = 1;
    std::vector<int> x_vars;
    for (int v = 0; v < nv; ++v)
        if (!is_y[v]) x_vars.push_back(v);
    const int m = static_cast<int>(x_vars.size());

    Matrix A(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            A.at(i, j) = rho[i].coeff(Mono::unit(nv, y_vars[j]));
    Matrix Ainv = inverse(A); // throws if d rho/d y(0) is singular

    // args for substitution into rho: x-vars become the new ring's
    // variables, y-vars the running solution.
    std::vector<Series> args(nv, Series(m, order));
    for (int k = 0; k < m; ++k) args[x_vars[k]] = Series::variable(m, order, k);
    std::vector<Series> u(d, Series(m, order));

    for (int step = 0; step < order; ++step) {
        for (int j = 0; j < d; ++j) args[y_vars[j]] = u[j];
        std::vector<Series> resid(d);
        for (int i = 0; i < d; ++i) resid[i] = rho[i].subst(args);
        bool all_zero = true;
        for (int j = 0; j < d; ++j) {
            Series corr(m, order);
            for (int i = 0; i < d; ++i) corr += resid[i].scaled(Ainv.at(j, i));
            if (!corr.is_zero()) all_zero = false;
            u[j] -= corr;
        }
        if (all_zero) break;
    }
    return SeriesMap(std::move(u));
}

SeriesMap invert_map(const SeriesMap& F) {
    const int n = F.nvars();
    if (F.size() != n)
        throw std::invalid_argument("invert_map: map must be square");
    if (!F.fixes_origin())
        throw std::domain_error("invert_map: map must fix the origin");
    const int order = F.order();
    // Solve F(y) - x = 0 for y in the ring (x, y).
    std::vector<int> to_y(n);
    for (int i = 0; i < n; ++i) to_y[i] = n + i;
    SeriesMap Fy = F.lift(2 * n, to_y);
    std::vector<Series> eqs;
    eqs.reserve(n);
    for (int i = 0; i < n; ++i)
        eqs.push_back(Fy[i] - Series::variable(2 * n, order, i));
    std::vector<int> unknowns(n);
    for (int i = 0; i < n; ++i) unknowns[i] = n + i;
    return implicit_solve(SeriesMap(std::move(eqs)), unknowns);
}

Series sigma_conjugate(const Series& f, const VariableSplit& split) {
    return f.sigma(split);
}

// Determinant of a small matrix of Series by Laplace expansion; the
// truncation order of the result is tracked by Series arithmetic.
static Series series_det(const std::vector<std::vector<Series>>& M,
                         const std::vector<int>& rows, const std::vector<int>& cols);

Series series_det(const std::vector<std::vector<Series>>& entries) {
    std::vector<int> idx(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) idx[i] = static_cast<int>(i);
    return series_det(entries, idx, idx);
}

static Series series_det(const std::vector<std::vector<Series>>& M,
                         const std::vector<int>& rows, const std::vector<int>& cols) {
    const std::size_t r = rows.size();
    if (r == 1) return M[rows[0]][cols[0]];
    Series acc;
    bool first = true;
    std::vector<int> sub(cols.begin() + 1, cols.end());
    for (std::size_t k = 0; k < r; ++k) {
        std::vector<int> subrows;
        for (std::size_t i = 0; i < r; ++i)
            if (i != k) subrows.push_back(rows[i]);
        Series term = M[rows[k]][cols[0]] * series_det(M, subrows, sub);
        if (k % 2) term = -term;
        if (first) {
            acc = term;
            first = false;
        } else {
            acc += term;
        }
    }
    return acc;
}

RankReport generic_rank(const SeriesMap& F, unsigned seed) {
    const int nv = F.nvars();
    const int nc = F.size();
    RankReport rep;
    if (nv == 0 || nc == 0 || F.order() < 1) return rep;

    std::vector<std::vector<Series>> J(nc, std::vector<Series>(nv));
    for (int i = 0; i < nc; ++i)
        for (int j = 0; j < nv; ++j) J[i][j] = F[i].derivative(j);
    rep.order = F.order() - 1;

    const int rmax = std::min(nc, nv);
    const bool small = static_cast<long>(nc) * nv <= 25;

    auto try_minors = [&](auto&& entry) {
        // enumerate r x r minors, largest r first, first nonzero wins
        for (int r = rmax; r >= 1; --r) {
            std::vector<int> rows(r), cols(r);
            std::vector<int> rsel(r), csel(r);
            for (int i = 0; i < r; ++i) rsel[i] = i;
            bool more_rows = true;
            while (more_rows) {
                std::vector<int> rr(rsel.begin(), rsel.end());
                for (int i = 0; i < r; ++i) csel[i] = i;
                bool more_cols = true;
                while (more_cols) {
                    std::vector<int> cc(csel.begin(), csel.end());
                    if (!entry(rr, cc).is_zero()) return r;
                    // next column combination
                    int i = r - 1;
                    while (i >= 0 && csel[i] == nv - r + i) --i;
                    if (i < 0) more_cols = false;
                    else {
                        ++csel[i];
                        for (int k = i + 1; k < r; ++k) csel[k] = csel[k - 1] + 1;
                    }
                }
                int i = r - 1;
                while (i >= 0 && rsel[i] == nc - r + i) --i;
                if (i < 0) more_rows = false;
                else {
                    ++rsel[i];
                    for (int k = i + 1; k < r; ++k) rsel[k] = rsel[k - 1] + 1;
                }
            }
        }
        return 0;
    };

    if (small) {
        rep.route = "minors";
        rep.rank = try_minors([&](const std::vector<int>& rr, const std::vector<int>& cc) {
            return series_det(J, rr, cc);
        });
        return rep;
    }

    // Evaluate the Jacobian along random polynomial curves x_i = c_i s + e_i s^2
    // and take the best certified rank over a few draws.
    rep.route = "curve";
    std::mt19937_64 rng(seed * 2654435761u + 12345u);
    std::uniform_int_distribution<int> pick(-5, 5);
    int best = 0;
    for (int trial = 0; trial < 4 && best < rmax; ++trial) {
        std::vector<Series> curve(nv);
        for (int v = 0; v < nv; ++v) {
            Series c(1, F.order());
            c.set_coeff(Mono::unit(1, 0), Coeff(pick(rng)));
            c.add_to_coeff(Mono::unit(1, 0, 2), Coeff(pick(rng)));
            curve[v] = c;
        }
        std::vector<std::vector<Series>> Jc(nc, std::vector<Series>(nv));
        for (int i = 0; i < nc; ++i)
            for (int j = 0; j < nv; ++j) Jc[i][j] = J[i][j].subst(curve);
        int r = try_minors([&](const std::vector<int>& rr, const std::vector<int>& cc) {
            return series_det(Jc, rr, cc);
        });
        best = std::max(best, r);
    }
    rep.rank = best;
    return rep;
}

} // namespace crforge
