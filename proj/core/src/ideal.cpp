#include "crforge/ideal.hpp"
#include "crforge/linalg.hpp"

#include <map>

namespace crforge {

namespace {

struct MonoIndex {
    std::vector<Mono> monos;
    std::map<Mono, int> pos;

    MonoIndex(std::size_t nvars, int maxdeg) : monos(monos_upto(nvars, maxdeg)) {
        for (std::size_t i = 0; i < monos.size(); ++i) pos[monos[i]] = static_cast<int>(i);
    }
    int size() const { return static_cast<int>(monos.size()); }
};

} // namespace

MembershipResult ideal_membership(const Series& f, const std::vector<Series>& gens, int k) {
    MembershipResult res;
    int order = std::min(f.order(), k);
    for (const auto& g : gens) order = std::min(order, g.order());
    res.order = order;
    const int nv = f.nvars();
    for (const auto& g : gens)
        if (g.nvars() != nv)
            throw std::invalid_argument("ideal_membership: generators share the ring of f");

    MonoIndex rows(nv, order);

    // Columns: x^beta * g_i truncated; skip multipliers that cannot reach
    // degrees <= order.
    struct Col { int gen; Mono beta; };
    std::vector<Col> cols;
    std::vector<std::vector<std::pair<int, Coeff>>> colvals;
    for (std::size_t i = 0; i < gens.size(); ++i) {
        int val = gens[i].valuation();
        if (val > order && !gens[i].is_zero()) continue;
        if (gens[i].is_zero()) continue;
        for (const auto& beta : monos_upto(nv, static_cast<std::uint32_t>(std::max(0, order - val)))) {
            std::vector<std::pair<int, Coeff>> col;
            for (const auto& [m, c] : gens[i].terms()) {
                Mono prod = m + beta;
                if (static_cast<int>(prod.deg()) > order) continue;
                col.emplace_back(rows.pos[prod], c);
            }
            if (col.empty()) continue;
            cols.push_back({static_cast<int>(i), beta});
            colvals.push_back(std::move(col));
        }
    }

    auto solvable_upto = [&](int maxdeg, std::vector<Coeff>* sol) {
        std::vector<int> rowsel;
        for (int r = 0; r < rows.size(); ++r)
            if (static_cast<int>(rows.monos[r].deg()) <= maxdeg) rowsel.push_back(r);
        Matrix A(static_cast<int>(rowsel.size()), static_cast<int>(cols.size()));
        std::vector<Coeff> b(rowsel.size());
        std::map<int, int> rpos;
        for (std::size_t i = 0; i < rowsel.size(); ++i) rpos[rowsel[i]] = static_cast<int>(i);
        for (std::size_t c = 0; c < colvals.size(); ++c)
            for (const auto& [r, v] : colvals[c]) {
                auto it = rpos.find(r);
                if (it != rpos.end()) A.at(it->second, static_cast<int>(c)) = v;
            }
        for (std::size_t i = 0; i < rowsel.size(); ++i)
            b[i] = f.coeff(rows.monos[rowsel[i]]);
        auto x = solve(A, b);
        if (x && sol) *sol = *x;
        return x.has_value();
    };

    std::vector<Coeff> sol;
    if (solvable_upto(order, &sol)) {
        res.member = true;
        res.witness.assign(gens.size(), Series(nv, order));
        for (std::size_t c = 0; c < cols.size(); ++c)
            if (!sol[c].is_zero())
                res.witness[cols[c].gen].add_to_coeff(cols[c].beta, sol[c]);
        return res;
    }
    res.member = false;
    for (int d = 0; d <= order; ++d) {
        if (!solvable_upto(d, nullptr)) {
            res.obstruction_degree = d;
            break;
        }
    }
    return res;
}

QuotientBasis quotient_basis(const std::vector<Series>& gens, int order) {
    QuotientBasis out;
    out.order = order;
    if (gens.empty()) throw std::invalid_argument("quotient_basis: no generators");
    const int nv = gens[0].nvars();
    MonoIndex cols(nv, order);

    // Rows span (gens)+m^{order+1} restricted to degrees <= order.
    std::vector<std::vector<Coeff>> rows;
    for (const auto& g : gens) {
        if (g.is_zero()) continue;
        int val = g.valuation();
        for (const auto& beta : monos_upto(nv, static_cast<std::uint32_t>(std::max(0, order - val)))) {
            std::vector<Coeff> row(cols.size(), Coeff::zero());
            bool nonzero = false;
            for (const auto& [m, c] : g.terms()) {
                Mono prod = m + beta;
                if (static_cast<int>(prod.deg()) > order) continue;
                row[cols.pos[prod]] = c;
                nonzero = true;
            }
            if (nonzero) rows.push_back(std::move(row));
        }
    }
    Matrix M(static_cast<int>(rows.size()), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < cols.size(); ++j) M.at(static_cast<int>(i), j) = rows[i][j];
    std::vector<int> piv = rref(M);
    std::vector<char> is_piv(cols.size(), 0);
    for (int c : piv) is_piv[c] = 1;
    for (int c = 0; c < cols.size(); ++c)
        if (!is_piv[c]) out.std_monos.push_back(cols.monos[c]);

    // Finite iff some whole degree k <= order has no standard monomials;
    // then m^k lies in (gens)+m^{k+1} and Krull intersection promotes the
    // truncated statement to m^k within (gens).
    std::vector<int> count_by_deg(order + 1, 0);
    for (const auto& m : out.std_monos) count_by_deg[m.deg()]++;
    int k = -1;
    for (int d = 1; d <= order; ++d) {
        if (count_by_deg[d] == 0) {
            bool clean_above = true;
            for (int e = d; e <= order; ++e)
                if (count_by_deg[e] != 0) clean_above = false;
            if (clean_above) { k = d; break; }
        }
    }
    if (k >= 0) {
        out.finite = true;
        out.stabilization_degree = k;
        out.exact = k < order;
        out.multiplicity = static_cast<int>(out.std_monos.size());
    } else {
        for (const auto& m : out.std_monos)
            if (static_cast<int>(m.deg()) == order) out.surviving.push_back(m);
    }
    return out;
}

} // namespace crforge
