#ifndef CRFORGE_JETS_HPP
#define CRFORGE_JETS_HPP

#include "crforge/series.hpp"

#include <functional>
#include <map>
#include <vector>

namespace crforge {

/// Catalog of the hatted jet coordinates Lambda_{alpha,comp} for jets of
/// maps (C^k, 0) -> C^r at order l (1 <= |alpha| <= l). Variable ids are
/// canonical: graded-lex position of alpha times r plus comp, so separately
/// built polynomials compare equal.
struct JetShape {
    int k = 0, r = 0, l = 0;
    std::vector<Mono> hat;
    std::map<Mono, int> pos;

    JetShape() = default;
    JetShape(int k_, int r_, int l_);

    int nvars() const { return static_cast<int>(hat.size()) * r; }
    int var_id(const Mono& alpha, int comp) const { return pos.at(alpha) * r + comp; }
    std::pair<Mono, int> var_of(int id) const {
        return {hat[id / r], id % r};
    }
    friend bool operator==(const JetShape& a, const JetShape& b) {
        return a.k == b.k && a.r == b.r && a.l == b.l;
    }
};

/// Monomial in hatted jet coordinates: sorted (var id, exponent) pairs.
using JMono = std::vector<std::pair<int, int>>;
int jmono_degree(const JMono& m);
bool jmono_less(const JMono& a, const JMono& b); // graded, then lex
struct JMonoLess {
    bool operator()(const JMono& a, const JMono& b) const { return jmono_less(a, b); }
};

/// Polynomial in hatted jet coordinates with exact constant coefficients
/// (the universal polynomial format).
struct LamPoly {
    std::map<JMono, Coeff, JMonoLess> terms;

    bool is_zero() const { return terms.empty(); }
    bool is_one() const;
    void add(const JMono& m, const Coeff& c);
    /// Evaluate with hat_vals[id] substituted for each jet coordinate.
    Series eval(const std::vector<Series>& hat_vals, int nvars, int order) const;
    std::string str() const;
};

/// Universal chain-rule polynomial tables generated by differentiating a
/// placeholder composite (never hard-coded closed forms):
///   P[nu][(alpha, beta)]: coefficient of u_{y^alpha x^beta}(F(x), x) in
///     d^nu[u(F(x), x)],  F: (C^k,0) -> (C^r,0)
///   R[beta][mu]: coefficient of u_{y^mu}(F(x)) in d^beta[u(F(x))]
/// Both are polynomials in the hatted jet coordinates of F.
struct UniversalPolys {
    JetShape shape; // k = source dim, r = target dim
    std::map<Mono, std::map<std::pair<Mono, Mono>, LamPoly>> P;
    std::map<Mono, std::map<Mono, LamPoly>> R;

    const LamPoly* lookupP(const Mono& nu, const Mono& alpha, const Mono& beta) const;
    const LamPoly* lookupR(const Mono& beta, const Mono& mu) const;
};

/// Memoized per (k, r, l); thread-safe.
const UniversalPolys& universal_polynomials(int k, int r, int l);

/// The jet j^l of a map: raw partials d^nu F over the chosen base
/// variables, kept as Series in the original ring (parameters remain).
struct JetValue {
    int k = 0, r = 0, l = 0;
    std::vector<Mono> idx; // |nu| <= l, graded-lex
    std::vector<std::vector<Series>> entries;

    const std::vector<Series>& at(const Mono& nu) const;
    std::vector<Series>& at(const Mono& nu);
    /// Assignment table for JetPolynomial::evaluate, indexed by the hat
    /// variable ids of `shape`; entries may be lifted via var_map.
    std::vector<Series> hat_values(const JetShape& shape, int new_nvars = -1,
                                   const std::vector<int>& var_map = {}) const;
};

JetValue jet_of_map(const SeriesMap& F, int l, const std::vector<int>& base_vars);

/// Element of C[[coefficient ring]][hatted jet coordinates].
class JetPolynomial {
public:
    JetShape shape;
    int coeff_nvars = 0;
    std::map<JMono, Series, JMonoLess> terms;

    JetPolynomial() = default;
    JetPolynomial(JetShape sh, int coeff_nvars_) : shape(sh), coeff_nvars(coeff_nvars_) {}

    void add_term(const JMono& m, const Series& c);
    JetPolynomial& operator+=(const JetPolynomial& o);
    JetPolynomial scaled(const Series& s) const;
    bool is_zero() const;

    /// Full evaluation: substitute coeff_args for the coefficient-ring
    /// variables and hat_vals[id] for the jet coordinates; everything must
    /// live in one common target ring (coeff_args fix the origin).
    Series evaluate(const std::vector<Series>& coeff_args,
                    const std::vector<Series>& hat_vals) const;

    /// Substitute jet components comp >= comp_lo by concrete series (the
    /// Lambda^2-block of a paired jet): hat coordinates (alpha, comp) take
    /// hat_sub[id], coefficient variables cv >= cv_lo take cv_sub[cv-cv_lo],
    /// and coefficient variables < cv_lo become variables 0..cv_lo-1 of the
    /// new coefficient ring. Substituted values live in a ring of
    /// sub_nvars variables appended after the kept coefficient variables.
    JetPolynomial substitute_upper_block(int comp_lo, int cv_lo, int sub_nvars,
                                         const std::vector<Series>& hat_sub,
                                         const std::vector<Series>& cv_sub) const;

    /// Compose every coefficient with args (new ring of new_nvars vars).
    JetPolynomial with_coeffs(int new_nvars, const std::vector<Series>& args) const;

    /// d/d(coefficient variable var) applied to the coefficients only.
    JetPolynomial coeff_derivative(int var) const;

    /// Largest alpha-degree jet coordinate used; for the triangularity
    /// check "component nu references only Lambda_alpha with alpha <= nu".
    bool triangular_in(const Mono& nu) const;

    /// Flatten into a Series over (coefficient vars + jet vars).
    Series flatten(int order) const;

    static bool equal_mod(const JetPolynomial& a, const JetPolynomial& b, int cmp_order);
};

/// The prolongation phi^(l): for each |nu| <= l (and each component of
/// phi), the unique element of C[[Lambda_0]][hat Lambda] with
/// j^l(phi o F) = phi^(l)(j^l F). Returned in graded-lex order of nu,
/// one vector of d'=phi.size() polynomials per multi-index.
struct Prolongation {
    int base_dim = 0, l = 0;
    std::vector<Mono> idx;
    std::vector<std::vector<JetPolynomial>> comps; // [pos][component of phi]

    const std::vector<JetPolynomial>& at(const Mono& nu) const;
};

Prolongation prolong(const SeriesMap& phi, int l, int base_dim);

/// Evaluate a prolongation at a jet value (entries in any common ring),
/// returning the jet of phi o F as a JetValue in that ring.
JetValue evaluate_prolongation(const Prolongation& pr, const JetValue& jet);

/// Generators of the prolonged ideal I^(l): components of rho_j^(l).
std::vector<JetPolynomial> ideal_prolong(const SeriesMap& gens, int l, int base_dim);

} // namespace crforge

#endif
