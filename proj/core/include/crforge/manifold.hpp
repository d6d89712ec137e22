#ifndef CRFORGE_MANIFOLD_HPP
#define CRFORGE_MANIFOLD_HPP

#include "crforge/ideal.hpp"
#include "crforge/series.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace crforge {

/// Raised when a defining system fails the formal generic manifold checks.
struct DefiningError : std::runtime_error {
    enum class Kind { NotVanishing, DependentDifferentials, NotGeneric, NotAdapted, NotReal };
    Kind kind;
    int generator = -1;  // offending generator for NotReal
    int degree = -1;     // first obstructing degree for NotReal

    DefiningError(Kind k, const std::string& msg, int gen = -1, int deg = -1)
        : std::runtime_error(msg), kind(k), generator(gen), degree(deg) {}
};

/// Formal generic manifold in normal form, living in the complexified ring
/// C[[Z, zeta]] with Z = (z, w), zeta = (chi, tau). Variable layout:
///   z: [0, n)   w: [n, N)   chi: [N, N+n)   tau: [N+n, 2N)
/// The ideal is (w - Q(z, zeta)) = (tau - Qbar(chi, Z)).
class GenericManifold {
public:
    /// Build from d defining series in the 2N-variable complexified ring.
    /// Checks: vanishing at 0, independent differentials, genericity
    /// (rank of the d x N block over Z), solvability for the w-block, and
    /// reality of the ideal.
    static GenericManifold from_defining(const SeriesMap& rho, int N, int d, int order,
                                         std::string name = "M");

    int N() const { return N_; }
    int d() const { return d_; }
    int n() const { return n_; }
    int order() const { return order_; }
    const std::string& name() const { return name_; }

    int zvar(int i) const { return i; }
    int wvar(int j) const { return n_ + j; }
    int chivar(int i) const { return N_ + i; }
    int tauvar(int j) const { return N_ + n_ + j; }
    int ring_nvars() const { return 2 * N_; }

    /// Q and Qbar as maps in the full 2N ring (Q depends on (z, chi, tau),
    /// Qbar on (chi, z, w)).
    const SeriesMap& Q() const { return Q_; }
    const SeriesMap& Qbar() const { return Qbar_; }

    /// Generators tau - Qbar(chi, Z) and w - Q(z, zeta).
    SeriesMap rho() const;
    SeriesMap rho_tilde() const;

    VariableSplit pairing() const { return VariableSplit::pairing(N_); }
    std::vector<std::string> var_names() const;

    /// Residual of the reality identity Q(z, chi, Qbar(chi, z, w)) - w.
    SeriesMap reality_residual() const;

    /// Substitute the graph w = Q into f (membership test for the
    /// manifold ideal at truncation: the result vanishes iff f belongs to
    /// the ideal mod degrees beyond the order).
    Series graph_substitute(const Series& f) const;

    /// Coefficients q_alpha(Z) of Qbar(chi, Z) = sum q_alpha(Z) chi^alpha,
    /// for |alpha| <= chi_bound. Each value has d components in the
    /// N-variable Z-ring.
    std::map<Mono, std::vector<Series>> qbar_coefficients(int chi_bound) const;

    /// The same manifold certified only to a lower order.
    GenericManifold truncated(int k) const;

private:
    GenericManifold() = default;

    std::string name_;
    int N_ = 0, d_ = 0, n_ = 0, order_ = 0;
    SeriesMap Q_, Qbar_;
};

/// gamma = (mu, nu) in the ring (zeta, t): zeta on [0, N), t on [N, N+n).
class SegreMapping {
public:
    static SegreMapping standard(const GenericManifold& M);
    /// General gamma with a prescribed mu(zeta, t) (n components in the
    /// (zeta, t) ring, rank d mu/d t(0) = n).
    static SegreMapping with_mu(const GenericManifold& M, const SeriesMap& mu);

    const SeriesMap& mu() const { return mu_; }
    const SeriesMap& nu() const { return nu_; }
    const SeriesMap& gamma() const { return gamma_; }
    bool is_standard() const { return standard_; }

    int N() const { return N_; }
    int n() const { return n_; }

    /// gamma-bar as a map in the (Z, t) ring (Z on [0, N), t on [N, N+n)).
    SeriesMap gamma_bar() const;

    /// Residuals h(gamma(zeta, t), zeta) for both generator choices.
    std::vector<Series> generator_residuals(const GenericManifold& M) const;

private:
    SegreMapping() = default;
    int N_ = 0, n_ = 0, d_ = 0, order_ = 0;
    bool standard_ = true;
    SeriesMap mu_, nu_, gamma_;
};

/// Iterated Segre mappings v^0 = 0, v^j(t^[j]) = gamma(vbar^{j-1}, t^j)
/// together with the retractions xi^j of Lemma "v^{j+2}(t^[j+1], xi^j) = v^j".
class SegreTower {
public:
    SegreTower(const GenericManifold& M, const SegreMapping& gamma, int levels);

    int levels() const { return static_cast<int>(v_.size()) - 1; }
    /// v^j: N components in the n*j-variable ring (t^1, ..., t^j).
    const SeriesMap& v(int j) const { return v_.at(j); }
    /// xi^j: n components in n*(j+1) variables; built lazily up to levels-2.
    const SeriesMap& xi(int j) const { return xi_.at(j); }
    int xi_count() const { return static_cast<int>(xi_.size()); }

    /// Residuals h(v^j, vbar^{j+1}) for every generator h of I(M);
    /// requires j+1 <= levels.
    std::vector<Series> iteration_residuals(int j) const;

    /// Residual v^{j+2}(t^[j+1], xi^j) - v^j (lifted to n*(j+1) vars).
    std::vector<Series> retraction_residuals(int j) const;

    const GenericManifold& manifold() const { return *M_; }
    const SegreMapping& segre() const { return gamma_; }

private:
    const GenericManifold* M_;
    SegreMapping gamma_;
    std::vector<SeriesMap> v_;
    std::vector<SeriesMap> xi_;
};

/// Vector field in the 2N-variable complexified ring.
struct VectorField {
    SeriesMap coeffs; // one coefficient series per coordinate

    Series apply(const Series& f) const;
    std::vector<Coeff> at0() const;
};

VectorField bracket(const VectorField& a, const VectorField& b);

struct CrBasis {
    std::vector<VectorField> basis_10; // tangent (1,0) fields
    std::vector<VectorField> basis_01; // tangent (0,1) fields
};

/// n fields of each type spanning the CR module of M, tangency verified
/// against both generator families at truncation.
CrBasis cr_vector_fields(const GenericManifold& M);

enum class Verdict { Affirmative, Negative, Inconclusive };

struct FiniteTypeReport {
    Verdict verdict = Verdict::Inconclusive;
    Verdict lie_verdict = Verdict::Inconclusive;
    Verdict segre_verdict = Verdict::Inconclusive;
    int target_dim = 0;      // 2N - d
    int lie_dim = -1;        // dim of the evaluated bracket span
    int depth_used = -1;
    int segre_j0 = -1;       // smallest j with Rk v^j = N
    int rank_at_j0 = -1;
    int certified_order = 0;
    bool routes_agree = true;
    std::string note;
};

enum class FiniteTypeRoute { Lie, Segre, Both };

/// depth_bound < 0 selects the default 2N-d+1; j_bound < 0 selects d+1.
FiniteTypeReport finite_type_check(const GenericManifold& M,
                                   FiniteTypeRoute route = FiniteTypeRoute::Both,
                                   int depth_bound = -1, int j_bound = -1);

struct HoloNondegReport {
    Verdict verdict = Verdict::Inconclusive;
    // nondegeneracy certificate: N rows (alpha^l, j_l) with det != 0
    std::vector<std::pair<Mono, int>> cert_indices;
    Series cert_det;
    // degeneracy certificate: holomorphic field coefficients a(Z), tangent
    // to the ideal up to the certified order
    std::vector<Series> degeneracy_field;
    int alpha_bound = 0;
    int certified_order = 0;
    std::string note;
};

HoloNondegReport holo_nondegeneracy_check(const GenericManifold& M, int alpha_degree_bound);

} // namespace crforge

#endif
