#ifndef CRFORGE_REFLECTION_HPP
#define CRFORGE_REFLECTION_HPP

#include "crforge/jets.hpp"
#include "crforge/manifold.hpp"

#include <optional>

namespace crforge {

/// Formal map germ H: (C^N,0) -> (C^{N'},0) between manifold ambients.
struct MapGerm {
    SeriesMap H; // N' components in the N-variable Z-ring
    int srcN = 0;
    int tgtN = 0;

    MapGerm() = default;
    MapGerm(SeriesMap H_, int srcN_, int tgtN_);

    /// (H(Z), Hbar(zeta)) in the 2N-variable complexified source ring.
    SeriesMap complexification() const;
};

struct SendsIntoReport {
    bool holds = false;
    int order = 0;                 // order at which the vanishing is certified
    int obstruction_degree = -1;   // first failing degree otherwise
    Mono obstruction_mono;
    Coeff witness;
};

/// Checks rho'(H(Z), Hbar(gammabar(Z,t))) = 0 mod degree > order: the
/// parametrized form of "the complexification of H sends M into M'".
SendsIntoReport sends_into(const GenericManifold& M, const GenericManifold& Mp,
                           const MapGerm& H);

struct ReflectionIdeal {
    SeriesMap gens; // d' components in the (Z, zeta') ring: [Z: N][zeta': N']
    int order = 0;
    std::string provenance;
    int max_term_degree = -1; // informational: generators polynomial up to here
    bool degree_stabilized = false;
};

/// Generators tau' - Qbar'(chi', H(Z)) of the reflection ideal I^H.
ReflectionIdeal reflection_generators(const GenericManifold& Mp, const MapGerm& H);

struct IdealEqualReport {
    bool equal = false;
    int order = 0;
    int first_difference_degree = -1;
};

/// I^H = I^{H0} iff Qbar'(chi', H(Z)) = Qbar'(chi', H0(Z)) (Prop. on the
/// normal-form generators); compared coefficient-wise to the common order.
IdealEqualReport ideal_equal(const GenericManifold& Mp, const MapGerm& H, const MapGerm& H0);

struct TotalDegeneracyReport {
    bool certified = false;
    int rank = 0;
    int required = 0; // n' = dim S_0(M')
    RankReport rank_report;
};

/// Not-totally-degenerate check: generic rank of H o v^1 against n'.
TotalDegeneracyReport not_totally_degenerate(const GenericManifold& M,
                                             const GenericManifold& Mp, const MapGerm& H);

struct FiniteMapReport {
    bool finite = false;
    int multiplicity = -1;
    bool exact = false;          // stabilization strictly below the order
    int stabilization_degree = -1;
    int order = 0;
    std::vector<Mono> std_monos;
    std::vector<Mono> surviving; // evidence monomials when not finite
};

FiniteMapReport finite_map_check(const MapGerm& H, int order);

// ---- the phi / psi / Theta constraint systems -------------------------

enum class SystemKind { Phi, Psi, Theta };

/// One of the jet-space constraint systems attached to (M, M', H):
///   phi:   rho'^(l)(Lambda^1, jets of Hbar(gammabar(Z,t)))
///   psi:   phi with (Z, t) -> (v^{j+1}(t^[j+1]), t^{j+2})
///   theta: d^eps_{t^{j+2}} psi, then t^{j+2} -> xi^j(t^[j+1])
/// Entries are kept for both generator choices (plain rho' and tilde).
/// Coefficient rings: [Lambda^1_0 (N')] then the base variables of the kind.
struct ConstraintSystem {
    SystemKind kind = SystemKind::Phi;
    int l = 0, j = 0, epsilon_bound = 0;
    int N = 0, Np = 0, dp = 0, n = 0;
    std::vector<Mono> nu_idx; // |nu| <= l

    // entries[nu position][component < d']
    std::vector<std::vector<JetPolynomial>> plain;
    std::vector<std::vector<JetPolynomial>> tilde;
    // theta only: (nu, eps) -> d' polynomials, both variants
    std::map<std::pair<Mono, Mono>, std::vector<JetPolynomial>> theta_plain;
    std::map<std::pair<Mono, Mono>, std::vector<JetPolynomial>> theta_tilde;

    // coefficient provenance, independent of H by construction
    std::map<std::pair<Mono, Mono>, Series> c_table; // c_{beta delta}(Z, t)
    std::map<std::pair<Mono, Mono>, Series> u_table; // u^j_{beta delta}(t^[j+2])
    // omega^j_{nu eps alpha delta}(hat Lambda^1, t^[j+1])
    std::map<std::tuple<Mono, Mono, Mono, Mono>, JetPolynomial> omega_table;

    int coeff_nvars() const;
};

ConstraintSystem build_system(const GenericManifold& M, const GenericManifold& Mp,
                              const MapGerm& H, SystemKind kind, int l, int j = 0,
                              int epsilon_bound = 0, bool with_omega = false);

struct SystemCheckReport {
    bool plain_vanishes = false;
    bool tilde_vanishes = false;
    int certified_order = 0;
    Mono first_failure_nu;
};

/// Jet of H along Z (phi) or along v^{j+1} (psi/theta), as a JetValue
/// ready for check_jet_solution.
JetValue canonical_jet_solution(const GenericManifold& M, const MapGerm& H,
                                const ConstraintSystem& sys);

/// Substitutes Lambda^1 = S into every entry and asserts exact vanishing
/// at the carried order. S lives in the Z-ring for phi systems and in the
/// t^[j+1]-ring for psi/theta systems.
SystemCheckReport check_jet_solution(const ConstraintSystem& sys, const JetValue& S);

struct KeyIdentityReport {
    bool precondition_ok = false; // S solves the psi system
    bool key_holds = false;       // sum_{mu} R_{nu mu}(hat S) rho'_{Z'^mu}(S_0) matches
    bool reformulation_holds = false; // derivative agreement with H0 along v^{j+1}
    bool reformulation_checked = false;
    int certified_order = 0;
    Mono first_failure_nu;
};

/// The key identity of the reflection argument: for a solution S of the
/// psi system of (H, l, j),
///   ^H rho'_{Z^nu}(v^{j+1}, zeta') = sum_{|mu|<=|nu|} R_{nu mu}(hat S)
///                                     rho'_{Z'^mu}(S_0, zeta'),
/// and, when S is the jet of H0 along v^{j+1}, equivalently
///   ^H rho'_{Z^nu}(v^{j+1}, zeta') = ^{H0} rho'_{Z^nu}(v^{j+1}, zeta').
KeyIdentityReport key_identity_check(const GenericManifold& M, const GenericManifold& Mp,
                                     const MapGerm& H, const JetValue& S, int l, int j,
                                     const MapGerm* H0 = nullptr);

struct NondegCertificate {
    bool found = false;
    std::vector<std::pair<Mono, int>> indices; // (alpha^l, j_l)
    Series det;       // det(dq_{j_l,alpha^l}/dZ'_m (H0(Z))), in the source Z-ring
    int rank_H0 = 0;
    int bound = 0;
    std::string note;
};

/// Pullback of the holomorphic-nondegeneracy determinant through H0; the
/// data finite determination of the map from its reflection ideal needs.
NondegCertificate nondegeneracy_certificate(const GenericManifold& Mp, const MapGerm& H0,
                                            int alpha_degree_bound);

// ---- the determination experiment -------------------------------------

/// Derivative agreement ^H rho'_{Z^delta}(v^j, zeta') = ^{H0}... for all
/// |delta| <= upto; returns the largest such order in [0, upto], or -1
/// when even delta = 0 fails.
int reflection_jet_agreement(const GenericManifold& M, const GenericManifold& Mp,
                             const MapGerm& H, const MapGerm& H0, int level_j, int upto);

struct TrialOutcome {
    int trial = 0;
    bool constructed = false; // projected sample rather than raw perturbation
    bool survivor = false;
    bool ideal_equal = false;
    std::vector<std::pair<int, int>> level_orders; // (hyp order at j, concl order at j+1)
    bool counterexample = false;
};

struct DeterminationReport {
    int trials = 0;
    int survivors = 0;
    int passes = 0;
    int counterexamples = 0;
    int K = 0;
    int margin_order = 0; // levelwise conclusion margin
    int working_order = 0;
    unsigned seed = 0;
    std::vector<TrialOutcome> outcomes;
    bool vacuous = false;
};

/// Random polynomial perturbations of H0 agreeing with H0 to order K;
/// survivors of sends_into are checked for reflection-ideal equality and
/// the level-raising implication at the report margin.
DeterminationReport determination_experiment(const GenericManifold& M,
                                             const GenericManifold& Mp, const MapGerm& H0,
                                             int K, int trials, int perturbation_degree,
                                             unsigned seed);

/// Degree-by-degree projection of a random perturbation of H0 onto the
/// truncated "sends M into M'" variety: each residual degree is affine in
/// the coefficients whose first effect lands there, and gets solved in one
/// sweep (deterministic given the seed). Obstructed random jets fall back
/// to pure-kernel directions and ultimately to H0 itself; nullopt only
/// when H0 does not send M into M'.
std::optional<MapGerm> sample_self_map(const GenericManifold& M, const GenericManifold& Mp,
                                       const MapGerm& H0, int K, int perturbation_degree,
                                       unsigned seed);

} // namespace crforge

#endif
