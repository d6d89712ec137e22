#ifndef CRFORGE_IDEAL_HPP
#define CRFORGE_IDEAL_HPP

#include "crforge/series.hpp"

#include <vector>

namespace crforge {

struct MembershipResult {
    bool member = false;
    std::vector<Series> witness;   // multipliers, one per generator
    int order = 0;                 // order at which membership was decided
    int obstruction_degree = -1;   // first degree that cannot be matched
};

/// Decide f in (gens) + m^{k+1} by linear algebra on coefficient vectors,
/// graded-lex throughout. On success the witness re-multiplication
/// reproduces f mod m^{k+1}; on failure the first obstructing degree is
/// reported.
MembershipResult ideal_membership(const Series& f, const std::vector<Series>& gens, int k);

struct QuotientBasis {
    std::vector<Mono> std_monos;     // monomial basis of the truncated quotient
    bool finite = false;             // m^k contained in (gens)+m^{order+1} for some k <= order
    int multiplicity = -1;           // standard monomial count when finite
    int stabilization_degree = -1;   // smallest such k
    bool exact = false;              // stabilization seen strictly below the order
    std::vector<Mono> surviving;     // top-degree survivors when not finite
    int order = 0;
};

/// Standard monomials of C[[x]]/((gens) + m^{order+1}).
QuotientBasis quotient_basis(const std::vector<Series>& gens, int order);

} // namespace crforge

#endif
