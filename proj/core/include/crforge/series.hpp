#ifndef CRFORGE_SERIES_HPP
#define CRFORGE_SERIES_HPP

#include "crforge/coeff.hpp"
#include "crforge/monomial.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crforge {

class SeriesMap;

/// Named blocks of variable indices partitioning 0..nvars-1.
struct VariableSplit {
    std::vector<std::pair<std::string, std::vector<int>>> blocks;

    const std::vector<int>& block(const std::string& name) const;
    std::size_t nvars() const;
    void validate() const;

    /// Two equal-size blocks (Z, zeta), the shape sigma acts on.
    static VariableSplit pairing(int N);
};

/// Sparse truncated multivariate formal power series over Coeff.
///
/// Every value knows its truncation order: monomials of degree > order are
/// semantically unknown, not zero. Binary operations return min-order
/// results; every identity asserted downstream is stamped with the order at
/// which it was checked.
class Series {
public:
    Series() : nvars_(0), order_(0) {}
    Series(int nvars, int order) : nvars_(nvars), order_(order) {
        if (nvars < 0 || order < 0) throw std::invalid_argument("Series: bad shape");
    }

    static Series constant(int nvars, int order, const Coeff& c);
    static Series variable(int nvars, int order, int var);
    static Series monomial(int nvars, int order, const Mono& m, const Coeff& c);

    int nvars() const { return nvars_; }
    int order() const { return order_; }
    const std::map<Mono, Coeff>& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }

    Coeff coeff(const Mono& m) const;
    Coeff constant_term() const { return coeff(Mono(nvars_)); }
    void set_coeff(const Mono& m, const Coeff& c);
    void add_to_coeff(const Mono& m, const Coeff& c);

    bool is_zero() const { return terms_.empty(); }
    /// Degree of the lowest nonzero term, or order+1 when zero.
    int valuation() const;
    /// Largest degree carrying a nonzero term (-1 when zero).
    int max_term_degree() const;
    std::optional<std::pair<Mono, Coeff>> lowest_term() const;

    Series truncated(int new_order) const;

    Series operator-() const;
    Series& operator+=(const Series& o);
    Series& operator-=(const Series& o);
    friend Series operator+(Series a, const Series& b) { return a += b; }
    friend Series operator-(Series a, const Series& b) { return a -= b; }
    friend Series operator*(const Series& a, const Series& b);
    Series scaled(const Coeff& c) const;

    /// Multiplicative inverse of a unit (nonzero constant term).
    Series unit_inverse() const;

    /// Raw partial derivative (no 1/nu! normalization).
    Series derivative(int var) const;
    Series derivative(const Mono& times) const;

    /// Substitute args[i] for variable i. All args share a target ring and
    /// must fix the origin; result order = min(order, args order).
    Series subst(const std::vector<Series>& args) const;

    /// Conjugate all coefficients (the bar operation on series).
    Series conj_coeffs() const;

    /// sigma(f)(Z,zeta) = conj(f)(zeta,Z) for a two-block split.
    Series sigma(const VariableSplit& split) const;

    /// Relabel variables into a ring with new_nvars variables; var_map[i]
    /// gives the new index of old variable i.
    Series lift(int new_nvars, const std::vector<int>& var_map) const;

    /// Truncated exponential; requires zero constant term.
    Series exp() const;
    Series pow(std::uint32_t k) const;

    /// Coefficient-wise equality of all terms of degree <= cmp_order.
    static bool equal_mod(const Series& a, const Series& b, int cmp_order);
    friend bool operator==(const Series& a, const Series& b) {
        return a.nvars_ == b.nvars_ && a.order_ == b.order_ && a.terms_ == b.terms_;
    }

    /// Graded-lex list of "(exponents) coeff" pairs.
    std::string str(const std::vector<std::string>& names = {}) const;

private:
    void check_same_ring(const Series& o) const;

    int nvars_;
    int order_;
    std::map<Mono, Coeff> terms_;
};

/// Finite vector of Series over common variables: a formal map germ.
class SeriesMap {
public:
    SeriesMap() = default;
    explicit SeriesMap(std::vector<Series> comps);
    SeriesMap(int nvars, int order, int ncomps);

    static SeriesMap identity(int nvars, int order);

    int nvars() const;
    int order() const;
    int size() const { return static_cast<int>(comps_.size()); }
    Series& operator[](int i) { return comps_[i]; }
    const Series& operator[](int i) const { return comps_[i]; }
    const std::vector<Series>& components() const { return comps_; }
    auto begin() const { return comps_.begin(); }
    auto end() const { return comps_.end(); }

    bool fixes_origin() const;

    SeriesMap bar() const;
    SeriesMap truncated(int k) const;
    SeriesMap lift(int new_nvars, const std::vector<int>& var_map) const;
    SeriesMap subst(const std::vector<Series>& args) const;

    /// this after inner: (this o inner); inner must fix the origin.
    SeriesMap after(const SeriesMap& inner) const;

    std::vector<std::vector<Coeff>> jacobian_at0() const;

private:
    std::vector<Series> comps_;
};

// ---- powerseries module operations -----------------------------------

Series compose(const Series& f, const SeriesMap& g);

/// Solve rho(x, u(x)) = 0 for the y-block of variables listed in y_vars.
/// rho must vanish at 0 and have invertible d x d block d rho/d y(0).
/// The result lives in the ring of the remaining variables (in their
/// original relative order) and fixes the origin.
SeriesMap implicit_solve(const SeriesMap& rho, const std::vector<int>& y_vars);

/// Compositional inverse of a square map with invertible linear part.
SeriesMap invert_map(const SeriesMap& F);

Series sigma_conjugate(const Series& f, const VariableSplit& split);

/// Determinant of a square matrix of Series (Laplace expansion; fine for
/// the small coefficient blocks this library meets).
Series series_det(const std::vector<std::vector<Series>>& entries);

struct RankReport {
    int rank = 0;
    int order = 0;          // truncation order at which certified
    std::string route;      // "minors" or "curve"
};

/// Largest r with a nonzero r x r minor of the truncated Jacobian; a lower
/// bound certificate for the generic rank of the untruncated map.
RankReport generic_rank(const SeriesMap& F, unsigned seed = 0);

} // namespace crforge

#endif
