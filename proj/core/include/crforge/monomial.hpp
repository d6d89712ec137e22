#ifndef CRFORGE_MONOMIAL_HPP
#define CRFORGE_MONOMIAL_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace crforge {

/// Exponent vector of a monomial; doubles as the multi-indices nu, alpha,
/// beta, ... of jets. Total degree is cached.
class Mono {
public:
    Mono() : deg_(0) {}
    explicit Mono(std::size_t nvars) : e_(nvars, 0), deg_(0) {}
    explicit Mono(std::vector<std::uint32_t> e) : e_(std::move(e)) {
        deg_ = std::accumulate(e_.begin(), e_.end(), 0u);
    }

    static Mono unit(std::size_t nvars, std::size_t var, std::uint32_t k = 1) {
        Mono m(nvars);
        m.set(var, k);
        return m;
    }

    std::size_t nvars() const { return e_.size(); }
    std::uint32_t deg() const { return deg_; }
    std::uint32_t operator[](std::size_t i) const { return e_[i]; }
    const std::vector<std::uint32_t>& exps() const { return e_; }

    void set(std::size_t i, std::uint32_t v) {
        deg_ += v - e_[i];
        e_[i] = v;
    }
    void bump(std::size_t i, std::int32_t dv) {
        e_[i] = static_cast<std::uint32_t>(static_cast<std::int32_t>(e_[i]) + dv);
        deg_ = static_cast<std::uint32_t>(static_cast<std::int32_t>(deg_) + dv);
    }

    bool is_zero() const { return deg_ == 0; }

    Mono operator+(const Mono& o) const {
        Mono r(*this);
        for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] += o.e_[i];
        r.deg_ = deg_ + o.deg_;
        return r;
    }
    /// Componentwise difference; caller guarantees divisibility.
    Mono operator-(const Mono& o) const {
        Mono r(*this);
        for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] -= o.e_[i];
        r.deg_ = deg_ - o.deg_;
        return r;
    }
    /// Componentwise partial order alpha <= nu.
    bool divides(const Mono& o) const {
        for (std::size_t i = 0; i < e_.size(); ++i)
            if (e_[i] > o.e_[i]) return false;
        return true;
    }

    friend bool operator==(const Mono& a, const Mono& b) { return a.e_ == b.e_; }
    friend bool operator!=(const Mono& a, const Mono& b) { return !(a == b); }

    /// Graded lexicographic order: by total degree, ties broken
    /// lexicographically on the exponent vector.
    friend bool operator<(const Mono& a, const Mono& b) {
        if (a.deg_ != b.deg_) return a.deg_ < b.deg_;
        return std::lexicographical_compare(a.e_.begin(), a.e_.end(),
                                            b.e_.begin(), b.e_.end());
    }

    std::string str(const std::vector<std::string>& names = {}) const;

private:
    std::vector<std::uint32_t> e_;
    std::uint32_t deg_;
};

/// All multi-indices with |m| <= maxdeg in nvars variables, graded-lex.
std::vector<Mono> monos_upto(std::size_t nvars, std::uint32_t maxdeg);
/// All multi-indices with |m| == deg, graded-lex.
std::vector<Mono> monos_of_degree(std::size_t nvars, std::uint32_t deg);

} // namespace crforge

#endif
