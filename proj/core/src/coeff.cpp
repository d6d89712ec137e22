#include "crforge/coeff.hpp"

#include <stdexcept>

namespace crforge {

Coeff Coeff::inv() const {
    if (is_zero()) throw std::domain_error("Coeff::inv: division by zero");
    mpq_class n = re_ * re_ + im_ * im_;
    return Coeff(re_ / n, mpq_class(-im_) / n);
}

std::string Coeff::str() const {
    std::string s = re_.get_str();
    if (im_ == 0) return s;
    if (im_ > 0)
        s += "+" + im_.get_str() + "*i";
    else
        s += "-" + mpq_class(-im_).get_str() + "*i";
    return s;
}

mpq_class parse_rational(const std::string& text) {
    mpq_class q;
    if (q.set_str(text, 10) != 0)
        throw std::invalid_argument("bad rational literal: " + text);
    q.canonicalize();
    return q;
}

} // namespace crforge
