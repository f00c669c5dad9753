#include "mdt/mpoly.hpp"

#include <sstream>

namespace mdt::quiver {

MPoly MPoly::constant(unsigned nvars, const Integer& c) {
    MPoly p(nvars);
    p.add_term(Exponents(nvars, 0), c);
    return p;
}

MPoly MPoly::var(unsigned nvars, unsigned i) {
    if (i >= nvars) throw InvalidParameter("variable index out of range");
    MPoly p(nvars);
    Exponents e(nvars, 0);
    e[i] = 1;
    p.add_term(e, 1);
    return p;
}

void MPoly::check(const MPoly& o) const {
    if (nvars_ != o.nvars_) throw InvalidParameter("polynomials in different numbers of variables");
}

void MPoly::add_term(const Exponents& e, const Integer& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

unsigned MPoly::total_degree() const {
    unsigned d = 0;
    for (const auto& [e, c] : terms_) {
        unsigned s = 0;
        for (auto x : e) s += x;
        d = std::max(d, s);
    }
    return d;
}

unsigned MPoly::degree_in(unsigned v) const {
    unsigned d = 0;
    for (const auto& [e, c] : terms_) d = std::max<unsigned>(d, e[v]);
    return d;
}

MPoly& MPoly::operator+=(const MPoly& o) {
    check(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

MPoly MPoly::operator+(const MPoly& o) const {
    MPoly r = *this;
    r += o;
    return r;
}

MPoly MPoly::operator-(const MPoly& o) const {
    return *this + o * Integer(-1);
}

MPoly MPoly::operator*(const MPoly& o) const {
    check(o);
    MPoly r(nvars_);
    Exponents e(nvars_);
    for (const auto& [ea, ca] : terms_)
        for (const auto& [eb, cb] : o.terms_) {
            for (unsigned i = 0; i < nvars_; ++i) e[i] = static_cast<std::uint16_t>(ea[i] + eb[i]);
            r.add_term(e, ca * cb);
        }
    return r;
}

MPoly MPoly::operator*(const Integer& c) const {
    MPoly r(nvars_);
    if (c == 0) return r;
    for (const auto& [e, x] : terms_) r.terms_.emplace(e, x * c);
    return r;
}

std::string MPoly::to_string(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        first = false;
        const Integer a = abs(c);
        bool any = false;
        for (unsigned i = 0; i < nvars_; ++i) any |= e[i] > 0;
        if (a != 1 || !any) os << a.get_str();
        bool need_star = a != 1;
        for (unsigned i = 0; i < nvars_; ++i) {
            if (!e[i]) continue;
            if (need_star) os << "*";
            os << (i < names.size() ? names[i] : "v" + std::to_string(i));
            if (e[i] > 1) os << "^" << e[i];
            need_star = true;
        }
    }
    return os.str();
}

} // namespace mdt::quiver
