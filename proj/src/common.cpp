#include "pcd/common.hpp"

#include <cctype>
#include <cstdlib>

namespace pcd {

std::int64_t floor_of(const Rational& r) {
    std::int64_t q = r.numerator() / r.denominator();
    if (r.numerator() < 0 && q * r.denominator() != r.numerator()) --q;
    return q;
}

std::int64_t ceil_of(const Rational& r) { return -floor_of(-r); }

Rational parse_rational(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational");
    auto slash = s.find('/');
    if (slash != std::string::npos)
        return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(std::stoll(s));
    std::string whole = s.substr(0, dot), frac = s.substr(dot + 1);
    if (frac.size() > 12) throw std::invalid_argument("too many decimals in " + s);
    for (char c : frac)
        if (!std::isdigit(static_cast<unsigned char>(c))) throw std::invalid_argument("bad rational " + s);
    std::int64_t den = 1;
    for (size_t i = 0; i < frac.size(); ++i) den *= 10;
    bool neg = !whole.empty() && whole[0] == '-';
    std::int64_t w = (whole.empty() || whole == "-") ? 0 : std::llabs(std::stoll(whole));
    std::int64_t f = frac.empty() ? 0 : std::stoll(frac);
    Rational r(w * den + f, den);
    return neg ? -r : r;
}

std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do x = eng_();
    while (x >= limit);
    return x % n;
}

bool Rng::bernoulli(const Rational& p) {
    if (p <= 0) return false;
    if (p >= 1) return true;
    auto den = static_cast<std::uint64_t>(p.denominator());
    return below(den) < static_cast<std::uint64_t>(p.numerator());
}

}  // namespace pcd
