#include "hsuff/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace hsuff {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    std::string_view body = text;
    bool negative = false;
    if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }
    const auto slash = body.find('/');
    const auto num_part = body.substr(0, slash);
    const auto den_part = slash == std::string_view::npos ? std::string_view("1") : body.substr(slash + 1);
    if (!all_digits(num_part) || !all_digits(den_part))
        throw std::invalid_argument("not a rational: '" + std::string(text) + "'");
    BigInt num{std::string(num_part)};
    BigInt den{std::string(den_part)};
    if (den == 0) throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
    if (negative) num = -num;
    return Rational(num, den);
}

std::string to_string(const Rational& value) {
    const auto num = boost::multiprecision::numerator(value);
    const auto den = boost::multiprecision::denominator(value);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

}  // namespace hsuff
