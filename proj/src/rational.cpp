#include "percbridge/rational.hpp"

#include <cctype>

namespace percbridge {

Rational pow(const Rational& base, long exp) {
    if (exp == 0) return Rational(1);
    Rational b = exp > 0 ? base : Rational(1) / base;
    unsigned long e = static_cast<unsigned long>(exp > 0 ? exp : -exp);
    Rational acc(1);
    while (e > 0) {
        if (e & 1UL) acc *= b;
        b *= b;
        e >>= 1UL;
    }
    return acc;
}

std::optional<Rational> parse_rational(const std::string& text) {
    if (text.empty()) return std::nullopt;
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        try {
            Rational q(text);
            q.canonicalize();
            if (q.get_den() == 0) return std::nullopt;
            return q;
        } catch (const std::invalid_argument&) {
            return std::nullopt;
        }
    }
    auto dot = text.find('.');
    std::string digits = text;
    long shift = 0;
    if (dot != std::string::npos) {
        shift = static_cast<long>(text.size() - dot - 1);
        digits = text.substr(0, dot) + text.substr(dot + 1);
    }
    if (digits.empty() || digits == "-" || digits == "+") return std::nullopt;
    for (size_t i = 0; i < digits.size(); ++i) {
        char c = digits[i];
        if (i == 0 && (c == '-' || c == '+')) continue;
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    }
    try {
        Rational q(mpz_class(digits), mpz_class(1));
        for (long i = 0; i < shift; ++i) q /= 10;
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

std::string to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

} // namespace percbridge
