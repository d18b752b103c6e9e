#include "hida/scalar.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hida
{

namespace
{

std::string normalize_minus(std::string_view text)
{
    // U+2212 MINUS SIGN is E2 88 92 in UTF-8.
    std::string s(text);
    const std::string unicode_minus = "\xE2\x88\x92";
    for (auto pos = s.find(unicode_minus); pos != std::string::npos; pos = s.find(unicode_minus)) {
        s.replace(pos, unicode_minus.size(), "-");
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.erase(s.begin());
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.pop_back();
    }
    return s;
}

bool is_integer_text(std::string_view s)
{
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        s.remove_prefix(1);
    }
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (c < '0' || c > '9') {
            return false;
        }
    }
    return true;
}

} // namespace

Rational parse_rational(std::string_view text)
{
    const auto s = normalize_minus(text);
    const auto slash = s.find('/');
    const std::string num = s.substr(0, slash);
    const std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!is_integer_text(num) || !is_integer_text(den) || den.front() == '-' || den.front() == '+') {
        throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    }
    mpz_class n(num.front() == '+' ? num.substr(1) : num, 10);
    mpz_class d(den, 10);
    if (d == 0) {
        throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    }
    Rational q(n, d);
    q.canonicalize();
    return q;
}

std::string format_rational(const Rational &q)
{
    return q.get_str(10);
}

std::string_view to_string(ScalarMode mode)
{
    return mode == ScalarMode::exact ? "exact" : "float";
}

ScalarMode parse_scalar_mode(std::string_view text)
{
    if (text == "exact") {
        return ScalarMode::exact;
    }
    if (text == "float") {
        return ScalarMode::floating;
    }
    throw std::invalid_argument("unknown scalar mode '" + std::string(text) + "'");
}

ExactComplex &ExactComplex::operator*=(const ExactComplex &o)
{
    if (sgn(im) == 0 && sgn(o.im) == 0) {
        re *= o.re;
        return *this;
    }
    Rational r = re * o.re - im * o.im;
    Rational i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
}

double ScalarTraits<ExactComplex>::modulus(const ExactComplex &c)
{
    return std::hypot(c.re.get_d(), c.im.get_d());
}

std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string ScalarTraits<FloatComplex>::format_re(const FloatComplex &c)
{
    return format_double(c.real());
}

std::string ScalarTraits<FloatComplex>::format_im(const FloatComplex &c)
{
    return format_double(c.imag());
}

FloatComplex ScalarTraits<FloatComplex>::parse(std::string_view re, std::string_view im)
{
    auto one = [](std::string_view t) {
        const auto s = normalize_minus(t);
        if (s.find('/') != std::string::npos) {
            return parse_rational(s).get_d();
        }
        double v = 0.0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
            throw std::invalid_argument("malformed float '" + std::string(t) + "'");
        }
        return v;
    };
    return {one(re), one(im)};
}

} // namespace hida
