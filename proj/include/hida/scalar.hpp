#ifndef HIDA_SCALAR_HPP
#define HIDA_SCALAR_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace hida
{

using Rational = mpq_class;

// Parses "p/q", "p" or "-p/q". A leading U+2212 minus sign is accepted.
// Throws std::invalid_argument on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);
std::string format_rational(const Rational &q);

enum class ScalarMode { exact, floating };

std::string_view to_string(ScalarMode mode);
ScalarMode parse_scalar_mode(std::string_view text);

// Complex number with arbitrary-precision rational parts.
struct ExactComplex {
    Rational re{0};
    Rational im{0};

    ExactComplex() = default;
    ExactComplex(Rational r) : re(std::move(r)) {}
    ExactComplex(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
    ExactComplex(long v) : re(v) {}

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }

    ExactComplex &operator+=(const ExactComplex &o)
    {
        re += o.re;
        if (sgn(o.im) != 0) {
            im += o.im;
        }
        return *this;
    }
    ExactComplex &operator-=(const ExactComplex &o)
    {
        re -= o.re;
        if (sgn(o.im) != 0) {
            im -= o.im;
        }
        return *this;
    }
    ExactComplex &operator*=(const ExactComplex &o);
    ExactComplex &operator*=(const Rational &q)
    {
        re *= q;
        if (sgn(im) != 0) {
            im *= q;
        }
        return *this;
    }
    ExactComplex &operator/=(const Rational &q)
    {
        re /= q;
        if (sgn(im) != 0) {
            im /= q;
        }
        return *this;
    }

    friend ExactComplex operator+(ExactComplex a, const ExactComplex &b) { return a += b; }
    friend ExactComplex operator-(ExactComplex a, const ExactComplex &b) { return a -= b; }
    friend ExactComplex operator*(ExactComplex a, const ExactComplex &b) { return a *= b; }
    friend ExactComplex operator*(ExactComplex a, const Rational &q) { return a *= q; }
    friend ExactComplex operator-(ExactComplex a)
    {
        a.re = -a.re;
        a.im = -a.im;
        return a;
    }
    friend bool operator==(const ExactComplex &a, const ExactComplex &b)
    {
        return a.re == b.re && a.im == b.im;
    }
};

using FloatComplex = std::complex<double>;

// Default pruning threshold for FLOAT-mode coefficients.
inline constexpr double default_float_epsilon = 1e-10;

template <typename T>
struct ScalarTraits;

template <>
struct ScalarTraits<ExactComplex> {
    static constexpr ScalarMode mode = ScalarMode::exact;
    static bool is_zero(const ExactComplex &c, double = 0.0) { return c.is_zero(); }
    static ExactComplex from_rational(const Rational &q) { return ExactComplex(q); }
    static ExactComplex from_int(long v) { return ExactComplex(v); }
    static void scale(ExactComplex &c, const Rational &q) { c *= q; }
    static double modulus(const ExactComplex &c);
    static FloatComplex to_float(const ExactComplex &c) { return {c.re.get_d(), c.im.get_d()}; }
    static std::string format_re(const ExactComplex &c) { return format_rational(c.re); }
    static std::string format_im(const ExactComplex &c) { return format_rational(c.im); }
    static ExactComplex parse(std::string_view re, std::string_view im)
    {
        return {parse_rational(re), parse_rational(im)};
    }
};

template <>
struct ScalarTraits<FloatComplex> {
    static constexpr ScalarMode mode = ScalarMode::floating;
    static bool is_zero(const FloatComplex &c, double eps = default_float_epsilon)
    {
        return std::abs(c) <= eps;
    }
    static FloatComplex from_rational(const Rational &q) { return {q.get_d(), 0.0}; }
    static FloatComplex from_int(long v) { return {static_cast<double>(v), 0.0}; }
    static void scale(FloatComplex &c, const Rational &q) { c *= q.get_d(); }
    static double modulus(const FloatComplex &c) { return std::abs(c); }
    static FloatComplex to_float(const FloatComplex &c) { return c; }
    static std::string format_re(const FloatComplex &c);
    static std::string format_im(const FloatComplex &c);
    static FloatComplex parse(std::string_view re, std::string_view im);
};

// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

} // namespace hida

#endif
