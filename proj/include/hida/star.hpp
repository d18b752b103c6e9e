#ifndef HIDA_STAR_HPP
#define HIDA_STAR_HPP

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hida/fock_series.hpp"
#include "hida/symplectic.hpp"

namespace hida
{

// Truncated formal power series in h: slot l holds the coefficient of h^l.
template <typename T>
class DeformationSeries
{
public:
    DeformationSeries() = default;
    DeformationSeries(Space space, unsigned order);
    explicit DeformationSeries(std::vector<FockSeries<T>> slots);

    // [f, 0, ..., 0].
    static DeformationSeries embed(const FockSeries<T> &f, unsigned order);

    unsigned order() const { return static_cast<unsigned>(m_slots.size()) - 1; }
    const Space &space() const { return m_slots.front().space(); }
    const FockSeries<T> &slot(unsigned l) const { return m_slots.at(l); }
    FockSeries<T> &slot(unsigned l) { return m_slots.at(l); }
    const std::vector<FockSeries<T>> &slots() const { return m_slots; }

    bool is_zero() const;
    // Smallest degree cap over the slots, i.e. the degree up to which every
    // slot is exact. Empty when no slot is capped.
    std::optional<int> exact_degree() const;

    friend bool operator==(const DeformationSeries &, const DeformationSeries &) = default;

private:
    std::vector<FockSeries<T>> m_slots{FockSeries<T>{}};
};

template <typename T>
DeformationSeries<T> operator-(const DeformationSeries<T> &x, const DeformationSeries<T> &y);

using ExactDeformation = DeformationSeries<ExactComplex>;
using FloatDeformation = DeformationSeries<FloatComplex>;

// Hida star product convention: P_l carries the factor prefactor^l / l!.
struct StarConvention {
    Rational prefactor{-1, 2};

    static StarConvention paper() { return {Rational(-1, 2)}; }
    static StarConvention bracket_normalized() { return {Rational(1)}; }
};

// Sign and prefactor choices for the cotangent-model products and checkers.
//
//   prefactor        slot r of *_h^A is prefactor^r / r! * C_r^A
//   bracket_sign     s in {F,G} = s sum (:a^1F a^2G: - :a^2F a^1G:)
//   t1_sign          T_1 F = t1_sign * sum lambda_m a^1_m a^2_m F
//   exchange_shift   e in exp[h(<g2', (A+I) g1> + <g2, (A+e I) g1'>)]
struct CotangentConvention {
    Rational prefactor{1};
    int bracket_sign = 1;
    int t1_sign = -1;
    int exchange_shift = 1;

    CotangentModel model(const DiagonalOperator &A) const { return {A, bracket_sign}; }

    friend bool operator==(const CotangentConvention &, const CotangentConvention &) = default;
};

// Ordered (name, value) pairs recorded in every report.
using ConventionFields = std::vector<std::pair<std::string, std::string>>;

ConventionFields convention_fields(const CotangentConvention &conv);
ConventionFields convention_fields(const StarConvention &conv, int sigma);

// l-th coefficient of the Hida star product on the loop model.
template <typename T>
FockSeries<T> p_l(const FockSeries<T> &f, const FockSeries<T> &g, unsigned l, const LoopModel &model,
                  const StarConvention &conv);

template <typename T>
DeformationSeries<T> star(const FockSeries<T> &f, const FockSeries<T> &g, unsigned order, const LoopModel &model,
                          const StarConvention &conv);

// r-fold application of C_1^A in the sense of bidifferential operators.
template <typename T>
FockSeries<T> c_r_a(const FockSeries<T> &f, const FockSeries<T> &g, unsigned r, const CotangentModel &model);

// F *_h^A G: slot r = prefactor^r / r! * C_r^A(F, G).
template <typename T>
DeformationSeries<T> star_a(const FockSeries<T> &f, const FockSeries<T> &g, unsigned order,
                            const DiagonalOperator &A, const CotangentConvention &conv = {});

template <typename T>
FockSeries<T> t1(const FockSeries<T> &f, const DiagonalOperator &A, int sign = -1);

// exp(h T_1) F, slot m = T_1^m F / m!.
template <typename T>
DeformationSeries<T> t_prime(const FockSeries<T> &f, const DiagonalOperator &A, unsigned order, int sign = -1);
template <typename T>
DeformationSeries<T> t_prime(const DeformationSeries<T> &x, const DiagonalOperator &A, int sign = -1);

struct LoopProduct {
    LoopModel model;
    StarConvention convention;
};
struct CotangentProduct {
    DiagonalOperator A;
    CotangentConvention convention;
};
using ProductSpec = std::variant<LoopProduct, CotangentProduct>;

// C[[h]]-bilinear extension, truncated at the common order.
template <typename T>
DeformationSeries<T> d_star(const DeformationSeries<T> &x, const DeformationSeries<T> &y, const ProductSpec &product);

// Summary of an identity check: largest residual coefficient per h-slot.
struct ResidualReport {
    std::string identity;
    std::vector<double> max_residual_per_slot;
    ConventionFields convention;
    bool exact = true;
    bool passed = false;
    std::optional<int> exact_degree;
};

// Residual T'(F *^A G) - (T'F) * (T'G), with * the lambda = 0 product of the
// same convention.
template <typename T>
DeformationSeries<T> gauge_residual(const FockSeries<T> &f, const FockSeries<T> &g, const DiagonalOperator &A,
                                    unsigned order, const CotangentConvention &conv);
template <typename T>
ResidualReport gauge_equivalence_check(const FockSeries<T> &f, const FockSeries<T> &g, const DiagonalOperator &A,
                                       unsigned order, const CotangentConvention &conv);

// Directions gamma_1, gamma_2, gamma'_1, gamma'_2 of H, given as degree-one
// cotangent series on side 1.
template <typename T>
struct ExchangeDirections {
    FockSeries<T> g1, g2, h1, h2;
};

// Phi_{g1,g2} truncated at the given degree: Wick exponential of g1 + g2 lifted to side 2.
template <typename T>
FockSeries<T> wick_exponential_pair(const FockSeries<T> &g1, const FockSeries<T> &g2, int cap);

// Both sides of the exchange formula, slotwise, restricted to degree <= D.
template <typename T>
std::pair<DeformationSeries<T>, DeformationSeries<T>> exchange_sides(const ExchangeDirections<T> &dirs,
                                                                     const DiagonalOperator &A, int D,
                                                                     unsigned order, const CotangentConvention &conv);
template <typename T>
ResidualReport exchange_check(const ExchangeDirections<T> &dirs, const DiagonalOperator &A, int D, unsigned order,
                              const CotangentConvention &conv);

// Residual report for an arbitrary residual series. scale multiplies the
// FLOAT tolerance 1e-10.
template <typename T>
ResidualReport residual_report(std::string identity, const DeformationSeries<T> &residual, ConventionFields convention,
                               double scale = 1.0);

} // namespace hida

#endif
