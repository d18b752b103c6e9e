#include "hida/calibration.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <memory>

#include "hida/oracle.hpp"

namespace hida
{

std::string_view to_string(CalibrationStatus status)
{
    switch (status) {
    case CalibrationStatus::unique:
        return "unique";
    case CalibrationStatus::underdetermined:
        return "underdetermined";
    case CalibrationStatus::none:
        return "none";
    }
    return "none";
}

namespace
{

using oracle::DenseBasis;
using oracle::DenseFockVector;
using Dense = std::vector<DenseFockVector>;

int find_probe_mode(const DiagonalOperator &A)
{
    if (A.is_formula()) {
        return 1;
    }
    int best = 0;
    for (const auto &[mode, lambda] : A.table()) {
        if (sgn(lambda) != 0 && (best == 0 || std::abs(mode) < std::abs(best))) {
            best = mode;
        }
    }
    return best == 0 ? 1 : std::abs(best);
}

Rational rational_power(const Rational &q, unsigned e)
{
    Rational r(1);
    for (unsigned j = 0; j < e; ++j) {
        r *= q;
    }
    return r;
}

Rational inverse_factorial(unsigned n)
{
    Rational r(1);
    for (unsigned j = 2; j <= n; ++j) {
        r /= j;
    }
    return r;
}

DenseFockVector zero_like(const DenseFockVector &x)
{
    return DenseFockVector(x.basis_ptr());
}

// Slots of prefactor^r / r! C_r(f, g) for r = 0..order.
Dense dense_product(const DenseFockVector &f, const DenseFockVector &g, unsigned order, const CotangentModel &model,
                    const Rational &prefactor)
{
    Dense out;
    for (unsigned r = 0; r <= order; ++r) {
        out.push_back(oracle::scale(oracle::c_r_a(f, g, r, model), rational_power(prefactor, r) * inverse_factorial(r)));
    }
    return out;
}

// Cauchy product of two deformation series under the given product.
Dense dense_d_product(const Dense &x, const Dense &y, const CotangentModel &model, const Rational &prefactor)
{
    const unsigned order = static_cast<unsigned>(x.size()) - 1;
    Dense out(order + 1, zero_like(x[0]));
    for (unsigned p = 0; p <= order; ++p) {
        for (unsigned q = 0; p + q <= order; ++q) {
            const auto prod = dense_product(x[p], y[q], order - p - q, model, prefactor);
            for (unsigned l = 0; p + q + l <= order; ++l) {
                out[p + q + l] = oracle::add(out[p + q + l], prod[l]);
            }
        }
    }
    return out;
}

// exp(h T_1) applied slotwise.
Dense dense_t_prime(const Dense &x, const DiagonalOperator &A, int sign)
{
    const unsigned order = static_cast<unsigned>(x.size()) - 1;
    Dense out(order + 1, zero_like(x[0]));
    for (unsigned p = 0; p <= order; ++p) {
        DenseFockVector power = x[p];
        for (unsigned m = 0; p + m <= order; ++m) {
            if (m > 0) {
                power = oracle::t1(power, A, sign);
            }
            out[p + m] = oracle::add(out[p + m], oracle::scale(power, inverse_factorial(m)));
        }
    }
    return out;
}

Dense embed(const DenseFockVector &f, unsigned order)
{
    Dense out(order + 1, zero_like(f));
    out[0] = f;
    return out;
}

double max_difference(const Dense &x, const Dense &y, int max_degree = -1)
{
    double worst = 0.0;
    for (std::size_t l = 0; l < x.size(); ++l) {
        const auto &indices = x[l].basis().indices();
        for (std::size_t n = 0; n < indices.size(); ++n) {
            if (max_degree >= 0 && static_cast<int>(indices[n].degree()) > max_degree) {
                continue;
            }
            const ExactComplex d = x[l][n] - y[l][n];
            if (!d.is_zero()) {
                // Any nonzero exact residual must register, however small.
                worst = std::max({worst, ScalarTraits<ExactComplex>::modulus(d),
                                  std::numeric_limits<double>::denorm_min()});
            }
        }
    }
    return worst;
}

struct Probe {
    std::shared_ptr<const DenseBasis> basis;
    BasisIndex x;
    BasisIndex y;

    DenseFockVector series(std::initializer_list<std::pair<MultiIndex, long>> terms) const
    {
        std::vector<std::pair<MultiIndex, ExactComplex>> raw;
        for (const auto &[index, c] : terms) {
            raw.emplace_back(index, ExactComplex(c));
        }
        return DenseFockVector::from_sparse(canonicalize(Space::cotangent(), std::move(raw)), basis);
    }
};

double gauge_probe(const Probe &probe, const DiagonalOperator &A, const CotangentConvention &conv, bool flip)
{
    constexpr unsigned order = 2;
    const auto x = probe.x;
    const auto y = probe.y;
    const std::vector<std::pair<DenseFockVector, DenseFockVector>> pairs = {
        {probe.series({{MultiIndex{x}, 1}}), probe.series({{MultiIndex{y}, 1}})},
        {probe.series({{MultiIndex::power(x, 2), 1}}), probe.series({{MultiIndex::power(y, 2), 1}})},
        {probe.series({{MultiIndex{x, y}, 1}}), probe.series({{MultiIndex{x}, 2}, {MultiIndex{y}, -1}})},
    };
    const CotangentModel perturbed{A, conv.bracket_sign};
    const CotangentModel reference{DiagonalOperator::zero(), flip ? -conv.bracket_sign : conv.bracket_sign};
    double worst = 0.0;
    for (const auto &[f, g] : pairs) {
        const auto lhs = dense_t_prime(dense_product(f, g, order, perturbed, conv.prefactor), A, conv.t1_sign);
        const auto rhs = dense_d_product(dense_t_prime(embed(f, order), A, conv.t1_sign),
                                         dense_t_prime(embed(g, order), A, conv.t1_sign), reference, conv.prefactor);
        worst = std::max(worst, max_difference(lhs, rhs));
    }
    return worst;
}

double exchange_probe(const Probe &probe, const DiagonalOperator &A, const CotangentConvention &conv)
{
    constexpr unsigned order = 1;
    constexpr int cap = 2;
    const int k = probe.x.k;
    const Rational lambda = A.eigenvalue(k);
    // Directions gamma_1 = 1, gamma_2 = 2, gamma'_1 = 3, gamma'_2 = 5 times gamma_k.
    const long g1 = 1;
    const long g2 = 2;
    const long h1 = 3;
    const long h2 = 5;
    auto phi = [&](long a, long b) {
        const auto xi = canonicalize<ExactComplex>(
            Space::cotangent(), {{MultiIndex{probe.x}, ExactComplex(a)}, {MultiIndex{probe.y}, ExactComplex(b)}});
        return oracle::wick_exp(xi, probe.basis);
    };
    const auto lhs = dense_product(phi(g1, g2).truncated(cap), phi(h1, h2).truncated(cap), order,
                                   CotangentModel{A, conv.bracket_sign}, conv.prefactor);
    const Rational kappa = Rational(h2 * g1) * (lambda + 1) + Rational(g2 * h1) * (lambda + conv.exchange_shift);
    const auto sum = phi(g1 + h1, g2 + h2);
    const Dense rhs = {sum, oracle::scale(sum, kappa)};
    return max_difference(lhs, rhs, 0);
}

} // namespace

CalibrationResult calibrate(const DiagonalOperator &A, const CalibrationOptions &options)
{
    CalibrationResult result;
    result.probe_mode = find_probe_mode(A);
    result.probe_lambda = A.eigenvalue(result.probe_mode);

    Probe probe;
    probe.basis = std::make_shared<DenseBasis>(Space::cotangent(), result.probe_mode, 4);
    probe.x = {result.probe_mode, 1};
    probe.y = {result.probe_mode, 2};

    const Rational prefactors[] = {Rational(1), Rational(-1), Rational(1, 2), Rational(-1, 2)};
    for (const auto &prefactor : prefactors) {
        for (int bracket_sign : {1, -1}) {
            // The gauge probe ignores the exchange shift, the exchange probe the T_1 sign.
            double gauge[2];
            double exchange[2];
            for (int j = 0; j < 2; ++j) {
                const int sign = j == 0 ? 1 : -1;
                gauge[j] = gauge_probe(probe, A, {prefactor, bracket_sign, sign, 1}, options.flip_reference_bracket);
                exchange[j] = exchange_probe(probe, A, {prefactor, bracket_sign, 1, sign});
            }
            for (int t = 0; t < 2; ++t) {
                for (int e = 0; e < 2; ++e) {
                    CalibrationCandidate c;
                    c.convention = {prefactor, bracket_sign, t == 0 ? 1 : -1, e == 0 ? 1 : -1};
                    c.gauge_residual = gauge[t];
                    c.exchange_residual = exchange[e];
                    c.passed = c.gauge_residual == 0.0 && c.exchange_residual == 0.0;
                    result.candidates.push_back(c);
                }
            }
        }
    }

    int passing = 0;
    for (const auto &c : result.candidates) {
        if (c.passed) {
            ++passing;
            result.selected = c.convention;
        }
    }
    if (passing == 1) {
        result.status = CalibrationStatus::unique;
    } else {
        result.status = passing == 0 ? CalibrationStatus::none : CalibrationStatus::underdetermined;
        result.selected.reset();
    }
    return result;
}

} // namespace hida
