#include <gtest/gtest.h>

#include <memory>

#include "hida/calibration.hpp"
#include "hida/checks.hpp"
#include "hida/oracle.hpp"
#include "hida/star.hpp"
#include "support.hpp"

using namespace hida;
using namespace hida::test;

namespace
{

const Space L2 = Space::loop(2);
const Space CT = Space::cotangent();
const LoopModel LM{};

DiagonalOperator lambda_one(long v)
{
    return DiagonalOperator::from_table({{1, q(v)}}, {q(10), 1.0});
}

DiagonalOperator lambda_m()
{
    return DiagonalOperator::from_formula(q(1), 1, {q(1), 1.0});
}

const CotangentConvention calibrated{q(1), 1, -1, -1};

ExactDeformation slots(std::vector<ExactSeries> s)
{
    return ExactDeformation(std::move(s));
}

} // namespace

TEST(PL, ZeroIsWick)
{
    Sampler rng(1);
    const auto f = random_series(rng, L2, 3, 4, 10);
    const auto g = random_series(rng, L2, 3, 4, 10);
    EXPECT_EQ(p_l(f, g, 0, LM, StarConvention::paper()), wick_product(f, g));
}

TEST(PL, SinglePair)
{
    const auto x = mono(L2, {{1, 0}});
    const auto p = mono(L2, {{1, 1}});
    EXPECT_EQ(p_l(x, p, 1, LM, StarConvention::paper()), constant(L2, q(-1)));
    EXPECT_EQ(p_l(x, p, 1, LM, StarConvention::bracket_normalized()), constant(L2, q(2)));
}

TEST(PL, SecondOrderAgainstOracle)
{
    const auto xx = mono(L2, {{1, 0}, {1, 0}});
    const auto pp = mono(L2, {{1, 1}, {1, 1}});
    const auto basis = std::make_shared<const oracle::DenseBasis>(L2, 1, 4);
    const auto F = oracle::DenseFockVector::from_sparse(xx, basis);
    const auto G = oracle::DenseFockVector::from_sparse(pp, basis);
    for (unsigned l = 0; l <= 2; ++l) {
        EXPECT_EQ(p_l(xx, pp, l, LM, StarConvention::paper()), oracle::p_l(F, G, l, LM, q(-1, 2)).to_sparse());
    }
    EXPECT_EQ(p_l(xx, pp, 2, LM, StarConvention::paper()), constant(L2, q(2)));
    const auto full = star(xx, pp, 2, LM, StarConvention::paper());
    EXPECT_EQ(full, slots({mono(L2, {{1, 0}, {1, 0}, {1, 1}, {1, 1}}), mono(L2, {{1, 0}, {1, 1}}, q(-4)),
                           constant(L2, q(2))}));
}

TEST(Star, Examples)
{
    const auto x = mono(L2, {{1, 0}});
    const auto p = mono(L2, {{1, 1}});
    EXPECT_EQ(star(x, p, 2, LM, StarConvention::paper()),
              slots({mono(L2, {{1, 0}, {1, 1}}), constant(L2, q(-1)), ExactSeries(L2)}));
    Sampler rng(3);
    const auto g = random_series(rng, L2, 3, 4, 10);
    const auto s = star(constant(L2), g, 3, LM, StarConvention::paper());
    EXPECT_EQ(s.slot(0), g);
    for (unsigned l = 1; l <= 3; ++l) {
        EXPECT_TRUE(s.slot(l).is_zero());
    }
}

TEST(Star, AntisymmetricPartIsBracket)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Sampler rng(100 + seed);
        const Rational c = rng.rational(3);
        const LoopModel m{2, c * c + 1, seed % 2 ? 1 : -1};
        const auto f = random_series(rng, L2, 3, 4, 10);
        const auto g = random_series(rng, L2, 3, 4, 10);
        const auto br = poisson_bracket(f, g, SymplecticModel{m});
        for (const auto &conv : {StarConvention::paper(), StarConvention::bracket_normalized(), StarConvention{q(3, 7)}}) {
            const auto anti = p_l(f, g, 1, m, conv) - p_l(g, f, 1, m, conv);
            EXPECT_EQ(anti, scaled(br, 2 * conv.prefactor));
        }
    }
}

TEST(Star, Associative)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Sampler rng(200 + seed);
        const auto conv = seed % 2 ? StarConvention::paper() : StarConvention::bracket_normalized();
        const ProductSpec spec{LoopProduct{LM, conv}};
        const auto f = ExactDeformation::embed(random_series(rng, L2, 2, 4, 8), 4);
        const auto g = ExactDeformation::embed(random_series(rng, L2, 2, 4, 8), 4);
        const auto h = ExactDeformation::embed(random_series(rng, L2, 2, 4, 8), 4);
        EXPECT_TRUE((d_star(d_star(f, g, spec), h, spec) - d_star(f, d_star(g, h, spec), spec)).is_zero());
    }
}

TEST(Star, DegreeBookkeeping)
{
    Sampler rng(7);
    const auto f = random_series(rng, L2, 2, 3, 8, 3);
    const auto g = random_series(rng, L2, 2, 2, 8, 2);
    const auto s = star(f, g, 3, LM, StarConvention::paper());
    for (unsigned l = 0; l <= 3; ++l) {
        for (const auto &t : s.slot(l).terms()) {
            EXPECT_EQ(static_cast<int>(t.index.degree()), 5 - 2 * static_cast<int>(l));
        }
    }
}

TEST(Star, FloatMatchesExact)
{
    Sampler rng(11);
    const auto f = random_series(rng, L2, 3, 4, 12);
    const auto g = random_series(rng, L2, 3, 4, 12);
    const auto e = star(f, g, 3, LM, StarConvention::paper());
    const auto d = star(to_float(f), to_float(g), 3, LM, StarConvention::paper());
    for (unsigned l = 0; l <= 3; ++l) {
        const auto diff = d.slot(l) - to_float(e.slot(l));
        EXPECT_LE(max_modulus(diff), 1e-9);
    }
}

TEST(DStar, EmbeddingAndZero)
{
    const auto x = mono(L2, {{1, 0}});
    const auto p = mono(L2, {{1, 1}, {2, 0}});
    const ProductSpec spec{LoopProduct{LM, StarConvention::paper()}};
    EXPECT_EQ(d_star(ExactDeformation::embed(x, 3), ExactDeformation::embed(p, 3), spec),
              star(x, p, 3, LM, StarConvention::paper()));
    EXPECT_TRUE(d_star(ExactDeformation(L2, 3), ExactDeformation::embed(p, 3), spec).is_zero());
}

TEST(CRA, MatchesOracle)
{
    const auto basis = std::make_shared<const oracle::DenseBasis>(CT, 2, 4);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Sampler rng(300 + seed);
        const CotangentModel m{random_diagonal(rng, 2), seed % 2 ? 1 : -1};
        const auto f = random_series(rng, CT, 2, 2, 6);
        const auto g = random_series(rng, CT, 2, 2, 6);
        const auto F = oracle::DenseFockVector::from_sparse(f, basis);
        const auto G = oracle::DenseFockVector::from_sparse(g, basis);
        for (unsigned r = 1; r <= 2; ++r) {
            EXPECT_EQ(c_r_a(f, g, r, m), oracle::c_r_a(F, G, r, m).to_sparse());
        }
    }
}

TEST(StarA, Examples)
{
    const auto f = mono(CT, {x(1)});
    const auto g = mono(CT, {y(1)});
    EXPECT_EQ(star_a(f, g, 2, lambda_one(3)).slot(1), constant(CT, q(4)));

    Sampler rng(13);
    const auto a = random_series(rng, CT, 2, 3, 8);
    const auto b = random_series(rng, CT, 2, 3, 8);
    EXPECT_EQ(star_a(a, b, 2, DiagonalOperator::zero()).slot(1), poisson_bracket(a, b, SymplecticModel{CotangentModel{}}));

    const auto s = star_a(constant(CT), b, 3, lambda_one(3));
    EXPECT_EQ(s.slot(0), b);
    for (unsigned l = 1; l <= 3; ++l) {
        EXPECT_TRUE(s.slot(l).is_zero());
    }
}

TEST(StarA, Associative)
{
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        Sampler rng(400 + seed);
        const auto A = random_diagonal(rng, 2);
        const ProductSpec spec{CotangentProduct{A, calibrated}};
        const auto f = ExactDeformation::embed(random_series(rng, CT, 2, 3, 6), 3);
        const auto g = ExactDeformation::embed(random_series(rng, CT, 2, 3, 6), 3);
        const auto h = ExactDeformation::embed(random_series(rng, CT, 2, 3, 6), 3);
        EXPECT_TRUE((d_star(d_star(f, g, spec), h, spec) - d_star(f, d_star(g, h, spec), spec)).is_zero());
    }
}

TEST(T1, Examples)
{
    const auto A = lambda_one(3);
    EXPECT_EQ(t1(mono(CT, {x(1), y(1)}), A), constant(CT, q(-3)));
    EXPECT_TRUE(t1(mono(CT, {x(1), x(1), x(2)}), A).is_zero());
    EXPECT_TRUE(t1(constant(CT), A).is_zero());
    EXPECT_EQ(t1(mono(CT, {x(1), y(1)}), A, 1), constant(CT, q(3)));
}

TEST(TPrime, Examples)
{
    const auto A = lambda_one(3);
    const auto f = mono(CT, {x(1), y(1)});
    EXPECT_EQ(t_prime(f, A, 2), slots({f, constant(CT, q(-3)), ExactSeries(CT)}));
    const auto lin = mono(CT, {x(1)}) + mono(CT, {y(2)});
    EXPECT_EQ(t_prime(lin, A, 3), ExactDeformation::embed(lin, 3));
    Sampler rng(17);
    const auto g = random_series(rng, CT, 2, 4, 10);
    EXPECT_EQ(t_prime(g, DiagonalOperator::zero(), 3), ExactDeformation::embed(g, 3));
}

TEST(TPrime, SlotCount)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Sampler rng(500 + seed);
        const auto A = random_diagonal(rng, 2);
        const int d = static_cast<int>(rng.uniform(0, 5));
        const auto f = random_series(rng, CT, 2, d, 6, d);
        const auto t = t_prime(f, A, 5);
        for (unsigned m = static_cast<unsigned>(d / 2) + 1; m <= 5; ++m) {
            EXPECT_TRUE(t.slot(m).is_zero());
        }
        for (unsigned m = 0; m <= 5; ++m) {
            for (const auto &term : t.slot(m).terms()) {
                EXPECT_EQ(static_cast<int>(term.index.degree()), d - 2 * static_cast<int>(m));
            }
        }
    }
}

TEST(Gauge, Examples)
{
    Sampler rng(19);
    const auto f = random_series(rng, CT, 2, 3, 8);
    const auto g = random_series(rng, CT, 2, 3, 8);
    EXPECT_TRUE(gauge_residual(f, g, DiagonalOperator::zero(), 3, CotangentConvention{}).is_zero());
    EXPECT_TRUE(gauge_residual(constant(CT), g, lambda_one(3), 3, calibrated).is_zero());
    EXPECT_TRUE(gauge_residual(f, constant(CT), lambda_one(3), 3, calibrated).is_zero());

    const auto report = gauge_equivalence_check(mono(CT, {x(1)}), mono(CT, {y(1)}), lambda_one(3), 2, calibrated);
    EXPECT_TRUE(report.passed);
    EXPECT_EQ(report.max_residual_per_slot.size(), 3u);
    EXPECT_EQ(report.identity, "gauge");
}

TEST(Gauge, CalibratedTupleOnRandomInputs)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Sampler rng(600 + seed);
        const auto A = random_diagonal(rng, 2);
        const auto f = random_series(rng, CT, 2, 3, 6);
        const auto g = random_series(rng, CT, 2, 3, 6);
        EXPECT_TRUE(gauge_residual(f, g, A, 3, calibrated).is_zero());
    }
}

TEST(Exchange, TrivialDirections)
{
    const ExchangeDirections<ExactComplex> dirs{ExactSeries(CT), ExactSeries(CT), ExactSeries(CT), ExactSeries(CT)};
    const auto [lhs, rhs] = exchange_sides(dirs, DiagonalOperator::zero(), 4, 3, calibrated);
    EXPECT_EQ(lhs, ExactDeformation::embed(constant(CT).truncated(4), 3));
    EXPECT_EQ(lhs, rhs);
}

TEST(Exchange, ScalarFactor)
{
    const auto a = mono(CT, {x(1)});
    const ExchangeDirections<ExactComplex> dirs{a, ExactSeries(CT), ExactSeries(CT), a};
    const auto A = lambda_one(3);
    const auto [lhs, rhs] = exchange_sides(dirs, A, 4, 3, CotangentConvention{});
    Rational factorial = 1;
    for (unsigned l = 0; l <= 3; ++l) {
        if (l > 0) {
            factorial *= l;
        }
        Rational expected = 1;
        for (unsigned j = 0; j < l; ++j) {
            expected *= 4;
        }
        EXPECT_EQ(rhs.slot(l).coefficient(MultiIndex{}), ExactComplex(expected / factorial));
    }
    EXPECT_TRUE(exchange_check(dirs, A, 4, 3, calibrated).passed);
}

TEST(Exchange, SingleModeCalibrated)
{
    const auto g1 = mono(CT, {x(1)}, q(2));
    const auto g2 = mono(CT, {x(1)}, q(-1, 2));
    const auto h1 = mono(CT, {x(1)}, q(1, 3));
    const auto h2 = mono(CT, {x(1)}, q(3));
    const ExchangeDirections<ExactComplex> dirs{g1, g2, h1, h2};
    EXPECT_TRUE(exchange_check(dirs, lambda_one(3), 4, 3, calibrated).passed);
    EXPECT_FALSE(exchange_check(dirs, lambda_one(3), 4, 3, CotangentConvention{q(1), 1, -1, 1}).passed);
    EXPECT_THROW(exchange_check(ExchangeDirections<ExactComplex>{mono(CT, {x(1), x(1)}), g2, h1, h2}, lambda_one(3), 4,
                                3, calibrated),
                 std::invalid_argument);
}

TEST(Calibration, UniqueForDefaultOperator)
{
    const auto result = calibrate(lambda_m());
    EXPECT_EQ(result.status, CalibrationStatus::unique);
    ASSERT_TRUE(result.selected.has_value());
    EXPECT_EQ(*result.selected, calibrated);
    EXPECT_EQ(result.candidates.size(), 32u);
    EXPECT_EQ(result.probe_mode, 1);
}

TEST(Calibration, UnderdeterminedAtZero)
{
    const auto result = calibrate(DiagonalOperator::zero());
    EXPECT_EQ(result.status, CalibrationStatus::underdetermined);
    EXPECT_FALSE(result.selected.has_value());
    EXPECT_TRUE(checks::calibrated_convention(result).has_value());
}

TEST(Calibration, FlippedReferenceFails)
{
    const auto result = calibrate(lambda_m(), CalibrationOptions{true});
    EXPECT_EQ(result.status, CalibrationStatus::none);
    EXPECT_FALSE(checks::calibrated_convention(result).has_value());
}
