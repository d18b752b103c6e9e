#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "hida/io.hpp"
#include "hida/norms.hpp"
#include "support.hpp"

using namespace hida;
using namespace hida::test;

namespace
{

const Space L2 = Space::loop(2);

double sum(const std::vector<double> &v)
{
    return std::accumulate(v.begin(), v.end(), 0.0);
}

} // namespace

TEST(HidaWeight, Examples)
{
    const NormParams p{2.0, 1.0, 1.0};
    EXPECT_DOUBLE_EQ(hida_weight(MultiIndex{}, p), 1.0);
    EXPECT_DOUBLE_EQ(hida_weight(MultiIndex{{1, 0}}, p), 2.0);
    EXPECT_DOUBLE_EQ(hida_weight(MultiIndex{{1, 0}, {2, 1}}, p), 10.0);
    EXPECT_DOUBLE_EQ(hida_weight(MultiIndex{{-2, 1}, {-2, 1}}, NormParams{1.0, 1.0, 1.0}), 5.0);
}

TEST(HidaWeight, MultiplicativeAndExact)
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Sampler rng(seed);
        const auto a = rng.multi_index(L2, 5, static_cast<int>(rng.uniform(0, 4)));
        const auto b = rng.multi_index(L2, 5, static_cast<int>(rng.uniform(0, 4)));
        const NormParams p{rng.unit() * 5, 1.0, 0.5 + rng.unit()};
        const double lhs = hida_weight(merge(a, b), p);
        EXPECT_NEAR(lhs, hida_weight(a, p) * hida_weight(b, p), 1e-12 * lhs);
        const unsigned r = 2 * static_cast<unsigned>(rng.uniform(0, 3));
        const Rational c1(3, 2);
        EXPECT_NEAR(hida_weight_exact(a, r, c1).get_d(), hida_weight(a, NormParams{double(r), 1.0, 1.5}),
                    1e-12 * hida_weight_exact(a, r, c1).get_d());
    }
}

TEST(HidaNorm, Examples)
{
    EXPECT_DOUBLE_EQ(hida_norm(mono(L2, {{1, 0}}), NormParams{2.0, 3.0, 1.0}), std::sqrt(6.0));
    EXPECT_EQ(hida_norm(ExactSeries(L2), NormParams{2.0, 3.0, 1.0}), 0.0);
    for (const NormParams &p : {NormParams{0.0, 1.0, 1.0}, NormParams{7.5, 0.1, 3.0}}) {
        EXPECT_DOUBLE_EQ(hida_norm(constant(L2), p), 1.0);
    }
}

TEST(HidaNorm, Properties)
{
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Sampler rng(700 + seed);
        const auto f = to_float(random_series(rng, L2, 4, 4, 10));
        const auto g = to_float(random_series(rng, L2, 4, 4, 10));
        const NormParams p{rng.unit() * 4, 0.2 + rng.unit() * 3, 1.0};
        const NormParams bigger{p.r + rng.unit() * 2, p.C + rng.unit(), 1.0};
        const double nf = hida_norm(f, p);
        EXPECT_LE(nf, hida_norm(f, bigger) * (1 + 1e-12));
        const FloatComplex alpha{-1.5, 2.0};
        EXPECT_NEAR(hida_norm(scaled(f, alpha), p), std::abs(alpha) * nf, 1e-9 * (1 + nf));
        EXPECT_LE(hida_norm(f + g, p), nf + hida_norm(g, p) + 1e-9);
    }
}

TEST(ModeSums, SingleModeGeometric)
{
    EXPECT_NEAR(enumerate_mode_sum({0.5}, 60), 2.0, 1e-12);
    EXPECT_NEAR(sum(complete_homogeneous({1.0 / 3.0}, 60)), 1.5, 1e-12);
}

TEST(ModeSums, NewtonMatchesDynamicProgramming)
{
    const std::vector<double> x{0.5, 0.25, 0.1, 0.3, 0.05};
    const auto a = complete_homogeneous(x, 8);
    const auto b = complete_homogeneous_newton(x, 8);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_NEAR(a[i], b[i], 1e-12);
    }
    EXPECT_NEAR(enumerate_mode_sum(x, 5), sum(complete_homogeneous(x, 5)), 1e-12);
}

TEST(Nuclearity, ReferenceParameters)
{
    const auto rep = nuclearity_sum(NormParams{4.0, 0.5, 1.0}, 50, 2, 8);
    ASSERT_TRUE(rep.summable) << rep.diagnostic;
    EXPECT_NEAR(rep.direct, rep.closed_form, 1e-6);
    EXPECT_LE(rep.direct, rep.product * (1 + 1e-12));
    EXPECT_TRUE(std::isfinite(rep.total_bound));
    EXPECT_GE(rep.total_bound, rep.product);
    EXPECT_GT(rep.tail_bound, 0.0);
    EXPECT_FALSE(rep.tail_formula.empty());
}

TEST(Nuclearity, MonotoneInCutoffs)
{
    const NormParams p{4.0, 0.5, 1.0};
    double previous = 0.0;
    for (int d = 0; d <= 8; ++d) {
        const auto rep = nuclearity_sum(p, 10, 2, d);
        EXPECT_GE(rep.direct, previous);
        EXPECT_LE(rep.direct, rep.product * (1 + 1e-12));
        previous = rep.direct;
    }
    EXPECT_LE(nuclearity_sum(p, 5, 2, 6).direct, nuclearity_sum(p, 10, 2, 6).direct);
}

TEST(Nuclearity, DivergenceReported)
{
    const auto rep = nuclearity_sum(NormParams{0.0, 1.0, 1.0}, 10, 2, 4);
    EXPECT_FALSE(rep.summable);
    EXPECT_FALSE(rep.diagnostic.empty());
    EXPECT_FALSE(nuclearity_sum(NormParams{4.0, 1.5, 1.0}, 10, 2, 4).summable);
}

TEST(HSEmbedding, Examples)
{
    const NormParams p{2.0, 1.0, 1.0};
    EXPECT_FALSE(hs_embedding_norm(p, p, 10, 2, 4).summable);
    const auto rep = hs_embedding_norm(p, NormParams{6.0, 0.25, 1.0}, 50, 2, 8);
    EXPECT_FALSE(rep.summable) << "the k = 0 ratio is 1/4 but the ratio grows with |k|";
    const auto rev = hs_embedding_norm(NormParams{6.0, 4.0, 1.0}, p, 50, 2, 8);
    ASSERT_TRUE(rev.summable) << rev.diagnostic;
    EXPECT_NEAR(rev.direct, rev.closed_form, 1e-6);
    EXPECT_TRUE(std::isfinite(rev.total_bound));
}

TEST(Probe, ConstantsGiveZero)
{
    ProbeConfig c;
    c.samples = 50;
    c.max_degree = 0;
    const auto rep = continuity_probe(c);
    EXPECT_EQ(rep.K_hat, 0.0);
    EXPECT_EQ(rep.evaluated + rep.skipped_zero_denominator, 50u);
    EXPECT_GT(rep.evaluated, 0u);
}

TEST(Probe, Deterministic)
{
    ProbeConfig c;
    c.samples = 200;
    c.seed = 9;
    EXPECT_EQ(io::probe_to_json(continuity_probe(c)), io::probe_to_json(continuity_probe(c)));
    for (const auto op : {ProbeOp::p_l, ProbeOp::e_a_form}) {
        ProbeConfig d = c;
        d.op = op;
        d.A = DiagonalOperator::from_formula(q(1), 1, {q(1), 1.0});
        const auto rep = continuity_probe(d);
        EXPECT_TRUE(std::isfinite(rep.K_hat));
        EXPECT_EQ(io::probe_to_json(rep), io::probe_to_json(continuity_probe(d)));
    }
}

TEST(Probe, GoldenFixture)
{
    ProbeConfig c;
    c.seed = 42;
    const auto golden = io::read_json_file(HIDA_FIXTURE_DIR "/probe_bracket_golden.json");
    EXPECT_EQ(io::probe_to_json(continuity_probe(c)), golden);
}
