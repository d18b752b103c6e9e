#include <gtest/gtest.h>

#include <memory>

#include "hida/oracle.hpp"
#include "support.hpp"

using namespace hida;
using namespace hida::test;

namespace
{

const Space L2 = Space::loop(2);
const Space CT = Space::cotangent();

} // namespace

TEST(DenseBasis, Enumeration)
{
    const oracle::DenseBasis b(L2, 1, 2);
    // 6 modes: 1 + 6 + 21 multiindices.
    EXPECT_EQ(b.modes().size(), 6u);
    EXPECT_EQ(b.size(), 28u);
    EXPECT_TRUE(std::is_sorted(b.indices().begin(), b.indices().end()));
    EXPECT_EQ(b.position(MultiIndex{}), 0);
    EXPECT_EQ(b.position(MultiIndex{{2, 0}}), -1);
    EXPECT_FALSE(b.contains({2, 0}));

    const oracle::DenseBasis c(CT, 1, 1);
    EXPECT_EQ(c.modes().size(), 4u);
    EXPECT_FALSE(c.contains({0, 1}));
}

TEST(DenseVector, RoundTrip)
{
    const auto basis = std::make_shared<const oracle::DenseBasis>(L2, 2, 3);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Sampler rng(seed);
        const auto f = random_series(rng, L2, 2, 3, 15);
        const auto F = oracle::DenseFockVector::from_sparse(f, basis);
        EXPECT_EQ(F.to_sparse(), f);
    }
    EXPECT_THROW(oracle::DenseFockVector::from_sparse(mono(L2, {{3, 0}}), basis), std::out_of_range);
    EXPECT_THROW(oracle::DenseFockVector::from_sparse(mono(L2, {{1, 0}, {1, 0}, {1, 0}, {1, 0}}), basis),
                 std::out_of_range);
}

TEST(DenseOps, TrivialCases)
{
    const auto basis = std::make_shared<const oracle::DenseBasis>(L2, 1, 3);
    auto dense = [&](const ExactSeries &f) { return oracle::DenseFockVector::from_sparse(f, basis); };
    Sampler rng(4);
    const auto f = random_series(rng, L2, 1, 3, 10);
    const auto one = dense(constant(L2));
    EXPECT_EQ(oracle::wick(one, dense(f)).to_sparse(), f);
    EXPECT_TRUE(oracle::annihilate(one, {1, 0}).to_sparse().is_zero());
    EXPECT_EQ(oracle::annihilate(dense(mono(L2, {{1, 0}, {1, 0}, {1, 0}})), {1, 0}).to_sparse(),
              mono(L2, {{1, 0}, {1, 0}}, q(3)));
    EXPECT_TRUE(oracle::bracket(one, dense(f), SymplecticModel{LoopModel{}}).to_sparse().is_zero());
    EXPECT_EQ(oracle::p_l(dense(f), one, 0, LoopModel{}, q(-1, 2)).to_sparse(), f);
    EXPECT_TRUE(oracle::p_l(dense(f), one, 2, LoopModel{}, q(-1, 2)).to_sparse().is_zero());
    EXPECT_EQ(oracle::add(dense(f), oracle::scale(dense(f), q(-1))).to_sparse(), ExactSeries(L2));
    EXPECT_EQ(dense(f).truncated(1).to_sparse(), f.truncated(1).uncapped());
}

TEST(DenseOps, WickExponential)
{
    const auto basis = std::make_shared<const oracle::DenseBasis>(CT, 1, 3);
    const auto xi = mono(CT, {x(1)}, q(2));
    const auto e = oracle::wick_exp(xi, basis).to_sparse();
    EXPECT_EQ(e.coefficient(MultiIndex{}), ExactComplex(1));
    EXPECT_EQ(e.coefficient(MultiIndex{x(1), x(1), x(1)}), ExactComplex(q(8, 6)));
    EXPECT_TRUE(oracle::wick_exp(ExactSeries(CT), basis).to_sparse() == constant(CT));
}

TEST(DenseOps, T1)
{
    const auto basis = std::make_shared<const oracle::DenseBasis>(CT, 1, 2);
    const auto A = DiagonalOperator::from_table({{1, q(3)}}, {q(10), 1.0});
    const auto F = oracle::DenseFockVector::from_sparse(mono(CT, {x(1), y(1)}), basis);
    EXPECT_EQ(oracle::t1(F, A, -1).to_sparse(), constant(CT, q(-3)));
}
