#include <gtest/gtest.h>

#include <memory>

#include "hida/oracle.hpp"
#include "hida/symplectic.hpp"
#include "support.hpp"

using namespace hida;
using namespace hida::test;

namespace
{

const Space L2 = Space::loop(2);
const Space CT = Space::cotangent();

DiagonalOperator lambda_table(std::map<int, Rational> table)
{
    return DiagonalOperator::from_table(std::move(table), {Rational(10), 1.0});
}

oracle::DenseFockVector dense(const ExactSeries &f, const std::shared_ptr<const oracle::DenseBasis> &basis)
{
    return oracle::DenseFockVector::from_sparse(f, basis);
}

} // namespace

TEST(OmegaInverse, Entries)
{
    const SymplecticModel m{LoopModel{}};
    EXPECT_EQ(omega_inverse_entry({1, 0}, {1, 1}, m), q(2));
    EXPECT_EQ(omega_inverse_entry({1, 1}, {1, 0}, m), q(-2));
    EXPECT_EQ(omega_inverse_entry({1, 0}, {2, 1}, m), q(0));
    const SymplecticModel c3{LoopModel{4, q(3), -1}};
    EXPECT_EQ(omega_inverse_entry({2, 2}, {2, 3}, c3), q(-13));
    EXPECT_THROW(omega_inverse_entry({1, 1}, {1, 2}, SymplecticModel{CotangentModel{}}), std::invalid_argument);
}

TEST(OmegaInverse, AntisymmetricAndBlockDiagonal)
{
    const SymplecticModel m{LoopModel{4, q(5, 2), 1}};
    for (int k = -3; k <= 3; ++k) {
        for (int i = 0; i < 4; ++i) {
            for (int k2 = -3; k2 <= 3; ++k2) {
                for (int i2 = 0; i2 < 4; ++i2) {
                    const BasisIndex a{k, i};
                    const BasisIndex b{k2, i2};
                    EXPECT_EQ(omega_inverse_entry(a, b, m), -omega_inverse_entry(b, a, m));
                    if (k != k2 || (i ^ 1) != i2) {
                        EXPECT_EQ(omega_inverse_entry(a, b, m), q(0));
                    }
                }
            }
        }
    }
}

TEST(LoopModel, Validation)
{
    EXPECT_THROW((LoopModel{3, q(1), 1}.validate()), std::invalid_argument);
    EXPECT_THROW((LoopModel{2, q(0), 1}.validate()), std::invalid_argument);
    EXPECT_THROW((LoopModel{2, q(1), 2}.validate()), std::invalid_argument);
}

TEST(Bracket, LoopExamples)
{
    const SymplecticModel m{LoopModel{}};
    const auto x = mono(L2, {{1, 0}});
    const auto p = mono(L2, {{1, 1}});
    EXPECT_EQ(poisson_bracket(x, p, m), constant(L2, q(2)));
    Sampler rng(5);
    const auto f = random_series(rng, L2, 3, 4, 10);
    EXPECT_TRUE(poisson_bracket(f, constant(L2), m).is_zero());

    const auto xx = mono(L2, {{1, 0}, {1, 0}});
    const auto b = poisson_bracket(xx, p, m);
    const auto basis = std::make_shared<const oracle::DenseBasis>(L2, 1, 3);
    EXPECT_EQ(b, oracle::bracket(dense(xx, basis), dense(p, basis), m).to_sparse());
    EXPECT_EQ(b, mono(L2, {{1, 0}}, q(4)));
}

TEST(Bracket, PoissonAxioms)
{
    for (std::uint64_t s = 0; s < 30; ++s) {
        Sampler rng(40 + s);
        const bool cot = s % 2 == 1;
        const Space space = cot ? CT : L2;
        const SymplecticModel m = cot ? SymplecticModel{CotangentModel{}} : SymplecticModel{LoopModel{2, q(3, 2), 1}};
        const auto f = random_series(rng, space, 3, 4, 20);
        const auto g = random_series(rng, space, 3, 4, 20);
        const auto h = random_series(rng, space, 3, 4, 20);
        auto br = [&](const ExactSeries &a, const ExactSeries &b) { return poisson_bracket(a, b, m); };
        EXPECT_EQ(br(f, g), scaled(br(g, f), q(-1)));
        EXPECT_TRUE((br(f, br(g, h)) + br(g, br(h, f)) + br(h, br(f, g))).is_zero());
        EXPECT_EQ(br(f, wick_product(g, h)), wick_product(br(f, g), h) + wick_product(g, br(f, h)));
        EXPECT_TRUE(br(constant(space), f).is_zero());
    }
}

TEST(Bracket, SigmaFlipNegates)
{
    Sampler rng(9);
    const auto f = random_series(rng, L2, 3, 4, 10);
    const auto g = random_series(rng, L2, 3, 4, 10);
    const SymplecticModel plus{LoopModel{2, q(1), 1}};
    const SymplecticModel minus{LoopModel{2, q(1), -1}};
    EXPECT_EQ(poisson_bracket(f, g, minus), scaled(poisson_bracket(f, g, plus), q(-1)));
}

TEST(Bracket, CotangentCanonicalForm)
{
    const SymplecticModel m{CotangentModel{}};
    EXPECT_EQ(poisson_bracket(mono(CT, {x(1)}), mono(CT, {y(1)}), m), constant(CT));
    EXPECT_EQ(poisson_bracket(mono(CT, {y(1)}), mono(CT, {x(1)}), m), constant(CT, q(-1)));
    EXPECT_TRUE(poisson_bracket(mono(CT, {x(1)}), mono(CT, {y(2)}), m).is_zero());
}

TEST(EForm, Examples)
{
    const auto A = lambda_table({{1, q(3)}});
    EXPECT_EQ(e_a_form(mono(CT, {x(1)}), mono(CT, {y(1)}), A), constant(CT, q(3)));
    Sampler rng(2);
    const auto g = random_series(rng, CT, 2, 3, 8);
    EXPECT_TRUE(e_a_form(constant(CT), g, A).is_zero());
    EXPECT_TRUE(e_a_form(g, constant(CT), A).is_zero());
    EXPECT_THROW(e_a_form(mono(L2, {{1, 0}}), mono(L2, {{1, 1}}), A), std::invalid_argument);
}

TEST(EForm, Symmetric)
{
    for (std::uint64_t s = 0; s < 20; ++s) {
        Sampler rng(60 + s);
        const auto A = random_diagonal(rng, 3);
        const auto f = random_series(rng, CT, 3, 4, 10);
        const auto g = random_series(rng, CT, 3, 4, 10);
        EXPECT_EQ(e_a_form(f, g, A), e_a_form(g, f, A));
    }
}

TEST(C1A, Examples)
{
    const auto A = lambda_table({{1, q(3)}});
    const CotangentModel m{A, 1};
    const auto f = mono(CT, {x(1)});
    const auto g = mono(CT, {y(1)});
    const auto basis = std::make_shared<const oracle::DenseBasis>(CT, 1, 2);
    const auto reference = oracle::c_r_a(dense(f, basis), dense(g, basis), 1, m).to_sparse();
    EXPECT_EQ(c1a(f, g, m), reference);
    EXPECT_EQ(c1a(f, g, m), constant(CT, q(4)));

    Sampler rng(8);
    const auto a = random_series(rng, CT, 2, 3, 8);
    const auto b = random_series(rng, CT, 2, 3, 8);
    EXPECT_EQ(c1a(a, b, CotangentModel{DiagonalOperator::zero(), 1}), poisson_bracket(a, b, SymplecticModel{CotangentModel{}}));
    EXPECT_TRUE(c1a(constant(CT), b, m).is_zero());
}

TEST(HPairing, Examples)
{
    const auto a = mono(CT, {x(1)});
    const auto b = mono(CT, {x(2)});
    const auto A = lambda_table({{1, q(3)}});
    EXPECT_EQ(h_pairing(a, a), ExactComplex(1));
    EXPECT_EQ(h_pairing(a, b), ExactComplex(0));
    EXPECT_EQ(h_pairing(a, a, &A), ExactComplex(4));
    EXPECT_THROW(h_pairing(constant(CT), a), std::invalid_argument);
}

TEST(DiagonalOperator, GrowthCertificate)
{
    EXPECT_THROW(DiagonalOperator::from_table({{2, q(5)}}, {q(2), 1.0}), std::domain_error);
    EXPECT_NO_THROW(DiagonalOperator::from_table({{2, q(4)}}, {q(2), 1.0}));
    EXPECT_THROW(DiagonalOperator::from_table({{0, q(1)}}, {q(2), 1.0}), std::invalid_argument);
    EXPECT_THROW(DiagonalOperator::from_formula(q(1), 2, {q(1), 1.0}), std::domain_error);
    const auto f = DiagonalOperator::from_formula(q(-1, 2), 1, {q(1), 1.0});
    EXPECT_EQ(f.eigenvalue(-4), q(2));
    EXPECT_EQ(lambda_table({{1, q(3)}}).eigenvalue(7), q(0));
    const auto half = DiagonalOperator::from_table({{4, q(2)}}, {q(1), 0.5});
    EXPECT_EQ(half.eigenvalue(4), q(2));
    EXPECT_THROW(DiagonalOperator::from_table({{4, q(3)}}, {q(1), 0.5}), std::domain_error);
}
