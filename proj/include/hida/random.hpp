#ifndef HIDA_RANDOM_HPP
#define HIDA_RANDOM_HPP

#include <cstdint>
#include <random>

#include "hida/fock_series.hpp"
#include "hida/symplectic.hpp"

namespace hida
{

// Reproducible draws from a seed. Integers and reals are mapped from raw
// mt19937_64 output by fixed formulas, so streams agree across standard
// libraries.
class Sampler
{
public:
    explicit Sampler(std::uint64_t seed) : m_engine(seed) {}

    // Independent stream for sample number i of a run seeded with seed.
    static Sampler substream(std::uint64_t seed, std::uint64_t i);

    std::uint64_t next() { return m_engine(); }
    // Uniform on [lo, hi].
    long uniform(long lo, long hi);
    // Uniform on [0, 1).
    double unit();

    // Index with |k| <= kmax (k != 0 on the cotangent model).
    BasisIndex basis_index(const Space &space, int kmax);
    MultiIndex multi_index(const Space &space, int kmax, int degree);
    // p/q with p in [-range, range], q in [1, 3].
    Rational rational(long range = 5);

private:
    std::mt19937_64 m_engine;
};

struct RandomSeriesSpec {
    Space space = Space::loop(2);
    int kmax = 3;
    int min_degree = 0;
    int max_degree = 3;
    int max_terms = 10;
    // Also draw imaginary parts.
    bool complex = false;
};

ExactSeries random_exact_series(Sampler &rng, const RandomSeriesSpec &spec);

// FLOAT series with exactly `terms` distinct multiindices of degree in
// [1, max_degree]. Mode numbers follow P(k) ~ (k^2 + 1)^{-1} on |k| <= kmax,
// the decay profile of elements of the Hida test space; coefficients are
// uniform on [-1, 1).
FloatSeries hida_decay_series(Sampler &rng, const Space &space, int kmax, int max_degree, std::size_t terms);

// FLOAT series supported on the `terms` multiindices of degree <= max_degree
// and |k| <= kmax with the smallest Hida weight prod (k^2 + 1) (ties in
// lexicographic order): the leading part of a Hida test function.
// Coefficients are uniform on [-1, 1).
FloatSeries leading_weight_series(Sampler &rng, const Space &space, int kmax, int max_degree, std::size_t terms);

// Rational eigenvalues with |lambda_m| <= |m| for 1 <= |m| <= kmax.
DiagonalOperator random_diagonal(Sampler &rng, int kmax);

} // namespace hida

#endif
