#ifndef HIDA_TESTS_SUPPORT_HPP
#define HIDA_TESTS_SUPPORT_HPP

#include <initializer_list>
#include <utility>
#include <vector>

#include "hida/fock_series.hpp"
#include "hida/random.hpp"

namespace hida::test
{

inline Rational q(long p, long d = 1)
{
    Rational r(p, d);
    r.canonicalize();
    return r;
}

inline ExactSeries mono(const Space &space, std::initializer_list<BasisIndex> index, Rational c = 1)
{
    return ExactSeries::monomial(space, MultiIndex(index), ExactComplex(std::move(c)));
}

inline ExactSeries constant(const Space &space, Rational c = 1)
{
    return ExactSeries::constant(space, ExactComplex(std::move(c)));
}

inline ExactSeries series(const Space &space, std::vector<std::pair<MultiIndex, Rational>> terms)
{
    std::vector<std::pair<MultiIndex, ExactComplex>> raw;
    for (auto &[index, c] : terms) {
        raw.emplace_back(std::move(index), ExactComplex(std::move(c)));
    }
    return canonicalize(space, std::move(raw));
}

inline ExactSeries random_series(Sampler &rng, const Space &space, int kmax, int max_degree, int max_terms,
                                 int min_degree = 0)
{
    RandomSeriesSpec spec;
    spec.space = space;
    spec.kmax = kmax;
    spec.min_degree = min_degree;
    spec.max_degree = max_degree;
    spec.max_terms = max_terms;
    spec.complex = rng.uniform(0, 2) == 0;
    return random_exact_series(rng, spec);
}

// Cotangent directions: x_k on side 1, y_k on side 2.
inline BasisIndex x(int k)
{
    return {k, 1};
}
inline BasisIndex y(int k)
{
    return {k, 2};
}

} // namespace hida::test

#endif
