#include "hida/random.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "hida/detail/accumulator.hpp"

namespace hida
{

namespace
{

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

Sampler Sampler::substream(std::uint64_t seed, std::uint64_t i)
{
    return Sampler(splitmix64(splitmix64(seed) ^ splitmix64(i + 0x632be59bd9b4e019ULL)));
}

long Sampler::uniform(long lo, long hi)
{
    if (hi < lo) {
        throw std::invalid_argument("Sampler::uniform: empty range");
    }
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<long>(next() % span);
}

double Sampler::unit()
{
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

BasisIndex Sampler::basis_index(const Space &space, int kmax)
{
    if (space.kind == ModelKind::loop) {
        return {static_cast<int>(uniform(-kmax, kmax)), static_cast<int>(uniform(0, space.dimension - 1))};
    }
    if (kmax < 1) {
        throw std::invalid_argument("cotangent sampling needs kmax >= 1");
    }
    long k = uniform(1, kmax);
    if (uniform(0, 1) == 1) {
        k = -k;
    }
    return {static_cast<int>(k), static_cast<int>(uniform(1, 2))};
}

MultiIndex Sampler::multi_index(const Space &space, int kmax, int degree)
{
    std::vector<BasisIndex> picks;
    for (int j = 0; j < degree; ++j) {
        picks.push_back(basis_index(space, kmax));
    }
    return MultiIndex::from_indices(picks);
}

Rational Sampler::rational(long range)
{
    Rational q(uniform(-range, range), uniform(1, 3));
    q.canonicalize();
    return q;
}

ExactSeries random_exact_series(Sampler &rng, const RandomSeriesSpec &spec)
{
    const long terms = rng.uniform(1, spec.max_terms);
    std::vector<std::pair<MultiIndex, ExactComplex>> raw;
    for (long t = 0; t < terms; ++t) {
        const int degree = static_cast<int>(rng.uniform(spec.min_degree, spec.max_degree));
        auto index = rng.multi_index(spec.space, spec.kmax, degree);
        ExactComplex c(rng.rational());
        if (spec.complex) {
            c.im = rng.rational();
        }
        raw.emplace_back(std::move(index), std::move(c));
    }
    return canonicalize(spec.space, std::move(raw));
}

FloatSeries hida_decay_series(Sampler &rng, const Space &space, int kmax, int max_degree, std::size_t terms)
{
    // Inverse-CDF table for |k| with weights (k^2 + 1)^{-1}, then a random sign.
    std::vector<double> cdf;
    double total = 0.0;
    for (int k = -kmax; k <= kmax; ++k) {
        if (space.kind == ModelKind::cotangent && k == 0) {
            cdf.push_back(total);
            continue;
        }
        total += 1.0 / (static_cast<double>(k) * k + 1.0);
        cdf.push_back(total);
    }
    auto draw_k = [&]() {
        const double u = rng.unit() * total;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        return static_cast<int>(it - cdf.begin()) - kmax;
    };
    auto draw_index = [&]() -> BasisIndex {
        const int k = draw_k();
        if (space.kind == ModelKind::loop) {
            return {k, static_cast<int>(rng.uniform(0, space.dimension - 1))};
        }
        return {k, static_cast<int>(rng.uniform(1, 2))};
    };

    std::map<MultiIndex, FloatComplex> chosen;
    std::size_t attempts = 0;
    while (chosen.size() < terms) {
        if (++attempts > 100 * terms + 1000) {
            throw std::invalid_argument("hida_decay_series: cannot find enough distinct multiindices");
        }
        const int degree = static_cast<int>(rng.uniform(1, max_degree));
        std::vector<BasisIndex> picks;
        for (int j = 0; j < degree; ++j) {
            picks.push_back(draw_index());
        }
        const double re = 2.0 * rng.unit() - 1.0;
        if (re == 0.0) {
            continue;
        }
        chosen.emplace(MultiIndex::from_indices(picks), FloatComplex(re, 0.0));
    }
    std::vector<FloatSeries::Term> out;
    out.reserve(chosen.size());
    for (auto &[index, c] : chosen) {
        out.push_back({index, c});
    }
    return FloatSeries::from_sorted(space, std::move(out));
}

FloatSeries leading_weight_series(Sampler &rng, const Space &space, int kmax, int max_degree, std::size_t terms)
{
    std::vector<BasisIndex> basis;
    for (int k = -kmax; k <= kmax; ++k) {
        if (space.kind == ModelKind::loop) {
            for (int i = 0; i < space.dimension; ++i) {
                basis.push_back({k, i});
            }
        } else if (k != 0) {
            basis.push_back({k, 1});
            basis.push_back({k, 2});
        }
    }
    auto weight = [](const BasisIndex &a) { return static_cast<long>(a.k) * a.k + 1; };
    std::sort(basis.begin(), basis.end(), [&](const auto &x, const auto &y) {
        return std::pair(weight(x), x) < std::pair(weight(y), y);
    });

    // Collect every multiindex with weight <= bound, doubling the bound
    // until there are enough of them.
    std::vector<std::pair<long, MultiIndex>> found;
    for (long bound = 2;; bound *= 2) {
        found.clear();
        std::vector<BasisIndex> current;
        std::function<void(std::size_t, long)> rec = [&](std::size_t from, long w) {
            found.emplace_back(w, MultiIndex::from_indices(current));
            if (static_cast<int>(current.size()) == max_degree) {
                return;
            }
            for (std::size_t j = from; j < basis.size(); ++j) {
                const long next = w * weight(basis[j]);
                if (next > bound) {
                    break;
                }
                current.push_back(basis[j]);
                rec(j, next);
                current.pop_back();
            }
        };
        rec(0, 1);
        if (found.size() >= terms || bound > (1L << 40)) {
            break;
        }
    }
    if (found.size() < terms) {
        throw std::invalid_argument("leading_weight_series: fewer than " + std::to_string(terms)
                                    + " multiindices available");
    }
    std::sort(found.begin(), found.end());
    found.resize(terms);
    std::sort(found.begin(), found.end(), [](const auto &x, const auto &y) { return x.second < y.second; });
    std::vector<FloatSeries::Term> out;
    out.reserve(terms);
    for (auto &[w, index] : found) {
        double re = 0.0;
        while (re == 0.0) {
            re = 2.0 * rng.unit() - 1.0;
        }
        out.push_back({std::move(index), FloatComplex(re, 0.0)});
    }
    return FloatSeries::from_sorted(space, std::move(out));
}

DiagonalOperator random_diagonal(Sampler &rng, int kmax)
{
    std::map<int, Rational> table;
    for (int m = -kmax; m <= kmax; ++m) {
        if (m == 0) {
            continue;
        }
        Rational q(rng.uniform(-3 * std::abs(m), 3 * std::abs(m)), 3);
        q.canonicalize();
        table.emplace(m, q);
    }
    return DiagonalOperator::from_table(std::move(table), {Rational(1), 1.0});
}

} // namespace hida
