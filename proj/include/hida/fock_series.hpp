#ifndef HIDA_FOCK_SERIES_HPP
#define HIDA_FOCK_SERIES_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hida/basis.hpp"
#include "hida/scalar.hpp"

namespace hida
{

// Sparse Fock series F = sum_I b_I F^I.
//
// Terms are kept sorted by the lexicographic multiindex order and no stored
// coefficient is zero (FLOAT mode: modulus above the pruning threshold). With
// the normalization used throughout, F^I behaves as the monomial x^I: the Wick
// product is multiset union with coefficient one and the annihilation
// operator a_x acts as d/dx.
//
// An optional degree cap D means the series is known exactly up to degree D
// and carries no terms above it. Operations propagate the cap.
template <typename T>
class FockSeries
{
public:
    using scalar_type = T;
    using traits = ScalarTraits<T>;

    struct Term {
        MultiIndex index;
        T coeff;

        friend bool operator==(const Term &, const Term &) = default;
    };

    FockSeries() = default;
    explicit FockSeries(Space space) : m_space(space) {}

    static FockSeries constant(Space space, const T &c);
    static FockSeries monomial(Space space, MultiIndex index, const T &c = traits::from_int(1));

    // Adopts terms that are already sorted, unique and zero-free.
    static FockSeries from_sorted(Space space, std::vector<Term> terms, std::optional<int> cap = {});

    const Space &space() const { return m_space; }
    std::span<const Term> terms() const { return {m_terms.data(), m_terms.size()}; }
    std::size_t size() const { return m_terms.size(); }
    bool is_zero() const { return m_terms.empty(); }
    std::optional<int> degree_cap() const { return m_cap; }

    // Coefficient of F^I (zero if absent).
    T coefficient(const MultiIndex &index) const;

    // Largest / smallest term degree; -1 for the zero series.
    int max_degree() const;
    int min_degree() const;
    bool is_homogeneous(unsigned degree) const;

    // Drops terms above degree d and records d as the cap.
    FockSeries truncated(int d) const;
    // Removes the cap without touching terms.
    FockSeries uncapped() const;

    friend bool operator==(const FockSeries &a, const FockSeries &b)
    {
        return a.m_space == b.m_space && a.m_terms == b.m_terms;
    }

private:
    Space m_space;
    std::vector<Term> m_terms;
    std::optional<int> m_cap;
};

using ExactSeries = FockSeries<ExactComplex>;
using FloatSeries = FockSeries<FloatComplex>;

// Sorts, merges duplicates and prunes zeros. Throws std::invalid_argument if an
// index is invalid for the space or a term exceeds the cap.
template <typename T>
FockSeries<T> canonicalize(Space space, std::vector<std::pair<MultiIndex, T>> raw,
                           std::optional<int> cap = {}, double eps = default_float_epsilon);

template <typename T>
FockSeries<T> linear_combine(const T &alpha, const FockSeries<T> &f, const T &beta, const FockSeries<T> &g);

template <typename T>
FockSeries<T> operator+(const FockSeries<T> &f, const FockSeries<T> &g);
template <typename T>
FockSeries<T> operator-(const FockSeries<T> &f, const FockSeries<T> &g);
template <typename T>
FockSeries<T> scaled(const FockSeries<T> &f, const T &c);
template <typename T>
FockSeries<T> scaled(const FockSeries<T> &f, const Rational &q);

// :FG:, the coefficient convolution over multiset splittings.
template <typename T>
FockSeries<T> wick_product(const FockSeries<T> &f, const FockSeries<T> &g);

// a_a F: each F^I with multiplicity m of a becomes m F^{I - a}.
template <typename T>
FockSeries<T> annihilate(const FockSeries<T> &f, const BasisIndex &a);

// a_{s_1} ... a_{s_l} F, applied left to right.
template <typename T>
FockSeries<T> annihilate_seq(const FockSeries<T> &f, std::span<const BasisIndex> seq);

// sum_{m <= cap} xi^{:m:} / m! for a pure degree-one xi.
template <typename T>
FockSeries<T> wick_exponential(const FockSeries<T> &xi, int cap);

// Distinct basis indices occurring in any term, sorted.
template <typename T>
std::vector<BasisIndex> support_indices(const FockSeries<T> &f);

// Coefficientwise conversion to FLOAT (zeros after rounding are dropped).
FloatSeries to_float(const ExactSeries &f);

// Largest coefficient modulus, 0 for the zero series.
template <typename T>
double max_modulus(const FockSeries<T> &f);

template <typename T>
void require_same_space(const FockSeries<T> &f, const FockSeries<T> &g);

// Number of worker threads for data-parallel kernels: hardware concurrency,
// capped by HIDA_STAR_THREADS when set.
unsigned thread_count();

// Runs wick_product with an explicit thread count (results are identical for
// every count).
template <typename T>
FockSeries<T> wick_product_threads(const FockSeries<T> &f, const FockSeries<T> &g, unsigned threads);

extern template class FockSeries<ExactComplex>;
extern template class FockSeries<FloatComplex>;

} // namespace hida

#endif
