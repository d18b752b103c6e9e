#ifndef HIDA_DETAIL_ACCUMULATOR_HPP
#define HIDA_DETAIL_ACCUMULATOR_HPP

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "hida/fock_series.hpp"

namespace hida::detail
{

// Hash map from multiindex to coefficient. Summation order for a key is the
// insertion order, so single-threaded use is deterministic.
template <typename T>
class Accumulator
{
public:
    explicit Accumulator(Space space, std::optional<int> cap = {}) : m_space(space), m_cap(cap) {}

    void reserve(std::size_t n) { m_map.reserve(n); }

    void add(MultiIndex index, const T &c)
    {
        if (m_cap && static_cast<int>(index.degree()) > *m_cap) {
            return;
        }
        auto [it, inserted] = m_map.try_emplace(std::move(index), c);
        if (!inserted) {
            it->second += c;
        }
    }

    void add(const FockSeries<T> &f, const T &scale)
    {
        for (const auto &t : f.terms()) {
            T c = t.coeff;
            c *= scale;
            add(t.index, c);
        }
    }

    void add(const FockSeries<T> &f)
    {
        for (const auto &t : f.terms()) {
            add(t.index, t.coeff);
        }
    }

    std::size_t size() const { return m_map.size(); }

    // Moves non-zero entries out, unsorted.
    void drain(std::vector<typename FockSeries<T>::Term> &out, double eps = default_float_epsilon)
    {
        out.reserve(out.size() + m_map.size());
        for (auto &kv : m_map) {
            if (!ScalarTraits<T>::is_zero(kv.second, eps)) {
                out.push_back({std::move(const_cast<MultiIndex &>(kv.first)), std::move(kv.second)});
            }
        }
        m_map.clear();
    }

    FockSeries<T> finish(double eps = default_float_epsilon)
    {
        std::vector<typename FockSeries<T>::Term> terms;
        drain(terms, eps);
        std::sort(terms.begin(), terms.end(), [](const auto &a, const auto &b) { return a.index < b.index; });
        return FockSeries<T>::from_sorted(m_space, std::move(terms), m_cap);
    }

private:
    Space m_space;
    std::optional<int> m_cap;
    absl::flat_hash_map<MultiIndex, T, MultiIndexHash> m_map;
};

inline std::optional<int> min_cap(std::optional<int> a, std::optional<int> b)
{
    if (a && b) {
        return std::min(*a, *b);
    }
    return a ? a : b;
}

inline std::optional<int> lower_cap(std::optional<int> a, int by)
{
    if (a) {
        return *a - by;
    }
    return a;
}

} // namespace hida::detail

#endif
