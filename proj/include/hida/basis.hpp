#ifndef HIDA_BASIS_HPP
#define HIDA_BASIS_HPP

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace hida
{

// Label of one orthonormal basis direction.
//
// Loop model: k is the Fourier frequency (any sign) and i the direction in
// R^n, 0 <= i < n. Cotangent model: k is the nonzero mode number and i the
// side, 1 for H and 2 for H*.
struct BasisIndex {
    std::int32_t k = 0;
    std::int32_t i = 0;

    friend auto operator<=>(const BasisIndex &, const BasisIndex &) = default;
};

std::string to_string(const BasisIndex &a);

enum class ModelKind { loop, cotangent };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

// The space a series lives in: which model, and the direction count n.
struct Space {
    ModelKind kind = ModelKind::loop;
    int dimension = 2;

    static Space loop(int n = 2) { return {ModelKind::loop, n}; }
    static Space cotangent() { return {ModelKind::cotangent, 2}; }

    // Throws std::invalid_argument naming the offending index.
    void validate(const BasisIndex &a) const;
    void validate() const;

    friend bool operator==(const Space &, const Space &) = default;
};

struct IndexPower {
    BasisIndex index;
    std::uint32_t mult = 0;

    friend bool operator==(const IndexPower &, const IndexPower &) = default;
};

// Canonical multiset of basis indices, stored as strictly increasing
// (index, multiplicity) pairs. The cached hash is additive over multiset
// union, so the hash of a Wick product key is the sum of the factors' hashes.
class MultiIndex
{
public:
    using storage_type = boost::container::small_vector<IndexPower, 6>;

    MultiIndex() = default;

    // Builds from an arbitrary list of indices (sorted and merged).
    MultiIndex(std::initializer_list<BasisIndex> indices);
    static MultiIndex from_indices(std::span<const BasisIndex> indices);

    // Builds from already-canonical (index, multiplicity) pairs. Throws
    // std::invalid_argument if the pairs are unsorted, duplicated or have a
    // zero multiplicity.
    static MultiIndex from_canonical(std::span<const IndexPower> entries);

    // x^m for a single index.
    static MultiIndex power(BasisIndex a, std::uint32_t m);

    std::span<const IndexPower> entries() const { return {m_entries.data(), m_entries.size()}; }
    bool empty() const { return m_entries.empty(); }
    std::uint32_t degree() const { return m_degree; }
    std::uint64_t hash() const { return m_hash; }

    std::uint32_t multiplicity(BasisIndex a) const;

    // Removes one copy of a. Precondition: multiplicity(a) > 0.
    MultiIndex without(BasisIndex a) const;
    MultiIndex with(BasisIndex a, std::uint32_t m = 1) const;

    // Multiset union.
    friend MultiIndex merge(const MultiIndex &a, const MultiIndex &b);

    // Lexicographic order of the flattened (repeated) index sequences.
    friend std::strong_ordering operator<=>(const MultiIndex &a, const MultiIndex &b);
    friend bool operator==(const MultiIndex &a, const MultiIndex &b)
    {
        return a.m_hash == b.m_hash && a.m_degree == b.m_degree && a.m_entries == b.m_entries;
    }

private:
    storage_type m_entries;
    std::uint32_t m_degree = 0;
    std::uint64_t m_hash = 0;
};

std::string to_string(const MultiIndex &m);

// Hash contribution of a single copy of a basis index.
std::uint64_t basis_hash(const BasisIndex &a);

struct MultiIndexHash {
    std::size_t operator()(const MultiIndex &m) const { return static_cast<std::size_t>(m.hash()); }
};

} // namespace hida

#endif
