#include "hida/basis.hpp"

#include <algorithm>
#include <stdexcept>

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

std::uint64_t basis_hash(const BasisIndex &a)
{
    const auto k = static_cast<std::uint32_t>(a.k);
    const auto i = static_cast<std::uint32_t>(a.i);
    return splitmix64((static_cast<std::uint64_t>(k) << 32) | i);
}

std::string to_string(const BasisIndex &a)
{
    return "(" + std::to_string(a.k) + "," + std::to_string(a.i) + ")";
}

std::string_view to_string(ModelKind kind)
{
    return kind == ModelKind::loop ? "loop" : "cotangent";
}

ModelKind parse_model_kind(std::string_view text)
{
    if (text == "loop") {
        return ModelKind::loop;
    }
    if (text == "cotangent") {
        return ModelKind::cotangent;
    }
    throw std::invalid_argument("unknown model '" + std::string(text) + "'");
}

void Space::validate() const
{
    if (kind == ModelKind::loop && (dimension < 2 || dimension % 2 != 0)) {
        throw std::invalid_argument("loop model dimension must be even and >= 2, got "
                                    + std::to_string(dimension));
    }
    if (kind == ModelKind::cotangent && dimension != 2) {
        throw std::invalid_argument("cotangent model has exactly two sides, got dimension "
                                    + std::to_string(dimension));
    }
}

void Space::validate(const BasisIndex &a) const
{
    if (kind == ModelKind::loop) {
        if (a.i < 0 || a.i >= dimension) {
            throw std::invalid_argument("direction index out of range in " + to_string(a)
                                        + " (n = " + std::to_string(dimension) + ")");
        }
    } else {
        if (a.i != 1 && a.i != 2) {
            throw std::invalid_argument("cotangent side must be 1 or 2 in " + to_string(a));
        }
        if (a.k == 0) {
            throw std::invalid_argument("cotangent mode number must be nonzero in " + to_string(a));
        }
    }
}

MultiIndex::MultiIndex(std::initializer_list<BasisIndex> indices)
    : MultiIndex(from_indices(std::span<const BasisIndex>(indices.begin(), indices.size())))
{
}

MultiIndex MultiIndex::from_indices(std::span<const BasisIndex> indices)
{
    std::vector<BasisIndex> sorted(indices.begin(), indices.end());
    std::sort(sorted.begin(), sorted.end());
    MultiIndex out;
    for (const auto &a : sorted) {
        if (!out.m_entries.empty() && out.m_entries.back().index == a) {
            ++out.m_entries.back().mult;
        } else {
            out.m_entries.push_back({a, 1});
        }
        ++out.m_degree;
        out.m_hash += basis_hash(a);
    }
    return out;
}

MultiIndex MultiIndex::from_canonical(std::span<const IndexPower> entries)
{
    MultiIndex out;
    for (std::size_t n = 0; n < entries.size(); ++n) {
        const auto &e = entries[n];
        if (e.mult == 0) {
            throw std::invalid_argument("zero multiplicity for " + to_string(e.index));
        }
        if (n > 0 && !(entries[n - 1].index < e.index)) {
            throw std::invalid_argument("non-canonical index list: " + to_string(entries[n - 1].index)
                                        + " is not strictly before " + to_string(e.index));
        }
        out.m_entries.push_back(e);
        out.m_degree += e.mult;
        out.m_hash += e.mult * basis_hash(e.index);
    }
    return out;
}

MultiIndex MultiIndex::power(BasisIndex a, std::uint32_t m)
{
    MultiIndex out;
    if (m > 0) {
        out.m_entries.push_back({a, m});
        out.m_degree = m;
        out.m_hash = m * basis_hash(a);
    }
    return out;
}

std::uint32_t MultiIndex::multiplicity(BasisIndex a) const
{
    auto it = std::lower_bound(m_entries.begin(), m_entries.end(), a,
                               [](const IndexPower &e, const BasisIndex &b) { return e.index < b; });
    return (it != m_entries.end() && it->index == a) ? it->mult : 0;
}

MultiIndex MultiIndex::without(BasisIndex a) const
{
    MultiIndex out = *this;
    auto it = std::lower_bound(out.m_entries.begin(), out.m_entries.end(), a,
                               [](const IndexPower &e, const BasisIndex &b) { return e.index < b; });
    if (it == out.m_entries.end() || it->index != a) {
        throw std::logic_error("MultiIndex::without: index " + to_string(a) + " not present");
    }
    if (--it->mult == 0) {
        out.m_entries.erase(it);
    }
    --out.m_degree;
    out.m_hash -= basis_hash(a);
    return out;
}

MultiIndex MultiIndex::with(BasisIndex a, std::uint32_t m) const
{
    MultiIndex out = *this;
    if (m == 0) {
        return out;
    }
    auto it = std::lower_bound(out.m_entries.begin(), out.m_entries.end(), a,
                               [](const IndexPower &e, const BasisIndex &b) { return e.index < b; });
    if (it != out.m_entries.end() && it->index == a) {
        it->mult += m;
    } else {
        out.m_entries.insert(it, IndexPower{a, m});
    }
    out.m_degree += m;
    out.m_hash += m * basis_hash(a);
    return out;
}

MultiIndex merge(const MultiIndex &a, const MultiIndex &b)
{
    MultiIndex out;
    out.m_entries.reserve(a.m_entries.size() + b.m_entries.size());
    auto i = a.m_entries.begin();
    auto j = b.m_entries.begin();
    while (i != a.m_entries.end() && j != b.m_entries.end()) {
        if (i->index < j->index) {
            out.m_entries.push_back(*i++);
        } else if (j->index < i->index) {
            out.m_entries.push_back(*j++);
        } else {
            out.m_entries.push_back({i->index, i->mult + j->mult});
            ++i;
            ++j;
        }
    }
    out.m_entries.insert(out.m_entries.end(), i, a.m_entries.end());
    out.m_entries.insert(out.m_entries.end(), j, b.m_entries.end());
    out.m_degree = a.m_degree + b.m_degree;
    out.m_hash = a.m_hash + b.m_hash;
    return out;
}

std::strong_ordering operator<=>(const MultiIndex &a, const MultiIndex &b)
{
    const auto &ea = a.m_entries;
    const auto &eb = b.m_entries;
    std::size_t i = 0;
    std::size_t j = 0;
    std::uint32_t ra = ea.empty() ? 0 : ea[0].mult;
    std::uint32_t rb = eb.empty() ? 0 : eb[0].mult;
    while (i < ea.size() && j < eb.size()) {
        if (ea[i].index != eb[j].index) {
            return ea[i].index <=> eb[j].index;
        }
        const auto common = std::min(ra, rb);
        ra -= common;
        rb -= common;
        if (ra == 0 && ++i < ea.size()) {
            ra = ea[i].mult;
        }
        if (rb == 0 && ++j < eb.size()) {
            rb = eb[j].mult;
        }
    }
    return (i < ea.size()) <=> (j < eb.size());
}

std::string to_string(const MultiIndex &m)
{
    if (m.empty()) {
        return "()";
    }
    std::string out = "(";
    bool first = true;
    for (const auto &e : m.entries()) {
        if (!first) {
            out += ",";
        }
        first = false;
        out += to_string(e.index);
        if (e.mult != 1) {
            out += "^" + std::to_string(e.mult);
        }
    }
    return out + ")";
}

} // namespace hida
