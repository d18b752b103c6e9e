#include "hida/fock_series.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <type_traits>

#include "hida/detail/accumulator.hpp"

namespace hida
{

using detail::Accumulator;
using detail::lower_cap;
using detail::min_cap;

unsigned thread_count()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("HIDA_STAR_THREADS")) {
        char *end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap > 0) {
            n = std::min<unsigned>(n, static_cast<unsigned>(cap));
        }
    }
    return n;
}

template <typename T>
FockSeries<T> FockSeries<T>::constant(Space space, const T &c)
{
    return monomial(space, MultiIndex{}, c);
}

template <typename T>
FockSeries<T> FockSeries<T>::monomial(Space space, MultiIndex index, const T &c)
{
    for (const auto &e : index.entries()) {
        space.validate(e.index);
    }
    FockSeries out(space);
    if (!traits::is_zero(c)) {
        out.m_terms.push_back({std::move(index), c});
    }
    return out;
}

template <typename T>
FockSeries<T> FockSeries<T>::from_sorted(Space space, std::vector<Term> terms, std::optional<int> cap)
{
    FockSeries out(space);
    out.m_terms = std::move(terms);
    out.m_cap = cap;
    return out;
}

template <typename T>
T FockSeries<T>::coefficient(const MultiIndex &index) const
{
    auto it = std::lower_bound(m_terms.begin(), m_terms.end(), index,
                               [](const Term &t, const MultiIndex &i) { return t.index < i; });
    if (it != m_terms.end() && it->index == index) {
        return it->coeff;
    }
    return traits::from_int(0);
}

template <typename T>
int FockSeries<T>::max_degree() const
{
    int d = -1;
    for (const auto &t : m_terms) {
        d = std::max(d, static_cast<int>(t.index.degree()));
    }
    return d;
}

template <typename T>
int FockSeries<T>::min_degree() const
{
    if (m_terms.empty()) {
        return -1;
    }
    int d = static_cast<int>(m_terms.front().index.degree());
    for (const auto &t : m_terms) {
        d = std::min(d, static_cast<int>(t.index.degree()));
    }
    return d;
}

template <typename T>
bool FockSeries<T>::is_homogeneous(unsigned degree) const
{
    return std::all_of(m_terms.begin(), m_terms.end(), [&](const Term &t) { return t.index.degree() == degree; });
}

template <typename T>
FockSeries<T> FockSeries<T>::truncated(int d) const
{
    FockSeries out(m_space);
    out.m_cap = m_cap ? std::min(*m_cap, d) : d;
    for (const auto &t : m_terms) {
        if (static_cast<int>(t.index.degree()) <= *out.m_cap) {
            out.m_terms.push_back(t);
        }
    }
    return out;
}

template <typename T>
FockSeries<T> FockSeries<T>::uncapped() const
{
    FockSeries out = *this;
    out.m_cap.reset();
    return out;
}

template <typename T>
void require_same_space(const FockSeries<T> &f, const FockSeries<T> &g)
{
    if (!(f.space() == g.space())) {
        throw std::invalid_argument("operands live in different spaces (" + std::string(to_string(f.space().kind))
                                    + "/" + std::to_string(f.space().dimension) + " vs "
                                    + std::string(to_string(g.space().kind)) + "/"
                                    + std::to_string(g.space().dimension) + ")");
    }
}

template <typename T>
FockSeries<T> canonicalize(Space space, std::vector<std::pair<MultiIndex, T>> raw, std::optional<int> cap, double eps)
{
    space.validate();
    for (const auto &[index, c] : raw) {
        for (const auto &e : index.entries()) {
            space.validate(e.index);
        }
        if (cap && static_cast<int>(index.degree()) > *cap) {
            throw std::invalid_argument("degree-cap overflow: term " + to_string(index) + " has degree "
                                        + std::to_string(index.degree()) + " > cap " + std::to_string(*cap));
        }
    }
    Accumulator<T> acc(space, cap);
    acc.reserve(raw.size());
    for (auto &[index, c] : raw) {
        acc.add(std::move(index), c);
    }
    return acc.finish(eps);
}

template <typename T>
FockSeries<T> linear_combine(const T &alpha, const FockSeries<T> &f, const T &beta, const FockSeries<T> &g)
{
    require_same_space(f, g);
    Accumulator<T> acc(f.space(), min_cap(f.degree_cap(), g.degree_cap()));
    acc.reserve(f.size() + g.size());
    acc.add(f, alpha);
    acc.add(g, beta);
    return acc.finish();
}

template <typename T>
FockSeries<T> operator+(const FockSeries<T> &f, const FockSeries<T> &g)
{
    const T one = ScalarTraits<T>::from_int(1);
    return linear_combine(one, f, one, g);
}

template <typename T>
FockSeries<T> operator-(const FockSeries<T> &f, const FockSeries<T> &g)
{
    return linear_combine(ScalarTraits<T>::from_int(1), f, ScalarTraits<T>::from_int(-1), g);
}

template <typename T>
FockSeries<T> scaled(const FockSeries<T> &f, const T &c)
{
    std::vector<typename FockSeries<T>::Term> terms;
    if (!ScalarTraits<T>::is_zero(c)) {
        terms.reserve(f.size());
        for (const auto &t : f.terms()) {
            T v = t.coeff;
            v *= c;
            if (!ScalarTraits<T>::is_zero(v)) {
                terms.push_back({t.index, std::move(v)});
            }
        }
    }
    return FockSeries<T>::from_sorted(f.space(), std::move(terms), f.degree_cap());
}

FloatSeries to_float(const ExactSeries &f)
{
    std::vector<FloatSeries::Term> terms;
    terms.reserve(f.size());
    for (const auto &t : f.terms()) {
        const FloatComplex c = ScalarTraits<ExactComplex>::to_float(t.coeff);
        if (c != FloatComplex{}) {
            terms.push_back({t.index, c});
        }
    }
    return FloatSeries::from_sorted(f.space(), std::move(terms), f.degree_cap());
}

template <typename T>
FockSeries<T> scaled(const FockSeries<T> &f, const Rational &q)
{
    return scaled(f, ScalarTraits<T>::from_rational(q));
}

namespace
{

// Accumulates every product term whose key hash falls in the given shard.
// Each shard visits pairs in row-major order, so the summation order of any
// output coefficient does not depend on how many shards are used.
template <typename T>
void wick_shard(const FockSeries<T> &f, const FockSeries<T> &g, std::optional<int> cap, unsigned shard,
                unsigned shards, std::vector<typename FockSeries<T>::Term> &out)
{
    Accumulator<T> acc(f.space(), cap);
    if (shards == 1) {
        acc.reserve(std::min<std::size_t>(f.size() * g.size(), std::size_t{1} << 22));
    }
    for (const auto &a : f.terms()) {
        const auto ha = a.index.hash();
        for (const auto &b : g.terms()) {
            if (shards > 1 && ((ha + b.index.hash()) >> 40) % shards != shard) {
                continue;
            }
            if (cap && static_cast<int>(a.index.degree() + b.index.degree()) > *cap) {
                continue;
            }
            T c = a.coeff;
            c *= b.coeff;
            acc.add(merge(a.index, b.index), c);
        }
    }
    acc.drain(out);
}

template <typename T>
FockSeries<T> wick_generic(const FockSeries<T> &f, const FockSeries<T> &g, std::optional<int> cap, unsigned threads)
{
    std::vector<std::vector<typename FockSeries<T>::Term>> parts(threads);
    if (threads == 1) {
        wick_shard(f, g, cap, 0, 1, parts[0]);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned s = 0; s < threads; ++s) {
            pool.emplace_back([&, s] { wick_shard(f, g, cap, s, threads, parts[s]); });
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    std::vector<typename FockSeries<T>::Term> terms;
    std::size_t total = 0;
    for (const auto &p : parts) {
        total += p.size();
    }
    terms.reserve(total);
    for (auto &p : parts) {
        std::move(p.begin(), p.end(), std::back_inserter(terms));
    }
    std::sort(terms.begin(), terms.end(), [](const auto &x, const auto &y) { return x.index < y.index; });
    return FockSeries<T>::from_sorted(f.space(), std::move(terms), cap);
}

// FLOAT kernel. Products are keyed by a 128-bit additive fingerprint of the
// multiset (two independent sums of per-index hashes), so a pair costs two
// additions and one table probe; the multiindex itself is merged once per
// distinct output from a representative pair. Shards partition the keys by
// the top bits of the first hash. With g sorted by that hash, the pairs of
// one row that fall in a shard are a contiguous run of the rotated order, so
// a per-row cursor walks each row once across all shards. The visiting order
// (rows in order, then rotated hash order) depends on the inputs alone.
struct Fingerprint {
    std::uint64_t h1;
    std::uint64_t h2;

    friend bool operator==(const Fingerprint &, const Fingerprint &) = default;
};

struct FingerprintHash {
    std::size_t operator()(const Fingerprint &k) const { return static_cast<std::size_t>(k.h1 ^ (k.h2 >> 17)); }
};

std::uint64_t second_hash(const MultiIndex &m)
{
    std::uint64_t h = 0;
    for (const auto &e : m.entries()) {
        std::uint64_t x = basis_hash(e.index) ^ 0xd6e8feb86659fd93ULL;
        x = (x ^ (x >> 32)) * 0xd6e8feb86659fd93ULL;
        x = (x ^ (x >> 32)) * 0xd6e8feb86659fd93ULL;
        h += e.mult * (x ^ (x >> 32));
    }
    return h;
}

struct Representative {
    std::uint32_t row;
    std::uint32_t col;
    FloatComplex coeff;
};

// Product multiindices written as up to 16 flattened support ranks (1-based,
// zero-padded) packed big-endian into four words. Comparing the words
// lexicographically is the multiindex order.
struct SortItem {
    std::array<std::uint64_t, 4> words;
    std::uint32_t rep;

    friend bool operator<(const SortItem &x, const SortItem &y)
    {
        if (x.words[0] != y.words[0]) {
            return x.words[0] < y.words[0];
        }
        if (x.words[1] != y.words[1]) {
            return x.words[1] < y.words[1];
        }
        if (x.words[2] != y.words[2]) {
            return x.words[2] < y.words[2];
        }
        return x.words[3] < y.words[3];
    }
};

class SortKeys
{
public:
    template <typename Term>
    static std::optional<SortKeys> build(std::span<const Term> f, std::span<const Term> g)
    {
        std::vector<BasisIndex> support;
        for (const auto *side : {&f, &g}) {
            for (const auto &t : *side) {
                for (const auto &e : t.index.entries()) {
                    support.push_back(e.index);
                }
            }
        }
        std::sort(support.begin(), support.end());
        support.erase(std::unique(support.begin(), support.end()), support.end());
        if (support.size() >= 0xffff) {
            return std::nullopt;
        }
        SortKeys keys;
        auto flatten = [&](std::span<const Term> terms, std::vector<std::uint16_t> &ids,
                           std::vector<std::uint32_t> &offsets) {
            offsets.push_back(0);
            for (const auto &t : terms) {
                for (const auto &e : t.index.entries()) {
                    const auto rank =
                        std::lower_bound(keys.m_support.begin(), keys.m_support.end(), e.index) - keys.m_support.begin();
                    ids.insert(ids.end(), e.mult, static_cast<std::uint16_t>(rank + 1));
                }
                offsets.push_back(static_cast<std::uint32_t>(ids.size()));
            }
        };
        keys.m_support = std::move(support);
        keys.m_lead = 1;
        const std::size_t radix = keys.m_support.size() + 1;
        for (std::size_t n = radix; radix > 1 && n * radix <= (std::size_t{1} << 16); n *= radix) {
            ++keys.m_lead;
        }
        flatten(f, keys.m_fids, keys.m_foff);
        flatten(g, keys.m_gids, keys.m_goff);
        std::size_t fmax = 0;
        std::size_t gmax = 0;
        for (std::size_t i = 0; i + 1 < keys.m_foff.size(); ++i) {
            fmax = std::max<std::size_t>(fmax, keys.m_foff[i + 1] - keys.m_foff[i]);
        }
        for (std::size_t j = 0; j + 1 < keys.m_goff.size(); ++j) {
            gmax = std::max<std::size_t>(gmax, keys.m_goff[j + 1] - keys.m_goff[j]);
        }
        if (fmax + gmax > 16) {
            return std::nullopt;
        }
        return keys;
    }

    SortItem item(std::uint32_t row, std::uint32_t col, std::uint32_t rep) const
    {
        std::array<std::uint16_t, 16> ids{};
        std::merge(m_fids.begin() + m_foff[row], m_fids.begin() + m_foff[row + 1], m_gids.begin() + m_goff[col],
                   m_gids.begin() + m_goff[col + 1], ids.begin());
        SortItem out{{}, rep};
        for (std::size_t q = 0; q < 4; ++q) {
            for (std::size_t t = 0; t < 4; ++t) {
                out.words[q] = (out.words[q] << 16) | ids[4 * q + t];
            }
        }
        return out;
    }

    // Buckets keyed by the first few ranks of the product index (0 past its
    // end); bucket order agrees with item order.
    std::size_t buckets() const
    {
        std::size_t n = 1;
        for (int t = 0; t < m_lead; ++t) {
            n *= m_support.size() + 1;
        }
        return n;
    }

    std::size_t bucket(std::uint32_t row, std::uint32_t col) const
    {
        std::size_t i = m_foff[row];
        std::size_t j = m_goff[col];
        const std::size_t ie = m_foff[row + 1];
        const std::size_t je = m_goff[col + 1];
        std::size_t key = 0;
        for (int t = 0; t < m_lead; ++t) {
            std::uint16_t id = 0;
            if (i < ie && (j == je || m_fids[i] <= m_gids[j])) {
                id = m_fids[i++];
            } else if (j < je) {
                id = m_gids[j++];
            }
            key = key * (m_support.size() + 1) + id;
        }
        return key;
    }

    MultiIndex index(const SortItem &item) const
    {
        std::array<IndexPower, 16> entries;
        std::size_t n = 0;
        std::uint16_t last = 0;
        for (const std::uint64_t w : item.words) {
            for (int shift = 48; shift >= 0; shift -= 16) {
                const auto id = static_cast<std::uint16_t>(w >> shift);
                if (id == 0) {
                    break;
                }
                if (id == last) {
                    ++entries[n - 1].mult;
                } else {
                    entries[n++] = {m_support[id - 1], 1};
                    last = id;
                }
            }
        }
        return MultiIndex::from_canonical({entries.data(), n});
    }

private:
    std::vector<BasisIndex> m_support;
    int m_lead = 1;
    std::vector<std::uint16_t> m_fids;
    std::vector<std::uint16_t> m_gids;
    std::vector<std::uint32_t> m_foff;
    std::vector<std::uint32_t> m_goff;
};

FockSeries<FloatComplex> wick_fingerprint(const FockSeries<FloatComplex> &f, const FockSeries<FloatComplex> &g,
                                          std::optional<int> cap, unsigned threads)
{
    using T = FloatComplex;
    const std::size_t nf = f.size();
    const std::size_t ng = g.size();
    const auto fterms = f.terms();
    const auto gterms = g.terms();

    std::vector<std::uint32_t> order(ng);
    for (std::size_t j = 0; j < ng; ++j) {
        order[j] = static_cast<std::uint32_t>(j);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
        return gterms[x].index.hash() < gterms[y].index.hash();
    });
    struct GEntry {
        std::uint64_t h1;
        std::uint64_t h2;
        T coeff;
    };
    std::vector<std::uint64_t> gh(ng);
    std::vector<GEntry> ge(ng);
    std::vector<int> gd(ng);
    for (std::size_t p = 0; p < ng; ++p) {
        const auto &t = gterms[order[p]];
        gh[p] = t.index.hash();
        ge[p] = {gh[p], second_hash(t.index), t.coeff};
        gd[p] = static_cast<int>(t.index.degree());
    }
    std::vector<std::uint64_t> fh(nf);
    std::vector<std::uint64_t> fh2(nf);
    for (std::size_t i = 0; i < nf; ++i) {
        fh[i] = fterms[i].index.hash();
        fh2[i] = second_hash(fterms[i].index);
    }
    const int max_degree = cap ? *cap : std::numeric_limits<int>::max();

    const std::size_t pairs = nf * ng;
    unsigned shift_bits = 0;
    while (shift_bits < 16 && (pairs >> (18 + shift_bits)) > 0) {
        ++shift_bits;
    }
    const std::size_t shards = std::size_t{1} << shift_bits;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, shards));
    auto shard_of = [shift_bits](std::uint64_t h) -> std::size_t {
        return shift_bits == 0 ? 0 : static_cast<std::size_t>(h >> (64 - shift_bits));
    };

    std::vector<std::vector<Representative>> results(threads);
    auto work = [&](unsigned t) {
        const std::size_t s0 = shards * t / threads;
        const std::size_t s1 = shards * (t + 1) / threads;
        // Row i visits g positions start, start + 1, ... (mod ng), which is
        // ascending order of fh[i] + gh[p] modulo 2^64.
        std::vector<std::size_t> pos(nf);
        std::vector<std::size_t> left(nf);
        for (std::size_t i = 0; i < nf; ++i) {
            const std::uint64_t threshold = std::uint64_t{0} - fh[i];
            std::size_t st = static_cast<std::size_t>(std::lower_bound(gh.begin(), gh.end(), threshold) - gh.begin());
            if (st == ng) {
                st = 0;
            }
            std::size_t lo = 0;
            std::size_t hi = ng;
            while (lo < hi) {
                const std::size_t mid = (lo + hi) / 2;
                const std::size_t p = st + mid >= ng ? st + mid - ng : st + mid;
                if (shard_of(fh[i] + gh[p]) < s0) {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            pos[i] = st + lo >= ng ? st + lo - ng : st + lo;
            left[i] = ng - lo;
        }
        absl::flat_hash_map<Fingerprint, std::uint32_t, FingerprintHash> slots;
        std::vector<Representative> shard_terms;
        auto &out = results[t];
        for (std::size_t s = s0; s < s1; ++s) {
            slots.clear();
            shard_terms.clear();
            const std::uint64_t shard_end = s + 1 == shards ? 0 : (std::uint64_t{s + 1} << (64 - shift_bits));
            auto walk = [&](auto capped) {
                for (std::size_t i = 0; i < nf; ++i) {
                    const std::uint64_t h1 = fh[i];
                    const std::uint64_t h2 = fh2[i];
                    const int room = max_degree - static_cast<int>(fterms[i].index.degree());
                    const T ci = fterms[i].coeff;
                    std::size_t p = pos[i];
                    std::size_t n = left[i];
                    while (n > 0) {
                        const GEntry &e = ge[p];
                        const std::uint64_t h = h1 + e.h1;
                        if (shard_end != 0 && h >= shard_end) {
                            break;
                        }
                        const std::size_t cur = p;
                        --n;
                        if (++p == ng) {
                            p = 0;
                        }
                        if (capped && gd[cur] > room) {
                            continue;
                        }
                        const T v = ci * e.coeff;
                        auto [it, inserted] =
                            slots.try_emplace(Fingerprint{h, h2 + e.h2}, static_cast<std::uint32_t>(shard_terms.size()));
                        if (inserted) {
                            shard_terms.push_back({static_cast<std::uint32_t>(i), order[cur], v});
                        } else {
                            shard_terms[it->second].coeff += v;
                        }
                    }
                    pos[i] = p;
                    left[i] = n;
                }
            };
            if (cap) {
                walk(std::true_type{});
            } else {
                walk(std::false_type{});
            }
            for (const auto &r : shard_terms) {
                if (!ScalarTraits<T>::is_zero(r.coeff)) {
                    out.push_back(r);
                }
            }
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(work, t);
        }
        for (auto &th : pool) {
            th.join();
        }
    }

    std::vector<Representative> reps;
    if (results.size() == 1) {
        reps = std::move(results.front());
    } else {
        for (auto &r : results) {
            reps.insert(reps.end(), r.begin(), r.end());
            r.clear();
            r.shrink_to_fit();
        }
    }
    std::vector<FockSeries<T>::Term> terms;
    terms.reserve(reps.size());
    if (auto keys = SortKeys::build(fterms, gterms)) {
        std::vector<std::uint32_t> start(keys->buckets() + 1, 0);
        for (const auto &rep : reps) {
            ++start[keys->bucket(rep.row, rep.col) + 1];
        }
        std::partial_sum(start.begin(), start.end(), start.begin());
        std::vector<SortItem> items(reps.size());
        std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
        for (std::size_t r = 0; r < reps.size(); ++r) {
            items[fill[keys->bucket(reps[r].row, reps[r].col)]++] =
                keys->item(reps[r].row, reps[r].col, static_cast<std::uint32_t>(r));
        }
            for (std::size_t b = 0; b + 1 < start.size(); ++b) {
            std::sort(items.begin() + start[b], items.begin() + start[b + 1]);
        }
            constexpr std::size_t ahead = 16;
        for (std::size_t k = 0; k < items.size(); ++k) {
            if (k + ahead < items.size()) {
                __builtin_prefetch(&reps[items[k + ahead].rep]);
            }
            terms.push_back({keys->index(items[k]), reps[items[k].rep].coeff});
        }
    } else {
        for (const auto &rep : reps) {
            terms.push_back({merge(fterms[rep.row].index, gterms[rep.col].index), rep.coeff});
        }
        std::sort(terms.begin(), terms.end(), [](const auto &x, const auto &y) { return x.index < y.index; });
    }
    return FockSeries<T>::from_sorted(f.space(), std::move(terms), cap);
}

} // namespace

template <typename T>
FockSeries<T> wick_product_threads(const FockSeries<T> &f, const FockSeries<T> &g, unsigned threads)
{
    require_same_space(f, g);
    const auto cap = min_cap(f.degree_cap(), g.degree_cap());
    threads = std::max(1u, threads);
    if (f.is_zero() || g.is_zero()) {
        return FockSeries<T>::from_sorted(f.space(), {}, cap);
    }
    if constexpr (std::is_same_v<T, FloatComplex>) {
        return wick_fingerprint(f, g, cap, threads);
    } else {
        return wick_generic(f, g, cap, threads);
    }
}

template <typename T>
FockSeries<T> wick_product(const FockSeries<T> &f, const FockSeries<T> &g)
{
    constexpr std::size_t parallel_threshold = 1 << 16;
    const unsigned threads = f.size() * g.size() >= parallel_threshold ? thread_count() : 1;
    return wick_product_threads(f, g, threads);
}

template <typename T>
FockSeries<T> annihilate(const FockSeries<T> &f, const BasisIndex &a)
{
    std::vector<typename FockSeries<T>::Term> terms;
    for (const auto &t : f.terms()) {
        const auto m = t.index.multiplicity(a);
        if (m == 0) {
            continue;
        }
        T c = t.coeff;
        c *= ScalarTraits<T>::from_int(static_cast<long>(m));
        terms.push_back({t.index.without(a), std::move(c)});
    }
    // Removing one copy of a is injective, so no merging is needed.
    std::sort(terms.begin(), terms.end(), [](const auto &x, const auto &y) { return x.index < y.index; });
    return FockSeries<T>::from_sorted(f.space(), std::move(terms), lower_cap(f.degree_cap(), 1));
}

template <typename T>
FockSeries<T> annihilate_seq(const FockSeries<T> &f, std::span<const BasisIndex> seq)
{
    FockSeries<T> out = f;
    for (const auto &a : seq) {
        out = annihilate(out, a);
    }
    return out;
}

template <typename T>
FockSeries<T> wick_exponential(const FockSeries<T> &xi, int cap)
{
    if (cap < 0) {
        throw std::invalid_argument("wick_exponential: degree cap must be nonnegative");
    }
    if (!xi.is_homogeneous(1)) {
        throw std::invalid_argument("wick_exponential: argument must be of pure degree 1");
    }
    const auto one = ScalarTraits<T>::from_int(1);
    FockSeries<T> power = FockSeries<T>::constant(xi.space(), one);
    Accumulator<T> acc(xi.space(), cap);
    acc.add(power);
    const auto plain = xi.uncapped();
    for (int m = 1; m <= cap && !power.is_zero(); ++m) {
        power = scaled(wick_product(power, plain), Rational(1, m));
        acc.add(power);
    }
    return acc.finish();
}

template <typename T>
std::vector<BasisIndex> support_indices(const FockSeries<T> &f)
{
    std::vector<BasisIndex> out;
    for (const auto &t : f.terms()) {
        for (const auto &e : t.index.entries()) {
            out.push_back(e.index);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

template <typename T>
double max_modulus(const FockSeries<T> &f)
{
    double m = 0.0;
    for (const auto &t : f.terms()) {
        m = std::max(m, ScalarTraits<T>::modulus(t.coeff));
    }
    return m;
}

#define HIDA_INSTANTIATE(T)                                                                                  \
    template class FockSeries<T>;                                                                            \
    template FockSeries<T> canonicalize(Space, std::vector<std::pair<MultiIndex, T>>, std::optional<int>,    \
                                        double);                                                             \
    template FockSeries<T> linear_combine(const T &, const FockSeries<T> &, const T &, const FockSeries<T> &); \
    template FockSeries<T> operator+(const FockSeries<T> &, const FockSeries<T> &);                          \
    template FockSeries<T> operator-(const FockSeries<T> &, const FockSeries<T> &);                          \
    template FockSeries<T> scaled(const FockSeries<T> &, const T &);                                         \
    template FockSeries<T> scaled(const FockSeries<T> &, const Rational &);                                  \
    template FockSeries<T> wick_product(const FockSeries<T> &, const FockSeries<T> &);                       \
    template FockSeries<T> wick_product_threads(const FockSeries<T> &, const FockSeries<T> &, unsigned);     \
    template FockSeries<T> annihilate(const FockSeries<T> &, const BasisIndex &);                            \
    template FockSeries<T> annihilate_seq(const FockSeries<T> &, std::span<const BasisIndex>);               \
    template FockSeries<T> wick_exponential(const FockSeries<T> &, int);                                     \
    template std::vector<BasisIndex> support_indices(const FockSeries<T> &);                                 \
    template double max_modulus(const FockSeries<T> &);                                                      \
    template void require_same_space(const FockSeries<T> &, const FockSeries<T> &);

HIDA_INSTANTIATE(ExactComplex)
HIDA_INSTANTIATE(FloatComplex)

} // namespace hida
