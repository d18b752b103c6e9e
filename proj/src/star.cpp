#include "hida/star.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>
#include <type_traits>

#include <absl/container/flat_hash_map.h>

#include "hida/detail/accumulator.hpp"

namespace hida
{

using detail::Accumulator;
using detail::lower_cap;
using detail::min_cap;

template <typename T>
DeformationSeries<T>::DeformationSeries(Space space, unsigned order) : m_slots(order + 1, FockSeries<T>(space))
{
}

template <typename T>
DeformationSeries<T>::DeformationSeries(std::vector<FockSeries<T>> slots) : m_slots(std::move(slots))
{
    if (m_slots.empty()) {
        throw std::invalid_argument("DeformationSeries needs at least one slot");
    }
    for (const auto &s : m_slots) {
        require_same_space(m_slots.front(), s);
    }
}

template <typename T>
DeformationSeries<T> DeformationSeries<T>::embed(const FockSeries<T> &f, unsigned order)
{
    DeformationSeries out(f.space(), order);
    out.m_slots[0] = f;
    return out;
}

template <typename T>
bool DeformationSeries<T>::is_zero() const
{
    return std::all_of(m_slots.begin(), m_slots.end(), [](const auto &s) { return s.is_zero(); });
}

template <typename T>
std::optional<int> DeformationSeries<T>::exact_degree() const
{
    std::optional<int> d;
    for (const auto &s : m_slots) {
        d = min_cap(d, s.degree_cap());
    }
    return d;
}

template <typename T>
DeformationSeries<T> operator-(const DeformationSeries<T> &x, const DeformationSeries<T> &y)
{
    if (x.order() != y.order()) {
        throw std::invalid_argument("order mismatch: " + std::to_string(x.order()) + " vs "
                                    + std::to_string(y.order()));
    }
    std::vector<FockSeries<T>> slots;
    for (unsigned l = 0; l <= x.order(); ++l) {
        slots.push_back(x.slot(l) - y.slot(l));
    }
    return DeformationSeries<T>(std::move(slots));
}

ConventionFields convention_fields(const CotangentConvention &conv)
{
    return {{"prefactor", format_rational(conv.prefactor)},
            {"bracket_sign", std::to_string(conv.bracket_sign)},
            {"t1_sign", std::to_string(conv.t1_sign)},
            {"exchange_shift", std::to_string(conv.exchange_shift)}};
}

ConventionFields convention_fields(const StarConvention &conv, int sigma)
{
    return {{"prefactor", format_rational(conv.prefactor)}, {"bracket_sign", std::to_string(sigma)}};
}

namespace
{

// Sum of left (x) right monomial tensors: the operand of a constant
// bidifferential operator before Wick multiplication.
template <typename T>
struct BiTerm {
    MultiIndex left;
    MultiIndex right;
    T coeff;
};

struct BiKey {
    MultiIndex left;
    MultiIndex right;

    friend bool operator==(const BiKey &, const BiKey &) = default;
};

struct BiKeyHash {
    std::size_t operator()(const BiKey &k) const
    {
        return static_cast<std::size_t>(k.left.hash() * 0x9e3779b97f4a7c15ULL ^ k.right.hash());
    }
};

template <typename T>
using BiSeries = std::vector<BiTerm<T>>;

// Constant bivector sum_a W_a d_a (x) d_{p(a)}, with one partner per index.
template <typename T>
class Bivector
{
public:
    using Rule = std::function<std::optional<Contraction>(const BasisIndex &)>;

    explicit Bivector(Rule rule) : m_rule(std::move(rule)) {}

    const std::optional<std::pair<BasisIndex, T>> &operator()(const BasisIndex &a)
    {
        auto it = m_cache.find(a);
        if (it == m_cache.end()) {
            std::optional<std::pair<BasisIndex, T>> v;
            if (auto c = m_rule(a); c && sgn(c->weight) != 0) {
                v.emplace(c->partner, ScalarTraits<T>::from_rational(c->weight));
            }
            it = m_cache.emplace(a, std::move(v)).first;
        }
        return it->second;
    }

private:
    struct IndexHash {
        std::size_t operator()(const BasisIndex &a) const { return basis_hash(a); }
    };

    Rule m_rule;
    absl::flat_hash_map<BasisIndex, std::optional<std::pair<BasisIndex, T>>, IndexHash> m_cache;
};

template <typename T>
BiSeries<T> tensor(const FockSeries<T> &f, const FockSeries<T> &g)
{
    BiSeries<T> out;
    out.reserve(f.size() * g.size());
    for (const auto &a : f.terms()) {
        for (const auto &b : g.terms()) {
            T c = a.coeff;
            c *= b.coeff;
            out.push_back({a.index, b.index, std::move(c)});
        }
    }
    return out;
}

template <typename T>
BiSeries<T> apply_bivector(const BiSeries<T> &in, Bivector<T> &bivector)
{
    absl::flat_hash_map<BiKey, T, BiKeyHash> acc;
    for (const auto &term : in) {
        for (const auto &e : term.left.entries()) {
            const auto &c = bivector(e.index);
            if (!c) {
                continue;
            }
            const auto mb = term.right.multiplicity(c->first);
            if (mb == 0) {
                continue;
            }
            T coeff = term.coeff;
            coeff *= c->second;
            coeff *= ScalarTraits<T>::from_int(static_cast<long>(e.mult) * static_cast<long>(mb));
            BiKey key{term.left.without(e.index), term.right.without(c->first)};
            auto [it, inserted] = acc.try_emplace(std::move(key), coeff);
            if (!inserted) {
                it->second += coeff;
            }
        }
    }
    BiSeries<T> out;
    out.reserve(acc.size());
    for (auto &kv : acc) {
        if (!ScalarTraits<T>::is_zero(kv.second)) {
            out.push_back({kv.first.left, kv.first.right, std::move(kv.second)});
        }
    }
    std::sort(out.begin(), out.end(), [](const BiTerm<T> &a, const BiTerm<T> &b) {
        if (auto c = a.left <=> b.left; c != 0) {
            return c < 0;
        }
        return a.right < b.right;
    });
    return out;
}

template <typename T>
FockSeries<T> contract(const BiSeries<T> &bi, Space space, std::optional<int> cap)
{
    Accumulator<T> acc(space, cap);
    for (const auto &t : bi) {
        acc.add(merge(t.left, t.right), t.coeff);
    }
    return acc.finish();
}

// Slots mu(B^l (F (x) G)) for l = 0..order, unscaled.
template <typename T>
std::vector<FockSeries<T>> bidifferential_powers(const FockSeries<T> &f, const FockSeries<T> &g, unsigned order,
                                                 Bivector<T> &bivector)
{
    require_same_space(f, g);
    const auto cap = min_cap(f.degree_cap(), g.degree_cap());
    std::vector<FockSeries<T>> out;
    out.reserve(order + 1);
    out.push_back(wick_product(f, g));
    BiSeries<T> bi;
    if (order > 0) {
        bi = tensor(f, g);
    }
    for (unsigned l = 1; l <= order; ++l) {
        if (!bi.empty()) {
            bi = apply_bivector(bi, bivector);
        }
        out.push_back(contract(bi, f.space(), lower_cap(cap, static_cast<int>(l))));
    }
    return out;
}

template <typename T>
void require_space(const FockSeries<T> &f, const Space &space, const char *what)
{
    if (!(f.space() == space)) {
        throw std::invalid_argument(std::string(what) + ": operand space (" + std::string(to_string(f.space().kind))
                                    + ", n = " + std::to_string(f.space().dimension)
                                    + ") does not match the model");
    }
}

template <typename T>
Bivector<T> loop_bivector(const LoopModel &model)
{
    return Bivector<T>([model](const BasisIndex &a) { return bracket_contraction(a, SymplecticModel{model}); });
}

// B = sum_m [(s + lambda_m) d_{x_m} (x) d_{y_m} + (lambda_m - s) d_{y_m} (x) d_{x_m}].
template <typename T>
Bivector<T> cotangent_bivector(const CotangentModel &model)
{
    return Bivector<T>([model](const BasisIndex &a) -> std::optional<Contraction> {
        const Rational lambda = model.A.eigenvalue(a.k);
        const Rational s(model.bracket_sign);
        if (a.i == 1) {
            return Contraction{{a.k, 2}, s + lambda};
        }
        return Contraction{{a.k, 1}, lambda - s};
    });
}

Rational factorial(unsigned n)
{
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return Rational(r);
}

Rational power(const Rational &q, unsigned n)
{
    Rational r(1);
    for (unsigned i = 0; i < n; ++i) {
        r *= q;
    }
    return r;
}

} // namespace

template <typename T>
DeformationSeries<T> star(const FockSeries<T> &f, const FockSeries<T> &g, unsigned order, const LoopModel &model,
                          const StarConvention &conv)
{
    model.validate();
    if (sgn(conv.prefactor) == 0) {
        throw std::invalid_argument("star convention prefactor must be nonzero");
    }
    require_space(f, model.space(), "star");
    require_space(g, model.space(), "star");
    auto bivector = loop_bivector<T>(model);
    auto slots = bidifferential_powers(f, g, order, bivector);
    for (unsigned l = 1; l <= order; ++l) {
        slots[l] = scaled(slots[l], power(conv.prefactor, l) / factorial(l));
    }
    return DeformationSeries<T>(std::move(slots));
}

template <typename T>
FockSeries<T> p_l(const FockSeries<T> &f, const FockSeries<T> &g, unsigned l, const LoopModel &model,
                  const StarConvention &conv)
{
    return star(f, g, l, model, conv).slot(l);
}

template <typename T>
FockSeries<T> c_r_a(const FockSeries<T> &f, const FockSeries<T> &g, unsigned r, const CotangentModel &model)
{
    require_space(f, Space::cotangent(), "c_r_a");
    require_space(g, Space::cotangent(), "c_r_a");
    auto bivector = cotangent_bivector<T>(model);
    return bidifferential_powers(f, g, r, bivector).back();
}

template <typename T>
DeformationSeries<T> star_a(const FockSeries<T> &f, const FockSeries<T> &g, unsigned order,
                            const DiagonalOperator &A, const CotangentConvention &conv)
{
    if (sgn(conv.prefactor) == 0) {
        throw std::invalid_argument("star_a prefactor must be nonzero");
    }
    require_space(f, Space::cotangent(), "star_a");
    require_space(g, Space::cotangent(), "star_a");
    auto bivector = cotangent_bivector<T>(conv.model(A));
    auto slots = bidifferential_powers(f, g, order, bivector);
    for (unsigned r = 1; r <= order; ++r) {
        slots[r] = scaled(slots[r], power(conv.prefactor, r) / factorial(r));
    }
    return DeformationSeries<T>(std::move(slots));
}

template <typename T>
FockSeries<T> t1(const FockSeries<T> &f, const DiagonalOperator &A, int sign)
{
    require_space(f, Space::cotangent(), "t1");
    Accumulator<T> acc(f.space(), lower_cap(f.degree_cap(), 2));
    for (const auto &t : f.terms()) {
        for (const auto &e : t.index.entries()) {
            if (e.index.i != 1) {
                continue;
            }
            const BasisIndex y{e.index.k, 2};
            const auto my = t.index.multiplicity(y);
            if (my == 0) {
                continue;
            }
            const Rational lambda = A.eigenvalue(e.index.k);
            if (sgn(lambda) == 0) {
                continue;
            }
            T c = t.coeff;
            ScalarTraits<T>::scale(c, Rational(sign) * lambda * static_cast<long>(e.mult) * static_cast<long>(my));
            acc.add(t.index.without(e.index).without(y), c);
        }
    }
    return acc.finish();
}

template <typename T>
DeformationSeries<T> t_prime(const FockSeries<T> &f, const DiagonalOperator &A, unsigned order, int sign)
{
    return t_prime(DeformationSeries<T>::embed(f, order), A, sign);
}

template <typename T>
DeformationSeries<T> t_prime(const DeformationSeries<T> &x, const DiagonalOperator &A, int sign)
{
    const unsigned order = x.order();
    std::vector<Accumulator<T>> acc;
    for (unsigned m = 0; m <= order; ++m) {
        // Slot m mixes T_1^j X_{m-j}; the cap is the weakest of those.
        std::optional<int> cap;
        for (unsigned j = 0; j <= m; ++j) {
            cap = min_cap(cap, lower_cap(x.slot(m - j).degree_cap(), 2 * static_cast<int>(j)));
        }
        acc.emplace_back(x.space(), cap);
    }
    for (unsigned p = 0; p <= order; ++p) {
        FockSeries<T> power = x.slot(p);
        for (unsigned j = 0; p + j <= order; ++j) {
            if (j > 0) {
                power = scaled(t1(power, A, sign), Rational(1, j));
            }
            if (power.is_zero()) {
                break;
            }
            acc[p + j].add(power);
        }
    }
    std::vector<FockSeries<T>> slots;
    for (auto &a : acc) {
        slots.push_back(a.finish());
    }
    return DeformationSeries<T>(std::move(slots));
}

template <typename T>
DeformationSeries<T> d_star(const DeformationSeries<T> &x, const DeformationSeries<T> &y, const ProductSpec &product)
{
    if (x.order() != y.order()) {
        throw std::invalid_argument("d_star: order mismatch " + std::to_string(x.order()) + " vs "
                                    + std::to_string(y.order()));
    }
    require_same_space(x.slot(0), y.slot(0));
    const unsigned order = x.order();
    std::vector<std::vector<FockSeries<T>>> parts(order + 1);
    for (unsigned p = 0; p <= order; ++p) {
        for (unsigned q = 0; p + q <= order; ++q) {
            const unsigned rest = order - p - q;
            const auto prod = std::visit(
                [&](const auto &spec) -> DeformationSeries<T> {
                    using S = std::decay_t<decltype(spec)>;
                    if constexpr (std::is_same_v<S, LoopProduct>) {
                        return star(x.slot(p), y.slot(q), rest, spec.model, spec.convention);
                    } else {
                        return star_a(x.slot(p), y.slot(q), rest, spec.A, spec.convention);
                    }
                },
                product);
            for (unsigned l = 0; l <= rest; ++l) {
                parts[p + q + l].push_back(prod.slot(l));
            }
        }
    }
    std::vector<FockSeries<T>> slots;
    for (unsigned m = 0; m <= order; ++m) {
        std::optional<int> cap;
        for (const auto &s : parts[m]) {
            cap = min_cap(cap, s.degree_cap());
        }
        Accumulator<T> acc(x.space(), cap);
        for (const auto &s : parts[m]) {
            acc.add(s);
        }
        slots.push_back(acc.finish());
    }
    return DeformationSeries<T>(std::move(slots));
}

template <typename T>
ResidualReport residual_report(std::string identity, const DeformationSeries<T> &residual, ConventionFields convention,
                               double scale)
{
    ResidualReport report;
    report.identity = std::move(identity);
    report.convention = std::move(convention);
    report.exact = ScalarTraits<T>::mode == ScalarMode::exact;
    report.exact_degree = residual.exact_degree();
    report.passed = true;
    for (const auto &s : residual.slots()) {
        const double m = max_modulus(s);
        report.max_residual_per_slot.push_back(m);
        if (report.exact ? !s.is_zero() : m > 1e-10 * std::max(scale, 1.0)) {
            report.passed = false;
        }
    }
    return report;
}

template <typename T>
DeformationSeries<T> gauge_residual(const FockSeries<T> &f, const FockSeries<T> &g, const DiagonalOperator &A,
                                    unsigned order, const CotangentConvention &conv)
{
    const auto lhs = t_prime(star_a(f, g, order, A, conv), A, conv.t1_sign);
    const auto rhs = d_star(t_prime(f, A, order, conv.t1_sign), t_prime(g, A, order, conv.t1_sign),
                            ProductSpec{CotangentProduct{DiagonalOperator::zero(), conv}});
    return lhs - rhs;
}

template <typename T>
ResidualReport gauge_equivalence_check(const FockSeries<T> &f, const FockSeries<T> &g, const DiagonalOperator &A,
                                       unsigned order, const CotangentConvention &conv)
{
    const double scale = std::max(max_modulus(f), max_modulus(g));
    return residual_report("gauge", gauge_residual(f, g, A, order, conv), convention_fields(conv), scale * scale);
}

namespace
{

template <typename T>
void require_direction(const FockSeries<T> &g, const char *name)
{
    if (!(g.space() == Space::cotangent()) || !g.is_homogeneous(1)) {
        throw std::invalid_argument(std::string("exchange direction ") + name
                                    + " must be a degree-1 cotangent series");
    }
    for (const auto &t : g.terms()) {
        if (t.index.entries().front().index.i != 1) {
            throw std::invalid_argument(std::string("exchange direction ") + name
                                        + " must be given on side 1 (as an element of H)");
        }
    }
}

template <typename T>
FockSeries<T> lift_to_side2(const FockSeries<T> &g)
{
    std::vector<std::pair<MultiIndex, T>> raw;
    for (const auto &t : g.terms()) {
        raw.emplace_back(MultiIndex{BasisIndex{t.index.entries().front().index.k, 2}}, t.coeff);
    }
    return canonicalize(Space::cotangent(), std::move(raw));
}

} // namespace

template <typename T>
FockSeries<T> wick_exponential_pair(const FockSeries<T> &g1, const FockSeries<T> &g2, int cap)
{
    require_direction(g1, "gamma_1");
    require_direction(g2, "gamma_2");
    return wick_exponential(g1 + lift_to_side2(g2), cap);
}

template <typename T>
std::pair<DeformationSeries<T>, DeformationSeries<T>> exchange_sides(const ExchangeDirections<T> &dirs,
                                                                     const DiagonalOperator &A, int D,
                                                                     unsigned order, const CotangentConvention &conv)
{
    if (D < 0) {
        throw std::invalid_argument("exchange_check: degree D must be nonnegative");
    }
    require_direction(dirs.h1, "gamma'_1");
    require_direction(dirs.h2, "gamma'_2");
    const int cap = D + 2 * static_cast<int>(order);
    const auto phi = wick_exponential_pair(dirs.g1, dirs.g2, cap);
    const auto phi_prime = wick_exponential_pair(dirs.h1, dirs.h2, cap);
    const auto product = star_a(phi, phi_prime, order, A, conv);

    const T kappa = h_pairing(dirs.h2, dirs.g1, &A, Rational(1))
                    + h_pairing(dirs.g2, dirs.h1, &A, Rational(conv.exchange_shift));
    const auto phi_sum = wick_exponential_pair(dirs.g1 + dirs.h1, dirs.g2 + dirs.h2, cap);

    std::vector<FockSeries<T>> lhs;
    std::vector<FockSeries<T>> rhs;
    T factor = ScalarTraits<T>::from_int(1);
    for (unsigned m = 0; m <= order; ++m) {
        if (m > 0) {
            factor *= kappa;
            ScalarTraits<T>::scale(factor, Rational(1, m));
        }
        lhs.push_back(product.slot(m).truncated(D));
        rhs.push_back(scaled(phi_sum, factor).truncated(D));
    }
    return {DeformationSeries<T>(std::move(lhs)), DeformationSeries<T>(std::move(rhs))};
}

template <typename T>
ResidualReport exchange_check(const ExchangeDirections<T> &dirs, const DiagonalOperator &A, int D, unsigned order,
                              const CotangentConvention &conv)
{
    const auto [lhs, rhs] = exchange_sides(dirs, A, D, order, conv);
    return residual_report("exchange", lhs - rhs, convention_fields(conv));
}

#define HIDA_INSTANTIATE(T)                                                                                          \
    template class DeformationSeries<T>;                                                                             \
    template DeformationSeries<T> operator-(const DeformationSeries<T> &, const DeformationSeries<T> &);             \
    template FockSeries<T> p_l(const FockSeries<T> &, const FockSeries<T> &, unsigned, const LoopModel &,            \
                               const StarConvention &);                                                              \
    template DeformationSeries<T> star(const FockSeries<T> &, const FockSeries<T> &, unsigned, const LoopModel &,    \
                                       const StarConvention &);                                                      \
    template FockSeries<T> c_r_a(const FockSeries<T> &, const FockSeries<T> &, unsigned, const CotangentModel &);    \
    template DeformationSeries<T> star_a(const FockSeries<T> &, const FockSeries<T> &, unsigned,                     \
                                         const DiagonalOperator &, const CotangentConvention &);                     \
    template FockSeries<T> t1(const FockSeries<T> &, const DiagonalOperator &, int);                                 \
    template DeformationSeries<T> t_prime(const FockSeries<T> &, const DiagonalOperator &, unsigned, int);           \
    template DeformationSeries<T> t_prime(const DeformationSeries<T> &, const DiagonalOperator &, int);              \
    template DeformationSeries<T> d_star(const DeformationSeries<T> &, const DeformationSeries<T> &,                 \
                                         const ProductSpec &);                                                       \
    template ResidualReport residual_report(std::string, const DeformationSeries<T> &, ConventionFields, double);    \
    template DeformationSeries<T> gauge_residual(const FockSeries<T> &, const FockSeries<T> &,                       \
                                                 const DiagonalOperator &, unsigned, const CotangentConvention &);   \
    template ResidualReport gauge_equivalence_check(const FockSeries<T> &, const FockSeries<T> &,                    \
                                                    const DiagonalOperator &, unsigned, const CotangentConvention &); \
    template FockSeries<T> wick_exponential_pair(const FockSeries<T> &, const FockSeries<T> &, int);                 \
    template std::pair<DeformationSeries<T>, DeformationSeries<T>> exchange_sides(                                   \
        const ExchangeDirections<T> &, const DiagonalOperator &, int, unsigned, const CotangentConvention &);        \
    template ResidualReport exchange_check(const ExchangeDirections<T> &, const DiagonalOperator &, int, unsigned,   \
                                           const CotangentConvention &);

HIDA_INSTANTIATE(ExactComplex)
HIDA_INSTANTIATE(FloatComplex)

} // namespace hida
