#include "hida/symplectic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hida/detail/accumulator.hpp"

namespace hida
{

void LoopModel::validate() const
{
    if (n < 2 || n % 2 != 0) {
        throw std::invalid_argument("loop model: n must be even and >= 2, got " + std::to_string(n));
    }
    if (sgn(C) <= 0) {
        throw std::invalid_argument("loop model: C must be positive, got " + format_rational(C));
    }
    if (sigma != 1 && sigma != -1) {
        throw std::invalid_argument("loop model: sigma must be +1 or -1, got " + std::to_string(sigma));
    }
}

namespace
{

bool is_integral(double x)
{
    return std::floor(x) == x && x >= 0.0 && x < 64.0;
}

Rational int_power(long base, unsigned e)
{
    mpz_class b(base);
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return Rational(r);
}

} // namespace

void DiagonalOperator::check_growth(int mode, const Rational &lambda) const
{
    if (sgn(lambda) == 0) {
        return;
    }
    const long m = std::labs(static_cast<long>(mode));
    bool ok = false;
    if (is_integral(m_growth.alpha)) {
        ok = abs(lambda) <= m_growth.C * int_power(m, static_cast<unsigned>(m_growth.alpha));
    } else {
        const double bound = m_growth.C.get_d() * std::pow(static_cast<double>(m), m_growth.alpha);
        ok = std::abs(lambda.get_d()) <= bound * (1.0 + 1e-12);
    }
    if (!ok) {
        throw std::domain_error("growth certificate violated: |lambda_" + std::to_string(mode)
                                + "| = " + format_rational(abs(lambda)) + " exceeds " + format_rational(m_growth.C)
                                + " * |" + std::to_string(mode) + "|^" + format_double(m_growth.alpha));
    }
}

DiagonalOperator DiagonalOperator::from_table(std::map<int, Rational> table, Growth growth)
{
    DiagonalOperator op;
    op.m_growth = growth;
    if (sgn(growth.C) < 0 || growth.alpha < 0.0) {
        throw std::invalid_argument("growth certificate needs C >= 0 and alpha >= 0");
    }
    for (const auto &[mode, lambda] : table) {
        if (mode == 0) {
            throw std::invalid_argument("eigenvalue table: mode 0 does not exist on the cotangent model");
        }
        op.check_growth(mode, lambda);
    }
    op.m_table = std::move(table);
    return op;
}

DiagonalOperator DiagonalOperator::from_formula(Rational c, unsigned alpha, Growth growth)
{
    DiagonalOperator op;
    op.m_growth = growth;
    if (sgn(c) != 0) {
        // |c| |m|^alpha <= C |m|^alpha' for all |m| >= 1 iff alpha <= alpha' and |c| <= C.
        if (static_cast<double>(alpha) > growth.alpha || abs(c) > growth.C) {
            throw std::domain_error("growth certificate violated by formula lambda_m = " + format_rational(c)
                                    + " m^" + std::to_string(alpha));
        }
    }
    op.m_formula = Formula{std::move(c), alpha};
    return op;
}

Rational DiagonalOperator::eigenvalue(int mode) const
{
    if (m_formula) {
        Rational v = m_formula->c * int_power(mode, m_formula->alpha);
        check_growth(mode, v);
        return v;
    }
    auto it = m_table.find(mode);
    if (it == m_table.end()) {
        return Rational(0);
    }
    return it->second;
}

bool DiagonalOperator::is_identically_zero() const
{
    if (m_formula) {
        return sgn(m_formula->c) == 0;
    }
    for (const auto &kv : m_table) {
        if (sgn(kv.second) != 0) {
            return false;
        }
    }
    return true;
}

Space model_space(const SymplecticModel &model)
{
    return std::visit([](const auto &m) { return m.space(); }, model);
}

Rational omega_inverse_entry(const BasisIndex &a, const BasisIndex &b, const SymplecticModel &model)
{
    const auto *loop = std::get_if<LoopModel>(&model);
    if (loop == nullptr) {
        throw std::invalid_argument("omega_inverse_entry is defined on the loop model only");
    }
    if (a.k != b.k || (a.i ^ 1) != b.i) {
        return Rational(0);
    }
    Rational entry = Rational(loop->sigma) * (loop->C * a.k * a.k + 1);
    return a.i % 2 == 0 ? entry : Rational(-entry);
}

std::optional<Contraction> bracket_contraction(const BasisIndex &a, const SymplecticModel &model)
{
    if (const auto *loop = std::get_if<LoopModel>(&model)) {
        BasisIndex b{a.k, a.i ^ 1};
        return Contraction{b, omega_inverse_entry(a, b, model)};
    }
    const auto &cot = std::get<CotangentModel>(model);
    const Rational s(cot.bracket_sign);
    if (a.i == 1) {
        return Contraction{{a.k, 2}, s};
    }
    return Contraction{{a.k, 1}, Rational(-s)};
}

namespace
{

template <typename T>
void require_model_space(const FockSeries<T> &f, const Space &space, const char *what)
{
    if (!(f.space() == space)) {
        throw std::invalid_argument(std::string(what) + ": series space (" + std::string(to_string(f.space().kind))
                                    + ", n = " + std::to_string(f.space().dimension)
                                    + ") does not match the model");
    }
}

template <typename T>
bool has_index(const std::vector<BasisIndex> &support, const BasisIndex &a)
{
    return std::binary_search(support.begin(), support.end(), a);
}

} // namespace

template <typename T>
FockSeries<T> poisson_bracket(const FockSeries<T> &f, const FockSeries<T> &g, const SymplecticModel &model)
{
    const auto space = model_space(model);
    require_model_space(f, space, "poisson_bracket");
    require_model_space(g, space, "poisson_bracket");
    const auto g_support = support_indices(g);
    detail::Accumulator<T> acc(space, detail::lower_cap(detail::min_cap(f.degree_cap(), g.degree_cap()), 1));
    for (const auto &a : support_indices(f)) {
        const auto c = bracket_contraction(a, model);
        if (!c || sgn(c->weight) == 0 || !has_index<T>(g_support, c->partner)) {
            continue;
        }
        acc.add(wick_product(annihilate(f, a), annihilate(g, c->partner)), ScalarTraits<T>::from_rational(c->weight));
    }
    return acc.finish();
}

template <typename T>
FockSeries<T> e_a_form(const FockSeries<T> &f, const FockSeries<T> &g, const DiagonalOperator &A)
{
    require_model_space(f, Space::cotangent(), "e_a_form");
    require_model_space(g, Space::cotangent(), "e_a_form");
    detail::Accumulator<T> acc(Space::cotangent(),
                               detail::lower_cap(detail::min_cap(f.degree_cap(), g.degree_cap()), 1));
    const auto f_support = support_indices(f);
    const auto g_support = support_indices(g);
    // lambda_m :a^1_m X a^2_m Y: for (X, Y) = (F, G) and (G, F).
    auto half = [&](const FockSeries<T> &x, const std::vector<BasisIndex> &xs, const FockSeries<T> &y,
                    const std::vector<BasisIndex> &ys) {
        for (const auto &a : xs) {
            if (a.i != 1) {
                continue;
            }
            const BasisIndex b{a.k, 2};
            if (!has_index<T>(ys, b)) {
                continue;
            }
            const Rational lambda = A.eigenvalue(a.k);
            if (sgn(lambda) == 0) {
                continue;
            }
            acc.add(wick_product(annihilate(x, a), annihilate(y, b)), ScalarTraits<T>::from_rational(lambda));
        }
    };
    half(f, f_support, g, g_support);
    half(g, g_support, f, f_support);
    return acc.finish();
}

template <typename T>
FockSeries<T> c1a(const FockSeries<T> &f, const FockSeries<T> &g, const CotangentModel &model)
{
    return poisson_bracket(f, g, SymplecticModel{model}) + e_a_form(f, g, model.A);
}

template <typename T>
T h_pairing(const FockSeries<T> &u, const FockSeries<T> &v, const DiagonalOperator *A, const Rational &shift)
{
    require_same_space(u, v);
    if (!u.is_homogeneous(1) || !v.is_homogeneous(1)) {
        throw std::invalid_argument("h_pairing: both arguments must be of pure degree 1");
    }
    T sum = ScalarTraits<T>::from_int(0);
    for (const auto &t : u.terms()) {
        const T other = v.coefficient(t.index);
        if (ScalarTraits<T>::is_zero(other, 0.0)) {
            continue;
        }
        T c = t.coeff;
        c *= other;
        if (A != nullptr) {
            const BasisIndex a = t.index.entries().front().index;
            ScalarTraits<T>::scale(c, A->eigenvalue(a.k) + shift);
        }
        sum += c;
    }
    return sum;
}

#define HIDA_INSTANTIATE(T)                                                                                   \
    template FockSeries<T> poisson_bracket(const FockSeries<T> &, const FockSeries<T> &, const SymplecticModel &); \
    template FockSeries<T> e_a_form(const FockSeries<T> &, const FockSeries<T> &, const DiagonalOperator &);   \
    template FockSeries<T> c1a(const FockSeries<T> &, const FockSeries<T> &, const CotangentModel &);         \
    template T h_pairing(const FockSeries<T> &, const FockSeries<T> &, const DiagonalOperator *, const Rational &);

HIDA_INSTANTIATE(ExactComplex)
HIDA_INSTANTIATE(FloatComplex)

} // namespace hida
