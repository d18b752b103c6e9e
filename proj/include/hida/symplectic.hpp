#ifndef HIDA_SYMPLECTIC_HPP
#define HIDA_SYMPLECTIC_HPP

#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "hida/fock_series.hpp"

namespace hida
{

// Loop-space model: H(S^1; R^n) with the block form omega_{2i,2i+1} = 1.
// The inverse entries are Omega^{(k,2i),(k,2i+1)} = sigma (C k^2 + 1).
struct LoopModel {
    int n = 2;
    Rational C{1};
    int sigma = 1;

    void validate() const;
    Space space() const { return Space::loop(n); }
};

// Diagonal operator A gamma_m = lambda_m gamma_m on the cotangent model, with
// a declared growth certificate |lambda_m| <= C |m|^alpha.
class DiagonalOperator
{
public:
    struct Growth {
        Rational C{1};
        double alpha = 1.0;
    };

    DiagonalOperator() = default;

    // Modes absent from the table have eigenvalue zero.
    static DiagonalOperator from_table(std::map<int, Rational> table, Growth growth);
    // lambda_m = c * m^alpha for integer alpha >= 0.
    static DiagonalOperator from_formula(Rational c, unsigned alpha, Growth growth);
    static DiagonalOperator zero() { return {}; }

    // Throws std::domain_error if the growth certificate fails for this mode.
    Rational eigenvalue(int mode) const;

    bool is_formula() const { return m_formula.has_value(); }
    bool is_identically_zero() const;
    const std::map<int, Rational> &table() const { return m_table; }
    const Growth &growth() const { return m_growth; }
    Rational formula_coefficient() const { return m_formula ? m_formula->c : Rational(0); }
    unsigned formula_exponent() const { return m_formula ? m_formula->alpha : 0; }

private:
    struct Formula {
        Rational c;
        unsigned alpha;
    };

    void check_growth(int mode, const Rational &lambda) const;

    std::map<int, Rational> m_table;
    std::optional<Formula> m_formula;
    Growth m_growth{Rational(0), 0.0};
};

// Cotangent model H + H* with the Darboux bracket
// {F,G} = s * sum_m (:a^1_m F a^2_m G: - :a^2_m F a^1_m G:).
struct CotangentModel {
    DiagonalOperator A;
    int bracket_sign = 1;

    Space space() const { return Space::cotangent(); }
};

using SymplecticModel = std::variant<LoopModel, CotangentModel>;

Space model_space(const SymplecticModel &model);

// One nonzero entry of a constant bivector: the partner index b of a and the
// weight W such that the operator contains W d_a (x) d_b.
struct Contraction {
    BasisIndex partner;
    Rational weight;
};

// Omega^{ab} on the loop model. Throws std::invalid_argument on the
// cotangent model.
Rational omega_inverse_entry(const BasisIndex &a, const BasisIndex &b, const SymplecticModel &model);

// Partner of a under the Poisson bivector, if any.
std::optional<Contraction> bracket_contraction(const BasisIndex &a, const SymplecticModel &model);

template <typename T>
FockSeries<T> poisson_bracket(const FockSeries<T> &f, const FockSeries<T> &g, const SymplecticModel &model);

// Symmetric form sum_m lambda_m (:a^1 F a^2 G: + :a^1 G a^2 F:).
template <typename T>
FockSeries<T> e_a_form(const FockSeries<T> &f, const FockSeries<T> &g, const DiagonalOperator &A);

// Poisson bracket plus E_A on the cotangent model.
template <typename T>
FockSeries<T> c1a(const FockSeries<T> &f, const FockSeries<T> &g, const CotangentModel &model);

// Coordinate pairing sum_a u_a w_a v_a of two degree-one series. Without an
// operator w_a = 1; with one, w_a = lambda_{k(a)} + shift, i.e. A + shift*I.
template <typename T>
T h_pairing(const FockSeries<T> &u, const FockSeries<T> &v, const DiagonalOperator *A = nullptr,
            const Rational &shift = Rational(1));

} // namespace hida

#endif
