#include "hida/oracle.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>

namespace hida::oracle
{

DenseBasis::DenseBasis(Space space, int kmax, int max_degree)
    : m_space(space), m_kmax(kmax), m_max_degree(max_degree)
{
    space.validate();
    if (kmax < 0 || max_degree < 0) {
        throw std::invalid_argument("dense basis needs kmax >= 0 and max_degree >= 0");
    }
    for (int k = -kmax; k <= kmax; ++k) {
        if (space.kind == ModelKind::loop) {
            for (int i = 0; i < space.dimension; ++i) {
                m_modes.push_back({k, i});
            }
        } else if (k != 0) {
            m_modes.push_back({k, 1});
            m_modes.push_back({k, 2});
        }
    }
    std::sort(m_modes.begin(), m_modes.end());

    std::vector<IndexPower> current;
    std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int remaining) {
        if (pos == m_modes.size()) {
            m_indices.push_back(MultiIndex::from_canonical(current));
            return;
        }
        rec(pos + 1, remaining);
        for (int m = 1; m <= remaining; ++m) {
            current.push_back({m_modes[pos], static_cast<std::uint32_t>(m)});
            rec(pos + 1, remaining - m);
            current.pop_back();
        }
    };
    rec(0, max_degree);
    std::sort(m_indices.begin(), m_indices.end());
    for (std::size_t n = 0; n < m_indices.size(); ++n) {
        m_position.emplace(m_indices[n], static_cast<long>(n));
    }
}

long DenseBasis::position(const MultiIndex &index) const
{
    auto it = m_position.find(index);
    return it == m_position.end() ? -1 : it->second;
}

bool DenseBasis::contains(const BasisIndex &a) const
{
    return std::binary_search(m_modes.begin(), m_modes.end(), a);
}

DenseFockVector::DenseFockVector(std::shared_ptr<const DenseBasis> basis)
    : m_basis(std::move(basis)), m_coeffs(m_basis->size())
{
}

DenseFockVector DenseFockVector::from_sparse(const ExactSeries &f, std::shared_ptr<const DenseBasis> basis)
{
    if (!(f.space() == basis->space())) {
        throw std::out_of_range("series space does not match the dense basis");
    }
    DenseFockVector out(std::move(basis));
    for (const auto &t : f.terms()) {
        const long pos = out.m_basis->position(t.index);
        if (pos < 0) {
            throw std::out_of_range("term " + to_string(t.index) + " lies outside the dense basis (kmax = "
                                    + std::to_string(out.m_basis->kmax()) + ", degree <= "
                                    + std::to_string(out.m_basis->max_degree()) + ")");
        }
        out.m_coeffs[static_cast<std::size_t>(pos)] = t.coeff;
    }
    return out;
}

ExactSeries DenseFockVector::to_sparse() const
{
    std::vector<ExactSeries::Term> terms;
    for (std::size_t n = 0; n < m_coeffs.size(); ++n) {
        if (!m_coeffs[n].is_zero()) {
            terms.push_back({m_basis->indices()[n], m_coeffs[n]});
        }
    }
    return ExactSeries::from_sorted(m_basis->space(), std::move(terms));
}

const ExactComplex &DenseFockVector::at(const MultiIndex &index) const
{
    static const ExactComplex zero;
    const long pos = m_basis->position(index);
    return pos < 0 ? zero : m_coeffs[static_cast<std::size_t>(pos)];
}

DenseFockVector DenseFockVector::truncated(int d) const
{
    DenseFockVector out = *this;
    for (std::size_t n = 0; n < out.m_coeffs.size(); ++n) {
        if (static_cast<int>(m_basis->indices()[n].degree()) > d) {
            out.m_coeffs[n] = ExactComplex{};
        }
    }
    return out;
}

namespace
{

void require_same_basis(const DenseFockVector &x, const DenseFockVector &y)
{
    const auto &a = x.basis();
    const auto &b = y.basis();
    if (!(a.space() == b.space()) || a.kmax() != b.kmax() || a.max_degree() != b.max_degree()) {
        throw std::invalid_argument("dense vectors live on different bases");
    }
}

// Calls fn(I1, I2) for every ordered splitting I1 + I2 = I.
void for_each_split(const MultiIndex &index, const std::function<void(const MultiIndex &, const MultiIndex &)> &fn)
{
    const auto entries = index.entries();
    std::vector<IndexPower> left;
    std::vector<IndexPower> right;
    std::function<void(std::size_t)> rec = [&](std::size_t pos) {
        if (pos == entries.size()) {
            fn(MultiIndex::from_canonical(left), MultiIndex::from_canonical(right));
            return;
        }
        const auto &e = entries[pos];
        for (std::uint32_t c = 0; c <= e.mult; ++c) {
            if (c > 0) {
                left.push_back({e.index, c});
            }
            if (c < e.mult) {
                right.push_back({e.index, e.mult - c});
            }
            rec(pos + 1);
            if (c > 0) {
                left.pop_back();
            }
            if (c < e.mult) {
                right.pop_back();
            }
        }
    };
    rec(0);
}

// Adds one copy of a and returns the annihilation constant of removing it
// again, i.e. the new multiplicity.
std::uint32_t add_copy(MultiIndex &index, const BasisIndex &a)
{
    index = index.with(a);
    return index.multiplicity(a);
}

struct WeightedPair {
    BasisIndex left;
    BasisIndex right;
    Rational weight;
};

Rational factorial(unsigned n)
{
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return Rational(r);
}

// Largest degree carrying a nonzero coefficient, -1 for the zero vector.
int top_degree(const DenseFockVector &x)
{
    int d = -1;
    for (std::size_t n = 0; n < x.basis().size(); ++n) {
        if (!x[n].is_zero()) {
            d = std::max(d, static_cast<int>(x.basis().indices()[n].degree()));
        }
    }
    return d;
}

// out[I] = sum over splittings I1 + I2 = I and over every l-tuple of pairs
// (a_j, b_j, w_j) of  prod w_j * C(I1; a) b^F_{I1 + a} * C(I2; b) b^G_{I2 + b}.
DenseFockVector bidifferential(const DenseFockVector &f, const DenseFockVector &g, unsigned l,
                               const std::vector<WeightedPair> &pairs)
{
    require_same_basis(f, g);
    DenseFockVector out(f.basis_ptr());
    const auto &indices = f.basis().indices();
    const int fmax = top_degree(f);
    const int gmax = top_degree(g);
    const int reach = static_cast<int>(l);
    std::vector<std::size_t> choice(l, 0);
    for (std::size_t n = 0; n < indices.size(); ++n) {
        ExactComplex sum;
        if (static_cast<int>(indices[n].degree()) > fmax + gmax - 2 * reach) {
            continue;
        }
        for_each_split(indices[n], [&](const MultiIndex &i1, const MultiIndex &i2) {
            if (static_cast<int>(i1.degree()) + reach > fmax || static_cast<int>(i2.degree()) + reach > gmax) {
                return;
            }
            std::function<void(unsigned, const MultiIndex &, const MultiIndex &, long)> rec =
                [&](unsigned depth, const MultiIndex &left, const MultiIndex &right, long constant) {
                    if (depth == l) {
                        const ExactComplex &a = f.at(left);
                        if (a.is_zero()) {
                            return;
                        }
                        const ExactComplex &b = g.at(right);
                        if (b.is_zero()) {
                            return;
                        }
                        Rational weight(constant);
                        for (unsigned j = 0; j < l; ++j) {
                            weight *= pairs[choice[j]].weight;
                        }
                        sum += a * b * weight;
                        return;
                    }
                    for (std::size_t p = 0; p < pairs.size(); ++p) {
                        choice[depth] = p;
                        MultiIndex nl = left;
                        MultiIndex nr = right;
                        const auto cl = add_copy(nl, pairs[p].left);
                        const auto cr = add_copy(nr, pairs[p].right);
                        rec(depth + 1, nl, nr, constant * static_cast<long>(cl) * static_cast<long>(cr));
                    }
                };
            rec(0, i1, i2, 1);
        });
        out[n] = std::move(sum);
    }
    return out;
}

Rational cotangent_inverse_entry(const BasisIndex &a, const BasisIndex &b, int sign)
{
    if (a.k != b.k) {
        return Rational(0);
    }
    if (a.i == 1 && b.i == 2) {
        return Rational(sign);
    }
    if (a.i == 2 && b.i == 1) {
        return Rational(-sign);
    }
    return Rational(0);
}

std::vector<WeightedPair> bracket_pairs(const DenseBasis &basis, const SymplecticModel &model)
{
    std::vector<WeightedPair> pairs;
    for (const auto &a : basis.modes()) {
        for (const auto &b : basis.modes()) {
            Rational w = std::holds_alternative<LoopModel>(model)
                             ? omega_inverse_entry(a, b, model)
                             : cotangent_inverse_entry(a, b, std::get<CotangentModel>(model).bracket_sign);
            if (sgn(w) != 0) {
                pairs.push_back({a, b, std::move(w)});
            }
        }
    }
    return pairs;
}

} // namespace

DenseFockVector add(const DenseFockVector &x, const DenseFockVector &y)
{
    require_same_basis(x, y);
    DenseFockVector out = x;
    for (std::size_t n = 0; n < x.basis().size(); ++n) {
        out[n] += y[n];
    }
    return out;
}

DenseFockVector scale(const DenseFockVector &x, const Rational &q)
{
    DenseFockVector out = x;
    for (std::size_t n = 0; n < x.basis().size(); ++n) {
        out[n] *= q;
    }
    return out;
}

DenseFockVector wick(const DenseFockVector &f, const DenseFockVector &g)
{
    require_same_basis(f, g);
    DenseFockVector out(f.basis_ptr());
    const auto &indices = f.basis().indices();
    for (std::size_t n = 0; n < indices.size(); ++n) {
        ExactComplex sum;
        for_each_split(indices[n], [&](const MultiIndex &i1, const MultiIndex &i2) {
            const auto &a = f.at(i1);
            const auto &b = g.at(i2);
            if (!a.is_zero() && !b.is_zero()) {
                sum += a * b;
            }
        });
        out[n] = std::move(sum);
    }
    return out;
}

DenseFockVector annihilate(const DenseFockVector &f, const BasisIndex &a)
{
    DenseFockVector out(f.basis_ptr());
    const auto &indices = f.basis().indices();
    for (std::size_t n = 0; n < indices.size(); ++n) {
        MultiIndex raised = indices[n];
        const auto m = add_copy(raised, a);
        out[n] = f.at(raised) * Rational(static_cast<long>(m));
    }
    return out;
}

DenseFockVector bracket(const DenseFockVector &f, const DenseFockVector &g, const SymplecticModel &model)
{
    return bidifferential(f, g, 1, bracket_pairs(f.basis(), model));
}

DenseFockVector p_l(const DenseFockVector &f, const DenseFockVector &g, unsigned l, const LoopModel &model,
                    const Rational &prefactor)
{
    Rational scale_factor(1);
    for (unsigned j = 0; j < l; ++j) {
        scale_factor *= prefactor;
    }
    scale_factor /= factorial(l);
    return scale(bidifferential(f, g, l, bracket_pairs(f.basis(), SymplecticModel{model})), scale_factor);
}

DenseFockVector c_r_a(const DenseFockVector &f, const DenseFockVector &g, unsigned r, const CotangentModel &model)
{
    auto pairs = bracket_pairs(f.basis(), SymplecticModel{model});
    // E_A[F, G] = sum lambda_m (:a^1 F a^2 G: + :a^1 G a^2 F:); the second
    // sum contributes lambda_m d_{y_m} (x) d_{x_m} on F (x) G.
    for (const auto &a : f.basis().modes()) {
        if (a.i != 1) {
            continue;
        }
        const Rational lambda = model.A.eigenvalue(a.k);
        if (sgn(lambda) == 0) {
            continue;
        }
        pairs.push_back({a, {a.k, 2}, lambda});
        pairs.push_back({{a.k, 2}, a, lambda});
    }
    return bidifferential(f, g, r, pairs);
}

DenseFockVector t1(const DenseFockVector &f, const DiagonalOperator &A, int sign)
{
    DenseFockVector out(f.basis_ptr());
    const auto &indices = f.basis().indices();
    for (std::size_t n = 0; n < indices.size(); ++n) {
        ExactComplex sum;
        for (const auto &a : f.basis().modes()) {
            if (a.i != 1) {
                continue;
            }
            const Rational lambda = A.eigenvalue(a.k);
            MultiIndex raised = indices[n];
            const auto mx = add_copy(raised, a);
            const auto my = add_copy(raised, {a.k, 2});
            sum += f.at(raised) * (Rational(sign) * lambda * static_cast<long>(mx) * static_cast<long>(my));
        }
        out[n] = std::move(sum);
    }
    return out;
}

DenseFockVector wick_exp(const ExactSeries &xi, std::shared_ptr<const DenseBasis> basis)
{
    if (!xi.is_homogeneous(1)) {
        throw std::invalid_argument("oracle wick_exp: argument must be of pure degree 1");
    }
    DenseFockVector out(std::move(basis));
    const auto &indices = out.basis().indices();
    for (std::size_t n = 0; n < indices.size(); ++n) {
        ExactComplex c(1);
        for (const auto &e : indices[n].entries()) {
            const ExactComplex ca = xi.coefficient(MultiIndex{e.index});
            for (std::uint32_t j = 0; j < e.mult; ++j) {
                c *= ca;
            }
            c /= factorial(e.mult);
        }
        out[n] = std::move(c);
    }
    return out;
}

} // namespace hida::oracle
