#ifndef HIDA_ORACLE_HPP
#define HIDA_ORACLE_HPP

#include <memory>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "hida/fock_series.hpp"
#include "hida/symplectic.hpp"

// Dense brute-force mirror of the sparse algebra on a bounded mode set.
//
// Every routine works coefficient by coefficient over the full table, with
// no sparsity and no sharing: the Wick product sums over all splittings of
// each output multiindex, and the bidifferential operators sum over every
// tuple of contracted index pairs drawn from the whole mode set. EXACT only.
namespace hida::oracle
{

// All canonical multiindices over |k| <= kmax and every direction (loop) or
// side (cotangent, k != 0), with degree <= max_degree, in lexicographic order.
class DenseBasis
{
public:
    DenseBasis(Space space, int kmax, int max_degree);

    const Space &space() const { return m_space; }
    int kmax() const { return m_kmax; }
    int max_degree() const { return m_max_degree; }
    const std::vector<BasisIndex> &modes() const { return m_modes; }
    const std::vector<MultiIndex> &indices() const { return m_indices; }
    std::size_t size() const { return m_indices.size(); }

    // Position of index in the enumeration, or -1 when out of bounds.
    long position(const MultiIndex &index) const;
    bool contains(const BasisIndex &a) const;

private:
    Space m_space;
    int m_kmax;
    int m_max_degree;
    std::vector<BasisIndex> m_modes;
    std::vector<MultiIndex> m_indices;
    absl::flat_hash_map<MultiIndex, long, MultiIndexHash> m_position;
};

class DenseFockVector
{
public:
    explicit DenseFockVector(std::shared_ptr<const DenseBasis> basis);

    // Throws std::out_of_range if f has a term outside the table.
    static DenseFockVector from_sparse(const ExactSeries &f, std::shared_ptr<const DenseBasis> basis);
    ExactSeries to_sparse() const;

    const DenseBasis &basis() const { return *m_basis; }
    const std::shared_ptr<const DenseBasis> &basis_ptr() const { return m_basis; }
    const ExactComplex &operator[](std::size_t n) const { return m_coeffs[n]; }
    ExactComplex &operator[](std::size_t n) { return m_coeffs[n]; }
    // Coefficient of an arbitrary multiindex (zero outside the table).
    const ExactComplex &at(const MultiIndex &index) const;
    // Copy with every coefficient of degree > d set to zero.
    DenseFockVector truncated(int d) const;

    friend bool operator==(const DenseFockVector &a, const DenseFockVector &b)
    {
        return a.m_coeffs == b.m_coeffs;
    }

private:
    std::shared_ptr<const DenseBasis> m_basis;
    std::vector<ExactComplex> m_coeffs;
};

DenseFockVector add(const DenseFockVector &x, const DenseFockVector &y);
DenseFockVector scale(const DenseFockVector &x, const Rational &q);

DenseFockVector wick(const DenseFockVector &f, const DenseFockVector &g);
DenseFockVector annihilate(const DenseFockVector &f, const BasisIndex &a);

// Poisson bracket from the explicit inverse-form entries over all mode pairs.
DenseFockVector bracket(const DenseFockVector &f, const DenseFockVector &g, const SymplecticModel &model);

// prefactor^l / l! sum over all l-tuples of contracted pairs (loop model).
DenseFockVector p_l(const DenseFockVector &f, const DenseFockVector &g, unsigned l, const LoopModel &model,
                    const Rational &prefactor);

// (C_1^A)^r with C_1^A expanded literally as bracket + E_A.
DenseFockVector c_r_a(const DenseFockVector &f, const DenseFockVector &g, unsigned r, const CotangentModel &model);

DenseFockVector t1(const DenseFockVector &f, const DiagonalOperator &A, int sign);

// Coefficient formula prod_a c_a^{m_a} / m_a! for xi = sum c_a gamma_a.
DenseFockVector wick_exp(const ExactSeries &xi, std::shared_ptr<const DenseBasis> basis);

} // namespace hida::oracle

#endif
