#ifndef HIDA_NORMS_HPP
#define HIDA_NORMS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hida/fock_series.hpp"
#include "hida/star.hpp"
#include "hida/symplectic.hpp"

namespace hida
{

// Weight constants of the Hida weight w_r(I) = prod (C1 k^2 + 1)^{r/2} and of
// the norm ||F||^2_{r,C} = sum |b_I|^2 w_r(I) C^{|I|}.
struct NormParams {
    double r = 0.0;
    double C = 1.0;
    double C1 = 1.0;

    void validate() const;
};

double hida_weight(const MultiIndex &index, const NormParams &p);

template <typename T>
double hida_norm(const FockSeries<T> &f, const NormParams &p);

// Exact w_r(I) for even r and rational C1 (EXACT cross-check path).
Rational hida_weight_exact(const MultiIndex &index, unsigned r, const Rational &C1);

// A sum over multiindices of prod_a x_a^{m_a}, with one ratio x_a per basis
// direction. Fields are filled as far as the precondition allows.
struct ModeSumReport {
    bool summable = false;
    std::string diagnostic;
    int kmax = 0;
    int n = 0;
    int max_degree = 0;
    std::size_t retained_modes = 0;
    double x_max = 0.0;
    // Enumeration of all multiindices of degree <= max_degree.
    double direct = 0.0;
    // The same truncation from power sums (Newton identities).
    double closed_form = 0.0;
    // prod_a (1 - x_a)^{-1} over retained modes (all degrees).
    double product = 0.0;
    // Upper bound for sum over |k| > kmax of x_a.
    double tail_bound = 0.0;
    std::string tail_formula;
    // Upper bound for the full infinite sum: product * exp(tail / (1 - x_tail)).
    double total_bound = 0.0;
};

// x_a = C (C1 k^2 + 1)^{-r/2}.
ModeSumReport nuclearity_sum(const NormParams &p, int kmax, int n, int max_degree);

// Squared Hilbert-Schmidt norm of the embedding W.N_{from} -> W.N_{to}:
// x_a = [C_to (C1_to k^2 + 1)^{r_to/2}] / [C_from (C1_from k^2 + 1)^{r_from/2}].
ModeSumReport hs_embedding_norm(const NormParams &from, const NormParams &to, int kmax, int n, int max_degree);

// Sum over all multiindices of degree <= max_degree by explicit enumeration
// (exponential cost; reference for small inputs).
double enumerate_mode_sum(const std::vector<double> &x, int max_degree);
// Complete homogeneous sums h_0 .. h_D by dynamic programming over modes.
std::vector<double> complete_homogeneous(const std::vector<double> &x, int max_degree);
// The same from power sums p_k = sum x^k via k h_k = sum_{i=1}^k p_i h_{k-i}.
std::vector<double> complete_homogeneous_newton(const std::vector<double> &x, int max_degree);

enum class ProbeOp { bracket, p_l, e_a_form };

std::string_view to_string(ProbeOp op);
ProbeOp parse_probe_op(std::string_view text);

struct ProbeConfig {
    ProbeOp op = ProbeOp::bracket;
    unsigned l = 1;
    NormParams target{2.0, 1.0, 1.0};
    NormParams source{6.0, 4.0, 1.0};
    std::size_t samples = 500;
    std::uint64_t seed = 0;
    int max_degree = 4;
    int max_terms = 6;
    int kmax = 3;
    LoopModel loop;
    StarConvention convention;
    DiagonalOperator A;
};

struct ProbeReport {
    ProbeConfig config;
    std::size_t evaluated = 0;
    std::size_t skipped_zero_denominator = 0;
    double K_hat = 0.0;
    // (probability, value) pairs, nearest-rank.
    std::vector<std::pair<double, double>> quantiles;
    double mean = 0.0;
    std::string sampling;
};

// Ratio ||op(F, G)||_target / (||F||_source ||G||_source) over seeded random
// pairs. Sample i uses its own substream, so the report does not depend on
// how the sample is partitioned.
ProbeReport continuity_probe(const ProbeConfig &config);

} // namespace hida

#endif
