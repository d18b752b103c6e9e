#ifndef HIDA_CHECKS_HPP
#define HIDA_CHECKS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hida/calibration.hpp"
#include "hida/io.hpp"
#include "hida/norms.hpp"

namespace hida::checks
{

// Pass/fail count of one named assertion over all trials of a suite.
struct Tally {
    std::string name;
    std::size_t passed = 0;
    std::size_t failed = 0;
    std::string first_failure;

    void record(bool ok, const std::string &what);
};

struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<Tally> tallies;
    ConventionFields convention;
    io::Json details = io::Json::object();

    bool passed() const;
    Tally &tally(const std::string &name);
};

io::Json to_json(const SuiteReport &report);

struct AxiomOptions {
    std::uint64_t seed = 42;
    std::size_t wick_trials = 100;
    std::size_t poisson_trials = 100;
    std::size_t star_trials = 100;
    unsigned order = 4;
    LoopModel loop;
};

// Wick commutativity and associativity; antisymmetry, Jacobi, Leibniz and
// vanishing on constants of the bracket (loop and cotangent models); star
// product slot axioms and associativity for several prefactors; *_h^A
// associativity with random eigenvalues; degree bookkeeping of P_l, T_1, T'.
SuiteReport axioms_suite(const AxiomOptions &options);

struct OracleOptions {
    std::uint64_t seed = 42;
    std::size_t trials = 200;
    int kmax = 2;
    int max_degree = 3;
};

// Sparse against dense results for every operation, exact equality.
SuiteReport oracle_suite(const OracleOptions &options);

// Convention used by the cotangent suites: the unique calibrated tuple, or
// the first passing tuple when calibration is underdetermined (the tied
// tuples give identical products). Empty when no tuple passes.
std::optional<CotangentConvention> calibrated_convention(const CalibrationResult &result);

struct GaugeOptions {
    std::uint64_t seed = 42;
    std::size_t polynomial_trials = 100;
    std::size_t exponential_trials = 20;
    unsigned order = 3;
    int exact_degree = 4;
    // Fixed eigenvalues; when empty each trial draws its own.
    std::optional<DiagonalOperator> A;
    // Skips calibration when set.
    std::optional<CotangentConvention> convention;
};

SuiteReport gauge_suite(const GaugeOptions &options);

struct ExchangeOptions {
    std::uint64_t seed = 42;
    std::size_t trials = 20;
    unsigned order = 3;
    int exact_degree = 4;
    std::optional<DiagonalOperator> A;
    std::optional<CotangentConvention> convention;
};

SuiteReport exchange_suite(const ExchangeOptions &options);

struct NormsOptions {
    std::uint64_t seed = 42;
    std::size_t trials = 100;
    NormParams params{4.0, 0.5, 1.0};
    int kmax = 50;
    int n = 2;
    int max_degree = 8;
    // Also report the Hilbert-Schmidt embedding params -> embedding_to.
    std::optional<NormParams> embedding_to;
};

// Nuclearity sum (with an independent recheck of the summability
// precondition) and norm properties on random FLOAT series.
SuiteReport norms_suite(const NormsOptions &options);

struct ProbeOptions {
    ProbeConfig config;
    // Expected report document; compared field by field when present.
    std::optional<io::Json> golden;
};

SuiteReport probe_suite(const ProbeOptions &options);

} // namespace hida::checks

#endif
