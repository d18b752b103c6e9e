#ifndef HIDA_CALIBRATION_HPP
#define HIDA_CALIBRATION_HPP

#include <optional>
#include <string_view>
#include <vector>

#include "hida/star.hpp"

namespace hida
{

enum class CalibrationStatus { unique, underdetermined, none };

std::string_view to_string(CalibrationStatus status);

struct CalibrationCandidate {
    CotangentConvention convention;
    // Largest residual coefficient over all probes, evaluated on the dense oracle.
    double gauge_residual = 0.0;
    double exchange_residual = 0.0;
    bool passed = false;
};

struct CalibrationResult {
    CalibrationStatus status = CalibrationStatus::none;
    int probe_mode = 1;
    Rational probe_lambda;
    std::vector<CalibrationCandidate> candidates;
    std::optional<CotangentConvention> selected;
};

struct CalibrationOptions {
    // Test fixture: the reference lambda = 0 product uses the opposite
    // bracket sign, which no candidate can reconcile.
    bool flip_reference_bracket = false;
};

// Enumerates prefactor in {1, -1, 1/2, -1/2} x bracket sign x T_1 sign x
// exchange shift, and keeps the tuples for which the gauge identity (degree
// <= 2 inputs, order 2) and the exchange formula (degree 0, order 1) hold
// exactly on the dense oracle. The probe mode is the smallest |m| with
// lambda_m != 0.
CalibrationResult calibrate(const DiagonalOperator &A, const CalibrationOptions &options = {});

} // namespace hida

#endif
