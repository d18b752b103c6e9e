#ifndef HIDA_IO_HPP
#define HIDA_IO_HPP

#include <stdexcept>
#include <string>

#include "json.hpp"

#include "hida/calibration.hpp"
#include "hida/fock_series.hpp"
#include "hida/norms.hpp"
#include "hida/star.hpp"
#include "hida/symplectic.hpp"

namespace hida::io
{

using Json = nlohmann::ordered_json;

// Malformed or non-canonical input document. The message names the field or
// term at fault.
class InputError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

Json read_json_file(const std::string &path);
// Two-space indentation and a trailing newline.
void write_json_file(const std::string &path, const Json &doc);
void write_text_file(const std::string &path, const std::string &text);
std::string dump(const Json &doc);

// {"mode", "model", "dimension", "terms": [{"index": [[k, i, mult], ...],
// "re", "im"}]}, plus "degree_cap" when the series carries one.
template <typename T>
Json series_to_json(const FockSeries<T> &f);

// Index lists must be strictly increasing with positive multiplicities and
// no multiindex may appear twice. An exact document may be read as FLOAT;
// the converse is rejected.
template <typename T>
FockSeries<T> series_from_json(const Json &doc);

Json model_to_json(const SymplecticModel &model);
// Loop or cotangent model document. The cotangent bracket sign is taken
// from the convention, not from the document.
SymplecticModel model_from_json(const Json &doc);
// Eigenvalues from a cotangent model document or from a bare
// {"table": ...} / {"formula": ...} object with optional "growth".
DiagonalOperator diagonal_from_json(const Json &doc);
Json diagonal_to_json(const DiagonalOperator &A);

Json convention_to_json(const ConventionFields &fields);
Json convention_to_json(const CotangentConvention &conv);
CotangentConvention cotangent_convention_from_json(const Json &doc);

template <typename T>
Json deformation_to_json(const DeformationSeries<T> &x, const ConventionFields &convention);

Json residual_to_json(const ResidualReport &report);
Json calibration_to_json(const CalibrationResult &result);

Json params_to_json(const NormParams &p);
Json mode_sum_to_json(const ModeSumReport &report, const Json &params);
std::string mode_sum_to_csv(const ModeSumReport &report, const std::string &label);
Json probe_to_json(const ProbeReport &report);
std::string probe_to_csv(const ProbeReport &report);

} // namespace hida::io

#endif
