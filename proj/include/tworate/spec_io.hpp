#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "tworate/accumulation.hpp"
#include "tworate/balance.hpp"
#include "tworate/streams.hpp"

namespace tworate {

/// Malformed text, schema violation or invariant violation in a JSON spec.
/// The message starts with the offending field path.
class SpecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using ParsedSpec = std::variant<StepStream, RegulatedStream, AccumulationFunction>;

/// Stream specs:
///   {"kind":"step","flows":[{"t":0.0,"amount":-100.0}, ...]}
///   {"kind":"piecewise","segments":[{"from":0.0,"to":1.0,"poly":[0.0,1.0]}, ...]}
/// Accumulation specs:
///   {"kind":"constant_rate","i":0.05}
///   {"kind":"power","x":1.1}
///   {"kind":"force","segments":[{"from":0.0,"to":1.0,"delta_poly":[0.1]}]}
///   {"kind":"product","of":[<accumulation spec>, ...]}
/// Polynomial coefficients ascend in powers of (t - from).
ParsedSpec parse_spec(std::string_view text);
Stream parse_stream_spec(std::string_view text);
AccumulationFunction parse_accumulation_spec(std::string_view text);

/// Reads a whole file; throws SpecError when it cannot be opened.
std::string read_text_file(const std::string& path);

/// 17 significant digits, '.' decimal separator.
std::string format_number(double value);

std::string to_spec_json(const StepStream& f);
std::string to_spec_json(const RegulatedStream& f);
std::string to_spec_json(const AccumulationFunction& a);

/// Header `t,balance,branch`, one row per event.
void write_trajectory_csv(std::ostream& out, const BalanceTrajectory& trajectory);

/// Header `t,value`, one row per sample time.
void write_samples_csv(std::ostream& out, const Stream& f, std::span<const double> times);

/// Writes to a sibling temporary file and renames it over `path` on success,
/// so a failed write never leaves a partial file behind.
void write_file_atomically(const std::string& path, std::string_view contents);

}  // namespace tworate
