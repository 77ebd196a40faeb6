#pragma once

#include <string>
#include <vector>

#include "simulwave/hum.hpp"
#include "simulwave/waves.hpp"

namespace simulwave::io {

/// 64-bit FNV-1a of the byte string, rendered as 16 lowercase hex digits.
/// Stamps every report with the exact config bytes it was produced from.
std::string fnv1a_hex(const std::string& bytes);

/// Round-trip safe decimal rendering of a double (printf %.17g).
std::string format_double(double value);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// One channel of a signal as CSV with header "t,x,value", time-major rows.
std::string signal_channel_csv(const waves::ControlSignal& signal, int channel);

/// Rebuilds a signal from per-channel CSV documents produced by
/// signal_channel_csv. The grids are inferred from the t and x columns and
/// must be uniform and identical across channels.
waves::ControlSignal read_signal_csv(const std::vector<std::string>& channel_csvs);

/// JSON metadata accompanying an exported signal:
/// {"n":…, "m":…, "N":…, "T":…, "omega":[lo, hi]}.
std::string signal_metadata_json(int components, int controls, int modes,
                                 const waves::ObservationWindow& window);

/// JSON record of a Gramian and its generalized spectrum:
/// {"n":…, "N":…, "T":…, "omega":[lo, hi], "eigenvalues":[…]}.
std::string gramian_record_json(const hum::Gramian& gramian,
                                const std::vector<double>& eigenvalues);

/// CSV of a horizon scan with header "T,lambda_min,kernel_dim".
std::string scan_csv(const std::vector<hum::ScanPoint>& points);

}  // namespace simulwave::io
