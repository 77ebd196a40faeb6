#include "simulwave/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace simulwave::io {

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string signal_channel_csv(const waves::ControlSignal& signal, int channel) {
  waves::validate(signal);
  if (channel < 0 || channel >= signal.controls())
    throw std::invalid_argument("signal_channel_csv: channel out of range");
  std::string out = "t,x,value\n";
  for (int it = 0; it < signal.n_t; ++it) {
    const std::string t = format_double(signal.time_at(it));
    for (int ix = 0; ix < signal.n_x; ++ix) {
      out += t;
      out += ',';
      out += format_double(signal.space_at(ix));
      out += ',';
      out += format_double(signal.value(channel, it, ix));
      out += '\n';
    }
  }
  return out;
}

namespace {

struct ParsedChannel {
  std::vector<double> t, x, value;
};

ParsedChannel parse_channel(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != "t,x,value")
    throw std::invalid_argument("signal CSV: missing t,x,value header");
  ParsedChannel parsed;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double cols[3];
    const char* cursor = line.c_str();
    for (int c = 0; c < 3; ++c) {
      char* end = nullptr;
      cols[c] = std::strtod(cursor, &end);
      if (end == cursor) throw std::invalid_argument("signal CSV: malformed number");
      cursor = end;
      if (c < 2) {
        if (*cursor != ',') throw std::invalid_argument("signal CSV: expected comma");
        ++cursor;
      }
    }
    if (*cursor != '\0') throw std::invalid_argument("signal CSV: trailing characters");
    parsed.t.push_back(cols[0]);
    parsed.x.push_back(cols[1]);
    parsed.value.push_back(cols[2]);
  }
  if (parsed.t.size() < 9) throw std::invalid_argument("signal CSV: too few rows");
  return parsed;
}

}  // namespace

waves::ControlSignal read_signal_csv(const std::vector<std::string>& channel_csvs) {
  if (channel_csvs.empty())
    throw std::invalid_argument("read_signal_csv: need at least one channel");
  waves::ControlSignal signal;
  for (std::size_t c = 0; c < channel_csvs.size(); ++c) {
    const ParsedChannel parsed = parse_channel(channel_csvs[c]);
    if (c == 0) {
      std::size_t n_x = 1;
      while (n_x < parsed.t.size() && parsed.t[n_x] == parsed.t[0]) ++n_x;
      if (n_x < 3 || parsed.t.size() % n_x != 0)
        throw std::invalid_argument("signal CSV: rows do not form a grid");
      signal.n_x = static_cast<int>(n_x);
      signal.n_t = static_cast<int>(parsed.t.size() / n_x);
      if (signal.n_t < 3) throw std::invalid_argument("signal CSV: too few time samples");
      signal.x_lo = parsed.x.front();
      signal.x_hi = parsed.x[n_x - 1];
      signal.horizon = parsed.t.back();
    }
    const std::size_t expected = static_cast<std::size_t>(signal.n_t) * signal.n_x;
    if (parsed.t.size() != expected)
      throw std::invalid_argument("signal CSV: channels disagree on the grid");
    for (int it = 0; it < signal.n_t; ++it)
      for (int ix = 0; ix < signal.n_x; ++ix) {
        const std::size_t row = static_cast<std::size_t>(it) * signal.n_x + ix;
        const double t_ref = signal.horizon * it / (signal.n_t - 1);
        const double x_ref =
            signal.x_lo + (signal.x_hi - signal.x_lo) * ix / (signal.n_x - 1);
        if (std::abs(parsed.t[row] - t_ref) > 1e-9 || std::abs(parsed.x[row] - x_ref) > 1e-9)
          throw std::invalid_argument("signal CSV: grid is not uniform");
      }
    signal.channels.push_back(parsed.value);
  }
  waves::validate(signal);
  return signal;
}

std::string signal_metadata_json(int components, int controls, int modes,
                                 const waves::ObservationWindow& window) {
  waves::validate(window);
  if (components < 1 || controls < 1 || modes < 1)
    throw std::invalid_argument("signal_metadata_json: counts must be positive");
  nlohmann::json meta;
  meta["n"] = components;
  meta["m"] = controls;
  meta["N"] = modes;
  meta["T"] = window.horizon;
  meta["omega"] = {window.omega_lo, window.omega_hi};
  return meta.dump(2) + "\n";
}

std::string gramian_record_json(const hum::Gramian& gramian,
                                const std::vector<double>& eigenvalues) {
  nlohmann::json record;
  record["n"] = gramian.components;
  record["N"] = gramian.modes;
  record["T"] = gramian.window.horizon;
  record["omega"] = {gramian.window.omega_lo, gramian.window.omega_hi};
  record["eigenvalues"] = eigenvalues;
  return record.dump(2) + "\n";
}

std::string scan_csv(const std::vector<hum::ScanPoint>& points) {
  std::string out = "T,lambda_min,kernel_dim\n";
  for (const auto& point : points) {
    out += format_double(point.horizon);
    out += ',';
    out += format_double(point.constant);
    out += ',';
    out += std::to_string(point.kernel);
    out += '\n';
  }
  return out;
}

}  // namespace simulwave::io
