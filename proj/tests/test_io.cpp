#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>

#include <json.hpp>

#include "simulwave/io.hpp"

using namespace simulwave;
using namespace simulwave::io;

namespace {

const double kPi = std::acos(-1.0);

waves::ControlSignal random_signal(int channels, int n_t, int n_x, std::mt19937& rng) {
  waves::ObservationWindow window{0.5, 2.6, 3.0};
  waves::ControlSignal signal = waves::zero_signal(channels, window, n_t, n_x);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  for (auto& channel : signal.channels)
    for (double& v : channel) v = dist(rng);
  return signal;
}

}  // namespace

TEST_CASE("config hash matches the published test vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("hello") == "a430d84680aabd0b");
  CHECK(fnv1a_hex("hello") != fnv1a_hex("hellp"));
}

TEST_CASE("decimal rendering round-trips doubles bit for bit") {
  std::mt19937 rng(20260824);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> values = {0.0, 1.0, -1.0, kPi, 1.0 / 3.0, 1e-300, 1e300, 2.5e-17};
  for (int i = 0; i < 50; ++i) values.push_back(std::ldexp(dist(rng), i - 25));
  for (double v : values) {
    const std::string text = format_double(v);
    CHECK(std::strtod(text.c_str(), nullptr) == v);
  }
}

TEST_CASE("signal CSV export and import round-trip exactly") {
  std::mt19937 rng(5);
  const waves::ControlSignal original = random_signal(2, 5, 7, rng);
  const std::vector<std::string> csvs = {signal_channel_csv(original, 0),
                                         signal_channel_csv(original, 1)};
  CHECK(csvs[0].substr(0, 10) == "t,x,value\n");
  const waves::ControlSignal loaded = read_signal_csv(csvs);
  CHECK(loaded.n_t == original.n_t);
  CHECK(loaded.n_x == original.n_x);
  CHECK(loaded.x_lo == original.x_lo);
  CHECK(loaded.x_hi == original.x_hi);
  CHECK(loaded.horizon == original.horizon);
  REQUIRE(loaded.controls() == 2);
  for (int c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < original.channels[c].size(); ++i)
      CHECK(loaded.channels[c][i] == original.channels[c][i]);
}

TEST_CASE("malformed signal CSV is rejected") {
  std::mt19937 rng(7);
  const waves::ControlSignal signal = random_signal(1, 4, 3, rng);
  std::string good = signal_channel_csv(signal, 0);
  CHECK_THROWS_AS(read_signal_csv({}), std::invalid_argument);
  CHECK_THROWS_AS(read_signal_csv({"wrong,header\n1,2,3\n"}), std::invalid_argument);
  std::string broken = good;
  broken.replace(broken.find('\n') + 1, 3, "abc");
  CHECK_THROWS_AS(read_signal_csv({broken}), std::invalid_argument);
  const waves::ControlSignal other = random_signal(1, 5, 4, rng);
  CHECK_THROWS_AS(read_signal_csv({good, signal_channel_csv(other, 0)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(signal_channel_csv(signal, 1), std::invalid_argument);
}

TEST_CASE("signal metadata carries the shape and the window") {
  waves::ObservationWindow window{0.25, 2.5, 6.0};
  const std::string text = signal_metadata_json(2, 1, 8, window);
  const nlohmann::json meta = nlohmann::json::parse(text);
  CHECK(meta.at("n") == 2);
  CHECK(meta.at("m") == 1);
  CHECK(meta.at("N") == 8);
  CHECK(meta.at("T") == 6.0);
  CHECK(meta.at("omega")[0] == 0.25);
  CHECK(meta.at("omega")[1] == 2.5);
  CHECK_THROWS_AS(signal_metadata_json(0, 1, 8, window), std::invalid_argument);
}

TEST_CASE("gramian records embed the spectrum") {
  kalman::SpeedSystem sys;
  sys.speeds = {1.0};
  sys.control_matrix = numerics::DenseMatrix(1, 1);
  sys.control_matrix(0, 0) = 1.0;
  const waves::ObservationWindow window{0.0, kPi, 2.0 * kPi};
  const hum::Gramian gramian = hum::assemble_gramian(sys, window, 2);
  const std::vector<double> spectrum = hum::gramian_spectrum(gramian);
  const nlohmann::json record = nlohmann::json::parse(gramian_record_json(gramian, spectrum));
  CHECK(record.at("n") == 1);
  CHECK(record.at("N") == 2);
  CHECK(record.at("T") == 2.0 * kPi);
  REQUIRE(record.at("eigenvalues").size() == 4);
  for (double v : record.at("eigenvalues"))
    CHECK(v == doctest::Approx(kPi).epsilon(1e-10));
}

TEST_CASE("scan CSV lists one row per horizon") {
  std::vector<hum::ScanPoint> points = {{1.0, 0.5, 0}, {2.0, 0.75, 0}, {3.0, 1.25, 2}};
  const std::string csv = scan_csv(points);
  CHECK(csv.substr(0, 24) == "T,lambda_min,kernel_dim\n");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.find("3,1.25,2\n") != std::string::npos);
}

TEST_CASE("text files round-trip and missing files are flagged") {
  const std::string path = "io_scratch_check.txt";
  const std::string body = "line one\nline two\n";
  write_text_file(path, body);
  CHECK(read_text_file(path) == body);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_text_file("no_such_file_here.txt"), std::invalid_argument);
}
