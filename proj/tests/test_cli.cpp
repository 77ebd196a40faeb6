#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "simulwave/io.hpp"
#include "simulwave/waves.hpp"

// End-to-end checks of the simulwave binary: exit codes, report content,
// and byte-identical reruns. The binary path comes from the build system.

namespace fs = std::filesystem;
using nlohmann::json;
using namespace simulwave;

namespace {

constexpr double kPi = 3.14159265358979323846;

fs::path scratch_root() {
  static const fs::path root = fs::temp_directory_path() /
                               ("simulwave_cli_tests_" + std::to_string(getpid()));
  return root;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = scratch_root() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct CliRun {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CliRun run_cli(const std::string& args, const fs::path& dir) {
  const fs::path out_file = dir / "stdout.txt";
  const fs::path err_file = dir / "stderr.txt";
  const std::string cmd = std::string(SIMULWAVE_BIN) + " " + args + " >" +
                          out_file.string() + " 2>" + err_file.string();
  const int rc = std::system(cmd.c_str());
  CliRun run;
  if (rc != -1 && WIFEXITED(rc)) run.exit_code = WEXITSTATUS(rc);
  run.out = io::read_text_file(out_file.string());
  run.err = io::read_text_file(err_file.string());
  return run;
}

std::string write_config(const fs::path& dir, const std::string& text) {
  const fs::path path = dir / "config.json";
  io::write_text_file(path.string(), text);
  return path.string();
}

}  // namespace

TEST_CASE("usage errors exit 64 and print the usage text") {
  const fs::path dir = fresh_dir("usage");

  CliRun run = run_cli("", dir);
  CHECK(run.exit_code == 64);
  CHECK(run.err.find("usage: simulwave") != std::string::npos);

  run = run_cli("frobnicate --config nope.json", dir);
  CHECK(run.exit_code == 64);
  CHECK(run.err.find("unknown command") != std::string::npos);

  run = run_cli("kalman", dir);
  CHECK(run.exit_code == 64);

  run = run_cli("kalman --config nope.json extra", dir);
  CHECK(run.exit_code == 64);
}

TEST_CASE("malformed JSON exits 65") {
  const fs::path dir = fresh_dir("badjson");
  const std::string cfg = write_config(dir, "{\"speeds\": [1, 2,\n");
  const CliRun run = run_cli("kalman --config " + cfg, dir);
  CHECK(run.exit_code == 65);
  CHECK(run.err.find("parse") != std::string::npos);
}

TEST_CASE("invalid configurations exit 2") {
  const fs::path dir = fresh_dir("invalid");

  CliRun run = run_cli("kalman --config " + (dir / "missing.json").string(), dir);
  CHECK(run.exit_code == 2);

  std::string cfg =
      write_config(dir, R"({"speeds": [1, -2], "control_matrix": [[1], [1]]})");
  run = run_cli("kalman --config " + cfg, dir);
  CHECK(run.exit_code == 2);

  cfg = write_config(dir, R"({"speeds": [1, 2]})");
  run = run_cli("kalman --config " + cfg, dir);
  CHECK(run.exit_code == 2);

  cfg = write_config(dir, R"({"speeds": "two", "control_matrix": [[1], [1]]})");
  run = run_cli("kalman --config " + cfg, dir);
  CHECK(run.exit_code == 2);

  cfg = write_config(dir, R"({"speeds": [1, 2], "control_matrix": [[1], [1]],
                              "window": {"a": 1.0, "b": 4.0, "T": 5.0}, "modes": 3})");
  run = run_cli("gramian --config " + cfg, dir);
  CHECK(run.exit_code == 2);
}

TEST_CASE("steering an unobservable system exits 3") {
  const fs::path dir = fresh_dir("unobservable");
  const std::string cfg = write_config(dir, R"({
    "speeds": [1, 1],
    "control_matrix": [[1], [1]],
    "window": {"a": 0.5, "b": 2.6, "T": 7.0},
    "modes": 2,
    "init": {"pos": [[1.0, 0.0], [0.0, 0.5]], "vel": [[0.0, 0.0], [0.0, 0.0]]}
  })");
  const CliRun run = run_cli("control --config " + cfg + " --out " +
                                 (dir / "out").string(),
                             dir);
  CHECK(run.exit_code == 3);
  CHECK(run.err.find("unobservable") != std::string::npos);
}

TEST_CASE("kalman run reports the anchor rank facts") {
  const fs::path dir = fresh_dir("kalman");
  const std::string cfg = write_config(
      dir, R"({"speeds": [1, 1, 2], "control_matrix": [[1, 0], [0, 1], [1, 0]]})");
  const fs::path out = dir / "out";
  const CliRun run = run_cli("kalman --config " + cfg + " --out " + out.string(), dir);
  REQUIRE(run.exit_code == 0);

  const json report = json::parse(run.out);
  CHECK(report.at("command") == "kalman");
  CHECK(report.at("rank") == 3);
  CHECK(report.at("full_rank") == true);
  CHECK(report.at("full_rank_via_blocks") == true);
  CHECK(report.at("block_rank_sum") == 3);
  REQUIRE(report.at("blocks").size() == 2);

  const json expected_matrix = json::parse(
      "[[1.0, 0.0, 1.0, 0.0, 1.0, 0.0],"
      " [0.0, 1.0, 0.0, 1.0, 0.0, 1.0],"
      " [4.0, 0.0, 2.0, 0.0, 1.0, 0.0]]");
  CHECK(report.at("kalman_matrix") == expected_matrix);

  CHECK(report.at("config_hash") ==
        io::fnv1a_hex(io::read_text_file(cfg)));
  CHECK(report.at("tolerances").contains("rank_tol"));

  CHECK(io::read_text_file((out / "kalman_report.json").string()) == run.out);
}

TEST_CASE("counterexample run reproduces the invisibility report") {
  const fs::path dir = fresh_dir("counterexample");
  const std::string cfg = write_config(
      dir, R"({"profile": {"a": 1.7, "b": 2.2, "K": 2.0}, "grid_points": 2048})");
  const CliRun run = run_cli("counterexample --config " + cfg + " --out " +
                                 (dir / "out").string(),
                             dir);
  REQUIRE(run.exit_code == 0);

  const json report = json::parse(run.out);
  CHECK(report.at("c_min").get<double>() > 0.0);
  CHECK(report.at("residual_inf").get<double>() <= 1e-4);
  CHECK(report.at("invisible_max_on_omega").get<double>() <= 1e-12);
  CHECK(report.at("invisible_max_off_omega").get<double>() >= 0.1);
  CHECK(report.at("nearest_integer_gap").get<double>() <= 1e-6);
  CHECK(report.at("tolerances").at("residual_tol") == 1e-4);
  CHECK(report.at("resonance").at("q") == 1);
}

TEST_CASE("zero control matrix yields the degenerate Gramian report") {
  const fs::path dir = fresh_dir("gramian0");
  const std::string cfg = write_config(dir, R"({
    "speeds": [1, 2],
    "control_matrix": [[0], [0]],
    "window": {"a": 0.5, "b": 2.6, "T": 7.0},
    "modes": 3
  })");
  const CliRun run = run_cli("gramian --config " + cfg, dir);
  REQUIRE(run.exit_code == 0);

  const json report = json::parse(run.out);
  CHECK(report.at("lambda_min").get<double>() == 0.0);
  CHECK(report.at("kernel_dim") == 2 * 2 * 3);
  CHECK(report.at("eigenvalues").size() == 12);
}

TEST_CASE("full-window Gramian report returns the flat eigenvalue") {
  const fs::path dir = fresh_dir("gramian_full");
  const std::string cfg = write_config(dir, R"({
    "speeds": [1],
    "control_matrix": [[1]],
    "window": {"a": 0.0, "b": 3.14159265358979323846, "T": 6.283185307179586476925287},
    "modes": 2
  })");
  const CliRun run = run_cli("gramian --config " + cfg, dir);
  REQUIRE(run.exit_code == 0);

  const json report = json::parse(run.out);
  for (const auto& ev : report.at("eigenvalues")) {
    CHECK(std::abs(ev.get<double>() - kPi) <= 1e-10 * kPi);
  }
  CHECK(report.at("kernel_dim") == 0);
}

TEST_CASE("control run verifies the round trip and exports CSV") {
  const fs::path dir = fresh_dir("control");
  const std::string cfg = write_config(dir, R"({
    "speeds": [1, 4],
    "control_matrix": [[1], [1]],
    "window": {"a": 0.5, "b": 2.6, "T": 7.0},
    "modes": 3,
    "init": {
      "pos": [[0.5, 0.0, 0.0], [0.0, 0.3, 0.0]],
      "vel": [[0.0, 0.0, 0.2], [0.1, 0.0, 0.0]]
    }
  })");

  const fs::path out1 = dir / "run1";
  const CliRun run = run_cli("control --config " + cfg + " --out " + out1.string(), dir);
  REQUIRE(run.exit_code == 0);

  const json report = json::parse(run.out);
  CHECK(report.at("round_trip_ok") == true);
  CHECK(report.at("round_trip_relative_energy").get<double>() <= 1e-6);
  CHECK(report.at("initial_energy").get<double>() > 0.0);

  const fs::path csv_path = out1 / "control_channel_0.csv";
  REQUIRE(fs::exists(csv_path));
  const std::string csv = io::read_text_file(csv_path.string());
  CHECK(csv.rfind("t,x,value\n", 0) == 0);

  const waves::ControlSignal signal = io::read_signal_csv({csv});
  CHECK(signal.n_t == report.at("n_t").get<int>());
  CHECK(signal.n_x == report.at("n_x").get<int>());
  CHECK(signal.horizon == doctest::Approx(7.0));

  REQUIRE(fs::exists(out1 / "control_metadata.json"));
  const json meta = json::parse(io::read_text_file((out1 / "control_metadata.json").string()));
  CHECK(meta.at("n") == 2);
  CHECK(meta.at("N") == 3);

  const fs::path out2 = dir / "run2";
  const CliRun rerun =
      run_cli("control --config " + cfg + " --out " + out2.string(), dir);
  REQUIRE(rerun.exit_code == 0);
  CHECK(rerun.out == run.out);
  CHECK(io::read_text_file((out2 / "control_channel_0.csv").string()) == csv);
}

TEST_CASE("scan-time and gcc runs emit the documented artifacts") {
  const fs::path dir = fresh_dir("scan_gcc");
  const std::string scan_cfg = write_config(dir, R"({
    "speeds": [1],
    "control_matrix": [[1]],
    "omega": {"a": 0.7853981633974483, "b": 1.5707963267948966},
    "modes": 2,
    "times": [2.0, 3.0, 4.0]
  })");
  const fs::path out = dir / "out";
  CliRun run = run_cli("scan-time --config " + scan_cfg + " --out " + out.string(), dir);
  REQUIRE(run.exit_code == 0);

  const std::string csv = io::read_text_file((out / "scan.csv").string());
  CHECK(csv.rfind("T,lambda_min,kernel_dim\n", 0) == 0);
  const json scan_report = json::parse(run.out);
  REQUIRE(scan_report.at("points").size() == 3);
  CHECK(scan_report.at("points")[0].at("T") == 2.0);
  CHECK(scan_report.at("points")[2].at("lambda_min").get<double>() >
        scan_report.at("points")[0].at("lambda_min").get<double>());

  const std::string gcc_cfg = write_config(dir, R"({
    "window": {"a": 0.7853981633974483, "b": 1.5707963267948966, "T": 4.0},
    "speeds": [1, 4]
  })");
  run = run_cli("gcc --config " + gcc_cfg + " --out " + out.string(), dir);
  REQUIRE(run.exit_code == 0);

  const json gcc_report = json::parse(run.out);
  CHECK(std::abs(gcc_report.at("worst_time").get<double>() - kPi) <= 1e-2);
  CHECK(gcc_report.at("satisfied") == true);
  const auto& times = gcc_report.at("times");
  REQUIRE(times.size() == 2);
  CHECK(std::abs(times[0].at("time").get<double>() -
                 2.0 * times[1].at("time").get<double>()) <= 1e-2);
}
