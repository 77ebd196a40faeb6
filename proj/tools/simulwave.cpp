#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "simulwave/hum.hpp"
#include "simulwave/io.hpp"
#include "simulwave/kalman.hpp"
#include "simulwave/metric1d.hpp"
#include "simulwave/numerics.hpp"
#include "simulwave/rays1d.hpp"
#include "simulwave/waves.hpp"

namespace {

using nlohmann::json;
using namespace simulwave;

constexpr double kPi = 3.14159265358979323846;

const char kUsage[] =
    "usage: simulwave <command> --config <path> [--out <dir>]\n"
    "\n"
    "commands:\n"
    "  kalman          rank report for a speed system, including the block normal form\n"
    "  spectrum        metric eigenvalues, finite differences against the closed formula\n"
    "  counterexample  invisible-pair metric: residuals, plateau values, arclength\n"
    "  gramian         observability Gramian eigenvalue report\n"
    "  control         control synthesis with round-trip verification, CSV export\n"
    "  scan-time       observability constant against the time horizon, CSV export\n"
    "  gcc             ray escape times for an observation window\n"
    "\n"
    "Reads one JSON config, writes <command>_report.json (plus any CSV files) into\n"
    "the output directory, and prints the report to stdout. Exit codes: 0 success,\n"
    "2 invalid config, 3 numerical failure, 64 bad usage, 65 malformed JSON.\n";

json matrix_json(const numerics::DenseMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

kalman::SpeedSystem system_from(const json& cfg) {
  kalman::SpeedSystem sys;
  sys.speeds = cfg.at("speeds").get<std::vector<double>>();
  const auto rows = cfg.at("control_matrix").get<std::vector<std::vector<double>>>();
  if (rows.empty() || rows.front().empty()) {
    throw std::invalid_argument("control_matrix must be a nonempty array of rows");
  }
  sys.control_matrix = numerics::DenseMatrix(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) {
      throw std::invalid_argument("control_matrix rows must have equal length");
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) sys.control_matrix(i, j) = rows[i][j];
  }
  kalman::validate(sys);
  return sys;
}

waves::ObservationWindow window_from(const json& cfg) {
  const json& w = cfg.at("window");
  waves::ObservationWindow win{w.at("a").get<double>(), w.at("b").get<double>(),
                               w.at("T").get<double>()};
  waves::validate(win);
  return win;
}

waves::ModalData modal_from(const json& j, const kalman::SpeedSystem& sys) {
  waves::ModalData data;
  data.pos = j.at("pos").get<std::vector<std::vector<double>>>();
  data.vel = j.at("vel").get<std::vector<std::vector<double>>>();
  waves::validate(data);
  if (data.components() != static_cast<int>(sys.components())) {
    throw std::invalid_argument("modal data component count must match the system");
  }
  return data;
}

metric1d::Metric1D metric_from(const json& cfg) {
  const std::string kind = cfg.at("metric").get<std::string>();
  if (kind == "constant") {
    return metric1d::constant_metric(cfg.at("value").get<double>());
  }
  if (kind == "counterexample") {
    const json& prof = cfg.at("profile");
    const auto p = metric1d::build_chi(prof.at("a").get<double>(), prof.at("b").get<double>(),
                                       prof.at("K").get<double>());
    return metric1d::counterexample_metric(p);
  }
  throw std::invalid_argument("metric must be \"constant\" or \"counterexample\", got \"" +
                              kind + "\"");
}

json resonance_json(double L, int qmax, double tol) {
  const auto r = metric1d::resonance_check(L, qmax, tol);
  if (!r) return json(nullptr);
  return json{{"p", r->first}, {"q", r->second}};
}

json run_kalman(const json& cfg) {
  const auto sys = system_from(cfg);
  const double rank_tol_cfg = cfg.value("rank_tol", 0.0);
  const double rank_tol = rank_tol_cfg > 0.0 ? rank_tol_cfg : 1e-8;
  const double speed_tol = cfg.value("speed_tol", 1e-9);

  const auto km = kalman::kalman_matrix(sys);
  const auto nf = kalman::block_normal_form(sys, speed_tol);

  json blocks = json::array();
  std::size_t block_rank_sum = 0;
  for (const auto& b : nf.decomposition.blocks) {
    blocks.push_back(
        {{"speed", b.speed}, {"multiplicity", b.multiplicity}, {"rank", b.rank}});
    block_rank_sum += b.rank;
  }

  json report;
  report["rank"] = numerics::rank_with_tolerance(km, rank_tol_cfg);
  report["full_rank"] = kalman::kalman_rank_ok(sys, rank_tol_cfg);
  report["full_rank_via_blocks"] = kalman::kalman_via_blocks(sys, speed_tol);
  report["block_rank_sum"] = block_rank_sum;
  report["blocks"] = blocks;
  report["kalman_matrix"] = matrix_json(km);
  report["diagonal_factors"] = nf.diagonal_factors;
  report["tolerances"] = {{"rank_tol", rank_tol}, {"speed_tol", speed_tol}};
  return report;
}

json run_spectrum(const json& cfg) {
  const auto metric = metric_from(cfg);
  const int grid_points = cfg.value("grid_points", 2048);
  const int count = cfg.value("count", 10);
  const int qmax = cfg.value("resonance_qmax", 50);
  const double res_tol = cfg.value("resonance_tol", 1e-6);

  const double L = metric1d::arclength(metric);
  const auto formula = metric1d::dirichlet_spectrum(metric, count);
  const auto fd = metric1d::sturm_liouville_fd(metric, grid_points, count);

  json jformula = json::array();
  json jfd = json::array();
  double max_rel = 0.0;
  for (int k = 0; k < count; ++k) {
    jformula.push_back(formula[k].eigenvalue);
    jfd.push_back(fd[k].eigenvalue);
    max_rel = std::max(max_rel, std::abs(fd[k].eigenvalue - formula[k].eigenvalue) /
                                    formula[k].eigenvalue);
  }

  json report;
  report["L"] = L;
  report["L_over_pi"] = L / kPi;
  report["eigenvalues_formula"] = jformula;
  report["eigenvalues_fd"] = jfd;
  report["max_relative_error"] = max_rel;
  report["resonance"] = resonance_json(L, qmax, res_tol);
  report["grid_points"] = grid_points;
  report["count"] = count;
  report["tolerances"] = {{"resonance_tol", res_tol}, {"resonance_qmax", qmax}};
  return report;
}

json run_counterexample(const json& cfg) {
  const json& prof = cfg.at("profile");
  const auto p = metric1d::build_chi(prof.at("a").get<double>(), prof.at("b").get<double>(),
                                     prof.at("K").get<double>());
  const auto metric = metric1d::counterexample_metric(p);
  const int n = cfg.value("grid_points", 2048);
  if (n < 32) throw std::invalid_argument("grid_points must be at least 32");

  const double h = kPi / (n + 1);
  std::vector<double> u(static_cast<std::size_t>(n) + 2, 0.0);
  for (int i = 1; i <= n; ++i) {
    const double x = i * h;
    u[static_cast<std::size_t>(i)] = -p.chi(x) * std::sin(x);
  }
  const auto flux = metric1d::laplace_beltrami_apply(metric, u, h);

  double c_min = std::numeric_limits<double>::infinity();
  double residual = 0.0;
  double fd_residual_on_window = 0.0;
  double invisible_on = 0.0;
  double invisible_off = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double x = i * h;
    const double sx = std::sin(x);
    const double cx = std::cos(x);
    const double chi = p.chi(x);
    const double ui = u[static_cast<std::size_t>(i)];
    const double du = -(p.chi_prime(x) * sx + chi * cx);
    const double ddu = -(p.chi_second(x) * sx + 2.0 * p.chi_prime(x) * cx - chi * sx);
    const double c = metric.c(x);
    c_min = std::min(c_min, c);
    residual = std::max(
        residual, std::abs(ddu / c - metric.c_prime(x) * du / (2.0 * c * c) + ui));
    const double sum = sx + ui;
    if (x >= p.a && x <= p.b) {
      invisible_on = std::max(invisible_on, std::abs(sum));
      fd_residual_on_window = std::max(
          fd_residual_on_window, std::abs(flux[static_cast<std::size_t>(i)] + ui));
    } else {
      invisible_off = std::max(invisible_off, std::abs(sum));
    }
  }

  const double L = metric1d::arclength(metric);
  const int qmax = cfg.value("resonance_qmax", 50);
  const double res_tol = cfg.value("resonance_tol", 1e-6);

  json report;
  report["c_min"] = c_min;
  report["residual_inf"] = residual;
  report["fd_residual_on_omega"] = fd_residual_on_window;
  report["invisible_max_on_omega"] = invisible_on;
  report["invisible_max_off_omega"] = invisible_off;
  report["L"] = L;
  report["L_over_pi"] = L / kPi;
  report["nearest_integer_gap"] = std::abs(L / kPi - std::round(L / kPi));
  report["resonance"] = resonance_json(L, qmax, res_tol);
  report["grid_points"] = n;
  report["tolerances"] = {{"residual_tol", 1e-4},
                          {"invisible_tol", 1e-12},
                          {"integer_tol", 1e-6},
                          {"resonance_tol", res_tol},
                          {"resonance_qmax", qmax}};
  return report;
}

json run_gramian(const json& cfg) {
  const auto sys = system_from(cfg);
  const auto win = window_from(cfg);
  const int modes = cfg.value("modes", 8);
  const double kernel_tol = cfg.value("kernel_tol", 0.0);

  const auto gramian = hum::assemble_gramian(sys, win, modes);
  const auto spectrum = hum::gramian_spectrum(gramian);

  json report = json::parse(io::gramian_record_json(gramian, spectrum));
  report["lambda_min"] = spectrum.front();
  report["kernel_dim"] = hum::kernel_dim(gramian, kernel_tol);
  report["tolerances"] = {{"kernel_tol", kernel_tol > 0.0 ? kernel_tol : 1e-10},
                          {"kernel_tol_relative", !(kernel_tol > 0.0)}};
  return report;
}

struct HandlerResult {
  json report;
  std::string failure;
};

HandlerResult run_control(const json& cfg, const std::string& out_dir) {
  const auto sys = system_from(cfg);
  const auto win = window_from(cfg);
  const int modes = cfg.value("modes", 8);
  const auto init = modal_from(cfg.at("init"), sys);
  const auto target =
      cfg.contains("target")
          ? modal_from(cfg.at("target"), sys)
          : waves::zero_modal_data(static_cast<int>(sys.components()), modes);
  const double tol = cfg.value("tol", 1e-9);
  const double round_trip_tol = cfg.value("round_trip_tol", 1e-6);
  const int n_t = cfg.value("n_t", 0);
  const int n_x = cfg.value("n_x", 0);

  const auto signal =
      hum::synthesize_control(sys, win, modes, init, target, tol, n_t, n_x);
  const auto final_state = waves::forward_solve(sys, signal, init);

  waves::ModalData gap = final_state;
  for (int j = 0; j < gap.components(); ++j) {
    for (int k = 0; k < gap.modes(); ++k) {
      gap.pos[j][k] -= target.pos[j][k];
      gap.vel[j][k] -= target.vel[j][k];
    }
  }
  const auto sum_energy = [&sys](const waves::ModalData& d) {
    double total = 0.0;
    for (double e : waves::energy(sys, d)) total += e;
    return total;
  };
  const double e_init = sum_energy(init);
  const double e_target = sum_energy(target);
  const double e_gap = sum_energy(gap);
  const double denom = e_init + e_target;
  const double relative = denom > 0.0 ? e_gap / denom : e_gap;

  json files = json::array();
  for (int c = 0; c < signal.controls(); ++c) {
    const std::string name = "control_channel_" + std::to_string(c) + ".csv";
    io::write_text_file(out_dir + "/" + name, io::signal_channel_csv(signal, c));
    files.push_back(name);
  }
  io::write_text_file(out_dir + "/control_metadata.json",
                      io::signal_metadata_json(static_cast<int>(sys.components()),
                                               signal.controls(), modes, win));
  files.push_back("control_metadata.json");

  HandlerResult result;
  result.report["initial_energy"] = e_init;
  result.report["target_energy"] = e_target;
  result.report["final_gap_energy"] = e_gap;
  result.report["round_trip_relative_energy"] = relative;
  result.report["round_trip_ok"] = relative <= round_trip_tol;
  result.report["n_t"] = signal.n_t;
  result.report["n_x"] = signal.n_x;
  result.report["files"] = files;
  result.report["tolerances"] = {{"gramian_solve_tol", tol},
                                 {"round_trip_tol", round_trip_tol}};
  if (relative > round_trip_tol) {
    result.failure = "round-trip relative energy " + io::format_double(relative) +
                     " exceeds " + io::format_double(round_trip_tol);
  }
  return result;
}

json run_scan_time(const json& cfg, const std::string& out_dir) {
  const auto sys = system_from(cfg);
  const json& omega = cfg.at("omega");
  const double lo = omega.at("a").get<double>();
  const double hi = omega.at("b").get<double>();
  const int modes = cfg.value("modes", 8);
  const auto horizons = cfg.at("times").get<std::vector<double>>();

  const auto points = hum::time_scan(sys, lo, hi, modes, horizons);
  io::write_text_file(out_dir + "/scan.csv", io::scan_csv(points));

  json jpoints = json::array();
  for (const auto& p : points) {
    jpoints.push_back(
        {{"T", p.horizon}, {"lambda_min", p.constant}, {"kernel_dim", p.kernel}});
  }
  json report;
  report["points"] = jpoints;
  report["csv"] = "scan.csv";
  report["tolerances"] = {{"kernel_tol", 1e-10}, {"kernel_tol_relative", true}};
  return report;
}

json run_gcc(const json& cfg) {
  const json& w = cfg.at("window");
  const double lo = w.at("a").get<double>();
  const double hi = w.at("b").get<double>();
  const auto speeds = cfg.at("speeds").get<std::vector<double>>();
  if (speeds.empty()) throw std::invalid_argument("at least one speed is required");

  json times = json::array();
  double worst = 0.0;
  for (double d : speeds) {
    const double brute = rays1d::gcc_time(lo, hi, d);
    times.push_back({{"d", d},
                     {"time", brute},
                     {"analytic", rays1d::gcc_time_analytic(lo, hi, d)}});
    worst = std::max(worst, brute);
  }

  json report;
  report["times"] = times;
  report["worst_time"] = worst;
  if (w.contains("T")) {
    const double T = w.at("T").get<double>();
    report["horizon"] = T;
    report["satisfied"] = rays1d::gcc_satisfied(lo, hi, T, speeds);
  }
  report["tolerances"] = {{"sweep_starts", 2000}, {"sweep_step", kPi / 1999.0}};
  return report;
}

}  // namespace

int main(int argc, char** argv) {
  static const std::vector<std::string> kCommands = {
      "kalman", "spectrum", "counterexample", "gramian", "control", "scan-time", "gcc"};

  if (argc < 2) {
    std::fputs(kUsage, stderr);
    return 64;
  }
  const std::string command = argv[1];
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
    std::fprintf(stderr, "simulwave: unknown command '%s'\n", command.c_str());
    std::fputs(kUsage, stderr);
    return 64;
  }

  std::string config_path;
  std::string out_dir = ".";
  for (int i = 2; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) {
      config_path = argv[++i];
    } else if (arg == "--out" && i + 1 < argc) {
      out_dir = argv[++i];
    } else {
      std::fprintf(stderr, "simulwave: unexpected argument '%s'\n", arg.c_str());
      std::fputs(kUsage, stderr);
      return 64;
    }
  }
  if (config_path.empty()) {
    std::fputs("simulwave: --config is required\n", stderr);
    std::fputs(kUsage, stderr);
    return 64;
  }

  std::string raw;
  try {
    raw = io::read_text_file(config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "simulwave: %s\n", e.what());
    return 2;
  }

  json cfg;
  try {
    cfg = json::parse(raw);
  } catch (const json::parse_error& e) {
    std::fprintf(stderr, "simulwave: %s\n", e.what());
    return 65;
  }

  try {
    std::filesystem::create_directories(out_dir);

    HandlerResult result;
    if (command == "kalman") {
      result.report = run_kalman(cfg);
    } else if (command == "spectrum") {
      result.report = run_spectrum(cfg);
    } else if (command == "counterexample") {
      result.report = run_counterexample(cfg);
    } else if (command == "gramian") {
      result.report = run_gramian(cfg);
    } else if (command == "control") {
      result = run_control(cfg, out_dir);
    } else if (command == "scan-time") {
      result.report = run_scan_time(cfg, out_dir);
    } else {
      result.report = run_gcc(cfg);
    }

    result.report["command"] = command;
    result.report["config_hash"] = io::fnv1a_hex(raw);
    const std::string text = result.report.dump(2) + "\n";
    io::write_text_file(out_dir + "/" + command + "_report.json", text);
    std::fputs(text.c_str(), stdout);

    if (!result.failure.empty()) {
      std::fprintf(stderr, "simulwave: %s\n", result.failure.c_str());
      return 3;
    }
    return 0;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "simulwave: config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "simulwave: %s\n", e.what());
    return 2;
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "simulwave: %s\n", e.what());
    return 3;
  }
}
