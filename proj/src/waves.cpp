#include "simulwave/waves.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "simulwave/numerics.hpp"

namespace simulwave::waves {
namespace {

const double kPi = std::acos(-1.0);

// Mirrors numerics::simpson_sampled as a weight vector so one pass can
// integrate many integrands sampled on the same grid.
std::vector<double> simpson_weights(int n, double h) {
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  const int intervals = n - 1;
  const int paired = intervals % 2 == 0 ? intervals : intervals - 1;
  for (int i = 0; i + 2 <= paired; i += 2) {
    w[i] += h / 3.0;
    w[i + 1] += 4.0 * h / 3.0;
    w[i + 2] += h / 3.0;
  }
  if (paired != intervals) {
    w[n - 3] += -h / 12.0;
    w[n - 2] += 8.0 * h / 12.0;
    w[n - 1] += 5.0 * h / 12.0;
  }
  return w;
}

void require_finite(double v, const char* message) {
  if (!std::isfinite(v)) throw std::invalid_argument(message);
}

void check_pairing(const kalman::SpeedSystem& system, const ModalData& data) {
  kalman::validate(system);
  validate(data);
  if (data.components() != static_cast<int>(system.components()))
    throw std::invalid_argument("modal data and system disagree on the component count");
}

// Mode indices (1-based) carrying a nonzero coefficient, per component.
// Evaluation loops visit only these, so sparse states cost accordingly.
std::vector<std::vector<int>> active_modes(const ModalData& data) {
  std::vector<std::vector<int>> active(data.pos.size());
  for (std::size_t j = 0; j < data.pos.size(); ++j)
    for (std::size_t i = 0; i < data.pos[j].size(); ++i)
      if (data.pos[j][i] != 0.0 || data.vel[j][i] != 0.0)
        active[j].push_back(static_cast<int>(i) + 1);
  return active;
}

}  // namespace

ModalData zero_modal_data(int components, int modes) {
  if (components < 1 || modes < 1)
    throw std::invalid_argument("zero_modal_data: need at least one component and one mode");
  ModalData data;
  data.pos.assign(components, std::vector<double>(modes, 0.0));
  data.vel.assign(components, std::vector<double>(modes, 0.0));
  return data;
}

void validate(const ModalData& data) {
  if (data.pos.empty() || data.pos.size() != data.vel.size())
    throw std::invalid_argument("modal data: position and velocity component counts differ");
  const std::size_t modes = data.pos.front().size();
  if (modes == 0) throw std::invalid_argument("modal data: need at least one mode");
  for (std::size_t j = 0; j < data.pos.size(); ++j) {
    if (data.pos[j].size() != modes || data.vel[j].size() != modes)
      throw std::invalid_argument("modal data: ragged coefficient rows");
    for (double v : data.pos[j]) require_finite(v, "modal data: non-finite position coefficient");
    for (double v : data.vel[j]) require_finite(v, "modal data: non-finite velocity coefficient");
  }
}

void validate(const ObservationWindow& window) {
  require_finite(window.omega_lo, "observation window: non-finite lower edge");
  require_finite(window.omega_hi, "observation window: non-finite upper edge");
  require_finite(window.horizon, "observation window: non-finite horizon");
  if (!(window.omega_lo >= 0.0) || !(window.omega_hi > window.omega_lo) ||
      !(window.omega_hi <= kPi))
    throw std::invalid_argument("observation window: need 0 <= lo < hi <= pi");
  if (!(window.horizon > 0.0))
    throw std::invalid_argument("observation window: horizon must be positive");
}

ControlSignal zero_signal(int controls, const ObservationWindow& window, int n_t, int n_x) {
  validate(window);
  if (controls < 1) throw std::invalid_argument("zero_signal: need at least one channel");
  if (n_t < 3 || n_x < 3)
    throw std::invalid_argument("zero_signal: need at least three samples per axis");
  ControlSignal signal;
  signal.x_lo = window.omega_lo;
  signal.x_hi = window.omega_hi;
  signal.horizon = window.horizon;
  signal.n_t = n_t;
  signal.n_x = n_x;
  signal.channels.assign(controls,
                         std::vector<double>(static_cast<std::size_t>(n_t) * n_x, 0.0));
  return signal;
}

void validate(const ControlSignal& signal) {
  ObservationWindow window;
  window.omega_lo = signal.x_lo;
  window.omega_hi = signal.x_hi;
  window.horizon = signal.horizon;
  validate(window);
  if (signal.n_t < 3 || signal.n_x < 3)
    throw std::invalid_argument("control signal: need at least three samples per axis");
  if (signal.channels.empty())
    throw std::invalid_argument("control signal: need at least one channel");
  const std::size_t expected = static_cast<std::size_t>(signal.n_t) * signal.n_x;
  for (const auto& channel : signal.channels) {
    if (channel.size() != expected)
      throw std::invalid_argument("control signal: channel length does not match the grid");
    for (double v : channel) require_finite(v, "control signal: non-finite sample");
  }
}

std::vector<double> adjoint_eval(const kalman::SpeedSystem& system, const ModalData& data,
                                 double t, double x) {
  check_pairing(system, data);
  require_finite(t, "adjoint_eval: non-finite time");
  require_finite(x, "adjoint_eval: non-finite position");
  const int n = data.components();
  const int modes = data.modes();
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    const double root = std::sqrt(system.speeds[j]);
    double sum = 0.0;
    for (int k = 1; k <= modes; ++k) {
      const double p = data.pos[j][k - 1];
      const double v = data.vel[j][k - 1];
      if (p == 0.0 && v == 0.0) continue;
      const double w = root * k;
      sum += std::sin(k * x) * (p * std::cos(w * t) + v * std::sin(w * t) / w);
    }
    out[j] = sum;
  }
  return out;
}

ModalData free_propagate(const kalman::SpeedSystem& system, const ModalData& data, double t) {
  check_pairing(system, data);
  require_finite(t, "free_propagate: non-finite time");
  const int n = data.components();
  const int modes = data.modes();
  ModalData out = zero_modal_data(n, modes);
  for (int j = 0; j < n; ++j) {
    const double root = std::sqrt(system.speeds[j]);
    for (int k = 1; k <= modes; ++k) {
      const double w = root * k;
      const double c = std::cos(w * t);
      const double s = std::sin(w * t);
      const double p = data.pos[j][k - 1];
      const double v = data.vel[j][k - 1];
      out.pos[j][k - 1] = p * c + v * s / w;
      out.vel[j][k - 1] = -p * w * s + v * c;
    }
  }
  return out;
}

ControlSignal observation(const kalman::SpeedSystem& system, const ModalData& data,
                          const ObservationWindow& window, int n_t, int n_x) {
  check_pairing(system, data);
  validate(window);
  if (n_t < 3 || n_x < 3)
    throw std::invalid_argument("observation: need at least three samples per axis");
  const int n = data.components();
  const int modes = data.modes();
  const int m = static_cast<int>(system.controls());
  ControlSignal signal = zero_signal(m, window, n_t, n_x);
  const std::vector<std::vector<int>> active = active_modes(data);

  std::vector<double> sinkx(static_cast<std::size_t>(modes) * n_x);
  for (int k = 1; k <= modes; ++k)
    for (int ix = 0; ix < n_x; ++ix)
      sinkx[static_cast<std::size_t>(k - 1) * n_x + ix] = std::sin(k * signal.space_at(ix));

  std::vector<double> amp(static_cast<std::size_t>(n) * modes, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  for (int it = 0; it < n_t; ++it) {
    const double t = signal.time_at(it);
    for (int j = 0; j < n; ++j) {
      const double root = std::sqrt(system.speeds[j]);
      for (int k : active[j]) {
        const double w = root * k;
        amp[static_cast<std::size_t>(j) * modes + (k - 1)] =
            data.pos[j][k - 1] * std::cos(w * t) + data.vel[j][k - 1] * std::sin(w * t) / w;
      }
    }
    for (int ix = 0; ix < n_x; ++ix) {
      for (int j = 0; j < n; ++j) {
        double sum = 0.0;
        for (int k : active[j])
          sum += sinkx[static_cast<std::size_t>(k - 1) * n_x + ix] *
                 amp[static_cast<std::size_t>(j) * modes + (k - 1)];
        v[j] = sum;
      }
      for (int c = 0; c < m; ++c) {
        double obs = 0.0;
        for (int j = 0; j < n; ++j) obs += system.control_matrix(j, c) * v[j];
        signal.value(c, it, ix) = obs;
      }
    }
  }
  return signal;
}

ModalData forward_solve(const kalman::SpeedSystem& system, const ControlSignal& control,
                        const ModalData& init) {
  check_pairing(system, init);
  validate(control);
  if (control.controls() != static_cast<int>(system.controls()))
    throw std::invalid_argument("forward_solve: channel count does not match the system");
  const int n = init.components();
  const int modes = init.modes();
  const int m = control.controls();
  const double horizon = control.horizon;

  double d_max = 0.0;
  for (double d : system.speeds) d_max = std::max(d_max, d);
  const double required = 20.0 * std::sqrt(d_max) * modes * horizon / (2.0 * kPi);
  if (control.n_t < required)
    throw std::invalid_argument(
        "forward_solve: time grid too coarse for the fastest retained frequency");

  const int n_t = control.n_t;
  const int n_x = control.n_x;
  const std::vector<double> wx = simpson_weights(n_x, control.dx());
  const std::vector<double> wt = simpson_weights(n_t, control.dt());

  std::vector<double> sinkx(static_cast<std::size_t>(modes) * n_x);
  for (int k = 1; k <= modes; ++k)
    for (int ix = 0; ix < n_x; ++ix)
      sinkx[static_cast<std::size_t>(k - 1) * n_x + ix] = std::sin(k * control.space_at(ix));

  // fhat[c][k][it] = (2/pi) int_omega f_c(t_it, x) sin(k x) dx
  std::vector<std::vector<double>> fhat(
      static_cast<std::size_t>(m) * modes, std::vector<double>(static_cast<std::size_t>(n_t)));
  std::vector<double> weighted(static_cast<std::size_t>(n_x));
  for (int it = 0; it < n_t; ++it) {
    for (int c = 0; c < m; ++c) {
      const double* row = control.channels[c].data() + static_cast<std::size_t>(it) * n_x;
      for (int ix = 0; ix < n_x; ++ix) weighted[ix] = row[ix] * wx[ix];
      for (int k = 1; k <= modes; ++k) {
        const double* s = sinkx.data() + static_cast<std::size_t>(k - 1) * n_x;
        double sum = 0.0;
        for (int ix = 0; ix < n_x; ++ix) sum += weighted[ix] * s[ix];
        fhat[static_cast<std::size_t>(c) * modes + (k - 1)][it] = (2.0 / kPi) * sum;
      }
    }
  }

  ModalData out = zero_modal_data(n, modes);
  std::vector<double> source(static_cast<std::size_t>(n_t));
  for (int j = 0; j < n; ++j) {
    const double root = std::sqrt(system.speeds[j]);
    for (int k = 1; k <= modes; ++k) {
      const double w = root * k;
      for (int it = 0; it < n_t; ++it) {
        double g = 0.0;
        for (int c = 0; c < m; ++c)
          g += system.control_matrix(j, c) * fhat[static_cast<std::size_t>(c) * modes + (k - 1)][it];
        source[it] = g;
      }
      double duhamel_pos = 0.0;
      double duhamel_vel = 0.0;
      for (int it = 0; it < n_t; ++it) {
        const double lag = w * (horizon - control.time_at(it));
        duhamel_pos += wt[it] * source[it] * std::sin(lag) / w;
        duhamel_vel += wt[it] * source[it] * std::cos(lag);
      }
      const double c = std::cos(w * horizon);
      const double s = std::sin(w * horizon);
      const double p = init.pos[j][k - 1];
      const double v = init.vel[j][k - 1];
      out.pos[j][k - 1] = p * c + v * s / w + duhamel_pos;
      out.vel[j][k - 1] = -p * w * s + v * c + duhamel_vel;
    }
  }
  return out;
}

std::vector<double> energy(const kalman::SpeedSystem& system, const ModalData& data) {
  check_pairing(system, data);
  const int n = data.components();
  const int modes = data.modes();
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    for (int k = 1; k <= modes; ++k) {
      const double p = data.pos[j][k - 1];
      const double v = data.vel[j][k - 1];
      sum += system.speeds[j] * k * k * p * p + v * v;
    }
    out[j] = (kPi / 4.0) * sum;
  }
  return out;
}

}  // namespace simulwave::waves
