#pragma once

#include <vector>

#include "simulwave/kalman.hpp"

namespace simulwave::waves {

/// Sine-series coefficients of a state of the coupled string system on
/// ]0, pi[ with Dirichlet ends. pos[j][k-1] and vel[j][k-1] hold the
/// position and velocity coefficients of sin(k x) for component j,
/// k = 1..modes(). Component j evolves with wave speed squared d_j, so mode
/// k of component j oscillates at angular frequency sqrt(d_j) * k.
struct ModalData {
  std::vector<std::vector<double>> pos;
  std::vector<std::vector<double>> vel;

  int components() const { return static_cast<int>(pos.size()); }
  int modes() const { return pos.empty() ? 0 : static_cast<int>(pos.front().size()); }
};

ModalData zero_modal_data(int components, int modes);

/// Throws std::invalid_argument unless pos and vel describe the same number
/// of components, all rows share one positive mode count, and every entry is
/// finite.
void validate(const ModalData& data);

/// Observation (and control) region: the space interval ]omega_lo, omega_hi[
/// inside ]0, pi[ together with the time horizon T.
struct ObservationWindow {
  double omega_lo = 0.0;
  double omega_hi = 0.0;
  double horizon = 0.0;
};

/// Requires 0 <= omega_lo < omega_hi <= pi and horizon > 0, all finite.
void validate(const ObservationWindow& window);

/// Space-time samples of m scalar fields on the window: a uniform time grid
/// of n_t samples covering [0, T] and a uniform space grid of n_x samples
/// covering [omega_lo, omega_hi]. channels[c] stores field c row-major, time
/// index outermost. Used both for observed adjoint data and for control
/// inputs.
struct ControlSignal {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double horizon = 0.0;
  int n_t = 0;
  int n_x = 0;
  std::vector<std::vector<double>> channels;

  int controls() const { return static_cast<int>(channels.size()); }
  double dt() const { return horizon / (n_t - 1); }
  double dx() const { return (x_hi - x_lo) / (n_x - 1); }
  double time_at(int it) const { return it * dt(); }
  double space_at(int ix) const { return x_lo + ix * dx(); }
  double value(int c, int it, int ix) const {
    return channels[static_cast<std::size_t>(c)][static_cast<std::size_t>(it) * n_x + ix];
  }
  double& value(int c, int it, int ix) {
    return channels[static_cast<std::size_t>(c)][static_cast<std::size_t>(it) * n_x + ix];
  }
};

ControlSignal zero_signal(int controls, const ObservationWindow& window, int n_t, int n_x);

/// Requires consistent grid sizes (n_t >= 3, n_x >= 3, channel lengths
/// n_t * n_x), valid window data, and finite samples.
void validate(const ControlSignal& signal);

/// Value of every component of the free (uncontrolled) solution with initial
/// data `data` at time t and position x:
///   v_j(t, x) = sum_k sin(k x) * [ pos[j][k] cos(w t) + vel[j][k] sin(w t)/w ],
/// w = sqrt(d_j) * k. Exact up to round-off.
std::vector<double> adjoint_eval(const kalman::SpeedSystem& system, const ModalData& data,
                                 double t, double x);

/// Free evolution by time t (either sign): each mode is rotated exactly,
///   pos' = pos cos(w t) + vel sin(w t)/w,   vel' = -pos w sin(w t) + vel cos(w t).
ModalData free_propagate(const kalman::SpeedSystem& system, const ModalData& data, double t);

/// Samples B^T V on the window grid: channel c of the result holds
/// sum_j B(j, c) v_j(t, x) for the free solution with initial data `data`.
ControlSignal observation(const kalman::SpeedSystem& system, const ModalData& data,
                          const ObservationWindow& window, int n_t, int n_x);

/// State at time T of the controlled system
///   u_j'' + d_j k^2 u_j = b_j . f(t, x) restricted to the window,
/// started from `init`. Control channel c acts on component j with gain
/// B(j, c). Per mode, the source is projected by f_k(t) = (2/pi) int_omega
/// f(t, x) sin(k x) dx (Simpson in x) and the response is accumulated with
/// the exact oscillatory kernel via Duhamel's formula, Simpson in time.
///
/// The mode count of the result matches `init`. Requires the control grid to
/// resolve the fastest retained frequency:
/// n_t >= 20 * sqrt(d_max) * modes * T / (2 pi), otherwise the call is
/// rejected with std::invalid_argument.
ModalData forward_solve(const kalman::SpeedSystem& system, const ControlSignal& control,
                        const ModalData& init);

/// Physical energy of each component:
///   E_j = (pi / 4) sum_k ( d_j k^2 pos[j][k]^2 + vel[j][k]^2 ).
/// Constant in time along free evolution.
std::vector<double> energy(const kalman::SpeedSystem& system, const ModalData& data);

}  // namespace simulwave::waves
