#pragma once

#include <vector>

#include "simulwave/kalman.hpp"
#include "simulwave/matrix.hpp"
#include "simulwave/waves.hpp"

namespace simulwave::hum {

inline constexpr int kPositionSlot = 0;
inline constexpr int kVelocitySlot = 1;

/// Observability Gramian of the truncated system: the quadratic form
///   z^T form z = int_0^T int_omega |B^T V_z|^2 dx dt
/// over the modal coordinates of the adjoint data z, together with the
/// diagonal norm matrix the observability constant is measured against
/// (position slots pi/2, velocity slots (pi/2) / (d_j k^2)).
///
/// Rows follow index(component, mode, slot): component outermost, then mode
/// (1-based), then the position/velocity slot.
struct Gramian {
  numerics::DenseMatrix form;
  numerics::DenseMatrix norm;
  int components = 0;
  int modes = 0;
  waves::ObservationWindow window;

  int size() const { return 2 * components * modes; }
  int index(int component, int mode, int slot) const;
};

/// Builds the Gramian from closed-form space and time integrals; the
/// resonant equal-frequency branches are evaluated with their exact limits.
/// Assembly splits across SIMULWAVE_THREADS worker threads (default 1) with
/// bitwise-identical results for every schedule.
Gramian assemble_gramian(const kalman::SpeedSystem& system,
                         const waves::ObservationWindow& window, int modes);

/// All generalized eigenvalues of (form, norm), ascending.
std::vector<double> gramian_spectrum(const Gramian& gramian);

/// Smallest generalized eigenvalue of (form, norm): the best discrete
/// observability constant at this truncation. Strictly positive exactly
/// when the truncated system is observable from the window.
double observability_constant(const Gramian& gramian);

/// Number of generalized eigenvalues below tol. tol <= 0 selects the
/// default cutoff 1e-10 relative to the largest eigenvalue, which separates
/// the analytically exact kernel from discretization noise.
int kernel_dim(const Gramian& gramian, double tol = 0.0);

/// The matching eigenvectors, one column per kernel direction (norm-matrix
/// orthonormal): approximate invisible solutions of the truncated system.
numerics::DenseMatrix kernel_directions(const Gramian& gramian, double tol = 0.0);

/// Control steering `init` at t = 0 to `target` at t = T, where T and the
/// acting region come from the window. The task is reduced to null control
/// of init - S(-T) target (S the free flow), the Gramian system G z = r is
/// solved by conjugate gradients, and the returned signal samples
/// B^T V_z on the window grid.
///
/// Requires observability_constant > tol (throws std::runtime_error
/// otherwise; use synthesize_partial_control when the kernel is nonempty).
/// n_t and n_x override the sampling resolution; zero picks defaults dense
/// enough for forward_solve round trips.
waves::ControlSignal synthesize_control(const kalman::SpeedSystem& system,
                                        const waves::ObservationWindow& window, int modes,
                                        const waves::ModalData& init,
                                        const waves::ModalData& target, double tol,
                                        int n_t = 0, int n_x = 0);

struct PartialControl {
  waves::ControlSignal signal;
  int rank = 0;
};

/// Like synthesize_control, but inverts the Gramian only on generalized
/// eigendirections with eigenvalue above the cutoff (<= 0 selects the
/// kernel_dim default). The control steers the projection of the state onto
/// those directions; rank reports how many were used. Works for any system,
/// including unobservable ones.
PartialControl synthesize_partial_control(const kalman::SpeedSystem& system,
                                          const waves::ObservationWindow& window, int modes,
                                          const waves::ModalData& init,
                                          const waves::ModalData& target, double cutoff = 0.0,
                                          int n_t = 0, int n_x = 0);

struct ScanPoint {
  double horizon = 0.0;
  double constant = 0.0;
  int kernel = 0;
};

/// Gramian diagnostics over a strictly increasing list of horizons with a
/// fixed spatial window. The constant is nondecreasing in the horizon.
std::vector<ScanPoint> time_scan(const kalman::SpeedSystem& system, double omega_lo,
                                 double omega_hi, int modes,
                                 const std::vector<double>& horizons);

}  // namespace simulwave::hum
