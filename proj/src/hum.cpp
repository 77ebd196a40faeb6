#include "simulwave/hum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "simulwave/numerics.hpp"

namespace simulwave::hum {
namespace {

const double kPi = std::acos(-1.0);

// int_0^T cos(a t) cos(b t) dt; the near-resonant branch avoids dividing by
// the vanishing frequency difference.
double cos_cos(double a, double b, double horizon) {
  const double diff = a - b;
  const double sum = a + b;
  const double low =
      std::abs(diff) < 1e-12 ? horizon : std::sin(diff * horizon) / diff;
  return 0.5 * (low + std::sin(sum * horizon) / sum);
}

// int_0^T sin(a t) sin(b t) dt
double sin_sin(double a, double b, double horizon) {
  const double diff = a - b;
  const double sum = a + b;
  const double low =
      std::abs(diff) < 1e-12 ? horizon : std::sin(diff * horizon) / diff;
  return 0.5 * (low - std::sin(sum * horizon) / sum);
}

// (1 - cos(w T)) / w written without cancellation; continuous limit 0 at w = 0.
double versine_over(double w, double horizon) {
  if (w == 0.0) return 0.0;
  const double s = std::sin(0.5 * w * horizon);
  return 2.0 * s * s / w;
}

// int_0^T sin(a t) cos(b t) dt
double sin_cos(double a, double b, double horizon) {
  return 0.5 * (versine_over(a + b, horizon) + versine_over(a - b, horizon));
}

// int_omega sin(k x) sin(q x) dx by the product-to-sum identity.
double sine_overlap(int k, int q, double lo, double hi) {
  if (k == q) {
    const double kk = 2.0 * k;
    return 0.5 * (hi - lo) - (std::sin(kk * hi) - std::sin(kk * lo)) / (2.0 * kk);
  }
  const double dm = k - q;
  const double dp = k + q;
  return 0.5 * ((std::sin(dm * hi) - std::sin(dm * lo)) / dm -
                (std::sin(dp * hi) - std::sin(dp * lo)) / dp);
}

int thread_count() {
  const char* raw = std::getenv("SIMULWAVE_THREADS");
  if (raw == nullptr) return 1;
  char* end = nullptr;
  const long parsed = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || parsed < 1) return 1;
  return static_cast<int>(std::min(parsed, 64L));
}

void decode(int row, int modes, int& component, int& mode, int& slot) {
  component = row / (2 * modes);
  const int rem = row % (2 * modes);
  mode = rem / 2 + 1;
  slot = rem % 2;
}

waves::ModalData from_vector(const std::vector<double>& z, int components, int modes) {
  waves::ModalData data = waves::zero_modal_data(components, modes);
  for (int j = 0; j < components; ++j)
    for (int k = 1; k <= modes; ++k) {
      const int base = (j * modes + (k - 1)) * 2;
      data.pos[j][k - 1] = z[base + kPositionSlot];
      data.vel[j][k - 1] = z[base + kVelocitySlot];
    }
  return data;
}

// Right-hand side of the Gramian system for null control of `reduced`:
// the pairing of the state against the adjoint flow at t = 0.
std::vector<double> steering_rhs(const Gramian& gramian, const waves::ModalData& reduced) {
  std::vector<double> r(static_cast<std::size_t>(gramian.size()), 0.0);
  for (int j = 0; j < gramian.components; ++j)
    for (int k = 1; k <= gramian.modes; ++k) {
      r[gramian.index(j, k, kPositionSlot)] = -(kPi / 2.0) * reduced.vel[j][k - 1];
      r[gramian.index(j, k, kVelocitySlot)] = (kPi / 2.0) * reduced.pos[j][k - 1];
    }
  return r;
}

waves::ModalData reduce_to_null(const kalman::SpeedSystem& system,
                                const waves::ModalData& init, const waves::ModalData& target,
                                double horizon) {
  const waves::ModalData pulled = waves::free_propagate(system, target, -horizon);
  waves::ModalData reduced = init;
  for (std::size_t j = 0; j < reduced.pos.size(); ++j)
    for (std::size_t i = 0; i < reduced.pos[j].size(); ++i) {
      reduced.pos[j][i] -= pulled.pos[j][i];
      reduced.vel[j][i] -= pulled.vel[j][i];
    }
  return reduced;
}

int default_time_samples(const kalman::SpeedSystem& system, double horizon, int modes) {
  double d_max = 0.0;
  for (double d : system.speeds) d_max = std::max(d_max, d);
  const double periods = std::sqrt(d_max) * modes * horizon / (2.0 * kPi);
  return std::max(2001, static_cast<int>(std::ceil(48.0 * periods)) + 1);
}

int default_space_samples(int modes) { return std::max(801, 48 * modes + 1); }

void check_synthesis_args(const kalman::SpeedSystem& system,
                          const waves::ObservationWindow& window, int modes,
                          const waves::ModalData& init, const waves::ModalData& target) {
  kalman::validate(system);
  waves::validate(window);
  if (modes < 1) throw std::invalid_argument("control synthesis: need at least one mode");
  waves::validate(init);
  waves::validate(target);
  if (init.components() != static_cast<int>(system.components()) ||
      target.components() != static_cast<int>(system.components()))
    throw std::invalid_argument("control synthesis: component count mismatch");
  if (init.modes() != modes || target.modes() != modes)
    throw std::invalid_argument("control synthesis: data must carry exactly `modes` modes");
}

}  // namespace

int Gramian::index(int component, int mode, int slot) const {
  if (component < 0 || component >= components || mode < 1 || mode > modes ||
      (slot != kPositionSlot && slot != kVelocitySlot))
    throw std::invalid_argument("Gramian::index: out of range");
  return (component * modes + (mode - 1)) * 2 + slot;
}

Gramian assemble_gramian(const kalman::SpeedSystem& system,
                         const waves::ObservationWindow& window, int modes) {
  kalman::validate(system);
  waves::validate(window);
  if (modes < 1) throw std::invalid_argument("assemble_gramian: need at least one mode");
  const int n = static_cast<int>(system.components());
  const int m = static_cast<int>(system.controls());
  const int size = 2 * n * modes;

  Gramian gramian;
  gramian.components = n;
  gramian.modes = modes;
  gramian.window = window;
  gramian.form = numerics::DenseMatrix(size, size);
  gramian.norm = numerics::DenseMatrix(size, size);

  numerics::DenseMatrix pairings(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      double sum = 0.0;
      for (int c = 0; c < m; ++c)
        sum += system.control_matrix(j, c) * system.control_matrix(l, c);
      pairings(j, l) = sum;
    }

  std::vector<double> roots(n);
  for (int j = 0; j < n; ++j) roots[j] = std::sqrt(system.speeds[j]);

  const double lo = window.omega_lo;
  const double hi = window.omega_hi;
  const double horizon = window.horizon;

  auto fill_rows = [&](int row_begin, int row_end) {
    for (int row = row_begin; row < row_end; ++row) {
      int j, k, slot;
      decode(row, modes, j, k, slot);
      const double wa = roots[j] * k;
      for (int col = row; col < size; ++col) {
        int l, q, tlos;
        decode(col, modes, l, q, tlos);
        const double pairing = pairings(j, l);
        if (pairing == 0.0) {
          gramian.form(row, col) = 0.0;
          continue;
        }
        const double wb = roots[l] * q;
        double time_part;
        if (slot == kPositionSlot && tlos == kPositionSlot)
          time_part = cos_cos(wa, wb, horizon);
        else if (slot == kPositionSlot)
          time_part = sin_cos(wb, wa, horizon) / wb;
        else if (tlos == kPositionSlot)
          time_part = sin_cos(wa, wb, horizon) / wa;
        else
          time_part = sin_sin(wa, wb, horizon) / (wa * wb);
        gramian.form(row, col) = pairing * sine_overlap(k, q, lo, hi) * time_part;
      }
    }
  };

  const int workers = std::min(thread_count(), size);
  if (workers <= 1) {
    fill_rows(0, size);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const int chunk = (size + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int begin = w * chunk;
      const int end = std::min(size, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(fill_rows, begin, end);
    }
    for (auto& worker : pool) worker.join();
  }

  for (int row = 0; row < size; ++row)
    for (int col = 0; col < row; ++col) gramian.form(row, col) = gramian.form(col, row);

  for (int j = 0; j < n; ++j)
    for (int k = 1; k <= modes; ++k) {
      const int base = (j * modes + (k - 1)) * 2;
      gramian.norm(base + kPositionSlot, base + kPositionSlot) = kPi / 2.0;
      gramian.norm(base + kVelocitySlot, base + kVelocitySlot) =
          (kPi / 2.0) / (system.speeds[j] * k * k);
    }
  return gramian;
}

std::vector<double> gramian_spectrum(const Gramian& gramian) {
  return numerics::generalized_eig(gramian.form, gramian.norm).eigenvalues;
}

double observability_constant(const Gramian& gramian) {
  return numerics::generalized_min_eig(gramian.form, gramian.norm);
}

namespace {

int count_below(const std::vector<double>& eigenvalues, double tol) {
  if (tol > 0.0)
    return static_cast<int>(std::count_if(eigenvalues.begin(), eigenvalues.end(),
                                          [tol](double v) { return v < tol; }));
  const double top = eigenvalues.back();
  if (!(top > 0.0)) return static_cast<int>(eigenvalues.size());
  const double cutoff = 1e-10 * top;
  return static_cast<int>(std::count_if(eigenvalues.begin(), eigenvalues.end(),
                                        [cutoff](double v) { return v < cutoff; }));
}

}  // namespace

int kernel_dim(const Gramian& gramian, double tol) {
  return count_below(gramian_spectrum(gramian), tol);
}

numerics::DenseMatrix kernel_directions(const Gramian& gramian, double tol) {
  const numerics::GeneralizedEigen eig =
      numerics::generalized_eig(gramian.form, gramian.norm);
  const int dim = count_below(eig.eigenvalues, tol);
  numerics::DenseMatrix directions(gramian.size(), dim);
  for (int col = 0; col < dim; ++col)
    for (int row = 0; row < gramian.size(); ++row)
      directions(row, col) = eig.eigenvectors(row, col);
  return directions;
}

waves::ControlSignal synthesize_control(const kalman::SpeedSystem& system,
                                        const waves::ObservationWindow& window, int modes,
                                        const waves::ModalData& init,
                                        const waves::ModalData& target, double tol,
                                        int n_t, int n_x) {
  check_synthesis_args(system, window, modes, init, target);
  if (!(tol >= 0.0) || !std::isfinite(tol))
    throw std::invalid_argument("synthesize_control: tol must be finite and nonnegative");
  const Gramian gramian = assemble_gramian(system, window, modes);
  if (!(observability_constant(gramian) > tol))
    throw std::runtime_error(
        "synthesize_control: observability constant at or below tol; "
        "the truncated system is effectively unobservable, use "
        "synthesize_partial_control");
  const waves::ModalData reduced = reduce_to_null(system, init, target, window.horizon);
  const std::vector<double> rhs = steering_rhs(gramian, reduced);
  const std::vector<double> z = numerics::solve_spd(gramian.form, rhs);
  if (n_t <= 0) n_t = default_time_samples(system, window.horizon, modes);
  if (n_x <= 0) n_x = default_space_samples(modes);
  return waves::observation(system, from_vector(z, gramian.components, modes), window, n_t,
                            n_x);
}

PartialControl synthesize_partial_control(const kalman::SpeedSystem& system,
                                          const waves::ObservationWindow& window, int modes,
                                          const waves::ModalData& init,
                                          const waves::ModalData& target, double cutoff,
                                          int n_t, int n_x) {
  check_synthesis_args(system, window, modes, init, target);
  const Gramian gramian = assemble_gramian(system, window, modes);
  const numerics::GeneralizedEigen eig =
      numerics::generalized_eig(gramian.form, gramian.norm);
  const int size = gramian.size();
  const int dropped = count_below(eig.eigenvalues, cutoff);

  const waves::ModalData reduced = reduce_to_null(system, init, target, window.horizon);
  const std::vector<double> rhs = steering_rhs(gramian, reduced);

  // Spectral pseudo-inverse over the retained directions: with the columns
  // z_i norm-orthonormal, r expands as sum (z_i . r) norm z_i, so the
  // solution restricted to the observable part is sum (z_i . r)/lambda_i z_i.
  std::vector<double> z(static_cast<std::size_t>(size), 0.0);
  for (int i = dropped; i < size; ++i) {
    double coeff = 0.0;
    for (int row = 0; row < size; ++row) coeff += eig.eigenvectors(row, i) * rhs[row];
    coeff /= eig.eigenvalues[i];
    for (int row = 0; row < size; ++row) z[row] += coeff * eig.eigenvectors(row, i);
  }

  if (n_t <= 0) n_t = default_time_samples(system, window.horizon, modes);
  if (n_x <= 0) n_x = default_space_samples(modes);
  PartialControl result{waves::observation(system, from_vector(z, gramian.components, modes),
                                           window, n_t, n_x),
                        size - dropped};
  return result;
}

std::vector<ScanPoint> time_scan(const kalman::SpeedSystem& system, double omega_lo,
                                 double omega_hi, int modes,
                                 const std::vector<double>& horizons) {
  kalman::validate(system);
  if (modes < 1) throw std::invalid_argument("time_scan: need at least one mode");
  if (horizons.empty()) throw std::invalid_argument("time_scan: need at least one horizon");
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (!(horizons[i] > 0.0) || !std::isfinite(horizons[i]))
      throw std::invalid_argument("time_scan: horizons must be positive and finite");
    if (i > 0 && !(horizons[i] > horizons[i - 1]))
      throw std::invalid_argument("time_scan: horizons must be strictly increasing");
  }
  std::vector<ScanPoint> points;
  points.reserve(horizons.size());
  for (double horizon : horizons) {
    waves::ObservationWindow window{omega_lo, omega_hi, horizon};
    const Gramian gramian = assemble_gramian(system, window, modes);
    const std::vector<double> spectrum = gramian_spectrum(gramian);
    points.push_back(ScanPoint{horizon, spectrum.front(), count_below(spectrum, 0.0)});
  }
  return points;
}

}  // namespace simulwave::hum
