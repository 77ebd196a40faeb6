#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "simulwave/numerics.hpp"
#include "simulwave/waves.hpp"

using namespace simulwave;
using namespace simulwave::waves;

namespace {

const double kPi = std::acos(-1.0);

kalman::SpeedSystem make_system(std::vector<double> speeds,
                                std::vector<std::vector<double>> b) {
  kalman::SpeedSystem sys;
  sys.speeds = std::move(speeds);
  sys.control_matrix = numerics::DenseMatrix(b.size(), b.front().size());
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b[i].size(); ++j) sys.control_matrix(i, j) = b[i][j];
  return sys;
}

ModalData random_state(int components, int modes, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ModalData data = zero_modal_data(components, modes);
  for (int j = 0; j < components; ++j)
    for (int k = 0; k < modes; ++k) {
      data.pos[j][k] = dist(rng);
      data.vel[j][k] = dist(rng);
    }
  return data;
}

}  // namespace

TEST_CASE("a single position mode is a standing wave") {
  const auto sys = make_system({1.0}, {{1.0}});
  ModalData data = zero_modal_data(1, 1);
  data.pos[0][0] = 1.0;
  std::mt19937 rng(20260824);
  std::uniform_real_distribution<double> tdist(0.0, 9.0), xdist(0.0, kPi);
  for (int trial = 0; trial < 50; ++trial) {
    const double t = tdist(rng), x = xdist(rng);
    const double got = adjoint_eval(sys, data, t, x)[0];
    CHECK(std::abs(got - std::cos(t) * std::sin(x)) < 1e-14);
  }
}

TEST_CASE("a single velocity mode oscillates at the scaled frequency") {
  const auto sys = make_system({4.0}, {{1.0}});
  ModalData data = zero_modal_data(1, 1);
  data.vel[0][0] = 1.0;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> tdist(0.0, 9.0), xdist(0.0, kPi);
  for (int trial = 0; trial < 50; ++trial) {
    const double t = tdist(rng), x = xdist(rng);
    const double got = adjoint_eval(sys, data, t, x)[0];
    CHECK(std::abs(got - 0.5 * std::sin(2.0 * t) * std::sin(x)) < 1e-14);
  }
}

TEST_CASE("evaluation at time zero reproduces the coefficients") {
  const auto sys = make_system({1.0, 4.0}, {{1.0}, {1.0}});
  std::mt19937 rng(11);
  const ModalData data = random_state(2, 6, rng);
  for (double x : {0.3, 1.1, 2.0, 2.9}) {
    const std::vector<double> v0 = adjoint_eval(sys, data, 0.0, x);
    const double eps = 1e-6;
    const std::vector<double> vp = adjoint_eval(sys, data, eps, x);
    const std::vector<double> vm = adjoint_eval(sys, data, -eps, x);
    for (int j = 0; j < 2; ++j) {
      double pos_sum = 0.0, vel_sum = 0.0;
      for (int k = 1; k <= 6; ++k) {
        pos_sum += data.pos[j][k - 1] * std::sin(k * x);
        vel_sum += data.vel[j][k - 1] * std::sin(k * x);
      }
      CHECK(std::abs(v0[j] - pos_sum) < 1e-13);
      CHECK(std::abs((vp[j] - vm[j]) / (2.0 * eps) - vel_sum) < 1e-6);
    }
  }
}

TEST_CASE("free propagation rotates each mode exactly and reverses") {
  const auto sys = make_system({1.0, 4.0}, {{1.0}, {1.0}});
  std::mt19937 rng(13);
  const ModalData data = random_state(2, 10, rng);
  const double t = 1.37;
  const ModalData moved = free_propagate(sys, data, t);
  for (int j = 0; j < 2; ++j) {
    const double root = std::sqrt(sys.speeds[j]);
    for (int k = 1; k <= 10; ++k) {
      const double w = root * k;
      const double p = data.pos[j][k - 1], v = data.vel[j][k - 1];
      CHECK(std::abs(moved.pos[j][k - 1] - (p * std::cos(w * t) + v * std::sin(w * t) / w)) <
            1e-14);
      CHECK(std::abs(moved.vel[j][k - 1] - (-p * w * std::sin(w * t) + v * std::cos(w * t))) <
            1e-14);
    }
  }
  const ModalData back = free_propagate(sys, moved, -t);
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 10; ++k) {
      CHECK(std::abs(back.pos[j][k] - data.pos[j][k]) < 1e-13);
      CHECK(std::abs(back.vel[j][k] - data.vel[j][k]) < 1e-13);
    }
  // Flipping the velocity sign turns forward propagation into the return
  // trip: another T with the flip applied twice restores the data.
  ModalData flipped = moved;
  for (auto& row : flipped.vel)
    for (double& v : row) v = -v;
  ModalData returned = free_propagate(sys, flipped, t);
  for (auto& row : returned.vel)
    for (double& v : row) v = -v;
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 10; ++k) {
      CHECK(std::abs(returned.pos[j][k] - data.pos[j][k]) < 1e-10);
      CHECK(std::abs(returned.vel[j][k] - data.vel[j][k]) < 1e-10);
    }
  // Propagating the data and evaluating at time zero matches evaluating
  // the original data at time t.
  for (double x : {0.4, 1.9, 2.8}) {
    const std::vector<double> direct = adjoint_eval(sys, data, t, x);
    const std::vector<double> shifted = adjoint_eval(sys, moved, 0.0, x);
    for (int j = 0; j < 2; ++j) CHECK(std::abs(direct[j] - shifted[j]) < 1e-12);
  }
}

TEST_CASE("free evolution conserves the energy of every component") {
  const auto sys = make_system({1.0, 4.0}, {{1.0}, {1.0}});
  std::mt19937 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const ModalData data = random_state(2, 16, rng);
    std::uniform_real_distribution<double> tdist(0.1, 10.0);
    const double t = tdist(rng);
    const std::vector<double> before = energy(sys, data);
    const std::vector<double> after = energy(sys, free_propagate(sys, data, t));
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(after[j] - before[j]) < 1e-10 * std::abs(before[j]));
  }
}

TEST_CASE("energy of a single mode has the closed form") {
  const auto sys = make_system({3.0}, {{1.0}});
  ModalData data = zero_modal_data(1, 5);
  data.pos[0][3] = 1.0;  // mode k = 4
  const std::vector<double> e = energy(sys, data);
  CHECK(e[0] == doctest::Approx(kPi / 4.0 * 3.0 * 16.0).epsilon(1e-14));
  data.pos[0][3] = 0.0;
  data.vel[0][1] = 2.0;
  CHECK(energy(sys, data)[0] == doctest::Approx(kPi).epsilon(1e-14));
}

TEST_CASE("observation applies the control matrix to the components") {
  const auto sys = make_system({1.0, 4.0}, {{1.0, 0.0}, {0.0, 1.0}});
  std::mt19937 rng(19);
  const ModalData data = random_state(2, 5, rng);
  ObservationWindow window{0.5, 2.6, 3.0};
  const ControlSignal signal = observation(sys, data, window, 41, 33);
  for (int it : {0, 7, 40})
    for (int ix : {0, 11, 32}) {
      const std::vector<double> v =
          adjoint_eval(sys, data, signal.time_at(it), signal.space_at(ix));
      CHECK(std::abs(signal.value(0, it, ix) - v[0]) < 1e-13);
      CHECK(std::abs(signal.value(1, it, ix) - v[1]) < 1e-13);
    }
  const auto summed = make_system({1.0, 4.0}, {{1.0}, {1.0}});
  const ControlSignal stacked = observation(summed, data, window, 41, 33);
  for (int it : {3, 25})
    for (int ix : {5, 20}) {
      const std::vector<double> v =
          adjoint_eval(sys, data, stacked.time_at(it), stacked.space_at(ix));
      CHECK(std::abs(stacked.value(0, it, ix) - (v[0] + v[1])) < 1e-13);
    }
}

TEST_CASE("opposite data on a shared speed is invisible to a summed observation") {
  const auto sys = make_system({2.0, 2.0}, {{1.0}, {1.0}});
  std::mt19937 rng(23);
  ModalData data = random_state(2, 8, rng);
  for (int k = 0; k < 8; ++k) {
    data.pos[1][k] = -data.pos[0][k];
    data.vel[1][k] = -data.vel[0][k];
  }
  ObservationWindow window{0.2, 3.0, 5.0};
  const ControlSignal signal = observation(sys, data, window, 61, 41);
  for (double v : signal.channels[0]) CHECK(v == 0.0);
}

TEST_CASE("forward solve without forcing equals free propagation") {
  const auto sys = make_system({1.0, 4.0}, {{1.0}, {1.0}});
  std::mt19937 rng(29);
  const ModalData init = random_state(2, 12, rng);
  ObservationWindow window{0.5, 2.6, 2.7};
  const ControlSignal off = zero_signal(1, window, 501, 101);
  const ModalData solved = forward_solve(sys, off, init);
  const ModalData free = free_propagate(sys, init, window.horizon);
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 12; ++k) {
      CHECK(std::abs(solved.pos[j][k] - free.pos[j][k]) < 1e-12);
      CHECK(std::abs(solved.vel[j][k] - free.vel[j][k]) < 1e-12);
    }
}

TEST_CASE("resonant forcing grows the matching mode linearly") {
  // u'' + u = cos(t) with rest initial data has u(t) = (t/2) sin t, so the
  // first mode of the solution to f(t, x) = cos(t) sin(x) is known exactly.
  const auto sys = make_system({1.0}, {{1.0}});
  ObservationWindow window{0.0, kPi, 5.0};
  ControlSignal control = zero_signal(1, window, 2001, 801);
  for (int it = 0; it < control.n_t; ++it) {
    const double ct = std::cos(control.time_at(it));
    for (int ix = 0; ix < control.n_x; ++ix)
      control.value(0, it, ix) = ct * std::sin(control.space_at(ix));
  }
  const ModalData init = zero_modal_data(1, 4);
  const ModalData out = forward_solve(sys, control, init);
  const double T = window.horizon;
  CHECK(std::abs(out.pos[0][0] - 0.5 * T * std::sin(T)) < 1e-8);
  CHECK(std::abs(out.vel[0][0] - (0.5 * std::sin(T) + 0.5 * T * std::cos(T))) < 1e-8);
  for (int k = 2; k <= 4; ++k) {
    CHECK(std::abs(out.pos[0][k - 1]) < 1e-8);
    CHECK(std::abs(out.vel[0][k - 1]) < 1e-8);
  }
}

TEST_CASE("components with zero control gain stay at rest") {
  const auto sys = make_system({1.0, 4.0}, {{1.0}, {0.0}});
  ObservationWindow window{0.0, kPi, 5.0};
  ControlSignal control = zero_signal(1, window, 2001, 401);
  for (int it = 0; it < control.n_t; ++it) {
    const double ct = std::cos(control.time_at(it));
    for (int ix = 0; ix < control.n_x; ++ix)
      control.value(0, it, ix) = ct * std::sin(control.space_at(ix));
  }
  const ModalData out = forward_solve(sys, control, zero_modal_data(2, 4));
  CHECK(std::abs(out.pos[0][0]) > 1.0);
  for (int k = 0; k < 4; ++k) {
    CHECK(out.pos[1][k] == 0.0);
    CHECK(out.vel[1][k] == 0.0);
  }
}

TEST_CASE("time grids below the resolution requirement are rejected") {
  const auto sys = make_system({1.0, 4.0}, {{1.0}, {1.0}});
  ObservationWindow window{0.5, 2.6, 7.0};
  const ModalData init = zero_modal_data(2, 8);
  // 20 * sqrt(4) * 8 * 7 / (2 pi) is about 356.5 samples.
  CHECK_THROWS_AS(forward_solve(sys, zero_signal(1, window, 301, 51), init),
                  std::invalid_argument);
  CHECK_NOTHROW(forward_solve(sys, zero_signal(1, window, 361, 51), init));
}

TEST_CASE("malformed windows, signals, and data are rejected") {
  ObservationWindow bad;
  bad = {-0.1, 2.0, 1.0};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = {0.0, kPi + 0.1, 1.0};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = {0.5, 2.6, 0.0};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);

  ModalData ragged = zero_modal_data(2, 3);
  ragged.vel[1].pop_back();
  CHECK_THROWS_AS(validate(ragged), std::invalid_argument);
  ModalData poisoned = zero_modal_data(1, 2);
  poisoned.pos[0][1] = std::nan("");
  CHECK_THROWS_AS(validate(poisoned), std::invalid_argument);

  ObservationWindow window{0.5, 2.6, 2.0};
  ControlSignal torn = zero_signal(1, window, 11, 9);
  torn.channels[0].pop_back();
  CHECK_THROWS_AS(validate(torn), std::invalid_argument);

  const auto sys = make_system({1.0, 4.0}, {{1.0}, {1.0}});
  CHECK_THROWS_AS(adjoint_eval(sys, zero_modal_data(1, 3), 0.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(forward_solve(sys, zero_signal(2, window, 501, 9), zero_modal_data(2, 3)),
                  std::invalid_argument);
}

TEST_CASE("cross terms between mismatched speeds decay with the mode") {
  // Components with speeds 1 and 4 carrying the same pure mode k oscillate
  // at k and 2k; the mixed space-time integral then decays like 1/k while
  // the diagonal ones stay put. Closed forms for both sides:
  //   int_omega sin^2(kx) dx = (b-a)/2 - (sin(2kb) - sin(2ka)) / (4k)
  //   int_0^T cos(kt) cos(2kt) dt = sin(3kT)/(6k) + sin(kT)/(2k)
  //   int_0^T cos^2(kt) dt = T/2 + sin(2kT)/(4k)
  const auto sys = make_system({1.0, 4.0}, {{1.0, 0.0}, {0.0, 1.0}});
  const double a = 0.5, b = 2.6;
  const double T = 4.0;
  ObservationWindow window{a, b, T};
  const int n_t = 4501, n_x = 2001;
  for (int k : {4, 8, 16, 32}) {
    ModalData data = zero_modal_data(2, k);
    data.pos[0][k - 1] = 1.0;
    data.pos[1][k - 1] = 1.0;
    const ControlSignal signal = observation(sys, data, window, n_t, n_x);
    std::vector<double> cross_rows(n_t), diag_rows(n_t);
    std::vector<double> cross_row(n_x), diag_row(n_x);
    for (int it = 0; it < n_t; ++it) {
      for (int ix = 0; ix < n_x; ++ix) {
        const double v1 = signal.value(0, it, ix);
        const double v2 = signal.value(1, it, ix);
        cross_row[ix] = v1 * v2;
        diag_row[ix] = v1 * v1;
      }
      cross_rows[it] = numerics::simpson_sampled(cross_row, signal.dx());
      diag_rows[it] = numerics::simpson_sampled(diag_row, signal.dx());
    }
    const double cross = numerics::simpson_sampled(cross_rows, signal.dt());
    const double diag = numerics::simpson_sampled(diag_rows, signal.dt());

    const double space = (b - a) / 2.0 - (std::sin(2.0 * k * b) - std::sin(2.0 * k * a)) /
                                             (4.0 * k);
    const double cross_closed =
        space * (std::sin(3.0 * k * T) / (6.0 * k) + std::sin(k * T) / (2.0 * k));
    const double diag_closed = space * (T / 2.0 + std::sin(2.0 * k * T) / (4.0 * k));
    CHECK(std::abs(cross - cross_closed) < 5e-5 * (1.0 + std::abs(cross_closed)));
    CHECK(std::abs(diag - diag_closed) < 5e-5 * (1.0 + std::abs(diag_closed)));
    CHECK(std::abs(cross) <= 1.0 / k);
    CHECK(diag > 1.2);
    CHECK(diag < 2.4);
  }
}
