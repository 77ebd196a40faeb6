#include "simulwave/rays1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace simulwave::rays1d {

namespace {

constexpr double kPi = std::numbers::pi;

void check_ray(const Ray& ray) {
  if (!(ray.position >= 0.0) || !(ray.position <= kPi) || !std::isfinite(ray.position)) {
    throw std::invalid_argument("ray position must lie in [0, pi]");
  }
  if (ray.direction != 1 && ray.direction != -1) {
    throw std::invalid_argument("ray direction must be +1 or -1");
  }
  if (!(ray.speed > 0.0) || !std::isfinite(ray.speed)) {
    throw std::invalid_argument("ray speed must be positive and finite");
  }
}

void check_window(double lo, double hi) {
  if (!(lo >= 0.0) || !(hi <= kPi) || !(lo < hi)) {
    throw std::invalid_argument("window must satisfy 0 <= lo < hi <= pi");
  }
}

/// Exact first time at which a unit-speed ray from (x, dir) enters ]lo, hi[.
double first_entry_unit_speed(double x, int dir, double lo, double hi) {
  if (x > lo && x < hi) return 0.0;
  if (x == kPi && dir > 0) dir = -1;
  if (x == 0.0 && dir < 0) dir = 1;
  if (dir > 0) {
    if (x <= lo) return lo - x;
    return (kPi - x) + (kPi - hi);
  }
  if (x >= hi) return x - hi;
  return x + lo;
}

}  // namespace

std::vector<std::pair<double, double>> trace_ray(const Ray& ray, double duration) {
  check_ray(ray);
  if (!(duration >= 0.0) || !std::isfinite(duration)) {
    throw std::invalid_argument("trace duration must be nonnegative and finite");
  }

  double x = ray.position;
  int dir = ray.direction;
  if (x == kPi && dir > 0) dir = -1;
  if (x == 0.0 && dir < 0) dir = 1;

  std::vector<std::pair<double, double>> path;
  path.emplace_back(0.0, x);
  double t = 0.0;
  while (true) {
    const double wall = dir > 0 ? kPi : 0.0;
    const double hit = t + std::abs(wall - x) / ray.speed;
    if (hit >= duration) {
      const double final_x = x + dir * ray.speed * (duration - t);
      path.emplace_back(duration, std::clamp(final_x, 0.0, kPi));
      return path;
    }
    t = hit;
    x = wall;
    dir = -dir;
    path.emplace_back(t, x);
  }
}

double gcc_time_analytic(double lo, double hi, double d) {
  check_window(lo, hi);
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw std::invalid_argument("speed parameter d must be positive and finite");
  }
  return 2.0 * std::max(lo, kPi - hi) / std::sqrt(d);
}

double gcc_time(double lo, double hi, double d) {
  const double analytic = gcc_time_analytic(lo, hi, d);
  const double speed = std::sqrt(d);

  constexpr int kStarts = 2000;
  const double step = kPi / (kStarts - 1);
  double worst = 0.0;
  for (int i = 0; i < kStarts; ++i) {
    const double x = i == kStarts - 1 ? kPi : i * step;
    for (int dir : {1, -1}) {
      worst = std::max(worst, first_entry_unit_speed(x, dir, lo, hi) / speed);
    }
  }

  if (std::abs(worst - analytic) > 4.0 * step / speed + 1e-12) {
    throw std::runtime_error("ray sweep disagrees with closed-form entry time");
  }
  return worst;
}

bool gcc_satisfied(double lo, double hi, double T, const std::vector<double>& speeds) {
  if (speeds.empty()) {
    throw std::invalid_argument("at least one speed is required");
  }
  double worst = 0.0;
  for (double d : speeds) {
    worst = std::max(worst, gcc_time(lo, hi, d));
  }
  return T > worst;
}

}  // namespace simulwave::rays1d
