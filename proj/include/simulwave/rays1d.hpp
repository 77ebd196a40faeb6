#pragma once

#include <utility>
#include <vector>

namespace simulwave::rays1d {

/// A bicharacteristic ray on the interval: position in [0, pi], direction
/// +1 or -1, physical speed sqrt(d) > 0. Rays reflect at both endpoints.
struct Ray {
  double position;
  int direction;
  double speed;
};

/// Piecewise-linear trajectory of a ray up to `duration`, as (time, position)
/// breakpoints. The first entry is (0, start), every wall reflection inserts
/// an exact breakpoint, and the last entry is at time `duration`.
std::vector<std::pair<double, double>> trace_ray(const Ray& ray, double duration);

/// Worst first-entry time into the open window ]lo, hi[ over a 2000 x 2 grid
/// of ray starts for propagation speed sqrt(d). Cross-checked against the
/// closed form 2 * max(lo, pi - hi) / sqrt(d); disagreement beyond the grid
/// resolution raises an error. Touching a closed endpoint does not count as
/// entering the window.
double gcc_time(double lo, double hi, double d);

/// The closed-form candidate for gcc_time.
double gcc_time_analytic(double lo, double hi, double d);

/// True when T strictly exceeds the worst gcc_time over all listed d values.
bool gcc_satisfied(double lo, double hi, double T, const std::vector<double>& speeds);

}  // namespace simulwave::rays1d
