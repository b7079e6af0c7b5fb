#pragma once

// Independent reference computations. None of these call the engine's
// quadrature or risk kernels except where a test compares against them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "vrt/terrain.hpp"

namespace oracle_ref {

/// Probability mass of an isotropic normal (sd sigma, centred at 0) over
/// [x0, x1] x [y0, y1], from the error function.
inline double normal_box_mass(double sigma, double x0, double x1, double y0, double y1) {
  const double s = sigma * std::numbers::sqrt2;
  const double px = 0.5 * (std::erf(x1 / s) - std::erf(x0 / s));
  const double py = 0.5 * (std::erf(y1 / s) - std::erf(y0 / s));
  return px * py;
}

/// Plane integral of r -> 2 pi r exp(-(r - d)^2 / 2 s^2) / (2 pi s^2) by the
/// composite Simpson rule on [0, d + 40 s].
inline double ring_plane_integral(double d, double s, std::size_t nodes = 1'000'000) {
  const std::size_t n = nodes % 2 ? nodes + 1 : nodes;
  const double upper = d + 40.0 * s;
  const double h = upper / static_cast<double>(n);
  auto f = [&](double r) { return r * std::exp(-(r - d) * (r - d) / (2.0 * s * s)) / (s * s); };
  double sum = f(0.0) + f(upper);
  for (std::size_t i = 1; i < n; ++i) sum += f(static_cast<double>(i) * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

/// Fine midpoint-rule integral of a density over the square of half side
/// delta centred on (cx, cy).
inline double midpoint_square(const std::function<double(double, double)>& f, double cx, double cy, double delta,
                              int n) {
  const double h = 2.0 * delta / n;
  double sum = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) sum += f(cx - delta + (a + 0.5) * h, cy - delta + (b + 0.5) * h);
  return sum * h * h;
}

struct FallState {
  double height_fallen = 0.0;
  double speed = 0.0;
};

/// Integrates m dv/dt = m g - rho S C_D v^2 / 2 with dz/dt = v by classical
/// RK4 in time until `height` metres have been fallen; returns the speed.
inline double fall_speed_rk4(const vrt::UavSpec& uav, double height, double dt = 1e-4) {
  const double c = vrt::kAirDensity * uav.cross_section_m2 * uav.drag_coeff / (2.0 * uav.mass_kg);
  auto accel = [&](double v) { return vrt::kGravity - c * v * v; };
  FallState s;
  while (s.height_fallen < height) {
    const double v = s.speed;
    const double k1v = accel(v), k1z = v;
    const double k2v = accel(v + 0.5 * dt * k1v), k2z = v + 0.5 * dt * k1v;
    const double k3v = accel(v + 0.5 * dt * k2v), k3z = v + 0.5 * dt * k2v;
    const double k4v = accel(v + dt * k3v), k4z = v + dt * k3v;
    const double dz = dt / 6.0 * (k1z + 2 * k2z + 2 * k3z + k4z);
    const double dv = dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    if (s.height_fallen + dz >= height) {
      // Linear interpolation to the exact drop height inside the last step.
      const double frac = (height - s.height_fallen) / dz;
      return v + frac * dv;
    }
    s.height_fallen += dz;
    s.speed += dv;
  }
  return s.speed;
}

/// Kernel slice for a fall height: nearest altitude, ties to the lower one,
/// heights below the first slice use the first.
inline std::size_t nearest_slice(const std::vector<double>& alts, double h) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < alts.size(); ++k)
    if (std::abs(alts[k] - h) < std::abs(alts[best] - h)) best = k;
  return best;
}

/// Cumulative risk by direct double loop over every (air voxel, ground cell)
/// pair. Impact probabilities are evaluated from the density at the nearest
/// slice altitude and rounded to single precision, as stored in kernels.
inline std::vector<double> direct_cumulative_risk(const vrt::RiskProblem& problem, const vrt::KernelSpec& kspec) {
  const auto& s = problem.spec;
  const double reach = kspec.half_extent_m;
  std::vector<double> out(s.size(), 0.0);
  for (std::size_t k = 0; k < s.nz(); ++k) {
    const double z = s.center_z(k);
    for (std::size_t j = 0; j < s.ny(); ++j) {
      for (std::size_t i = 0; i < s.nx(); ++i) {
        const std::size_t v = s.index(i, j, k);
        if (problem.occupancy.blocked[v]) {
          out[v] = vrt::kBlockedRisk;
          continue;
        }
        const double h_col = z - problem.elevation(i, j);
        double best = 0.0;
        for (std::size_t cj = 0; cj < s.ny(); ++cj) {
          for (std::size_t ci = 0; ci < s.nx(); ++ci) {
            const std::size_t c = s.ground().index(ci, cj);
            const double n = problem.exposure.expected[c];
            const double fall = z - problem.elevation(ci, cj);
            if (!(n > 0.0) || !(fall > 0.0)) continue;
            const double ox = s.center_x(ci) - s.center_x(i);
            const double oy = s.center_y(cj) - s.center_y(j);
            if (std::abs(ox) > reach + 1e-9 || std::abs(oy) > reach + 1e-9) continue;
            const double h = kspec.altitudes_m[nearest_slice(kspec.altitudes_m, fall)];
            const double pg =
                static_cast<float>(std::clamp(vrt::cell_prob(kspec.model, {ox, oy}, {0.0, 0.0}, h, kspec.delta_m), 0.0, 1.0));
            vrt::RiskFactors f;
            f.failure_rate = problem.chain.failure.lambda_per_hour;
            f.p_unrecoverable = problem.chain.p_unrecoverable(h_col);
            f.p_impact = pg;
            f.p_harm = problem.chain.p_harm(problem.exposure.classes[c], fall);
            best = std::max(best, vrt::individual_risk(n, f));
          }
        }
        out[v] = best;
      }
    }
  }
  return out;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("vrt-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace oracle_ref
