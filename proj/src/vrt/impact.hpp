#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vrt/grid.hpp"

namespace vrt {

/// Isotropic bivariate normal impact model with variance alpha * h0^2.
struct GaussianImpactParams {
  double alpha = 0.0244;
  void validate() const;
  bool operator==(const GaussianImpactParams&) const = default;
};

enum class RayleighMode {
  PaperFaithful,  ///< ring density exactly as printed; integrates to Z over the plane
  Normalized,     ///< divided by Z so it integrates to one
};

const char* to_string(RayleighMode mode) noexcept;

/// Ring-shaped impact model: displacement beta * h0, spread gamma * h0.
struct RayleighImpactParams {
  double beta = 0.2790;
  double gamma = 0.0918;
  RayleighMode mode = RayleighMode::PaperFaithful;
  void validate() const;
  bool operator==(const RayleighImpactParams&) const = default;
};

using ImpactModel = std::variant<GaussianImpactParams, RayleighImpactParams>;

std::string model_name(const ImpactModel& model);

double gaussian_density(Point2 p, Point2 p0, double h0, const GaussianImpactParams& params);
double gaussian_cell_prob(Point2 p, Point2 p0, double h0, const GaussianImpactParams& params, double delta);

double rayleigh_density(Point2 p, Point2 p0, double h0, const RayleighImpactParams& params);
double rayleigh_cell_prob(Point2 p, Point2 p0, double h0, const RayleighImpactParams& params, double delta);

/// Plane integral of the paper-faithful ring density with displacement
/// `displacement` and spread `sigma`:
///   Z = exp(-a^2/2) + a * sqrt(2 pi) * Phi(a),  a = displacement / sigma.
double rayleigh_normalization(double displacement, double sigma);

double standard_normal_cdf(double x);

double density(const ImpactModel& model, Point2 p, Point2 p0, double h0);

/// Probability of impact inside the 2*delta square centred on p.
double cell_prob(const ImpactModel& model, Point2 p, Point2 p0, double h0, double delta);

/// Integrates `f(dx, dy)` over [cx-delta, cx+delta] x [cy-delta, cy+delta]
/// with nested midpoint rules (n = 2, 4, ..., 64 nodes per axis), stopping
/// once successive estimates differ by less than 1e-9.
template <class F>
double integrate_square(F&& f, double cx, double cy, double delta) {
  double previous = 0.0;
  for (int n = 2;; n *= 2) {
    const double h = 2.0 * delta / n;
    double sum = 0.0;
    for (int a = 0; a < n; ++a) {
      const double x = cx - delta + (a + 0.5) * h;
      for (int b = 0; b < n; ++b) sum += f(x, cy - delta + (b + 0.5) * h);
    }
    const double estimate = sum * h * h;
    if (n >= 64 || (n > 2 && std::abs(estimate - previous) < 1e-9)) return estimate;
    previous = estimate;
  }
}

std::vector<double> altitude_range(double first, double last, double step);

struct KernelSpec {
  ImpactModel model = GaussianImpactParams{};
  double half_extent_m = 20.0;
  std::vector<double> altitudes_m;
  double delta_m = 1.0;
  double spacing_m = 2.0;

  /// Throws Error(Argument) for an empty or non-increasing altitude list or a
  /// half-extent that is not a whole number of spacings.
  void validate() const;
  std::size_t radius() const;  ///< cells on each side of the column
  std::size_t width() const { return 2 * radius() + 1; }
  bool operator==(const KernelSpec&) const = default;
};

/// Precomputed impact probabilities around a single column, per failure
/// altitude: probs[(level * width + iy) * width + ix] is the probability of
/// impact in the cell offset ((ix - r) * spacing, (iy - r) * spacing).
/// Probabilities are held in single precision, matching the cache format.
class ImpactKernel {
 public:
  ImpactKernel() = default;
  ImpactKernel(KernelSpec spec, std::vector<float> probs);

  const KernelSpec& spec() const noexcept { return spec_; }
  std::size_t levels() const noexcept { return spec_.altitudes_m.size(); }
  std::size_t width() const noexcept { return width_; }
  std::size_t radius() const noexcept { return width_ / 2; }
  std::size_t slice_size() const noexcept { return width_ * width_; }

  float prob(std::size_t level, std::size_t iy, std::size_t ix) const {
    return probs_[(level * width_ + iy) * width_ + ix];
  }
  void set_prob(std::size_t level, std::size_t iy, std::size_t ix, float value);
  const std::vector<float>& probs() const noexcept { return probs_; }
  const float* slice(std::size_t level) const { return probs_.data() + level * slice_size(); }

  double slice_sum(std::size_t level) const;

  /// Index of the slice whose altitude is nearest to `altitude_m` (ties go to
  /// the lower slice); nullopt when the altitude lies more than half a step
  /// outside the sampled range.
  std::optional<std::size_t> nearest_level(double altitude_m) const;

 private:
  KernelSpec spec_;
  std::size_t width_ = 0;
  std::vector<float> probs_;
};

ImpactKernel build_kernel(const KernelSpec& spec, unsigned threads = 1);

}  // namespace vrt
