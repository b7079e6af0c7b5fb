#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "vrt/impact.hpp"

namespace vrt {

/// Counter-based generator: the value at (seed, stream, index) is a pure
/// function of those three numbers, so any index range can be drawn
/// independently and in any order.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);
  std::uint64_t bits(std::uint64_t index) const noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t index) const noexcept;

 private:
  std::uint64_t key_;
};

/// Radial CDF of the normalized ring law r exp(-(r - d)^2 / 2 s^2) / (s^2 Z).
double rayleigh_radial_cdf(double r, double displacement, double sigma);

/// Inverse of rayleigh_radial_cdf: tabulated, then refined by safeguarded
/// Newton steps.
class RadialSampler {
 public:
  RadialSampler(double displacement, double sigma);
  double quantile(double u) const;

 private:
  double displacement_;
  double sigma_;
  std::vector<double> radius_;
  std::vector<double> cdf_;
};

struct SampleBatch {
  ImpactModel model;
  Point2 p0;
  double h0 = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<Point2> points;
};

SampleBatch sample_gaussian(const GaussianImpactParams& params, Point2 p0, double h0, std::size_t n,
                            std::uint64_t seed, std::uint64_t stream = 0, unsigned threads = 1);
SampleBatch sample_rayleigh(const RayleighImpactParams& params, Point2 p0, double h0, std::size_t n,
                            std::uint64_t seed, std::uint64_t stream = 0, unsigned threads = 1);
SampleBatch sample_impacts(const ImpactModel& model, Point2 p0, double h0, std::size_t n, std::uint64_t seed,
                           std::uint64_t stream = 0, unsigned threads = 1);

struct CellEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::size_t hits = 0;
};

/// Fraction of points inside the 2*delta square around `center`, with its
/// binomial standard error.
CellEstimate empirical_cell_prob(const SampleBatch& batch, Point2 center, double delta);

struct OracleOptions {
  std::size_t samples = 1'000'000;
  std::uint64_t seed = 20231015;
  /// Slices to test, by altitude; empty tests every slice.
  std::vector<double> altitudes_m;
  /// Required for paper-faithful ring kernels: quadrature values are divided by Z.
  bool z_correction = false;
  double tolerance_se = 3.0;
  double pool_below = 10.0;  ///< cells with fewer expected hits are pooled
  unsigned threads = 1;
};

struct CellDeviation {
  std::size_t ix = 0;
  std::size_t iy = 0;
  double offset_x_m = 0.0;
  double offset_y_m = 0.0;
  double quadrature = 0.0;
  double empirical = 0.0;
  double standard_error = 0.0;
  double z = 0.0;
  bool pooled = false;  ///< the bucket of all low-expectation cells
};

struct SliceReport {
  std::size_t level = 0;
  double altitude_m = 0.0;
  std::size_t cells_tested = 0;
  std::size_t pooled_cells = 0;
  double pooled_z = 0.0;
  double max_z = 0.0;
  CellDeviation worst;
  std::vector<CellDeviation> failures;
  bool pass = true;
};

struct OracleReport {
  std::string model;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double tolerance_se = 3.0;
  bool z_correction = false;
  std::vector<SliceReport> slices;
  bool pass = true;

  std::size_t cells_tested() const;
  nlohmann::json to_json() const;
};

/// Monte Carlo check of every kernel cell in the selected slices. Slice k is
/// sampled on stream k of the seed. Throws Error(Config) for a paper-faithful
/// ring kernel without z_correction, or an altitude that is not a slice.
OracleReport compare_kernel(const ImpactKernel& kernel, const OracleOptions& options);

}  // namespace vrt
