#include "vrt/impact.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vrt/error.hpp"
#include "vrt/parallel.hpp"

namespace vrt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_altitude(double h0) {
  if (!(h0 > 0.0) || !std::isfinite(h0)) fail(ErrorKind::Domain, "failure altitude h0 must be > 0");
}

void check_delta(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) fail(ErrorKind::Domain, "cell half-side delta must be > 0");
}

struct GaussianIntegrand {
  double scale;       // 1 / (2 pi sigma^2)
  double inv_two_var;  // 1 / (2 sigma^2)
  double operator()(double dx, double dy) const { return scale * std::exp(-(dx * dx + dy * dy) * inv_two_var); }
};

struct RayleighIntegrand {
  double scale;
  double displacement;
  double inv_two_var;
  double operator()(double dx, double dy) const {
    const double d = std::hypot(dx, dy) - displacement;
    return scale * std::exp(-d * d * inv_two_var);
  }
};

GaussianIntegrand gaussian_integrand(double h0, const GaussianImpactParams& params) {
  const double var = params.alpha * h0 * h0;
  return {1.0 / (kTwoPi * var), 1.0 / (2.0 * var)};
}

RayleighIntegrand rayleigh_integrand(double h0, const RayleighImpactParams& params) {
  const double sigma = params.gamma * h0;
  const double displacement = params.beta * h0;
  double scale = 1.0 / (kTwoPi * sigma * sigma);
  if (params.mode == RayleighMode::Normalized) scale /= rayleigh_normalization(displacement, sigma);
  return {scale, displacement, 1.0 / (2.0 * sigma * sigma)};
}

}  // namespace

void GaussianImpactParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) fail(ErrorKind::Argument, "gaussian alpha must be > 0");
}

void RayleighImpactParams::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) fail(ErrorKind::Argument, "rayleigh beta must be >= 0");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) fail(ErrorKind::Argument, "rayleigh gamma must be > 0");
}

const char* to_string(RayleighMode mode) noexcept {
  return mode == RayleighMode::Normalized ? "normalized" : "paper_faithful";
}

std::string model_name(const ImpactModel& model) {
  return std::holds_alternative<GaussianImpactParams>(model) ? "gaussian" : "rayleigh";
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double gaussian_density(Point2 p, Point2 p0, double h0, const GaussianImpactParams& params) {
  check_altitude(h0);
  params.validate();
  return gaussian_integrand(h0, params)(p.x - p0.x, p.y - p0.y);
}

double gaussian_cell_prob(Point2 p, Point2 p0, double h0, const GaussianImpactParams& params, double delta) {
  check_altitude(h0);
  check_delta(delta);
  params.validate();
  return integrate_square(gaussian_integrand(h0, params), p.x - p0.x, p.y - p0.y, delta);
}

double rayleigh_normalization(double displacement, double sigma) {
  if (!(sigma > 0.0) || !(displacement >= 0.0))
    fail(ErrorKind::Domain, "rayleigh normalization needs sigma > 0 and displacement >= 0");
  const double a = displacement / sigma;
  return std::exp(-0.5 * a * a) + a * std::sqrt(kTwoPi) * standard_normal_cdf(a);
}

double rayleigh_density(Point2 p, Point2 p0, double h0, const RayleighImpactParams& params) {
  check_altitude(h0);
  params.validate();
  return rayleigh_integrand(h0, params)(p.x - p0.x, p.y - p0.y);
}

double rayleigh_cell_prob(Point2 p, Point2 p0, double h0, const RayleighImpactParams& params, double delta) {
  check_altitude(h0);
  check_delta(delta);
  params.validate();
  return integrate_square(rayleigh_integrand(h0, params), p.x - p0.x, p.y - p0.y, delta);
}

double density(const ImpactModel& model, Point2 p, Point2 p0, double h0) {
  return std::visit(
      [&](const auto& params) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(params)>, GaussianImpactParams>)
          return gaussian_density(p, p0, h0, params);
        else
          return rayleigh_density(p, p0, h0, params);
      },
      model);
}

double cell_prob(const ImpactModel& model, Point2 p, Point2 p0, double h0, double delta) {
  return std::visit(
      [&](const auto& params) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(params)>, GaussianImpactParams>)
          return gaussian_cell_prob(p, p0, h0, params, delta);
        else
          return rayleigh_cell_prob(p, p0, h0, params, delta);
      },
      model);
}

std::vector<double> altitude_range(double first, double last, double step) {
  if (!(step > 0.0) || !(first > 0.0) || last < first) fail(ErrorKind::Argument, "invalid altitude range");
  const auto count = static_cast<std::size_t>(std::floor((last - first) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = first + static_cast<double>(i) * step;
  return out;
}

void KernelSpec::validate() const {
  std::visit([](const auto& p) { p.validate(); }, model);
  if (altitudes_m.empty()) fail(ErrorKind::Argument, "kernel altitude list is empty");
  for (std::size_t i = 0; i < altitudes_m.size(); ++i) {
    if (!(altitudes_m[i] > 0.0) || !std::isfinite(altitudes_m[i]))
      fail(ErrorKind::Argument, "kernel altitudes must be > 0");
    if (i > 0 && !(altitudes_m[i] > altitudes_m[i - 1]))
      fail(ErrorKind::Argument, "kernel altitudes must be strictly increasing");
  }
  if (!(delta_m > 0.0)) fail(ErrorKind::Argument, "kernel delta must be > 0");
  if (!(spacing_m > 0.0)) fail(ErrorKind::Argument, "kernel spacing must be > 0");
  if (!(half_extent_m >= 0.0)) fail(ErrorKind::Argument, "kernel half extent must be >= 0");
  const double cells = half_extent_m / spacing_m;
  if (std::abs(cells - std::round(cells)) > 1e-9)
    fail(ErrorKind::Argument, "kernel half extent must be a whole number of spacings");
}

std::size_t KernelSpec::radius() const {
  return static_cast<std::size_t>(std::llround(half_extent_m / spacing_m));
}

ImpactKernel::ImpactKernel(KernelSpec spec, std::vector<float> probs)
    : spec_(std::move(spec)), width_(spec_.width()), probs_(std::move(probs)) {
  spec_.validate();
  if (probs_.size() != spec_.altitudes_m.size() * width_ * width_)
    fail(ErrorKind::Argument, "kernel payload size does not match its header");
  for (float p : probs_)
    if (!(p >= 0.0f && p <= 1.0f)) fail(ErrorKind::Argument, "kernel probabilities must lie in [0, 1]");
}

void ImpactKernel::set_prob(std::size_t level, std::size_t iy, std::size_t ix, float value) {
  if (level >= levels() || iy >= width_ || ix >= width_) fail(ErrorKind::Argument, "kernel index out of range");
  if (!(value >= 0.0f && value <= 1.0f)) fail(ErrorKind::Argument, "kernel probabilities must lie in [0, 1]");
  probs_[(level * width_ + iy) * width_ + ix] = value;
}

double ImpactKernel::slice_sum(std::size_t level) const {
  double sum = 0.0;
  const float* s = slice(level);
  for (std::size_t i = 0; i < slice_size(); ++i) sum += s[i];
  return sum;
}

std::optional<std::size_t> ImpactKernel::nearest_level(double altitude_m) const {
  const auto& alts = spec_.altitudes_m;
  if (alts.empty()) return std::nullopt;
  const double lo_gap = alts.size() > 1 ? alts[1] - alts[0] : alts[0];
  const double hi_gap = alts.size() > 1 ? alts.back() - alts[alts.size() - 2] : alts[0];
  if (altitude_m < alts.front() - 0.5 * lo_gap || altitude_m > alts.back() + 0.5 * hi_gap) return std::nullopt;
  auto it = std::lower_bound(alts.begin(), alts.end(), altitude_m);
  if (it == alts.end()) return alts.size() - 1;
  if (it == alts.begin()) return 0;
  const auto hi = static_cast<std::size_t>(it - alts.begin());
  return (altitude_m - alts[hi - 1] <= alts[hi] - altitude_m) ? hi - 1 : hi;
}

ImpactKernel build_kernel(const KernelSpec& spec, unsigned threads) {
  spec.validate();
  const std::size_t width = spec.width();
  const auto r = static_cast<double>(spec.radius());
  std::vector<float> probs(spec.altitudes_m.size() * width * width);
  const Point2 origin{0.0, 0.0};
  parallel_for(spec.altitudes_m.size() * width, threads, [&](std::size_t row) {
    const std::size_t level = row / width;
    const std::size_t iy = row % width;
    const double h0 = spec.altitudes_m[level];
    const double y = (static_cast<double>(iy) - r) * spec.spacing_m;
    for (std::size_t ix = 0; ix < width; ++ix) {
      const double x = (static_cast<double>(ix) - r) * spec.spacing_m;
      const double p = cell_prob(spec.model, {x, y}, origin, h0, spec.delta_m);
      probs[row * width + ix] = static_cast<float>(std::clamp(p, 0.0, 1.0));
    }
  });
  return ImpactKernel(spec, std::move(probs));
}

}  // namespace vrt
