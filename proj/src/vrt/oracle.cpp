#include "vrt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vrt/error.hpp"
#include "vrt/parallel.hpp"

namespace vrt {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr std::size_t kTableSize = 8193;
constexpr double kTableSpan = 12.0;  // table covers [0, d + 12 s]
constexpr std::size_t kChunks = 256;  // fixed partition of the sample index range

std::uint64_t splitmix(std::uint64_t z) noexcept {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void check_samples(std::size_t n) {
  if (n < 1) fail(ErrorKind::Argument, "sample count must be >= 1");
}

// Draws sample `i` of a stream. Each sample consumes counter values 2i and 2i + 1.
class ImpactSampler {
 public:
  ImpactSampler(const ImpactModel& model, Point2 p0, double h0) : p0_(p0) {
    if (!(h0 > 0.0) || !std::isfinite(h0)) fail(ErrorKind::Domain, "failure altitude h0 must be > 0");
    if (const auto* g = std::get_if<GaussianImpactParams>(&model)) {
      g->validate();
      sigma_ = std::sqrt(g->alpha) * h0;
    } else {
      const auto& r = std::get<RayleighImpactParams>(model);
      r.validate();
      radial_.emplace(r.beta * h0, r.gamma * h0);
    }
  }

  Point2 operator()(const CounterRng& rng, std::uint64_t i) const {
    const double u1 = rng.uniform(2 * i);
    const double theta = 2.0 * std::numbers::pi * rng.uniform(2 * i + 1);
    const double radius = radial_ ? radial_->quantile(u1) : sigma_ * std::sqrt(-2.0 * std::log(u1));
    return {p0_.x + radius * std::cos(theta), p0_.y + radius * std::sin(theta)};
  }

 private:
  Point2 p0_;
  double sigma_ = 0.0;
  std::optional<RadialSampler> radial_;
};

double z_score(double quadrature, double empirical, double se) {
  const double diff = std::abs(quadrature - empirical);
  if (se > 0.0) return diff / se;
  return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

nlohmann::json deviation_json(const CellDeviation& d) {
  if (d.pooled)
    return {{"pooled", true},
            {"quadrature", d.quadrature},
            {"empirical", d.empirical},
            {"standard_error", d.standard_error},
            {"z", std::isfinite(d.z) ? nlohmann::json(d.z) : nlohmann::json("inf")}};
  return {{"ix", d.ix},
          {"iy", d.iy},
          {"offset_m", {d.offset_x_m, d.offset_y_m}},
          {"quadrature", d.quadrature},
          {"empirical", d.empirical},
          {"standard_error", d.standard_error},
          {"z", std::isfinite(d.z) ? nlohmann::json(d.z) : nlohmann::json("inf")}};
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(splitmix(seed ^ splitmix(stream))) {}

std::uint64_t CounterRng::bits(std::uint64_t index) const noexcept { return splitmix(key_ + index * kGolden); }

double CounterRng::uniform(std::uint64_t index) const noexcept {
  return (static_cast<double>(bits(index) >> 11) + 0.5) * 0x1p-53;
}

double rayleigh_radial_cdf(double r, double displacement, double sigma) {
  if (!(sigma > 0.0) || !(displacement >= 0.0)) fail(ErrorKind::Domain, "ring law needs sigma > 0 and displacement >= 0");
  if (r <= 0.0) return 0.0;
  const double a = displacement / sigma;
  const double t = (r - displacement) / sigma;
  const double z = rayleigh_normalization(displacement, sigma);
  const double mass = std::exp(-0.5 * a * a) - std::exp(-0.5 * t * t) +
                      a * std::sqrt(2.0 * std::numbers::pi) * (standard_normal_cdf(t) - standard_normal_cdf(-a));
  return std::clamp(mass / z, 0.0, 1.0);
}

RadialSampler::RadialSampler(double displacement, double sigma)
    : displacement_(displacement), sigma_(sigma), radius_(kTableSize), cdf_(kTableSize) {
  if (!(sigma > 0.0) || !(displacement >= 0.0)) fail(ErrorKind::Domain, "ring law needs sigma > 0 and displacement >= 0");
  const double top = displacement + kTableSpan * sigma;
  for (std::size_t i = 0; i < kTableSize; ++i) {
    radius_[i] = top * static_cast<double>(i) / static_cast<double>(kTableSize - 1);
    cdf_[i] = rayleigh_radial_cdf(radius_[i], displacement, sigma);
  }
}

double RadialSampler::quantile(double u) const {
  if (!(u > 0.0)) return 0.0;
  if (u >= cdf_.back()) return radius_.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
  const std::size_t lo = hi - 1;
  double a = radius_[lo];
  double b = radius_[hi];
  const double span = cdf_[hi] - cdf_[lo];
  double r = span > 0.0 ? a + (b - a) * (u - cdf_[lo]) / span : a;
  const double z = rayleigh_normalization(displacement_, sigma_);
  for (int iter = 0; iter < 60; ++iter) {
    const double f = rayleigh_radial_cdf(r, displacement_, sigma_) - u;
    if (f == 0.0) break;
    if (f > 0.0) b = r; else a = r;
    const double d = (r - displacement_) / sigma_;
    const double pdf = r * std::exp(-0.5 * d * d) / (sigma_ * sigma_ * z);
    double next = pdf > 0.0 ? r - f / pdf : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - r) <= 1e-13 * std::max(1.0, r)) {
      r = next;
      break;
    }
    r = next;
  }
  return r;
}

SampleBatch sample_impacts(const ImpactModel& model, Point2 p0, double h0, std::size_t n, std::uint64_t seed,
                           std::uint64_t stream, unsigned threads) {
  check_samples(n);
  const ImpactSampler sampler(model, p0, h0);
  const CounterRng rng(seed, stream);
  SampleBatch batch{model, p0, h0, seed, stream, std::vector<Point2>(n)};
  const std::size_t chunks = std::min(n, kChunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    for (std::size_t i = n * c / chunks; i < n * (c + 1) / chunks; ++i) batch.points[i] = sampler(rng, i);
  });
  return batch;
}

SampleBatch sample_gaussian(const GaussianImpactParams& params, Point2 p0, double h0, std::size_t n,
                            std::uint64_t seed, std::uint64_t stream, unsigned threads) {
  return sample_impacts(params, p0, h0, n, seed, stream, threads);
}

SampleBatch sample_rayleigh(const RayleighImpactParams& params, Point2 p0, double h0, std::size_t n,
                            std::uint64_t seed, std::uint64_t stream, unsigned threads) {
  return sample_impacts(params, p0, h0, n, seed, stream, threads);
}

CellEstimate empirical_cell_prob(const SampleBatch& batch, Point2 center, double delta) {
  check_samples(batch.points.size());
  if (!(delta > 0.0)) fail(ErrorKind::Domain, "cell half-side delta must be > 0");
  std::size_t hits = 0;
  for (const auto& p : batch.points)
    if (std::abs(p.x - center.x) <= delta && std::abs(p.y - center.y) <= delta) ++hits;
  const auto n = static_cast<double>(batch.points.size());
  const double p = static_cast<double>(hits) / n;
  return {p, std::sqrt(p * (1.0 - p) / n), hits};
}

std::size_t OracleReport::cells_tested() const {
  std::size_t total = 0;
  for (const auto& s : slices) total += s.cells_tested;
  return total;
}

nlohmann::json OracleReport::to_json() const {
  nlohmann::json out = {{"model", model},
                        {"samples", samples},
                        {"seed", seed},
                        {"tolerance_se", tolerance_se},
                        {"z_correction", z_correction},
                        {"cells_tested", cells_tested()},
                        {"result", pass ? "PASS" : "FAIL"}};
  out["slices"] = nlohmann::json::array();
  for (const auto& s : slices) {
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& f : s.failures) failures.push_back(deviation_json(f));
    out["slices"].push_back({{"level", s.level},
                             {"altitude_m", s.altitude_m},
                             {"stream", s.level},
                             {"cells_tested", s.cells_tested},
                             {"pooled_cells", s.pooled_cells},
                             {"pooled_z", s.pooled_z},
                             {"max_z", std::isfinite(s.max_z) ? nlohmann::json(s.max_z) : nlohmann::json("inf")},
                             {"worst", deviation_json(s.worst)},
                             {"failures", failures},
                             {"result", s.pass ? "PASS" : "FAIL"}});
  }
  return out;
}

OracleReport compare_kernel(const ImpactKernel& kernel, const OracleOptions& options) {
  check_samples(options.samples);
  const auto& spec = kernel.spec();
  const auto* ring = std::get_if<RayleighImpactParams>(&spec.model);
  const bool paper_faithful = ring && ring->mode == RayleighMode::PaperFaithful;
  if (paper_faithful && !options.z_correction)
    fail(ErrorKind::Config, "paper-faithful ring kernels integrate to Z, not 1; enable z_correction to compare");

  std::vector<std::size_t> levels;
  if (options.altitudes_m.empty()) {
    for (std::size_t l = 0; l < kernel.levels(); ++l) levels.push_back(l);
  } else {
    for (double alt : options.altitudes_m) {
      const auto l = kernel.nearest_level(alt);
      if (!l || std::abs(spec.altitudes_m[*l] - alt) > 1e-9)
        fail(ErrorKind::Config, "oracle altitude " + std::to_string(alt) + " m is not a kernel slice");
      levels.push_back(*l);
    }
  }

  OracleReport report;
  report.model = model_name(spec.model) + (ring ? std::string("/") + to_string(ring->mode) : std::string());
  report.samples = options.samples;
  report.seed = options.seed;
  report.tolerance_se = options.tolerance_se;
  report.z_correction = paper_faithful;

  const std::size_t w = kernel.width();
  const auto r = static_cast<double>(kernel.radius());
  const double s = spec.spacing_m;
  const double delta = spec.delta_m;
  const auto n = static_cast<double>(options.samples);

  for (std::size_t level : levels) {
    const double h0 = spec.altitudes_m[level];
    const ImpactSampler sampler(spec.model, {0.0, 0.0}, h0);
    const CounterRng rng(options.seed, level);
    const std::size_t chunks = std::min(options.samples, kChunks);
    std::vector<std::vector<std::uint64_t>> partial(chunks, std::vector<std::uint64_t>(w * w, 0));
    parallel_for(chunks, options.threads, [&](std::size_t c) {
      auto& counts = partial[c];
      const std::size_t begin = options.samples * c / chunks;
      const std::size_t end = options.samples * (c + 1) / chunks;
      for (std::size_t i = begin; i < end; ++i) {
        const Point2 p = sampler(rng, i);
        const double ix_lo = std::max(0.0, std::ceil((p.x - delta) / s + r));
        const double ix_hi = std::min(static_cast<double>(w - 1), std::floor((p.x + delta) / s + r));
        const double iy_lo = std::max(0.0, std::ceil((p.y - delta) / s + r));
        const double iy_hi = std::min(static_cast<double>(w - 1), std::floor((p.y + delta) / s + r));
        for (double iy = iy_lo; iy <= iy_hi; iy += 1.0) {
          const double cy = (iy - r) * s;
          if (!(p.y >= cy - delta && p.y <= cy + delta)) continue;
          for (double ix = ix_lo; ix <= ix_hi; ix += 1.0) {
            const double cx = (ix - r) * s;
            if (p.x >= cx - delta && p.x <= cx + delta)
              ++counts[static_cast<std::size_t>(iy) * w + static_cast<std::size_t>(ix)];
          }
        }
      }
    });
    std::vector<std::uint64_t> counts(w * w, 0);
    for (const auto& part : partial)
      for (std::size_t c = 0; c < counts.size(); ++c) counts[c] += part[c];

    const double z_norm = paper_faithful ? rayleigh_normalization(ring->beta * h0, ring->gamma * h0) : 1.0;
    SliceReport slice;
    slice.level = level;
    slice.altitude_m = h0;
    double pooled_p = 0.0;
    std::uint64_t pooled_hits = 0;
    for (std::size_t iy = 0; iy < w; ++iy) {
      for (std::size_t ix = 0; ix < w; ++ix) {
        const double quad = static_cast<double>(kernel.prob(level, iy, ix)) / z_norm;
        const std::uint64_t hits = counts[iy * w + ix];
        if (n * quad < options.pool_below) {
          pooled_p += quad;
          pooled_hits += hits;
          ++slice.pooled_cells;
          continue;
        }
        const double emp = static_cast<double>(hits) / n;
        const double se = std::sqrt(emp * (1.0 - emp) / n);
        CellDeviation d{ix, iy, (static_cast<double>(ix) - r) * s, (static_cast<double>(iy) - r) * s, quad, emp, se,
                        z_score(quad, emp, se)};
        ++slice.cells_tested;
        if (slice.cells_tested == 1 || d.z > slice.max_z) {
          slice.max_z = d.z;
          slice.worst = d;
        }
        if (!(d.z <= options.tolerance_se)) slice.failures.push_back(d);
      }
    }
    if (slice.pooled_cells > 0) {
      const double emp = static_cast<double>(pooled_hits) / n;
      slice.pooled_z = z_score(pooled_p, emp, std::sqrt(emp * (1.0 - emp) / n));
      ++slice.cells_tested;
      if (!(slice.pooled_z <= options.tolerance_se)) {
        CellDeviation pooled{0, 0, 0.0, 0.0, pooled_p, emp, std::sqrt(emp * (1.0 - emp) / n), slice.pooled_z, true};
        slice.failures.push_back(pooled);
      }
    }
    slice.pass = slice.failures.empty();
    report.pass = report.pass && slice.pass;
    report.slices.push_back(std::move(slice));
  }
  return report;
}

}  // namespace vrt
