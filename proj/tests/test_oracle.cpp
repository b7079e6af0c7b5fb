#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "support/oracles.hpp"
#include "vrt/error.hpp"
#include "vrt/oracle.hpp"

using namespace vrt;

namespace {

KernelSpec small_spec(const ImpactModel& model) {
  KernelSpec s;
  s.model = model;
  s.half_extent_m = 10.0;
  s.altitudes_m = {50.0, 100.0};
  return s;
}

RayleighImpactParams ring(RayleighMode mode) {
  RayleighImpactParams p;
  p.mode = mode;
  return p;
}

}  // namespace

TEST_CASE("counter generator is a pure function of its inputs") {
  const CounterRng a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  CHECK(a.bits(0) == b.bits(0));
  CHECK(a.bits(123456) == b.bits(123456));
  CHECK(a.bits(5) != c.bits(5));
  CHECK(a.bits(5) != d.bits(5));
  CHECK(a.bits(5) != a.bits(6));
}

TEST_CASE("uniform draws have the right moments") {
  const CounterRng rng(20231015, 0);
  constexpr std::size_t n = 1'000'000;
  double sum = 0.0, sq = 0.0, lo = 1.0, hi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform(i);
    sum += u;
    sq += u * u;
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(std::abs(mean - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(2e-3));
}

TEST_CASE("gaussian samples match the model moments") {
  const GaussianImpactParams g;
  const double h0 = 100.0;
  constexpr std::size_t n = 400'000;
  const auto batch = sample_gaussian(g, {3.0, -4.0}, h0, n, 20231015, 1);
  const double var = g.alpha * h0 * h0;
  double mx = 0.0, my = 0.0, vx = 0.0, vy = 0.0;
  for (const auto& p : batch.points) {
    mx += p.x;
    my += p.y;
  }
  mx /= n;
  my /= n;
  for (const auto& p : batch.points) {
    vx += (p.x - mx) * (p.x - mx);
    vy += (p.y - my) * (p.y - my);
  }
  vx /= n;
  vy /= n;
  const double se_mean = std::sqrt(var / n);
  CHECK(std::abs(mx - 3.0) < 5.0 * se_mean);
  CHECK(std::abs(my + 4.0) < 5.0 * se_mean);
  // Variance of a sample variance of normals is 2 var^2 / n.
  CHECK(std::abs(vx - var) < 5.0 * var * std::sqrt(2.0 / n));
  CHECK(std::abs(vy - var) < 5.0 * var * std::sqrt(2.0 / n));
}

TEST_CASE("sampling does not depend on the thread count") {
  const auto a = sample_impacts(GaussianImpactParams{}, {0, 0}, 80.0, 50'000, 11, 2, 1);
  const auto b = sample_impacts(GaussianImpactParams{}, {0, 0}, 80.0, 50'000, 11, 2, 4);
  const auto c = sample_impacts(ring(RayleighMode::Normalized), {0, 0}, 80.0, 50'000, 11, 2, 1);
  const auto d = sample_impacts(ring(RayleighMode::Normalized), {0, 0}, 80.0, 50'000, 11, 2, 3);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].x == b.points[i].x);
    CHECK(a.points[i].y == b.points[i].y);
    CHECK(c.points[i].x == d.points[i].x);
    CHECK(c.points[i].y == d.points[i].y);
  }
}

TEST_CASE("ring radial law matches its CDF") {
  const auto p = ring(RayleighMode::Normalized);
  const double h0 = 100.0;
  const double d = p.beta * h0, s = p.gamma * h0;
  CHECK(rayleigh_radial_cdf(0.0, d, s) == doctest::Approx(0.0));
  CHECK(rayleigh_radial_cdf(d + 40 * s, d, s) == doctest::Approx(1.0).epsilon(1e-12));

  const RadialSampler sampler(d, s);
  for (double u : {1e-6, 0.01, 0.3, 0.5, 0.9, 0.999999})
    CHECK(rayleigh_radial_cdf(sampler.quantile(u), d, s) == doctest::Approx(u).epsilon(1e-9));

  constexpr std::size_t n = 200'000;
  const auto batch = sample_rayleigh(p, {0, 0}, h0, n, 20231015, 5);
  std::vector<double> r(n);
  std::vector<double> theta(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = std::hypot(batch.points[i].x, batch.points[i].y);
    theta[i] = std::atan2(batch.points[i].y, batch.points[i].x);
  }
  std::sort(r.begin(), r.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = rayleigh_radial_cdf(r[i], d, s);
    ks = std::max({ks, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(i + 1) / n)});
  }
  // One percent critical value of the Kolmogorov distribution.
  CHECK(ks < 1.63 / std::sqrt(static_cast<double>(n)));

  constexpr std::size_t bins = 16;
  std::array<double, bins> counts{};
  for (double t : theta) {
    auto b = static_cast<std::size_t>((t + std::numbers::pi) / (2.0 * std::numbers::pi) * bins);
    counts[std::min(b, bins - 1)] += 1.0;
  }
  const double expected = static_cast<double>(n) / bins;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 0.1 percent critical value with 15 degrees of freedom.
  CHECK(chi2 < 37.70);

  // The radial density r exp(-(r - d)^2 / 2 s^2) peaks at (d + sqrt(d^2 + 4 s^2)) / 2.
  const double mode = 0.5 * (d + std::sqrt(d * d + 4.0 * s * s));
  constexpr double width = 1.0;
  std::vector<std::size_t> hist(static_cast<std::size_t>(r.back() / width) + 1, 0);
  for (double x : r) ++hist[static_cast<std::size_t>(x / width)];
  const auto peak = static_cast<double>(std::max_element(hist.begin(), hist.end()) - hist.begin()) + 0.5;
  CHECK(std::abs(peak - mode) < 3.0 * width);
}

TEST_CASE("empirical cell frequency agrees with the normal box mass") {
  const GaussianImpactParams g;
  const double h0 = 125.0;
  const auto batch = sample_gaussian(g, {0, 0}, h0, 1'000'000, 20231015, 0);
  const double sigma = std::sqrt(g.alpha) * h0;
  const double exact = oracle_ref::normal_box_mass(sigma, -1, 1, -1, 1);
  CHECK(exact == doctest::Approx(1.670e-3).epsilon(1e-3));
  const auto est = empirical_cell_prob(batch, {0, 0}, 1.0);
  CHECK(std::abs(est.estimate - exact) < 4.0 * est.standard_error);
  const auto off = empirical_cell_prob(batch, {10, -6}, 1.0);
  CHECK(std::abs(off.estimate - oracle_ref::normal_box_mass(sigma, 9, 11, -7, -5)) < 4.0 * off.standard_error);
}

TEST_CASE("oracle accepts correct kernels and names a corrupted cell") {
  OracleOptions opt;
  opt.samples = 200'000;
  opt.tolerance_se = 5.0;
  auto kernel = build_kernel(small_spec(GaussianImpactParams{}));
  const auto ok = compare_kernel(kernel, opt);
  CHECK(ok.pass);
  CHECK(ok.slices.size() == 2);
  CHECK(ok.cells_tested() > 0);
  CHECK(ok.to_json().contains("slices"));

  kernel.set_prob(1, 3, 7, kernel.prob(1, 3, 7) * 3.0f);
  const auto bad = compare_kernel(kernel, opt);
  CHECK_FALSE(bad.pass);
  CHECK(bad.slices[0].pass);
  REQUIRE_FALSE(bad.slices[1].failures.empty());
  bool named = false;
  for (const auto& f : bad.slices[1].failures) named = named || (f.ix == 7 && f.iy == 3 && !f.pooled);
  CHECK(named);
}

TEST_CASE("oracle on ring kernels") {
  OracleOptions opt;
  opt.samples = 200'000;
  opt.tolerance_se = 5.0;
  opt.altitudes_m = {100.0};
  const auto normalized = compare_kernel(build_kernel(small_spec(ring(RayleighMode::Normalized))), opt);
  CHECK(normalized.pass);
  CHECK(normalized.slices.size() == 1);

  const auto faithful = build_kernel(small_spec(ring(RayleighMode::PaperFaithful)));
  try {
    compare_kernel(faithful, opt);
    FAIL("paper-faithful kernel accepted without correction");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
  }
  opt.z_correction = true;
  CHECK(compare_kernel(faithful, opt).pass);

  opt.altitudes_m = {75.0};
  try {
    compare_kernel(faithful, opt);
    FAIL("non-slice altitude accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
  }
}

TEST_CASE("oracle results do not depend on the thread count") {
  OracleOptions opt;
  opt.samples = 50'000;
  const auto kernel = build_kernel(small_spec(GaussianImpactParams{}));
  const auto a = compare_kernel(kernel, opt);
  opt.threads = 3;
  const auto b = compare_kernel(kernel, opt);
  CHECK(a.to_json().dump() == b.to_json().dump());
}
