#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support/oracles.hpp"
#include "vrt/error.hpp"
#include "vrt/impact.hpp"

using namespace vrt;
using oracle_ref::normal_box_mass;

namespace {

constexpr double kAlpha = 0.0244;
const RayleighImpactParams kRing{0.2790, 0.0918, RayleighMode::PaperFaithful};
const RayleighImpactParams kRingNorm{0.2790, 0.0918, RayleighMode::Normalized};

double ring_density_ref(double r, double h0) {
  const double d = 0.2790 * h0, s = 0.0918 * h0;
  return std::exp(-(r - d) * (r - d) / (2 * s * s)) / (2 * std::numbers::pi * s * s);
}

KernelSpec gaussian_spec(std::vector<double> alts) {
  KernelSpec k;
  k.model = GaussianImpactParams{kAlpha};
  k.altitudes_m = std::move(alts);
  return k;
}

}  // namespace

TEST_CASE("gaussian peak density") {
  const double expected = 1.0 / (2.0 * std::numbers::pi * kAlpha * 125.0 * 125.0);
  CHECK(gaussian_density({0, 0}, {0, 0}, 125.0, {kAlpha}) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(4.175e-4).epsilon(1e-3));
}

TEST_CASE("gaussian density is radially symmetric") {
  for (double d : {0.5, 3.0, 17.0}) {
    CHECK(gaussian_density({10 + d, 5}, {10, 5}, 60.0, {kAlpha}) ==
          gaussian_density({10 - d, 5}, {10, 5}, 60.0, {kAlpha}));
    CHECK(gaussian_density({10, 5 + d}, {10, 5}, 60.0, {kAlpha}) ==
          doctest::Approx(gaussian_density({10 + d, 5}, {10, 5}, 60.0, {kAlpha})).epsilon(1e-15));
  }
}

TEST_CASE("gaussian cell probability matches the error-function mass") {
  const double sigma = std::sqrt(kAlpha) * 125.0;
  const double ref = normal_box_mass(sigma, -1, 1, -1, 1);
  CHECK(gaussian_cell_prob({0, 0}, {0, 0}, 125.0, {kAlpha}, 1.0) == doctest::Approx(ref).epsilon(1e-8));
  CHECK(ref == doctest::Approx(1.670e-3).epsilon(1e-3));
  for (double h : {10.0, 50.0, 150.0})
    for (double ox : {0.0, 4.0, -12.0, 20.0}) {
      const double s = std::sqrt(kAlpha) * h;
      const double r = normal_box_mass(s, ox - 1, ox + 1, 5, 7);
      CHECK(gaussian_cell_prob({ox, 6}, {0, 0}, h, {kAlpha}, 1.0) == doctest::Approx(r).epsilon(1e-6));
    }
}

TEST_CASE("small cells approach the point density") {
  const Point2 p{3.0, -2.0};
  const double dens = gaussian_density(p, {0, 0}, 40.0, {kAlpha});
  for (double d : {0.1, 0.01}) {
    const double ratio = gaussian_cell_prob(p, {0, 0}, 40.0, {kAlpha}, d) / (4 * d * d);
    CHECK(ratio == doctest::Approx(dens).epsilon(10 * d * d));
  }
}

TEST_CASE("gaussian plane integral is one") {
  // sigma = 3.12 m; cells of 2 m over +-40 m leave a tail below 1e-30.
  double sum = 0.0;
  for (int j = -20; j <= 20; ++j)
    for (int i = -20; i <= 20; ++i) sum += gaussian_cell_prob({2.0 * i, 2.0 * j}, {0, 0}, 20.0, {kAlpha}, 1.0);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("gaussian peak scales as the inverse square of altitude") {
  const double ref = gaussian_density({0, 0}, {0, 0}, 2.0, {kAlpha}) * 4.0;
  for (double h = 2.0; h <= 200.0; h += 2.0)
    CHECK(gaussian_density({0, 0}, {0, 0}, h, {kAlpha}) * h * h == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("non-positive altitude is a domain error") {
  CHECK_THROWS_AS(gaussian_density({0, 0}, {0, 0}, 0.0, {kAlpha}), Error);
  CHECK_THROWS_AS(rayleigh_density({0, 0}, {0, 0}, -1.0, kRing), Error);
  try {
    gaussian_cell_prob({0, 0}, {0, 0}, -5.0, {kAlpha}, 1.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
}

TEST_CASE("ring density peaks on the ring") {
  const double h0 = 100.0;
  CHECK(rayleigh_density({27.90, 0}, {0, 0}, h0, kRing) == doctest::Approx(ring_density_ref(27.90, h0)).epsilon(1e-14));
  CHECK(rayleigh_density({27.90, 0}, {0, 0}, h0, kRing) == doctest::Approx(1.889e-3).epsilon(1e-3));
  // Rotational invariance at equal radius.
  const double r = 31.0;
  CHECK(rayleigh_density({r, 0}, {0, 0}, h0, kRing) ==
        doctest::Approx(rayleigh_density({r / std::numbers::sqrt2, r / std::numbers::sqrt2}, {0, 0}, h0, kRing))
            .epsilon(1e-14));
  // Argmax over radius lies at beta * h0 within one grid spacing.
  for (double h : {20.0, 100.0, 180.0}) {
    double best_r = 0.0, best = -1.0;
    for (double rr = 0.0; rr < 100.0; rr += 0.01) {
      const double v = rayleigh_density({rr, 0}, {0, 0}, h, kRing);
      if (v > best) best = v, best_r = rr;
    }
    CHECK(std::abs(best_r - 0.2790 * h) <= 2.0);
  }
}

TEST_CASE("ring normalization constant") {
  CHECK(rayleigh_normalization(0.0, 3.0) == doctest::Approx(1.0).epsilon(1e-15));
  const double a = 0.2790 / 0.0918;
  const double ref = oracle_ref::ring_plane_integral(a, 1.0);
  CHECK(rayleigh_normalization(a, 1.0) == doctest::Approx(ref).epsilon(1e-9));
  CHECK(ref == doctest::Approx(7.62).epsilon(2e-3));
  double previous = 0.0;
  for (double ratio : {0.5, 1.0, 2.0, 4.0}) {
    const double z = rayleigh_normalization(ratio * 2.0, 2.0);
    CHECK(z == doctest::Approx(oracle_ref::ring_plane_integral(ratio * 2.0, 2.0)).epsilon(1e-9));
    CHECK(z > previous);
    previous = z;
  }
}

TEST_CASE("ring cell probabilities") {
  const double h0 = 100.0;
  const double z = rayleigh_normalization(0.2790 * h0, 0.0918 * h0);
  auto ref = [&](double x, double y) { return ring_density_ref(std::hypot(x, y), h0); };
  const double on_ring = rayleigh_cell_prob({27.90, 0}, {0, 0}, h0, kRing, 1.0);
  CHECK(on_ring == doctest::Approx(oracle_ref::midpoint_square(ref, 27.90, 0, 1.0, 512)).epsilon(1e-6));
  CHECK(on_ring == doctest::Approx(7.56e-3).epsilon(2e-3));
  CHECK(rayleigh_cell_prob({27.90, 0}, {0, 0}, h0, kRingNorm, 1.0) == doctest::Approx(on_ring / z).epsilon(1e-12));
  const double centre = rayleigh_cell_prob({0, 0}, {0, 0}, h0, kRing, 1.0);
  const double a = 0.2790 / 0.0918;
  CHECK(centre / on_ring == doctest::Approx(std::exp(-a * a / 2)).epsilon(0.02));
  CHECK(std::exp(-a * a / 2) == doctest::Approx(9.8e-3).epsilon(0.01));
}

TEST_CASE("normalized ring plane integral is one") {
  // h0 = 20: ring at 5.58 m, spread 1.84 m.
  double sum = 0.0;
  for (int j = -20; j <= 20; ++j)
    for (int i = -20; i <= 20; ++i) sum += rayleigh_cell_prob({2.0 * i, 2.0 * j}, {0, 0}, 20.0, kRingNorm, 1.0);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("nested squares give nested probabilities") {
  for (const ImpactModel& m : {ImpactModel{GaussianImpactParams{kAlpha}}, ImpactModel{kRing}}) {
    double previous = 0.0;
    for (double d : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      const double p = cell_prob(m, {6, 2}, {0, 0}, 30.0, d);
      CHECK(p >= previous);
      CHECK(p <= 1.0);
      previous = p;
    }
  }
}

TEST_CASE("gaussian kernel slices hold the truncated mass") {
  const auto kernel = build_kernel(gaussian_spec({50.0, 150.0}), 2);
  CHECK(kernel.width() == 21);
  for (std::size_t level = 0; level < 2; ++level) {
    const double s = std::sqrt(kAlpha) * kernel.spec().altitudes_m[level];
    CHECK(kernel.slice_sum(level) == doctest::Approx(normal_box_mass(s, -21, 21, -21, 21)).epsilon(1e-5));
  }
  CHECK(kernel.slice_sum(0) == doctest::Approx(0.9857).epsilon(1e-4));
  CHECK(kernel.slice_sum(1) == doctest::Approx(0.3968).epsilon(1e-3));
}

TEST_CASE("gaussian kernel slices are symmetric under quarter turns") {
  const auto kernel = build_kernel(gaussian_spec({30.0}), 1);
  const std::size_t w = kernel.width();
  for (std::size_t iy = 0; iy < w; ++iy)
    for (std::size_t ix = 0; ix < w; ++ix) {
      CHECK(kernel.prob(0, iy, ix) == doctest::Approx(kernel.prob(0, ix, w - 1 - iy)).epsilon(1e-6));
      CHECK(kernel.prob(0, iy, ix) == doctest::Approx(kernel.prob(0, w - 1 - iy, w - 1 - ix)).epsilon(1e-6));
    }
}

TEST_CASE("kernel entries are probabilities and slices never exceed one") {
  for (const ImpactModel& m : {ImpactModel{GaussianImpactParams{kAlpha}}, ImpactModel{kRingNorm}, ImpactModel{kRing}}) {
    KernelSpec spec;
    spec.model = m;
    spec.altitudes_m = altitude_range(2.0, 40.0, 2.0);
    const auto kernel = build_kernel(spec, 2);
    for (float p : kernel.probs()) {
      CHECK(p >= 0.0f);
      CHECK(p <= 1.0f);
    }
    if (!std::holds_alternative<RayleighImpactParams>(m) ||
        std::get<RayleighImpactParams>(m).mode == RayleighMode::Normalized)
      for (std::size_t level = 0; level < kernel.levels(); ++level) CHECK(kernel.slice_sum(level) <= 1.0 + 1e-6);
  }
}

TEST_CASE("kernel construction is deterministic across thread counts") {
  KernelSpec spec;
  spec.model = kRing;
  spec.altitudes_m = altitude_range(2.0, 60.0, 2.0);
  CHECK(build_kernel(spec, 1).probs() == build_kernel(spec, 3).probs());
}

TEST_CASE("kernel specs are validated") {
  CHECK_THROWS_AS(build_kernel(gaussian_spec({})), Error);
  CHECK_THROWS_AS(build_kernel(gaussian_spec({10.0, 8.0})), Error);
  KernelSpec odd = gaussian_spec({10.0});
  odd.half_extent_m = 19.0;
  CHECK_THROWS_AS(build_kernel(odd), Error);
  try {
    build_kernel(gaussian_spec({}));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Argument);
  }
}

TEST_CASE("nearest slice lookup") {
  const ImpactKernel kernel(gaussian_spec(altitude_range(2.0, 10.0, 2.0)),
                            std::vector<float>(5 * 21 * 21, 0.0f));
  CHECK(kernel.nearest_level(2.0) == 0u);
  CHECK(kernel.nearest_level(3.0) == 0u);  // tie goes low
  CHECK(kernel.nearest_level(3.1) == 1u);
  CHECK(kernel.nearest_level(10.9) == 4u);
  CHECK_FALSE(kernel.nearest_level(11.5).has_value());
  CHECK_FALSE(kernel.nearest_level(0.5).has_value());
}

TEST_CASE("case altitude sampling has one hundred slices") {
  const auto alts = altitude_range(2.0, 200.0, 2.0);
  REQUIRE(alts.size() == 100);
  CHECK(alts.front() == 2.0);
  CHECK(alts.back() == 200.0);
}
