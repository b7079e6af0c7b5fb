#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "support/oracles.hpp"
#include "vrt/error.hpp"
#include "vrt/hazard.hpp"

using namespace vrt;

namespace {

const UavSpec kUav{};  // 25 kg, 0.2 m^2, C_D 1.8, 50 cm, 10 m/s
const BodyModel kBody{};

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Argument;
}

}  // namespace

TEST_CASE("recovery without a parachute always fails") {
  for (double h : {0.5, 45.0, 200.0}) CHECK(p_unrecoverable(RecoveryModel{}, h) == 1.0);
}

TEST_CASE("parachute recovery sigmoid") {
  RecoveryModel r;
  r.parachute = true;
  CHECK(p_unrecoverable(r, 45.0) == doctest::Approx(1.0 - 0.5 / 2.35).epsilon(1e-14));
  CHECK(p_unrecoverable(r, 45.0) == doctest::Approx(0.7872).epsilon(1e-4));
  CHECK(p_unrecoverable(r, 80.0) <= 0.5 + 1e-6);
  double previous = 1.0;
  for (double h = 1.0; h <= 200.0; h += 0.5) {
    const double p = p_unrecoverable(r, h);
    CHECK(p <= previous);
    CHECK(p >= 1.0 - r.max_success);
    CHECK(p <= 1.0);
    previous = p;
  }
  CHECK(kind_of([&] { p_unrecoverable(r, 0.0); }) == ErrorKind::Domain);
}

TEST_CASE("terminal velocity") {
  CHECK(terminal_velocity(kUav, 0.0) == 0.0);
  const double limit = std::sqrt(2 * 25 * 9.8 / (1.225 * 0.2 * 1.8));
  CHECK(limit == doctest::Approx(33.33).epsilon(1e-4));
  CHECK(terminal_velocity(kUav, 1e4) == doctest::Approx(limit).epsilon(1e-12));
  for (double h : {5.0, 50.0, 122.0, 500.0})
    CHECK(terminal_velocity(kUav, h) == doctest::Approx(oracle_ref::fall_speed_rk4(kUav, h)).epsilon(1e-3));
  double previous = 0.0;
  for (double h = 1.0; h <= 500.0; h += 1.0) {
    CHECK(terminal_velocity(kUav, h) > previous);
    previous = terminal_velocity(kUav, h);
  }
}

TEST_CASE("impact energy") {
  const double cap = 25.0 * 25.0 * 9.8 / (1.225 * 0.2 * 1.8);
  CHECK(terminal_kinetic_energy(kUav) == doctest::Approx(cap).epsilon(1e-14));
  CHECK(cap == doctest::Approx(13888.9).epsilon(1e-5));
  const double u122 = oracle_ref::fall_speed_rk4(kUav, 122.0);
  CHECK(impact_kinetic_energy(kUav, 122.0) == doctest::Approx(0.5 * 25.0 * u122 * u122).epsilon(1e-3));
  CHECK(impact_kinetic_energy(kUav, 122.0) == doctest::Approx(12275.0).epsilon(1e-3));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> height(0.0, 500.0);
  for (int n = 0; n < 2000; ++n) {
    const double h = n == 0 ? 0.0 : height(rng);
    const double u = terminal_velocity(kUav, h);
    CHECK(impact_kinetic_energy(kUav, h) == doctest::Approx(0.5 * 25.0 * u * u).epsilon(1e-12));
    CHECK(impact_kinetic_energy(kUav, h) < cap);
  }
}

TEST_CASE("blunt criterion") {
  const double denom = 0.652 * 50.0 * std::pow(70.0, 2.0 / 3.0);
  CHECK(denom == doctest::Approx(553.6).epsilon(5e-4));
  CHECK(blunt_criterion(denom, kBody, 50.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(blunt_criterion(12275.0, kBody, 50.0) == doctest::Approx(std::log(12275.0 / denom)).epsilon(1e-14));
  CHECK(blunt_criterion(12275.0, kBody, 50.0) == doctest::Approx(3.099).epsilon(1e-3));
  double prev = -1e9, prev_step = 1e9;
  for (double e = 100.0; e < 20000.0; e += 100.0) {
    const double bc = blunt_criterion(e, kBody, 50.0);
    CHECK(bc > prev);
    if (prev > -1e9) {
      CHECK(bc - prev < prev_step);  // concave
      prev_step = bc - prev;
    }
    prev = bc;
  }
  CHECK(kind_of([] { blunt_criterion(0.0, kBody, 50.0); }) == ErrorKind::Domain);
}

TEST_CASE("AIS-3 logistic") {
  CHECK(p_ais3(17.76 / 38.50) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p_ais3(3.099) >= 1.0 - 1e-12);
  for (double bc = -100.0; bc <= 100.0; bc += 0.5) {
    const double p = p_ais3(bc);
    CHECK(std::isfinite(p));
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
  // Energy of 50 % AIS-3 probability, by bisection on the composed model.
  double lo = 100.0, hi = 5000.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (p_ais3(blunt_criterion(mid, kBody, 50.0)) < 0.5 ? lo : hi) = mid;
  }
  const double denom = 0.652 * 50.0 * std::pow(70.0, 2.0 / 3.0);
  CHECK(lo == doctest::Approx(denom * std::exp(17.76 / 38.50)).epsilon(1e-9));
  CHECK(lo == doctest::Approx(878.0).epsilon(2e-3));
}

TEST_CASE("Shelley fatality") {
  CHECK(p_fatality_shelley(300.0, 300.0, 0.05) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p_fatality_shelley(290.0, 300.0, 10.0) < 1e-4);
  CHECK(p_fatality_shelley(310.0, 300.0, 10.0) > 1.0 - 1e-4);
  double previous = 0.0;
  for (double e = 0.0; e < 2000.0; e += 7.0) {
    CHECK(p_fatality_shelley(e, 300.0, 0.01) >= previous);
    previous = p_fatality_shelley(e, 300.0, 0.01);
  }
}

TEST_CASE("Primatesta fatality with sheltering") {
  CHECK(p_fatality_primatesta(50.0, 1e6, 100.0, 0.5) == 0.0);
  CHECK(p_fatality_primatesta(100.0, 1e6, 100.0, 0.5) == 0.0);
  CHECK(p_fatality_primatesta(1e30, 1e6, 100.0, 0.25) == doctest::Approx(1.0).epsilon(1e-12));
  // Independent evaluation: k = (100 / 1e4)^(1/2) = 0.1; (1 - 0.1) / (1 - 0.2 + 100 * 0.1) = 1/12.
  const long double k = std::sqrt(100.0L / 1e4L);
  const long double ref = (1.0L - k) / (1.0L - 2.0L * k + std::sqrt(1e6L / 100.0L) * k);
  CHECK(p_fatality_primatesta(1e4, 1e6, 100.0, 0.5) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-12));
  CHECK(static_cast<double>(ref) == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
  // alpha/beta small enough to drive the denominator negative: k = 0.8.
  CHECK(kind_of([] { p_fatality_primatesta(100.0 / std::pow(0.8, 4.0), 1.0, 100.0, 1.0); }) ==
        ErrorKind::Evaluation);
  CHECK(kind_of([] { p_fatality_primatesta(500.0, 1e6, 100.0, 0.0); }) == ErrorKind::Domain);
}

TEST_CASE("vehicle windshield damage") {
  CHECK(p_vehicle_medium_damage(1.6) == doctest::Approx(0.937).epsilon(0.001 / 0.937));
  CHECK(p_vehicle_medium_damage(0.0) == doctest::Approx(1.0 / (1.0 + 0.5 * std::exp(6.0))).epsilon(1e-14));
  CHECK(p_vehicle_medium_damage(0.0) == doctest::Approx(4.93e-3).epsilon(2e-3));
  double previous = 0.0;
  for (double e = 0.0; e <= 1000.0; e += 0.25) {
    CHECK(p_vehicle_medium_damage(e) >= previous);
    previous = p_vehicle_medium_damage(e);
  }
  CHECK(previous == doctest::Approx(1.0));
  CHECK(kind_of([] { p_vehicle_medium_damage(1600.0); }) == ErrorKind::Domain);
}

TEST_CASE("harm dispatch per exposed class") {
  const HarmConfig cfg;
  CHECK(p_harm(GroundClass::Pedestrian, impact_kinetic_energy(kUav, 125.0), cfg) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(p_harm(GroundClass::Vehicle, 1600.0, cfg) == doctest::Approx(0.937).epsilon(0.001 / 0.937));
  CHECK(p_harm(GroundClass::None, 5000.0, cfg) == 0.0);
  CHECK(p_harm(GroundClass::Vehicle, 1e-9, cfg) == doctest::Approx(p_vehicle_medium_damage(0.0)).epsilon(1e-9));
  CHECK(p_harm(GroundClass::Pedestrian, 1e-9, cfg) < 1e-12);
  HarmConfig none;
  none.vehicle.reset();
  CHECK(kind_of([&] { p_harm(GroundClass::Vehicle, 100.0, none); }) == ErrorKind::Config);
}

TEST_CASE("every harm model stays a monotone probability") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double beta = 10.0 + 1000.0 * u(rng);
    const double alpha = beta * (1.0 + 1e4 * u(rng));
    const double cs = 0.05 + 0.95 * u(rng);
    const BodyModel body{40.0 + 60.0 * u(rng), 0.3 + 0.7 * u(rng)};
    const std::vector<HarmModel> models{BcAis3{body, 10.0 + 60.0 * u(rng)},
                                        ShelleyFatality{1000.0 * u(rng), 0.1 * u(rng) + 1e-4},
                                        PrimatestaFatality{alpha, beta, cs}, VehicleWindshield{}};
    for (const auto& m : models) {
      double previous = 0.0;
      for (double e = 1.0; e < 2e5; e *= 1.3) {
        const double p = evaluate_harm(m, e);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        CHECK(p >= previous - 1e-15);
        previous = p;
      }
    }
  }
}

TEST_CASE("failure-rate presets") {
  CHECK(reliability_total_fit() == doctest::Approx(30.23).epsilon(1e-9));
  CHECK(failure_preset("catastrophic-5e-6")->lambda_per_hour == 5e-6);
  CHECK(failure_preset("fit-total")->lambda_per_hour == doctest::Approx(30.23e-6));
  CHECK(failure_preset("fit-power-plant")->lambda_per_hour == doctest::Approx(9.94e-6));
  CHECK_FALSE(failure_preset("nope").has_value());
  CHECK(kind_of([] { FailureModel{1.5, "x"}.validate(); }) == ErrorKind::Argument);
}

TEST_CASE("hazard chain is a pure function of its inputs") {
  HazardChain chain;
  const double a = chain.p_harm(GroundClass::Pedestrian, 77.0) * chain.p_unrecoverable(77.0);
  const double b = chain.p_harm(GroundClass::Pedestrian, 77.0) * chain.p_unrecoverable(77.0);
  CHECK(a == b);
  chain.include_cruise_energy = true;
  CHECK(chain.impact_energy(10.0) ==
        doctest::Approx(impact_kinetic_energy(kUav, 10.0) + 0.5 * 25.0 * 10.0 * 10.0).epsilon(1e-14));
}

TEST_CASE("severity scales are described") {
  CHECK(std::string(describe(AisLevel::Serious)) != "");
  CHECK(std::string(describe(IeaLevel::Medium)) != "");
}
