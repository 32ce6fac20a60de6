#include <doctest.h>

#include <cmath>
#include <vector>

#include "sdmest/channel.hpp"
#include "sdmest/rng.hpp"

using namespace sdmest;

namespace {

constexpr double kDbPerNeper = 10.0 / 2.302585092994045684;  // 10 / ln 10

LinkConfig link_cfg(int modes, int sections, double sigma_g) {
  LinkConfig cfg;
  cfg.num_modes = modes;
  cfg.num_sections = sections;
  cfg.sigma_g = sigma_g;
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("channel");

TEST_CASE("sigma_mdg of identity is zero") {
  CHECK(sigma_mdg_db(CMat::identity(6)) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("sigma_mdg diagonal closed form") {
  // gains (4, 0.25) -> logs (+6.0206, -6.0206) dB -> population std 6.0206
  const double v = sigma_mdg_db(CMat::diagonal({cxd(2.0), cxd(0.5)}));
  CHECK(v == doctest::Approx(10.0 * std::log10(4.0)).epsilon(1e-12));
}

TEST_CASE("sigma_mdg is scale invariant") {
  Rng rng(3);
  CMat h(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) h(i, j) = rng.complex_normal();
  const double base = sigma_mdg_db(h);
  CMat h2 = h;
  h2 *= cxd(7.3);
  CHECK(sigma_mdg_db(h2) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("sigma_mdg invariant under unitary rotations") {
  Rng rng(4);
  const ChannelRealization ch = generate_channel(link_cfg(3, 10, 0.08), 99);
  const CMat u = sample_haar_unitary(6, rng);
  const CMat v = sample_haar_unitary(6, rng);
  CHECK(sigma_mdg_db(u * ch.h * v) ==
        doctest::Approx(ch.sigma_mdg_db).epsilon(1e-9));
}

TEST_CASE("sigma_mdg rejects singular input") {
  CHECK_THROWS_AS(sigma_mdg_db(CMat::diagonal({cxd(1.0), cxd(0.0)})),
                  std::runtime_error);
}

TEST_CASE("gainless sections give a unitary channel") {
  const ChannelRealization ch = generate_channel(link_cfg(3, 20, 0.0), 42);
  CHECK(ch.sigma_mdg_db == doctest::Approx(0.0).epsilon(1e-9));
  const EigenResult eig = hermitian_eigenvalues(ch.h * ch.h.adjoint());
  for (double lam : eig.eigenvalues)
    CHECK(lam == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("one fixed-gain section has the closed-form sigma_mdg") {
  // H = U diag(e^{a/2}, e^{-a/2}) V^H -> sigma_mdg = a * 10/ln10
  const double a = 0.37;
  Rng rng(5);
  const CMat u = sample_haar_unitary(2, rng);
  const CMat v = sample_haar_unitary(2, rng);
  const CMat g = CMat::diagonal({cxd(std::exp(0.5 * a)), cxd(std::exp(-0.5 * a))});
  const double got = sigma_mdg_db(u * g * v.adjoint());
  CHECK(got == doctest::Approx(a * kDbPerNeper).epsilon(1e-10));
}

TEST_CASE("normalized channel has Frobenius norm squared equal to D") {
  const ChannelRealization ch = generate_channel(link_cfg(3, 50, 0.1), 7);
  const double fn = ch.h.frobenius_norm();
  CHECK(fn * fn == doctest::Approx(6.0).epsilon(1e-9));
  CHECK(ch.seed == 7);
  // label self-consistency: stored sigma_mdg recomputable from H
  CHECK(sigma_mdg_db(ch.h) == doctest::Approx(ch.sigma_mdg_db).epsilon(1e-12));
}

TEST_CASE("same seed reproduces the channel exactly") {
  const LinkConfig cfg = link_cfg(3, 30, 0.09);
  const ChannelRealization a = generate_channel(cfg, 1234);
  const ChannelRealization b = generate_channel(cfg, 1234);
  CHECK((a.h - b.h).max_abs() == 0.0);
}

TEST_CASE("calibration hits the target ensemble mean" * doctest::timeout(300)) {
  CalibrationOptions opts;
  opts.num_draws = 400;
  const int sections = 12;
  const double target = 3.0;
  const double sg = calibrate_sigma_g(target, sections, 6, 2024, opts);
  // fresh ensemble, disjoint seeds
  LinkConfig cfg = link_cfg(3, sections, sg);
  double acc = 0.0;
  const int n = 600;
  for (int i = 0; i < n; ++i)
    acc += generate_channel(cfg, derive_seed(555, {seed_tag::kEvalGrid,
                                                   (std::uint64_t)i}))
               .sigma_mdg_db;
  CHECK(std::abs(acc / n - target) <= 0.05 * target);
}

TEST_CASE("calibration of target zero is zero") {
  CHECK(calibrate_sigma_g(0.0, 50, 6, 1) == 0.0);
}

TEST_CASE("doubling sections shrinks calibrated sigma_g by sqrt(2)" *
          doctest::timeout(300)) {
  CalibrationOptions opts;
  opts.num_draws = 500;
  const double target = 0.5;  // weak-MDG regime
  const double sg_k = calibrate_sigma_g(target, 8, 6, 31, opts);
  const double sg_2k = calibrate_sigma_g(target, 16, 6, 31, opts);
  const double ratio = sg_k / sg_2k;
  CHECK(ratio == doctest::Approx(std::sqrt(2.0)).epsilon(0.10));
}

TEST_CASE("ensemble spread tightens as sections grow" * doctest::timeout(300)) {
  // same accumulated level, more sections -> narrower sigma_mdg distribution
  CalibrationOptions opts;
  opts.num_draws = 300;
  const double target = 2.0;
  const auto spread = [&](int sections, std::uint64_t seed) {
    const double sg = calibrate_sigma_g(target, sections, 6, seed, opts);
    LinkConfig cfg = link_cfg(3, sections, sg);
    std::vector<double> v;
    for (int i = 0; i < 400; ++i)
      v.push_back(generate_channel(
                      cfg, derive_seed(seed, {seed_tag::kEvalGrid,
                                              (std::uint64_t)i + 1000}))
                      .sigma_mdg_db);
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= v.size();
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    return std::sqrt(var / v.size());
  };
  CHECK(spread(4, 71) > spread(32, 72));
}

TEST_CASE("calibration curve matches the bisection calibrator" *
          doctest::timeout(300)) {
  const int sections = 10;
  const MdgCalibrationCurve curve =
      MdgCalibrationCurve::build(sections, 6, 909, 4.0, 10, 500);
  for (double target : {0.8, 2.0, 3.5}) {
    const double sg = curve.sigma_g_for(target);
    LinkConfig cfg = link_cfg(3, sections, sg);
    double acc = 0.0;
    const int n = 600;
    for (int i = 0; i < n; ++i)
      acc += generate_channel(cfg, derive_seed(311, {seed_tag::kEvalGrid,
                                                     (std::uint64_t)i}))
                 .sigma_mdg_db;
    CHECK(std::abs(acc / n - target) <= 0.03 * target + 0.02);
  }
  CHECK(curve.sigma_g_for(0.0) == 0.0);
  CHECK_THROWS_AS(curve.sigma_g_for(100.0), std::invalid_argument);
}

TEST_CASE("invalid link configs are rejected") {
  CHECK_THROWS_AS(generate_channel(link_cfg(0, 10, 0.1), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_channel(link_cfg(3, 0, 0.1), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_channel(link_cfg(3, 10, -0.1), 1),
                  std::invalid_argument);
}

TEST_SUITE_END();
