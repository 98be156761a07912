#include <doctest.h>

#include <cmath>

#include "sarmruin/conditions.hpp"
#include "sarmruin/errors.hpp"
#include "support.hpp"

using namespace sarmruin;

TEST_CASE("classification is structural") {
  CHECK(classify_sv(SlowlyVaryingSpec::type_i(1.0)) == SvForm::TypeI);
  CHECK(classify_sv(SlowlyVaryingSpec::type_iii(1.0, LongTailedLaw(WeibullTail{0.5, 1.0}))) == SvForm::TypeIII);
  CHECK(classify_sv(SlowlyVaryingSpec::type_iv(2.0, LongTailedLaw(WeibullTail{0.5, 1.0}),
                                               LongTailedLaw(ParetoTail{1.0, 1.0}))) == SvForm::TypeIV);
}

TEST_CASE("grids") {
  const auto g = default_condition_grid();
  CHECK(g.size() == 200);
  CHECK(g.front() == 1.0);
  CHECK(g.back() == 1e6);
  const auto short_grid = geometric_grid(1.0, 1e4, 50);
  CHECK_THROWS_AS(dz_report(testing::config_a(), short_grid), DomainError);
  const std::vector<double> below_one = {0.5, 10.0, 1e7};
  CHECK_THROWS_AS(dz_report(testing::config_a(), below_one), DomainError);
}

TEST_CASE("config A: DZ1 and DZ4 pass, DZ2 and DZ3 do not apply") {
  const auto r = dz_report(testing::config_a());
  CHECK(r.l_form == SvForm::TypeI);
  CHECK(r.dz[0].verdict == Verdict::Pass);
  for (double v : r.dz[0].diagnostics[0].values) CHECK(v == 1.0);
  CHECK_FALSE(r.dz[1].applicable);
  CHECK(r.dz[1].verdict == Verdict::NotApplicable);
  CHECK(r.dz[2].verdict == Verdict::NotApplicable);
  CHECK(r.dz[3].verdict == Verdict::Pass);
  // m(x) = 2 log x and the o-ratio vanishes since Y <= 1.
  const auto& m = r.dz[3].diagnostics[0];
  CHECK(m.name == "m");
  CHECK(m.values.back() == doctest::Approx(2.0 * std::log(1e6)));
  for (std::size_t k = 1; k < m.values.size(); ++k) CHECK(m.values[k] >= m.values[k - 1]);
  for (double v : r.dz[3].diagnostics[1].values) CHECK(v == 0.0);
  for (const auto& h : r.hypotheses) CHECK(holds(h.verdict));
  CHECK(r.any_dz_holds());
}

TEST_CASE("config A verdicts are stable under grid refinement") {
  const auto coarse = dz_report(testing::config_a());
  const auto fine = dz_report(testing::config_a(), geometric_grid(1.0, 1e6, 400));
  for (std::size_t k = 0; k < 4; ++k) CHECK(coarse.dz[k].verdict == fine.dz[k].verdict);
  for (std::size_t k = 0; k < coarse.hypotheses.size(); ++k)
    CHECK(coarse.hypotheses[k].verdict == fine.hypotheses[k].verdict);
}

TEST_CASE("type III with bounded Y: DZ3 o-ratio identically zero, U in S* by catalog") {
  const auto r = dz_report(testing::type_iii_model(DiscountLaw(UniformLaw{1.0})));
  CHECK(r.l_form == SvForm::TypeIII);
  CHECK(r.dz[2].applicable);
  CHECK(r.dz[2].checks[0].verdict == Verdict::PassByCatalog);
  CHECK(r.dz[2].checks[1].verdict == Verdict::Pass);
  CHECK(r.dz[2].verdict == Verdict::PassByCatalog);
  for (std::size_t k = 0; k < r.x_grid.size(); ++k)
    if (r.x_grid[k] > 1.0) CHECK(r.dz[2].diagnostics[0].values[k] == 0.0);
  // L decreases without bound relative to L(1): DZ1 fails.
  CHECK(r.dz[0].verdict == Verdict::Fail);
}

TEST_CASE("type III with lognormal Y: DZ3 o-ratio strictly decreasing at 1e3..1e6") {
  const auto r = dz_report(testing::type_iii_model(DiscountLaw(LognormalLaw{0.0, 1.0})));
  const auto& ratio = r.dz[2].diagnostics[0].values;
  double prev = INFINITY;
  for (std::size_t k = 0; k < r.x_grid.size(); ++k) {
    if (r.x_grid[k] < 1e3 * (1.0 - 1e-12)) continue;
    // Independent evaluation of both tails.
    const double x = r.x_grid[k];
    const double g = 0.5 * std::erfc(std::log(x) / std::sqrt(2.0));
    const double oracle = g / (std::pow(x, -1.0) * std::exp(-std::sqrt(std::log(x))));
    CHECK(ratio[k] == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(ratio[k] < prev);
    prev = ratio[k];
  }
  CHECK(r.dz[2].checks[1].verdict == Verdict::Pass);
  // E[U] = 2 < inf, so the DZ4 premise fails.
  CHECK(r.dz[3].checks[0].verdict == Verdict::Fail);
}

TEST_CASE("type IV uses the heuristic convolution check") {
  const SarmanovModel m(RegularlyVaryingLaw(1.0, 1.0, SlowlyVaryingSpec::type_iv(2.0, LongTailedLaw(WeibullTail{0.5, 1.0}),
                                                                                 LongTailedLaw(ParetoTail{1.0, 1.0}))),
                        DiscountLaw(UniformLaw{1.0}), 0.5, KernelPair::fgm());
  const auto r = dz_report(m);
  CHECK(r.l_form == SvForm::TypeIV);
  REQUIRE(r.dz[1].checks.size() == 1);
  CHECK(r.dz[1].checks[0].detail.find("convolution") != std::string::npos);
  CHECK(r.dz[1].verdict != Verdict::PassByCatalog);
}

TEST_CASE("summability: config A has C_i = 0 exactly") {
  SummabilitySettings s;
  s.i_max = 12;
  const auto r = summability_report(testing::config_a(), SummabilityVariant::DZ2, s);
  REQUIRE(r.c_values.size() == 11);
  for (std::size_t k = 0; k < r.c_values.size(); ++k) {
    CHECK(r.c_values[k] == 0.0);
    CHECK(r.exact_zero[k]);
  }
  CHECK(r.verdict == SummabilityVerdict::Converged);
  for (auto v : {SummabilityVariant::DZ4}) CHECK(summability_report(testing::config_a(), v, s).verdict ==
                                                  SummabilityVerdict::Converged);
  CHECK_THROWS_AS(summability_report(testing::config_a(), SummabilityVariant::DZ3, s), DomainError);
}

TEST_CASE("summability: DZ1 is automatic when E[Y^alpha] < 1") {
  SummabilitySettings s;
  const auto r = summability_report(testing::config_a(), SummabilityVariant::DZ1, s);
  CHECK(r.verdict == SummabilityVerdict::Automatic);
  CHECK(r.c_values[0] == doctest::Approx(1.0 / 3.0));
  CHECK(r.c_values[1] == doctest::Approx(1.0 / 9.0));
}

TEST_CASE("summability: alpha < 1 sums C_i directly, alpha >= 1 uses 1/(alpha+eps)") {
  SummabilitySettings s;
  s.i_max = 6;
  s.mc_n = 20000;
  s.seed = 4;
  const auto half = testing::uniform2_model();
  const SarmanovModel low(RegularlyVaryingLaw(0.5, 1.0, SlowlyVaryingSpec::type_i(1.0)), half.discount(), 1.0,
                          KernelPair::fgm());
  const auto r = summability_report(low, SummabilityVariant::DZ2, s);
  CHECK(r.alpha_below_one);
  double acc = 0.0;
  for (std::size_t k = 0; k < r.c_values.size(); ++k) {
    acc += r.c_values[k];
    CHECK(r.partial_sums[k] == doctest::Approx(acc).epsilon(1e-15));
  }
  const auto r2 = summability_report(half, SummabilityVariant::DZ2, s);
  CHECK_FALSE(r2.alpha_below_one);
  CHECK(r2.partial_sums[0] == doctest::Approx(std::pow(r2.c_values[0], 1.0 / 2.5)).epsilon(1e-15));
  CHECK_THROWS_AS(summability_report(half, SummabilityVariant::DZ2, SummabilitySettings{1, 0.5, 10, 0, 1}), DomainError);
  CHECK_THROWS_AS(summability_report(half, SummabilityVariant::DZ2, SummabilitySettings{5, 0.0, 10, 0, 1}), DomainError);
}

TEST_CASE("summability: noisy C_i give inconclusive, never a false pass") {
  SummabilitySettings s;
  s.i_max = 12;
  s.mc_n = 200;
  s.seed = 1;
  const auto r = summability_report(testing::uniform2_model(), SummabilityVariant::DZ2, s);
  CHECK(r.verdict == SummabilityVerdict::Inconclusive);
}
