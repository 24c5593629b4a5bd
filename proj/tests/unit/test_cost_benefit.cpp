#include <catch_amalgamated.hpp>

#include <algorithm>

#include "dynmcda/cost_benefit.hpp"

using namespace dynmcda;
using Catch::Approx;

namespace {
const FinancialParams kParams{};
const auto kOptions = defaults::options();
const OptionSpec& option(int id) { return kOptions[static_cast<std::size_t>(id - 1)]; }
}  // namespace

TEST_CASE("interest factor", "[cost]") {
  // 1 + 1031000 / 46092000 evaluated independently.
  CHECK(interest_factor(kParams) == Approx(1.0 + 1031.0 / 46092.0).margin(1e-12));
  CHECK(interest_factor(kParams) == Approx(1.0223683).margin(1e-6));
  FinancialParams p;
  p.interestEarned = 0.0;
  CHECK(interest_factor(p) == 1.0);
  p.interestEarned = 100.0;
  p.cashAsset = 1000.0;
  CHECK(interest_factor(p) == Approx(1.1).epsilon(1e-15));
  p.cashAsset = 0.0;
  CHECK_THROWS_AS(interest_factor(p), std::domain_error);
}

TEST_CASE("effective cost", "[cost]") {
  CHECK(effective_cost(90000.0, kParams) == Approx(92148.8).margin(0.1));
  CHECK(effective_cost(50000.0, kParams) == Approx(51193.78).margin(0.05));
  CHECK(effective_cost(0.0, kParams) == 0.0);
  CHECK_THROWS_AS(effective_cost(-1.0, kParams), ValidationError);
}

TEST_CASE("safety cost", "[cost]") {
  CHECK(safety_cost(0.1, kParams).value == Approx(205146.8).margin(1.0));
  CHECK(safety_cost(0.0, kParams).value == 0.0);
  CHECK(safety_cost(0.2, kParams).value == Approx(410293.6).margin(2.0));
  // (12488000 - 502000) / 336 = 35672.619..., five staff plus car and upkeep.
  const double perStep = 5.0 * (11986000.0 / 336.0) + 22000.0;
  CHECK(safety_cost(0.1, kParams).value == Approx(perStep * 1.0238756).epsilon(1e-12));
  const auto partial = safety_cost(0.15, kParams);
  CHECK(partial.roundedUp);
  CHECK(partial.staffingSteps == 2);
  CHECK_FALSE(safety_cost(0.3, kParams).roundedUp);
  CHECK(safety_cost(0.3, kParams).staffingSteps == 3);
  CHECK_THROWS_AS(safety_cost(-0.1, kParams), ValidationError);
}

TEST_CASE("safety cost is linear in whole staffing steps", "[cost][property]") {
  const double one = safety_cost(kParams.vtgStep, kParams).value;
  for (int k = 0; k <= 10; ++k)
    CHECK(safety_cost(k * kParams.vtgStep, kParams).value == Approx(k * one).epsilon(1e-12));
}

TEST_CASE("heaviside", "[cost]") {
  CHECK(heaviside(0.1) == 1);
  CHECK(heaviside(0.0) == 0);
  CHECK(heaviside(-1.0) == 0);
  static_assert(heaviside(2.0) == 1);
}

TEST_CASE("environmental cost", "[cost]") {
  CHECK(environmental_cost(option(1), 0.1, kParams) == Approx(51193.78).margin(0.05));
  CHECK(environmental_cost(option(2), 0.1, kParams) == 0.0);
  CHECK(environmental_cost(option(2), 0.2, kParams) == Approx(51193.78).margin(0.05));
  CHECK(environmental_cost(option(1), 0.0, kParams) == 0.0);
}

TEST_CASE("environmental cost ordering and monotonicity", "[cost][property]") {
  double prev1 = 0.0, prev2 = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double v = i * 0.01;
    const double e1 = environmental_cost(option(1), v, kParams);
    const double e2 = environmental_cost(option(2), v, kParams);
    const double e3 = environmental_cost(option(3), v, kParams);
    CHECK(e2 == e3);
    CHECK(e2 <= e1);
    CHECK(e1 >= prev1);
    CHECK(e2 >= prev2);
    prev1 = e1;
    prev2 = e2;
  }
}

TEST_CASE("traffic profit", "[cost]") {
  CHECK(traffic_profit(0.1, kParams) == Approx(758800.0).epsilon(1e-15));
  CHECK(traffic_profit(0.0, kParams) == 0.0);
  CHECK(traffic_profit(0.2, kParams) == Approx(1517600.0).epsilon(1e-15));
  CHECK_THROWS_AS(traffic_profit(-0.1, kParams), ValidationError);
}

TEST_CASE("expected breakdowns", "[cost]") {
  const auto vtg = defaults::vtg_distribution();
  const auto b1 = expected_breakdown(option(1), vtg, kParams);
  const auto b2 = expected_breakdown(option(2), vtg, kParams);
  const auto b3 = expected_breakdown(option(3), vtg, kParams);
  CHECK(b1.costTotal == Approx(243542.1).margin(1.0));
  CHECK(b2.costTotal == Approx(310094.1).margin(1.0));
  CHECK(b1.netBenefit == Approx(515257.9).margin(1.0));
  CHECK(b1.facility == 0.0);
  CHECK(b2.facility == Approx(92148.8).margin(0.1));
  CHECK(b1.environmental == Approx(38395.3).margin(0.1));
  CHECK(b2.environmental == Approx(12798.5).margin(0.1));
  CHECK(b3.environmental == b2.environmental);
  CHECK(b1.trafficProfit == Approx(758800.0).epsilon(1e-15));
  for (const auto& b : {b1, b2, b3}) {
    CHECK(std::abs(b.costTotal - (b.environmental + b.facility + b.safety)) <= 1e-6);
    CHECK(std::abs(b.netBenefit + b.costTotal - b.trafficProfit) <= 1e-6);
  }
}

TEST_CASE("CBA ranking", "[cost]") {
  const auto vtg = defaults::vtg_distribution();
  std::vector<CostBreakdown> bs;
  for (const auto& o : kOptions) bs.push_back(expected_breakdown(o, vtg, kParams));
  const auto r = cba_rank(bs);
  CHECK(r.method == Method::cba);
  CHECK(r.best() == 1);
  CHECK(r.order == std::vector<int>{1, 2, 3});
  auto ids = r.order;
  std::sort(ids.begin(), ids.end());
  CHECK(ids == std::vector<int>{1, 2, 3});

  CHECK(cba_rank(std::vector<CostBreakdown>{bs[1]}).order == std::vector<int>{2});
  CostBreakdown a{5, 0, 0, 0, 0, 0, 10.0}, b{4, 0, 0, 0, 0, 0, 10.0};
  CHECK(cba_rank(std::vector<CostBreakdown>{a, b}).order == std::vector<int>{4, 5});
  CHECK_THROWS_AS(cba_rank(std::vector<CostBreakdown>{}), ValidationError);
  CHECK_THROWS_AS(cba_rank(std::vector<CostBreakdown>{a, a}), ValidationError);
}

TEST_CASE("option and parameter validation", "[cost][errors]") {
  OptionSpec both{9, "x", true, true, 0.85, true};
  CHECK_THROWS_AS(both.validate(), ValidationError);
  OptionSpec wrongUnit{9, "x", true, false, 1.0, true};
  CHECK_THROWS_AS(wrongUnit.validate(), ValidationError);
  FinancialParams p;
  p.staffCount = 8;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.vtgStep = 0.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.laneCost = -1.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  CHECK_NOTHROW(FinancialParams{}.validate());
}
