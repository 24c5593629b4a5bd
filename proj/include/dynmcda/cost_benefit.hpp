#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "ranking.hpp"
#include "scenario.hpp"

namespace dynmcda {

// Port financial figures. Defaults are the 2010-2011 case-study values.
struct FinancialParams {
  double interestEarned = 1'031'000.0;
  double cashAsset = 46'092'000.0;
  // Applied to every spend to account for lost interest. 92148.8 / 90000;
  // interest_factor() gives the textbook 1 + earned/asset instead.
  double effectiveMultiplier = 1.0238756;
  double laneCost = 90'000.0;
  double totalSalaries = 12'488'000.0;
  double keyRemuneration = 502'000.0;
  int staffCount = 344;
  int keyStaffCount = 8;
  int newStaffPerStep = 5;
  double carCost = 20'000.0;
  double carMaintenance = 2'000.0;
  double greeneryCost = 50'000.0;
  double baseProfit = 7'588'000.0;
  double vtgStep = 0.10;

  void validate() const {
    auto non_negative = [](double v, const char* name) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError(std::string("financial.") + name, "must be >= 0");
    };
    non_negative(interestEarned, "interestEarned");
    non_negative(cashAsset, "cashAsset");
    non_negative(effectiveMultiplier, "effectiveMultiplier");
    non_negative(laneCost, "laneCost");
    non_negative(totalSalaries, "totalSalaries");
    non_negative(keyRemuneration, "keyRemuneration");
    non_negative(carCost, "carCost");
    non_negative(carMaintenance, "carMaintenance");
    non_negative(greeneryCost, "greeneryCost");
    non_negative(baseProfit, "baseProfit");
    if (newStaffPerStep < 0) throw ValidationError("financial.newStaffPerStep", "must be >= 0");
    if (staffCount <= keyStaffCount)
      throw ValidationError("financial.staffCount", "must exceed keyStaffCount");
    if (!(vtgStep > 0.0 && vtgStep <= 1.0)) throw ValidationError("financial.vtgStep", "must lie in (0, 1]");
  }
};

struct OptionSpec {
  int id = 1;
  std::string name;
  bool extraLorryLane = false;
  bool extraNonLorryLane = false;
  double consumptionUnit = 1.0;
  bool requiresFacilityBuild = false;

  bool adds_lane() const noexcept { return extraLorryLane || extraNonLorryLane; }

  void validate(const std::string& field = "option") const {
    if (extraLorryLane && extraNonLorryLane)
      throw ValidationError(field, "an option adds at most one lane");
    const double expected = adds_lane() ? 0.85 : 1.0;
    if (std::abs(consumptionUnit - expected) > 1e-12)
      throw ValidationError(field + ".consumptionUnit", "must be 0.85 when a lane is added and 1.0 otherwise");
  }
};

namespace defaults {

inline std::vector<OptionSpec> options() {
  return {
      {1, "Do nothing", false, false, 1.0, false},
      {2, "Additional lorry lane (weighbridge)", true, false, 0.85, true},
      {3, "Additional non-lorry lane", false, true, 0.85, true},
  };
}

}  // namespace defaults

struct CostBreakdown {
  int optionId = 0;
  double environmental = 0.0;
  double facility = 0.0;
  double safety = 0.0;
  double costTotal = 0.0;
  double trafficProfit = 0.0;
  double netBenefit = 0.0;
};

inline double interest_factor(const FinancialParams& p) {
  if (p.cashAsset == 0.0) throw std::domain_error("interest_factor: cashAsset is zero");
  return 1.0 + p.interestEarned / p.cashAsset;
}

inline double effective_cost(double base, const FinancialParams& p) {
  if (base < 0.0) throw ValidationError("base", "cost must be non-negative");
  return base * p.effectiveMultiplier;
}

struct SafetyCost {
  double value = 0.0;
  int staffingSteps = 0;
  bool roundedUp = false;  // vtg was not a whole number of vtgSteps
};

// Five staff and one car per vtgStep of growth. Partial steps are staffed
// as a full step.
inline SafetyCost safety_cost(double vtg, const FinancialParams& p) {
  if (vtg < 0.0) throw ValidationError("vtg", "must be >= 0");
  const double steps = vtg / p.vtgStep;
  const double nearest = std::round(steps);
  SafetyCost out;
  if (std::abs(steps - nearest) <= 1e-9) {
    out.staffingSteps = static_cast<int>(nearest);
  } else {
    out.staffingSteps = static_cast<int>(std::ceil(steps));
    out.roundedUp = true;
  }
  const double averageStaff =
      (p.totalSalaries - p.keyRemuneration) / static_cast<double>(p.staffCount - p.keyStaffCount);
  const double perStep = p.newStaffPerStep * averageStaff + p.carCost + p.carMaintenance;
  out.value = out.staffingSteps * effective_cost(perStep, p);
  return out;
}

// H(0) = 0.
constexpr int heaviside(double x) noexcept { return x > 0.0 ? 1 : 0; }

inline double environmental_cost(const OptionSpec& option, double vtg, const FinancialParams& p) {
  return effective_cost(p.greeneryCost, p) * heaviside(option.consumptionUnit * (1.0 + vtg) - 1.0);
}

inline double facility_cost(const OptionSpec& option, const FinancialParams& p) {
  return option.requiresFacilityBuild ? effective_cost(p.laneCost, p) : 0.0;
}

inline double traffic_profit(double vtg, const FinancialParams& p) {
  if (vtg < 0.0) throw ValidationError("vtg", "must be >= 0");
  return vtg * p.baseProfit;
}

inline CostBreakdown expected_breakdown(const OptionSpec& option, const DiscreteDistribution& vtgDist,
                                        const FinancialParams& p) {
  option.validate();
  CostBreakdown b;
  b.optionId = option.id;
  b.environmental = expectation_over_vtg(vtgDist, [&](double v) { return environmental_cost(option, v, p); });
  b.facility = facility_cost(option, p);
  b.safety = expectation_over_vtg(vtgDist, [&](double v) { return safety_cost(v, p).value; });
  b.trafficProfit = expectation_over_vtg(vtgDist, [&](double v) { return traffic_profit(v, p); });
  b.costTotal = b.environmental + b.facility + b.safety;
  b.netBenefit = b.trafficProfit - b.costTotal;
  return b;
}

// Greatest expected net gain first.
inline RankingOutcome cba_rank(std::span<const CostBreakdown> breakdowns) {
  if (breakdowns.empty()) throw ValidationError("breakdowns", "at least one option is required");
  std::map<int, double> totals;
  for (const auto& b : breakdowns) {
    if (!totals.emplace(b.optionId, b.netBenefit).second)
      throw ValidationError("breakdowns", "duplicate option id " + std::to_string(b.optionId));
  }
  return make_ranking(Method::cba, std::move(totals));
}

}  // namespace dynmcda
