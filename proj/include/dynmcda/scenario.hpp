#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "error.hpp"

namespace dynmcda {

// A finite random variable: strictly increasing support, positive masses
// summing to one.
class DiscreteDistribution {
 public:
  struct Entry {
    double value = 0.0;
    double probability = 0.0;
  };

  DiscreteDistribution() = default;

  // `field` names the distribution in validation messages.
  explicit DiscreteDistribution(std::vector<Entry> entries, const std::string& field = "distribution")
      : entries_(std::move(entries)) {
    validate(field);
  }

  static DiscreteDistribution point(double value) { return DiscreteDistribution({{value, 1.0}}); }

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  double probability_of(double value) const {
    for (const auto& e : entries_)
      if (e.value == value) return e.probability;
    return 0.0;
  }

  double mean() const {
    double m = 0.0;
    for (const auto& e : entries_) m += e.value * e.probability;
    return m;
  }

 private:
  void validate(const std::string& field) const {
    if (entries_.empty()) throw ValidationError(field + ".entries", "must not be empty");
    double sum = 0.0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto path = field + ".entries[" + std::to_string(i) + "]";
      const auto& e = entries_[i];
      if (!std::isfinite(e.value)) throw ValidationError(path + ".value", "must be finite");
      if (!(e.probability > 0.0) || e.probability > 1.0)
        throw ValidationError(path + ".probability", "must lie in (0, 1]");
      if (i > 0 && !(e.value > entries_[i - 1].value))
        throw ValidationError(path + ".value", "values must be strictly increasing");
      sum += e.probability;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw ValidationError(field + ".entries", "probabilities sum to " + std::to_string(sum) + ", expected 1");
  }

  std::vector<Entry> entries_;
};

// Vehicle-traffic growth is a fraction (0.1 == 10 %); the lorry traffic
// percentage stays in percent (44.17).
struct Scenario {
  int id = 0;
  double vtg = 0.0;
  double ltp = 0.0;
  double probability = 0.0;
  double vtgProbability = 0.0;
  double ltpProbability = 0.0;
};

class ScenarioSet {
 public:
  ScenarioSet() = default;
  explicit ScenarioSet(std::vector<Scenario> scenarios) : scenarios_(std::move(scenarios)) {
    double sum = 0.0;
    for (std::size_t i = 0; i < scenarios_.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j)
        if (scenarios_[j].id == scenarios_[i].id)
          throw ValidationError("scenarios", "duplicate scenario id " + std::to_string(scenarios_[i].id));
      sum += scenarios_[i].probability;
    }
    if (scenarios_.empty()) throw ValidationError("scenarios", "must not be empty");
    if (std::abs(sum - 1.0) > 1e-12) throw ValidationError("scenarios", "probabilities do not sum to 1");
  }

  const std::vector<Scenario>& scenarios() const noexcept { return scenarios_; }
  std::size_t size() const noexcept { return scenarios_.size(); }
  auto begin() const noexcept { return scenarios_.begin(); }
  auto end() const noexcept { return scenarios_.end(); }

  const Scenario& by_id(int id) const {
    for (const auto& s : scenarios_)
      if (s.id == id) return s;
    throw ValidationError("scenario", "unknown scenario id " + std::to_string(id));
  }

 private:
  std::vector<Scenario> scenarios_;
};

// VTG outer, LTP inner: scenario 1 is (lowest VTG, lowest LTP), matching the
// numbering of the case-study probability tree.
inline ScenarioSet build_scenario_set(const DiscreteDistribution& vtg, const DiscreteDistribution& ltp) {
  if (vtg.size() == 0) throw ValidationError("vtg", "distribution is empty");
  if (ltp.size() == 0) throw ValidationError("ltp", "distribution is empty");
  std::vector<Scenario> out;
  out.reserve(vtg.size() * ltp.size());
  int id = 1;
  for (const auto& v : vtg.entries())
    for (const auto& l : ltp.entries())
      out.push_back({id++, v.value, l.value, v.probability * l.probability, v.probability, l.probability});
  return ScenarioSet(std::move(out));
}

inline double expectation(const std::map<int, double>& values, const ScenarioSet& set) {
  double e = 0.0;
  for (const auto& s : set) {
    auto it = values.find(s.id);
    if (it == values.end())
      throw ValidationError("values", "no value for scenario id " + std::to_string(s.id));
    e += s.probability * it->second;
  }
  return e;
}

// Expectation of f(scenario) for any callable.
template <class F>
  requires std::is_invocable_r_v<double, F, const Scenario&>
double expectation(const ScenarioSet& set, F&& f) {
  double e = 0.0;
  for (const auto& s : set) e += s.probability * f(s);
  return e;
}

// Marginal expectation over VTG only; `values` is keyed by VTG value.
inline double expectation_over_vtg(const std::map<double, double>& values, const DiscreteDistribution& vtg) {
  double e = 0.0;
  for (const auto& entry : vtg.entries()) {
    auto it = values.find(entry.value);
    if (it == values.end())
      throw ValidationError("values", "no value for vtg " + std::to_string(entry.value));
    e += entry.probability * it->second;
  }
  return e;
}

template <class F>
  requires std::is_invocable_r_v<double, F, double>
double expectation_over_vtg(const DiscreteDistribution& vtg, F&& f) {
  double e = 0.0;
  for (const auto& entry : vtg.entries()) e += entry.probability * f(entry.value);
  return e;
}

namespace defaults {

inline DiscreteDistribution vtg_distribution() {
  return DiscreteDistribution({{0.0, 0.25}, {0.1, 0.5}, {0.2, 0.25}}, "vtg");
}

inline DiscreteDistribution ltp_distribution() {
  return DiscreteDistribution({{44.17, 0.5}, {46.38, 0.25}, {48.59, 0.25}}, "ltp");
}

inline ScenarioSet scenario_set() { return build_scenario_set(vtg_distribution(), ltp_distribution()); }

}  // namespace defaults

}  // namespace dynmcda
