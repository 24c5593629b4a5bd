#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cost_benefit.hpp"
#include "error.hpp"
#include "mcda.hpp"
#include "port_sim.hpp"
#include "scenario.hpp"
#include "sensitivity.hpp"

namespace dynmcda {

using json = nlohmann::ordered_json;

struct PipelineConfig {
  FinancialParams financial;
  port::SimConfig simulation;
  DiscreteDistribution vtg = defaults::vtg_distribution();
  DiscreteDistribution ltp = defaults::ltp_distribution();
  std::vector<OptionSpec> options = defaults::options();
  std::vector<CriterionDef> criteria = defaults::criteria_catalog();
  BinaryCriteria binaries = defaults::binary_criteria();
  NormalizeOptions normalization;
  PerturbationConfig sensitivity;
  std::vector<SensitivityVariant> sensitivityVariants = {SensitivityVariant::selectedCriteria,
                                                         SensitivityVariant::allCriteria,
                                                         SensitivityVariant::criteriaAndWeights};
  std::uint64_t masterSeed = 20240101;
  std::string outputDirectory;
  // Simulation table CSV used instead of running the simulation.
  std::string bypassSimulationTable;

  WeightVector weights() const { return WeightVector::from_catalog(criteria); }

  void validate() const {
    financial.validate();
    simulation.validate();
    if (options.empty()) throw ValidationError("options", "at least one option is required");
    std::set<int> ids;
    for (std::size_t i = 0; i < options.size(); ++i) {
      const auto path = "options[" + std::to_string(i) + "]";
      options[i].validate(path);
      if (!ids.insert(options[i].id).second) throw ValidationError(path + ".id", "duplicate option id");
    }
    std::set<std::string> crit;
    for (std::size_t j = 0; j < criteria.size(); ++j) {
      if (criteria[j].id.empty()) throw ValidationError("criteria.catalog[" + std::to_string(j) + "].id", "empty id");
      if (!crit.insert(criteria[j].id).second)
        throw ValidationError("criteria.catalog[" + std::to_string(j) + "].id", "duplicate criterion id");
    }
    (void)weights();
    for (const auto& c : criteria) {
      if (c.kind != CriterionKind::binaryBenefit) continue;
      const auto it = binaries.values.find(c.id);
      if (it == binaries.values.end())
        throw ValidationError("criteria.binary." + c.id, "no yes/no judgements for binary criterion");
      for (int id : ids)
        if (!it->second.count(id))
          throw ValidationError("criteria.binary." + c.id, "missing judgement for option " + std::to_string(id));
    }
    for (const auto& [id, _] : binaries.values)
      if (!crit.count(id)) throw ValidationError("criteria.binary." + id, "unknown criterion");
    for (const auto& id : sensitivity.frozenCriteria)
      if (!crit.count(id)) throw ValidationError("sensitivity.frozenCriteria", "unknown criterion '" + id + "'");
    sensitivity.validate();
    (void)build_scenario_set(vtg, ltp);
  }
};

namespace detail {

// Reads one JSON object, recording the dotted path for error messages and
// rejecting keys that were never consumed.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_.empty() ? "config" : path_, "expected an object");
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number()) throw ValidationError(child(key), "expected a number");
      out = v->get<double>();
    }
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number_integer()) throw ValidationError(child(key), "expected an integer");
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->is_number_unsigned()) out = static_cast<Int>(v->get<std::uint64_t>());
        else if (v->get<std::int64_t>() < 0) throw ValidationError(child(key), "must be >= 0");
        else out = static_cast<Int>(v->get<std::int64_t>());
      } else {
        out = static_cast<Int>(v->get<std::int64_t>());
      }
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const auto* v = find(key)) {
      if (!v->is_boolean()) throw ValidationError(child(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const auto* v = find(key)) {
      if (!v->is_string()) throw ValidationError(child(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void finish() const {
    for (const auto& [k, _] : j_.items())
      if (!seen_.count(k)) throw ValidationError(child(k), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class Enum, class Parse>
void read_enum(ObjectReader& r, const std::string& key, Enum& out, Parse parse) {
  std::string s;
  r.string(key, s);
  if (s.empty()) return;
  try {
    out = parse(s);
  } catch (const ValidationError& e) {
    throw ValidationError(r.child(key), "unknown value '" + s + "'");
  }
}

inline port::ArrivalProcess arrival_from_string(const std::string& s) {
  if (s == "uniformPerType") return port::ArrivalProcess::uniformPerType;
  if (s == "uniform") return port::ArrivalProcess::uniform;
  if (s == "poisson") return port::ArrivalProcess::poisson;
  throw ValidationError("", s);
}

inline port::PeakModel peak_from_string(const std::string& s) {
  if (s == "proportionalShare") return port::PeakModel::proportionalShare;
  if (s == "fixedPeak") return port::PeakModel::fixedPeak;
  throw ValidationError("", s);
}

inline port::ThresholdScope scope_from_string(const std::string& s) {
  if (s == "destinationGroup") return port::ThresholdScope::destinationGroup;
  if (s == "combined") return port::ThresholdScope::combined;
  throw ValidationError("", s);
}

inline std::string_view to_string(port::DelaySpec::Kind k) {
  switch (k) {
    case port::DelaySpec::Kind::fixed: return "fixed";
    case port::DelaySpec::Kind::uniform: return "uniform";
    case port::DelaySpec::Kind::normal: return "normal";
  }
  return "?";
}

inline void read_delay(ObjectReader& parent, const std::string& key, port::DelaySpec& out) {
  const json* v = parent.find(key);
  if (!v) return;
  ObjectReader r(*v, parent.child(key));
  std::string kind;
  r.string("kind", kind);
  if (kind == "fixed") out.kind = port::DelaySpec::Kind::fixed;
  else if (kind == "uniform") out.kind = port::DelaySpec::Kind::uniform;
  else if (kind == "normal") out.kind = port::DelaySpec::Kind::normal;
  else if (!kind.empty()) throw ValidationError(r.child("kind"), "expected fixed, uniform or normal");
  r.number("a", out.a);
  r.number("b", out.b);
  r.finish();
}

inline DiscreteDistribution read_distribution(const json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path, "expected an array of {value, probability}");
  std::vector<DiscreteDistribution::Entry> entries;
  for (std::size_t i = 0; i < j.size(); ++i) {
    ObjectReader r(j[i], path + "[" + std::to_string(i) + "]");
    DiscreteDistribution::Entry e;
    if (!j[i].contains("value") || !j[i].contains("probability"))
      throw ValidationError(r.child("value"), "value and probability are required");
    r.number("value", e.value);
    r.number("probability", e.probability);
    r.finish();
    entries.push_back(e);
  }
  return DiscreteDistribution(std::move(entries), path);
}

inline void read_financial(const json& j, FinancialParams& f) {
  ObjectReader r(j, "financial");
  r.number("interestEarned", f.interestEarned);
  r.number("cashAsset", f.cashAsset);
  r.number("effectiveMultiplier", f.effectiveMultiplier);
  r.number("laneCost", f.laneCost);
  r.number("totalSalaries", f.totalSalaries);
  r.number("keyRemuneration", f.keyRemuneration);
  r.integer("staffCount", f.staffCount);
  r.integer("keyStaffCount", f.keyStaffCount);
  r.integer("newStaffPerStep", f.newStaffPerStep);
  r.number("carCost", f.carCost);
  r.number("carMaintenance", f.carMaintenance);
  r.number("greeneryCost", f.greeneryCost);
  r.number("baseProfit", f.baseProfit);
  r.number("vtgStep", f.vtgStep);
  r.finish();
}

inline void read_simulation(const json& j, port::SimConfig& s) {
  ObjectReader r(j, "simulation");
  r.number("arrivalRatePerMinute", s.arrivalRatePerMinute);
  r.number("lorryServiceMean", s.lorryServiceMean);
  r.number("lorryServiceSd", s.lorryServiceSd);
  r.number("nonLorryServiceMean", s.nonLorryServiceMean);
  r.number("nonLorryServiceSd", s.nonLorryServiceSd);
  r.number("peakStartHour", s.peakStartHour);
  r.number("peakEndHour", s.peakEndHour);
  read_enum(r, "peakModel", s.peakModel, peak_from_string);
  r.number("peakLtp", s.peakLtp);
  r.number("peakTrafficShare", s.peakTrafficShare);
  r.number("badTemperProbability", s.badTemperProbability);
  r.number("aloneProbability", s.aloneProbability);
  r.integer("baseLorryLanes", s.baseLorryLanes);
  r.integer("baseNonLorryLanes", s.baseNonLorryLanes);
  r.integer("laneQueueSlotsPerLane", s.laneQueueSlotsPerLane);
  r.integer("mergeCapacity", s.mergeCapacity);
  r.integer("advanceFreeCapacity", s.advanceFreeCapacity);
  read_enum(r, "thresholdScope", s.thresholdScope, scope_from_string);
  read_delay(r, "preWeighbridgeTravelDelay", s.preWeighbridgeTravelDelay);
  read_delay(r, "mergeDelay", s.mergeDelay);
  read_enum(r, "arrivalProcess", s.arrivalProcess, arrival_from_string);
  r.integer("runDays", s.runDays);
  r.integer("warmupDays", s.warmupDays);
  r.integer("replications", s.replications);
  r.integer("threads", s.threads);
  r.integer("unstableQueueThreshold", s.unstableQueueThreshold);
  r.finish();
}

inline std::vector<OptionSpec> read_options(const json& j) {
  if (!j.is_array()) throw ValidationError("options", "expected an array");
  std::vector<OptionSpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    ObjectReader r(j[i], "options[" + std::to_string(i) + "]");
    OptionSpec o;
    if (!j[i].contains("id")) throw ValidationError(r.child("id"), "required");
    r.integer("id", o.id);
    r.string("name", o.name);
    r.boolean("extraLorryLane", o.extraLorryLane);
    r.boolean("extraNonLorryLane", o.extraNonLorryLane);
    o.consumptionUnit = o.adds_lane() ? 0.85 : 1.0;
    r.number("consumptionUnit", o.consumptionUnit);
    o.requiresFacilityBuild = o.adds_lane();
    r.boolean("requiresFacilityBuild", o.requiresFacilityBuild);
    r.finish();
    out.push_back(std::move(o));
  }
  return out;
}

inline void read_criteria(const json& j, PipelineConfig& c) {
  ObjectReader r(j, "criteria");
  if (const json* w = r.find("weights")) {
    if (!w->is_object()) throw ValidationError("criteria.weights", "expected an object of id -> weight");
    for (const auto& [id, v] : w->items()) {
      auto it = std::find_if(c.criteria.begin(), c.criteria.end(), [&](const CriterionDef& d) { return d.id == id; });
      if (it == c.criteria.end()) throw ValidationError("criteria.weights." + id, "unknown criterion");
      if (!v.is_number()) throw ValidationError("criteria.weights." + id, "expected a number");
      it->weight = v.get<double>();
    }
  }
  if (const json* b = r.find("binary")) {
    if (!b->is_object()) throw ValidationError("criteria.binary", "expected an object");
    for (const auto& [id, perOption] : b->items()) {
      const auto path = "criteria.binary." + id;
      if (!perOption.is_object()) throw ValidationError(path, "expected an object of option id -> true/false");
      std::map<int, bool> values;
      for (const auto& [opt, yes] : perOption.items()) {
        int optionId = 0;
        try {
          std::size_t used = 0;
          optionId = std::stoi(opt, &used);
          if (used != opt.size()) throw std::invalid_argument(opt);
        } catch (const std::logic_error&) {
          throw ValidationError(path + "." + opt, "option keys must be integers");
        }
        if (!yes.is_boolean()) throw ValidationError(path + "." + opt, "expected true or false");
        values[optionId] = yes.get<bool>();
      }
      c.binaries.values[id] = std::move(values);
    }
  }
  r.boolean("monetaryIndicator", c.normalization.monetaryIndicator);
  r.finish();
}

inline void read_sensitivity_fields(ObjectReader& r, PerturbationConfig& p) {
  read_enum(r, "variant", p.variant, variant_from_string);
  r.number("amplitude", p.amplitude);
  r.integer("iterations", p.iterations);
  if (const json* f = r.find("frozenCriteria")) {
    if (!f->is_array()) throw ValidationError(r.child("frozenCriteria"), "expected an array of criterion ids");
    p.frozenCriteria.clear();
    for (const auto& id : *f) {
      if (!id.is_string()) throw ValidationError(r.child("frozenCriteria"), "expected criterion id strings");
      p.frozenCriteria.insert(id.get<std::string>());
    }
  }
  r.number("clampFloor", p.clampFloor);
  r.integer("seed", p.seed);
  r.boolean("rescale", p.rescale);
  r.integer("threads", p.threads);
}

inline void read_sensitivity(const json& j, PipelineConfig& c) {
  ObjectReader r(j, "sensitivity");
  read_sensitivity_fields(r, c.sensitivity);
  if (const json* v = r.find("variants")) {
    if (!v->is_array()) throw ValidationError("sensitivity.variants", "expected an array");
    c.sensitivityVariants.clear();
    for (const auto& s : *v) {
      if (!s.is_string()) throw ValidationError("sensitivity.variants", "expected variant names");
      try {
        c.sensitivityVariants.push_back(variant_from_string(s.get<std::string>()));
      } catch (const ValidationError&) {
        throw ValidationError("sensitivity.variants", "unknown variant '" + s.get<std::string>() + "'");
      }
    }
  }
  r.finish();
}

}  // namespace detail

// Missing keys keep the case-study defaults, so "{}" is the full case study.
inline PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  detail::ObjectReader r(j, "");
  if (const json* v = r.find("financial")) detail::read_financial(*v, c.financial);
  if (const json* v = r.find("simulation")) detail::read_simulation(*v, c.simulation);
  if (const json* v = r.find("vtg")) c.vtg = detail::read_distribution(*v, "vtg");
  if (const json* v = r.find("ltp")) c.ltp = detail::read_distribution(*v, "ltp");
  if (const json* v = r.find("options")) c.options = detail::read_options(*v);
  if (const json* v = r.find("criteria")) detail::read_criteria(*v, c);
  if (const json* v = r.find("sensitivity")) detail::read_sensitivity(*v, c);
  r.integer("masterSeed", c.masterSeed);
  r.string("outputDirectory", c.outputDirectory);
  r.string("bypassSimulationTable", c.bypassSimulationTable);
  r.finish();
  c.validate();
  return c;
}

inline PipelineConfig parse_config(const std::string& text) {
  json j;
  try {
    j = text.find_first_not_of(" \t\r\n") == std::string::npos ? json::object() : json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("config", std::string("parse error: ") + e.what());
  }
  return config_from_json(j);
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("config", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline json delay_to_json(const port::DelaySpec& d) {
  return {{"kind", detail::to_string(d.kind)}, {"a", d.a}, {"b", d.b}};
}

inline json distribution_to_json(const DiscreteDistribution& d) {
  json a = json::array();
  for (const auto& e : d.entries()) a.push_back({{"value", e.value}, {"probability", e.probability}});
  return a;
}

inline json sensitivity_config_to_json(const PerturbationConfig& p) {
  return {{"variant", to_string(p.variant)},
          {"amplitude", p.amplitude},
          {"iterations", p.iterations},
          {"frozenCriteria", p.frozenCriteria},
          {"clampFloor", p.clampFloor},
          {"seed", p.seed},
          {"rescale", p.rescale}};
}

// Fully resolved configuration. Thread counts and the output directory are
// left out: they do not change any result.
inline json config_to_json(const PipelineConfig& c) {
  const auto& f = c.financial;
  const auto& s = c.simulation;
  json j;
  j["masterSeed"] = c.masterSeed;
  j["financial"] = {{"interestEarned", f.interestEarned},     {"cashAsset", f.cashAsset},
                    {"effectiveMultiplier", f.effectiveMultiplier},
                    {"laneCost", f.laneCost},               {"totalSalaries", f.totalSalaries},
                    {"keyRemuneration", f.keyRemuneration}, {"staffCount", f.staffCount},
                    {"keyStaffCount", f.keyStaffCount},     {"newStaffPerStep", f.newStaffPerStep},
                    {"carCost", f.carCost},                 {"carMaintenance", f.carMaintenance},
                    {"greeneryCost", f.greeneryCost},       {"baseProfit", f.baseProfit},
                    {"vtgStep", f.vtgStep}};
  j["simulation"] = {{"arrivalRatePerMinute", s.arrivalRatePerMinute},
                     {"lorryServiceMean", s.lorryServiceMean},
                     {"lorryServiceSd", s.lorryServiceSd},
                     {"nonLorryServiceMean", s.nonLorryServiceMean},
                     {"nonLorryServiceSd", s.nonLorryServiceSd},
                     {"peakStartHour", s.peakStartHour},
                     {"peakEndHour", s.peakEndHour},
                     {"peakModel", port::to_string(s.peakModel)},
                     {"peakLtp", s.peakLtp},
                     {"peakTrafficShare", s.peakTrafficShare},
                     {"badTemperProbability", s.badTemperProbability},
                     {"aloneProbability", s.aloneProbability},
                     {"baseLorryLanes", s.baseLorryLanes},
                     {"baseNonLorryLanes", s.baseNonLorryLanes},
                     {"laneQueueSlotsPerLane", s.laneQueueSlotsPerLane},
                     {"mergeCapacity", s.mergeCapacity},
                     {"advanceFreeCapacity", s.advanceFreeCapacity},
                     {"thresholdScope", port::to_string(s.thresholdScope)},
                     {"preWeighbridgeTravelDelay", delay_to_json(s.preWeighbridgeTravelDelay)},
                     {"mergeDelay", delay_to_json(s.mergeDelay)},
                     {"arrivalProcess", port::to_string(s.arrivalProcess)},
                     {"runDays", s.runDays},
                     {"warmupDays", s.warmupDays},
                     {"replications", s.replications},
                     {"unstableQueueThreshold", s.unstableQueueThreshold}};
  j["vtg"] = distribution_to_json(c.vtg);
  j["ltp"] = distribution_to_json(c.ltp);
  json opts = json::array();
  for (const auto& o : c.options)
    opts.push_back({{"id", o.id},
                    {"name", o.name},
                    {"extraLorryLane", o.extraLorryLane},
                    {"extraNonLorryLane", o.extraNonLorryLane},
                    {"consumptionUnit", o.consumptionUnit},
                    {"requiresFacilityBuild", o.requiresFacilityBuild}});
  j["options"] = opts;
  json weights = json::object();
  for (const auto& cr : c.criteria) weights[cr.id] = cr.weight;
  json binary = json::object();
  for (const auto& [id, perOption] : c.binaries.values) {
    json b = json::object();
    for (const auto& [opt, yes] : perOption) b[std::to_string(opt)] = yes;
    binary[id] = b;
  }
  j["criteria"] = {{"weights", weights}, {"binary", binary}, {"monetaryIndicator", c.normalization.monetaryIndicator}};
  json sens = sensitivity_config_to_json(c.sensitivity);
  sens.erase("variant");
  json variants = json::array();
  for (auto v : c.sensitivityVariants) variants.push_back(to_string(v));
  sens["variants"] = variants;
  j["sensitivity"] = sens;
  j["bypassSimulationTable"] = c.bypassSimulationTable;
  return j;
}

// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xF];
  return s;
}

}  // namespace dynmcda
