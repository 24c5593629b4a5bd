#pragma once

// Discrete-event model of the weighbridge segment of the port: arrivals,
// an unbounded pre-weighbridge queue, lorry and non-lorry lane groups with
// bounded lane queues, and a capacity-limited merge point.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cost_benefit.hpp"
#include "des/capacity_queue.hpp"
#include "des/kernel.hpp"
#include "des/random.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "scenario.hpp"

namespace dynmcda::port {

inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kSecondsPerDay = 86400.0;

enum class VehicleType : std::uint8_t { lorry = 0, nonLorry = 1 };
enum class QueueKind : std::uint8_t { none = 0, nonPassive = 1, passive = 2 };

// uniformPerType: lorries and non-lorries each arrive at evenly spaced
//   instants of their own (time-varying) intensity.
// uniform: one evenly spaced stream, vehicle type drawn per arrival.
// poisson: one Poisson stream, vehicle type drawn per arrival.
enum class ArrivalProcess { uniformPerType, uniform, poisson };

// proportionalShare: a fixed share of the day's lorries (peakTrafficShare)
//   falls inside the peak window, so the peak percentage scales with LTP.
// fixedPeak: the peak percentage is peakLtp regardless of LTP.
enum class PeakModel { proportionalShare, fixedPeak };

// Where the advance threshold applies: free capacity of the customer's own
// lane group, or the sum over both groups.
enum class ThresholdScope { destinationGroup, combined };

inline std::string_view to_string(ArrivalProcess p) {
  switch (p) {
    case ArrivalProcess::uniformPerType: return "uniformPerType";
    case ArrivalProcess::uniform: return "uniform";
    case ArrivalProcess::poisson: return "poisson";
  }
  return "?";
}
inline std::string_view to_string(PeakModel p) {
  return p == PeakModel::fixedPeak ? "fixedPeak" : "proportionalShare";
}
inline std::string_view to_string(ThresholdScope s) {
  return s == ThresholdScope::combined ? "combined" : "destinationGroup";
}

struct DelaySpec {
  enum class Kind { fixed, uniform, normal };
  Kind kind = Kind::fixed;
  double a = 0.0;  // fixed value | uniform min | normal mean
  double b = 0.0;  // -          | uniform max | normal sd

  static DelaySpec fixed(double seconds) { return {Kind::fixed, seconds, 0.0}; }

  double mean() const { return kind == Kind::uniform ? 0.5 * (a + b) : a; }

  double sample(des::RandomStream& s) const {
    switch (kind) {
      case Kind::fixed: return a;
      case Kind::uniform: return s.uniform(a, b);
      case Kind::normal: return b == 0.0 ? a : des::sample_normal_positive(s, a, b);
    }
    return a;
  }

  void validate(const std::string& field) const {
    switch (kind) {
      case Kind::fixed:
        if (!(a >= 0.0)) throw ValidationError(field, "fixed delay must be >= 0");
        break;
      case Kind::uniform:
        if (!(a >= 0.0 && b >= a)) throw ValidationError(field, "uniform delay needs 0 <= min <= max");
        break;
      case Kind::normal:
        if (!(a > 0.0 && b >= 0.0)) throw ValidationError(field, "normal delay needs mean > 0 and sd >= 0");
        break;
    }
  }
};

struct SimConfig {
  double arrivalRatePerMinute = 4.57;
  double lorryServiceMean = 80.0;
  double lorryServiceSd = 2.0;
  double nonLorryServiceMean = 27.0;
  double nonLorryServiceSd = 2.0;
  double peakStartHour = 12.0;
  double peakEndHour = 18.0;
  PeakModel peakModel = PeakModel::proportionalShare;
  double peakLtp = 75.0;
  double peakTrafficShare = 0.426;
  double badTemperProbability = 0.10;
  double aloneProbability = 0.90;
  int baseLorryLanes = 5;
  int baseNonLorryLanes = 2;
  int laneQueueSlotsPerLane = 1;
  int mergeCapacity = 2;
  int advanceFreeCapacity = 2;
  ThresholdScope thresholdScope = ThresholdScope::destinationGroup;
  DelaySpec preWeighbridgeTravelDelay = DelaySpec::fixed(60.0);
  DelaySpec mergeDelay = DelaySpec::fixed(5.0);
  ArrivalProcess arrivalProcess = ArrivalProcess::uniformPerType;
  int runDays = 30;
  int warmupDays = 5;
  int replications = 20;
  std::size_t threads = 0;  // 0: hardware concurrency
  std::size_t unstableQueueThreshold = 1000;

  // 365 simulated days, 20 warm-up days, 10,000 replications.
  static SimConfig full_scale() {
    SimConfig c;
    c.runDays = 365;
    c.warmupDays = 20;
    c.replications = 10'000;
    return c;
  }

  double peak_hours() const { return peakEndHour - peakStartHour; }

  void validate() const {
    auto prob = [](double v, const char* name) {
      if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(std::string("simulation.") + name, "must lie in [0, 1]");
    };
    if (!(arrivalRatePerMinute > 0.0)) throw ValidationError("simulation.arrivalRatePerMinute", "must be > 0");
    if (!(lorryServiceMean > 0.0 && lorryServiceSd >= 0.0))
      throw ValidationError("simulation.lorryService", "mean must be > 0 and sd >= 0");
    if (!(nonLorryServiceMean > 0.0 && nonLorryServiceSd >= 0.0))
      throw ValidationError("simulation.nonLorryService", "mean must be > 0 and sd >= 0");
    if (!(peakStartHour >= 0.0 && peakStartHour < peakEndHour && peakEndHour <= 24.0))
      throw ValidationError("simulation.peakStartHour", "need 0 <= peakStartHour < peakEndHour <= 24");
    if (peak_hours() >= 24.0) throw ValidationError("simulation.peakEndHour", "peak window cannot cover the day");
    if (!(peakLtp >= 0.0 && peakLtp <= 100.0)) throw ValidationError("simulation.peakLtp", "must lie in [0, 100]");
    prob(peakTrafficShare, "peakTrafficShare");
    prob(badTemperProbability, "badTemperProbability");
    prob(aloneProbability, "aloneProbability");
    if (baseLorryLanes < 1) throw ValidationError("simulation.baseLorryLanes", "must be >= 1");
    if (baseNonLorryLanes < 1) throw ValidationError("simulation.baseNonLorryLanes", "must be >= 1");
    if (laneQueueSlotsPerLane < 0) throw ValidationError("simulation.laneQueueSlotsPerLane", "must be >= 0");
    if (mergeCapacity < 1) throw ValidationError("simulation.mergeCapacity", "must be >= 1");
    if (advanceFreeCapacity < 1) throw ValidationError("simulation.advanceFreeCapacity", "must be >= 1");
    preWeighbridgeTravelDelay.validate("simulation.preWeighbridgeTravelDelay");
    mergeDelay.validate("simulation.mergeDelay");
    if (runDays < 1) throw ValidationError("simulation.runDays", "must be >= 1");
    if (!(warmupDays >= 0 && warmupDays < runDays))
      throw ValidationError("simulation.warmupDays", "must satisfy 0 <= warmupDays < runDays");
    if (replications < 1) throw ValidationError("simulation.replications", "must be >= 1");
  }
};

struct CustomerRecord {
  std::uint64_t id = 0;
  VehicleType vehicleType = VehicleType::lorry;
  double arrivalTime = 0.0;
  bool badTemper = false;
  bool alone = true;
  bool queued = false;
  bool passiveQueued = false;
  int dissatisfaction = 0;
};

struct SimDiagnostics {
  std::size_t maxPreQueueLength = 0;
  std::size_t finalPreQueueLength = 0;
  bool unstable = false;  // pre-queue still above threshold at the horizon
};

// Frequencies in percent of post-warm-up customers.
struct SimStats {
  double queueFrequency = 0.0;
  double passiveQueueFrequency = 0.0;
  double dissatisfactionMean = 0.0;
  std::uint64_t customersProcessed = 0;
  double queueSd = 0.0;
  double passiveQueueSd = 0.0;
  double dissatisfactionSd = 0.0;
  int replications = 1;
  SimDiagnostics diagnostics;
};

// Lorry share of arrivals (percent) at an hour of day.
inline double temporal_ltp(double hourOfDay, double dailyLtp, const SimConfig& c) {
  if (!(hourOfDay >= 0.0 && hourOfDay < 24.0)) throw ValidationError("hourOfDay", "must lie in [0, 24)");
  const double peakHours = c.peak_hours();
  const bool inPeak = hourOfDay >= c.peakStartHour && hourOfDay < c.peakEndHour;
  double v = 0.0;
  if (c.peakModel == PeakModel::fixedPeak) {
    v = inPeak ? c.peakLtp : (dailyLtp - c.peakLtp * peakHours / 24.0) * (24.0 / (24.0 - peakHours));
  } else {
    v = inPeak ? dailyLtp * c.peakTrafficShare * (24.0 / peakHours)
               : dailyLtp * (1.0 - c.peakTrafficShare) * (24.0 / (24.0 - peakHours));
  }
  if (v < -1e-9 || v > 100.0 + 1e-9)
    throw ValidationError("simulation", "lorry percentage " + std::to_string(v) + " outside [0, 100] for LTP " +
                                            std::to_string(dailyLtp) + " (incompatible with the peak settings)");
  return std::clamp(v, 0.0, 100.0);
}

// Dissatisfaction percentage by temperament, company and queue experience.
constexpr int dissatisfaction(bool badTemper, bool alone, QueueKind kind) noexcept {
  constexpr int table[4][3] = {
      {0, 20, 50},   // good, not alone
      {0, 50, 80},   // good, alone
      {0, 40, 70},   // bad, not alone
      {0, 70, 100},  // bad, alone
  };
  return table[(badTemper ? 2 : 0) + (alone ? 1 : 0)][static_cast<int>(kind)];
}

struct LaneLayout {
  int lorryLanes = 0;
  int nonLorryLanes = 0;
};

inline LaneLayout lane_layout(const OptionSpec& option, const SimConfig& c) {
  return {c.baseLorryLanes + (option.extraLorryLane ? 1 : 0), c.baseNonLorryLanes + (option.extraNonLorryLane ? 1 : 0)};
}

// Optional callbacks for tests and tracing.
struct SimHooks {
  std::function<void(const des::EventRecord<int>&)> onEvent;
  std::function<void(const CustomerRecord&)> onDecision;  // every customer, warm-up included
  // Called after every dispatch with (lorry group free, non-lorry group free,
  // merge occupancy). Used to audit capacity bounds.
  std::function<void(int, int, int)> onState;
};

namespace detail {

enum Stream : std::uint64_t {
  kArrivals = 1,
  kArrivalsNonLorry,
  kVehicleType,
  kTemperament,
  kCompany,
  kServiceLorry,
  kServiceNonLorry,
  kTravel,
  kMerge,
};

enum EventKind : int {
  kArriveLorry = 0,
  kArriveNonLorry,
  kArriveAny,
  kReachDecision,
  kServiceDone,
  kMergeDone,
};

class WeighbridgeModel {
 public:
  WeighbridgeModel(const OptionSpec& option, const Scenario& scenario, const SimConfig& config, std::uint64_t seed,
                   const SimHooks* hooks)
      : cfg_(config),
        scenario_(scenario),
        hooks_(hooks),
        arrivals_(seed, kArrivals),
        arrivalsNonLorry_(seed, kArrivalsNonLorry),
        vehicleType_(seed, kVehicleType),
        temperament_(seed, kTemperament),
        company_(seed, kCompany),
        serviceLorry_(seed, kServiceLorry),
        serviceNonLorry_(seed, kServiceNonLorry),
        travel_(seed, kTravel),
        merge_(seed, kMerge),
        preQueue_("pre-weighbridge") {
    const auto layout = lane_layout(option, config);
    groups_[0].lanes = layout.lorryLanes;
    groups_[1].lanes = layout.nonLorryLanes;
    for (auto& g : groups_) {
      const auto slots = static_cast<std::size_t>(g.lanes * config.laneQueueSlotsPerLane);
      g.waitingCapacity = slots;
    }
    ratePerSecond_ = config.arrivalRatePerMinute * (1.0 + scenario.vtg) / 60.0;
    // Also rejects an LTP the peak settings cannot accommodate.
    const double offPeakHour = config.peakStartHour > 0.0 ? 0.0 : config.peakEndHour;
    peakLorryShare_ = temporal_ltp(config.peakStartHour, scenario.ltp, config) / 100.0;
    offPeakLorryShare_ = temporal_ltp(offPeakHour, scenario.ltp, config) / 100.0;
  }

  SimStats run() {
    horizon_ = cfg_.runDays * kSecondsPerDay;
    warmup_ = cfg_.warmupDays * kSecondsPerDay;
    if (hooks_ && hooks_->onEvent) kernel_.set_observer(hooks_->onEvent);
    schedule_first_arrivals();
    kernel_.run(horizon_, [this](const des::EventRecord<int>& ev) {
      dispatch(ev);
      if (hooks_ && hooks_->onState) hooks_->onState(free_capacity(0), free_capacity(1), mergeBusy_);
    });

    SimStats s;
    s.customersProcessed = counted_;
    if (counted_ > 0) {
      const double n = static_cast<double>(counted_);
      s.queueFrequency = 100.0 * static_cast<double>(queued_) / n;
      s.passiveQueueFrequency = 100.0 * static_cast<double>(passive_) / n;
      s.dissatisfactionMean = static_cast<double>(dissatisfactionSum_) / n;
    }
    s.diagnostics.maxPreQueueLength = maxPreQueue_;
    s.diagnostics.finalPreQueueLength = preQueue_.size();
    s.diagnostics.unstable = preQueue_.size() > cfg_.unstableQueueThreshold;
    return s;
  }

 private:
  struct Customer {
    CustomerRecord record;
    double serviceTime = 0.0;
  };

  struct LaneGroup {
    int lanes = 0;
    int inService = 0;
    int holding = 0;  // served, waiting for a merge slot
    std::size_t waitingCapacity = 0;
    std::deque<std::uint32_t> waiting;
    int busy() const { return inService + holding; }
  };

  static int group_of(VehicleType t) { return t == VehicleType::lorry ? 0 : 1; }

  bool in_peak(double t) const {
    const double hour = std::fmod(t, kSecondsPerDay) / kSecondsPerHour;
    return hour >= cfg_.peakStartHour && hour < cfg_.peakEndHour;
  }

  double lorry_share(double t) const { return in_peak(t) ? peakLorryShare_ : offPeakLorryShare_; }

  double type_rate(int group, double t) const {
    const double share = lorry_share(t);
    return ratePerSecond_ * (group == 0 ? share : 1.0 - share);
  }

  double next_boundary(double t) const {
    const double dayStart = std::floor(t / kSecondsPerDay) * kSecondsPerDay;
    for (double b : {cfg_.peakStartHour * kSecondsPerHour, cfg_.peakEndHour * kSecondsPerHour, kSecondsPerDay}) {
      if (dayStart + b > t) return dayStart + b;
    }
    return dayStart + kSecondsPerDay + cfg_.peakStartHour * kSecondsPerHour;
  }

  // Smallest s > t with integral of the group's intensity over [t, s] equal
  // to `mass`; infinity when the group never arrives.
  double advance_intensity(int group, double t, double mass) const {
    const double peak = group == 0 ? peakLorryShare_ : 1.0 - peakLorryShare_;
    const double offPeak = group == 0 ? offPeakLorryShare_ : 1.0 - offPeakLorryShare_;
    if (peak <= 0.0 && offPeak <= 0.0) return std::numeric_limits<double>::infinity();
    for (;;) {
      const double r = type_rate(group, t);
      const double end = next_boundary(t);
      if (r > 0.0 && r * (end - t) >= mass) return t + mass / r;
      mass -= r * (end - t);
      t = end;
    }
  }

  void schedule_first_arrivals() {
    switch (cfg_.arrivalProcess) {
      case ArrivalProcess::uniformPerType: {
        const double tl = advance_intensity(0, 0.0, arrivals_.uniform());
        const double tn = advance_intensity(1, 0.0, arrivalsNonLorry_.uniform());
        if (std::isfinite(tl) && tl <= horizon_) kernel_.schedule(tl, kArriveLorry);
        if (std::isfinite(tn) && tn <= horizon_) kernel_.schedule(tn, kArriveNonLorry);
        break;
      }
      case ArrivalProcess::uniform:
        kernel_.schedule(arrivals_.uniform() / ratePerSecond_, kArriveAny);
        break;
      case ArrivalProcess::poisson:
        kernel_.schedule(des::sample_exponential(arrivals_, ratePerSecond_), kArriveAny);
        break;
    }
  }

  void dispatch(const des::EventRecord<int>& ev) {
    const auto slot = static_cast<std::uint32_t>(ev.subject);
    switch (ev.kind) {
      case kArriveLorry: on_typed_arrival(0); break;
      case kArriveNonLorry: on_typed_arrival(1); break;
      case kArriveAny: on_any_arrival(); break;
      case kReachDecision: on_reach_decision(slot); break;
      case kServiceDone: on_service_done(slot); break;
      case kMergeDone: on_merge_done(slot); break;
      default: break;
    }
  }

  void on_typed_arrival(int group) {
    const double now = kernel_.now();
    create_customer(group == 0 ? VehicleType::lorry : VehicleType::nonLorry);
    const double next = advance_intensity(group, now, 1.0);
    if (std::isfinite(next) && next <= horizon_) kernel_.schedule(next, group == 0 ? kArriveLorry : kArriveNonLorry);
  }

  void on_any_arrival() {
    const double now = kernel_.now();
    const bool lorry = vehicleType_.bernoulli(lorry_share(now));
    create_customer(lorry ? VehicleType::lorry : VehicleType::nonLorry);
    const double gap = cfg_.arrivalProcess == ArrivalProcess::poisson
                           ? des::sample_exponential(arrivals_, ratePerSecond_)
                           : 1.0 / ratePerSecond_;
    if (now + gap <= horizon_) kernel_.schedule(now + gap, kArriveAny);
  }

  void create_customer(VehicleType type) {
    std::uint32_t slot;
    if (!freeSlots_.empty()) {
      slot = freeSlots_.back();
      freeSlots_.pop_back();
    } else {
      slot = static_cast<std::uint32_t>(pool_.size());
      pool_.emplace_back();
    }
    Customer& c = pool_[slot];
    c = Customer{};
    c.record.id = nextId_++;
    c.record.vehicleType = type;
    c.record.arrivalTime = kernel_.now();
    c.record.badTemper = temperament_.bernoulli(cfg_.badTemperProbability);
    c.record.alone = company_.bernoulli(cfg_.aloneProbability);
    c.serviceTime = type == VehicleType::lorry
                        ? des::sample_normal_positive(serviceLorry_, cfg_.lorryServiceMean, cfg_.lorryServiceSd)
                        : des::sample_normal_positive(serviceNonLorry_, cfg_.nonLorryServiceMean, cfg_.nonLorryServiceSd);
    const double travel = cfg_.preWeighbridgeTravelDelay.sample(travel_);
    kernel_.schedule_in(travel, kReachDecision, slot);
  }

  int free_capacity(int g) const {
    const LaneGroup& grp = groups_[g];
    return (grp.lanes - grp.busy()) + static_cast<int>(grp.waitingCapacity - grp.waiting.size());
  }

  bool saturated(int g) const { return free_capacity(g) < cfg_.advanceFreeCapacity; }

  bool can_advance(int g) const {
    if (cfg_.thresholdScope == ThresholdScope::combined)
      return free_capacity(g) >= 1 && free_capacity(0) + free_capacity(1) >= cfg_.advanceFreeCapacity;
    return !saturated(g);
  }

  QueueKind blocking_kind(int g) const {
    if (!can_advance(g)) return QueueKind::nonPassive;
    const int other = 1 - g;
    if (!can_advance(other)) return QueueKind::passive;
    // Queue is draining: attribute to whoever is holding up the head.
    const int head = group_of(pool_[preQueue_.front()].record.vehicleType);
    return head == g ? QueueKind::nonPassive : QueueKind::passive;
  }

  void on_reach_decision(std::uint32_t slot) {
    Customer& c = pool_[slot];
    const int g = group_of(c.record.vehicleType);
    QueueKind kind = QueueKind::none;
    if (!preQueue_.empty() || !can_advance(g)) kind = blocking_kind(g);

    c.record.queued = kind != QueueKind::none;
    c.record.passiveQueued = kind == QueueKind::passive;
    c.record.dissatisfaction = dissatisfaction(c.record.badTemper, c.record.alone, kind);
    if (c.record.arrivalTime >= warmup_) {
      ++counted_;
      queued_ += c.record.queued ? 1 : 0;
      passive_ += c.record.passiveQueued ? 1 : 0;
      dissatisfactionSum_ += static_cast<std::uint64_t>(c.record.dissatisfaction);
    }
    if (hooks_ && hooks_->onDecision) hooks_->onDecision(c.record);

    if (kind == QueueKind::none) {
      advance(slot);
    } else {
      preQueue_.push(slot);
      maxPreQueue_ = std::max(maxPreQueue_, preQueue_.size());
    }
  }

  void advance(std::uint32_t slot) {
    LaneGroup& grp = groups_[group_of(pool_[slot].record.vehicleType)];
    if (grp.busy() < grp.lanes) {
      start_service(slot);
    } else {
      if (grp.waiting.size() >= grp.waitingCapacity) throw std::logic_error("lane queue overflow");
      grp.waiting.push_back(slot);
    }
  }

  void start_service(std::uint32_t slot) {
    LaneGroup& grp = groups_[group_of(pool_[slot].record.vehicleType)];
    ++grp.inService;
    kernel_.schedule_in(pool_[slot].serviceTime, kServiceDone, slot);
  }

  void on_service_done(std::uint32_t slot) {
    LaneGroup& grp = groups_[group_of(pool_[slot].record.vehicleType)];
    --grp.inService;
    ++grp.holding;
    mergeWaiting_.push_back(slot);
    pump_merge();
  }

  void pump_merge() {
    while (mergeBusy_ < cfg_.mergeCapacity && !mergeWaiting_.empty()) {
      const std::uint32_t slot = mergeWaiting_.front();
      mergeWaiting_.pop_front();
      LaneGroup& grp = groups_[group_of(pool_[slot].record.vehicleType)];
      --grp.holding;
      ++mergeBusy_;
      kernel_.schedule_in(cfg_.mergeDelay.sample(merge_), kMergeDone, slot);
      if (!grp.waiting.empty()) {
        const std::uint32_t next = grp.waiting.front();
        grp.waiting.pop_front();
        start_service(next);
      }
    }
    release_pre_queue();
  }

  void release_pre_queue() {
    while (!preQueue_.empty()) {
      const std::uint32_t head = preQueue_.front();
      if (!can_advance(group_of(pool_[head].record.vehicleType))) break;
      preQueue_.pop();
      advance(head);
    }
  }

  void on_merge_done(std::uint32_t slot) {
    --mergeBusy_;
    freeSlots_.push_back(slot);
    pump_merge();
  }

  const SimConfig& cfg_;
  Scenario scenario_;
  const SimHooks* hooks_;
  des::Kernel<int> kernel_;
  des::RandomStream arrivals_, arrivalsNonLorry_, vehicleType_, temperament_, company_, serviceLorry_,
      serviceNonLorry_, travel_, merge_;
  des::CapacityQueue<std::uint32_t> preQueue_;
  std::array<LaneGroup, 2> groups_{};
  std::deque<std::uint32_t> mergeWaiting_;
  int mergeBusy_ = 0;
  std::vector<Customer> pool_;
  std::vector<std::uint32_t> freeSlots_;
  double ratePerSecond_ = 0.0;
  double peakLorryShare_ = 0.0;
  double offPeakLorryShare_ = 0.0;
  double horizon_ = 0.0;
  double warmup_ = 0.0;
  std::uint64_t nextId_ = 0;
  std::uint64_t counted_ = 0, queued_ = 0, passive_ = 0, dissatisfactionSum_ = 0;
  std::size_t maxPreQueue_ = 0;
};

inline double sample_sd(std::span<const double> xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace detail

// Seed of one replication. Independent of the option so that options are
// compared under common random numbers.
inline std::uint64_t replication_seed(std::uint64_t masterSeed, int scenarioId, int replication) {
  return des::derive_seed(masterSeed, static_cast<std::uint64_t>(scenarioId), static_cast<std::uint64_t>(replication));
}

inline SimStats simulate_once(const OptionSpec& option, const Scenario& scenario, const SimConfig& config,
                              std::uint64_t seed, const SimHooks* hooks = nullptr) {
  config.validate();
  option.validate();
  detail::WeighbridgeModel model(option, scenario, config, seed, hooks);
  return model.run();
}

// Mean and sample sd over replications, computed in replication order.
inline SimStats aggregate_replications(std::span<const SimStats> reps) {
  if (reps.empty()) throw ValidationError("replications", "must be >= 1");
  SimStats out;
  out.replications = static_cast<int>(reps.size());
  std::vector<double> q, p, d;
  q.reserve(reps.size());
  p.reserve(reps.size());
  d.reserve(reps.size());
  for (const auto& r : reps) {
    q.push_back(r.queueFrequency);
    p.push_back(r.passiveQueueFrequency);
    d.push_back(r.dissatisfactionMean);
    out.customersProcessed += r.customersProcessed;
    out.diagnostics.maxPreQueueLength = std::max(out.diagnostics.maxPreQueueLength, r.diagnostics.maxPreQueueLength);
    out.diagnostics.finalPreQueueLength =
        std::max(out.diagnostics.finalPreQueueLength, r.diagnostics.finalPreQueueLength);
    out.diagnostics.unstable = out.diagnostics.unstable || r.diagnostics.unstable;
  }
  const double n = static_cast<double>(reps.size());
  auto mean = [n](const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / n;
  };
  out.queueFrequency = mean(q);
  out.passiveQueueFrequency = mean(p);
  out.dissatisfactionMean = mean(d);
  out.queueSd = detail::sample_sd(q, out.queueFrequency);
  out.passiveQueueSd = detail::sample_sd(p, out.passiveQueueFrequency);
  out.dissatisfactionSd = detail::sample_sd(d, out.dissatisfactionMean);
  return out;
}

inline SimStats simulate_replicated(const OptionSpec& option, const Scenario& scenario, const SimConfig& config,
                                    std::uint64_t masterSeed) {
  config.validate();
  std::vector<SimStats> reps(static_cast<std::size_t>(config.replications));
  parallel_for(reps.size(), config.threads, [&](std::size_t r) {
    reps[r] = simulate_once(option, scenario, config, replication_seed(masterSeed, scenario.id, static_cast<int>(r)));
  });
  return aggregate_replications(reps);
}

struct CellResult {
  int optionId = 0;
  Scenario scenario;
  SimStats stats;
};

// Per-(option, scenario) replicated statistics, option-major, scenario order
// as in the set.
struct SimulationTable {
  std::vector<CellResult> cells;

  const CellResult& cell(int optionId, int scenarioId) const {
    for (const auto& c : cells)
      if (c.optionId == optionId && c.scenario.id == scenarioId) return c;
    throw ValidationError("simulation", "no cell for option " + std::to_string(optionId) + ", scenario " +
                                            std::to_string(scenarioId));
  }

  bool has_option(int optionId) const {
    return std::any_of(cells.begin(), cells.end(), [&](const CellResult& c) { return c.optionId == optionId; });
  }
};

// Every replication of every cell as one flat work list.
inline SimulationTable simulate_table(std::span<const OptionSpec> options, const ScenarioSet& set,
                                      const SimConfig& config, std::uint64_t masterSeed) {
  config.validate();
  const auto reps = static_cast<std::size_t>(config.replications);
  const std::size_t nCells = options.size() * set.size();
  std::vector<SimStats> raw(nCells * reps);
  parallel_for(raw.size(), config.threads, [&](std::size_t i) {
    const std::size_t cellIndex = i / reps;
    const std::size_t r = i % reps;
    const auto& option = options[cellIndex / set.size()];
    const auto& scenario = set.scenarios()[cellIndex % set.size()];
    raw[i] = simulate_once(option, scenario, config, replication_seed(masterSeed, scenario.id, static_cast<int>(r)));
  });
  SimulationTable table;
  table.cells.reserve(nCells);
  for (std::size_t cellIndex = 0; cellIndex < nCells; ++cellIndex) {
    const auto& option = options[cellIndex / set.size()];
    const auto& scenario = set.scenarios()[cellIndex % set.size()];
    table.cells.push_back(
        {option.id, scenario, aggregate_replications(std::span<const SimStats>(raw).subspan(cellIndex * reps, reps))});
  }
  return table;
}

// Probability-weighted combination of per-scenario statistics. The sd
// fields hold sqrt(sum p^2 sd^2).
inline SimStats expected_from_table(const SimulationTable& table, int optionId, const ScenarioSet& set) {
  SimStats out;
  double vq = 0.0, vp = 0.0, vd = 0.0;
  for (const auto& s : set) {
    const auto& st = table.cell(optionId, s.id).stats;
    out.queueFrequency += s.probability * st.queueFrequency;
    out.passiveQueueFrequency += s.probability * st.passiveQueueFrequency;
    out.dissatisfactionMean += s.probability * st.dissatisfactionMean;
    vq += s.probability * s.probability * st.queueSd * st.queueSd;
    vp += s.probability * s.probability * st.passiveQueueSd * st.passiveQueueSd;
    vd += s.probability * s.probability * st.dissatisfactionSd * st.dissatisfactionSd;
    out.customersProcessed += st.customersProcessed;
    out.replications = st.replications;
    out.diagnostics.unstable = out.diagnostics.unstable || st.diagnostics.unstable;
    out.diagnostics.maxPreQueueLength = std::max(out.diagnostics.maxPreQueueLength, st.diagnostics.maxPreQueueLength);
  }
  out.queueSd = std::sqrt(vq);
  out.passiveQueueSd = std::sqrt(vp);
  out.dissatisfactionSd = std::sqrt(vd);
  return out;
}

inline SimStats expected_stats(const OptionSpec& option, const ScenarioSet& set, const SimConfig& config,
                               std::uint64_t masterSeed) {
  const std::array<OptionSpec, 1> one{option};
  return expected_from_table(simulate_table(one, set, config, masterSeed), option.id, set);
}

}  // namespace dynmcda::port
