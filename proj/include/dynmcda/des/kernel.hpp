#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dynmcda::des {

template <class Kind>
struct EventRecord {
  double time = 0.0;
  std::uint64_t sequence = 0;
  Kind kind{};
  std::uint64_t subject = 0;
};

// Event calendar plus clock. Dispatch order is (time, sequence), so events
// scheduled for the same instant fire in insertion order.
template <class Kind>
class Kernel {
 public:
  using Event = EventRecord<Kind>;
  using Observer = std::function<void(const Event&)>;

  double now() const noexcept { return clock_; }
  std::size_t pending() const noexcept { return calendar_.size(); }
  std::uint64_t dispatched() const noexcept { return dispatched_; }

  Event schedule(double time, Kind kind, std::uint64_t subject = 0) {
    if (!(time >= clock_))
      throw std::logic_error("Kernel::schedule: event time " + std::to_string(time) + " precedes clock " +
                             std::to_string(clock_));
    Event ev{time, nextSequence_++, kind, subject};
    calendar_.push(ev);
    return ev;
  }

  Event schedule_in(double delay, Kind kind, std::uint64_t subject = 0) {
    return schedule(clock_ + delay, kind, subject);
  }

  // Called before each dispatch; used by tests to audit ordering.
  void set_observer(Observer obs) { observer_ = std::move(obs); }

  // Dispatches every event with time <= until (inclusive), then sets the
  // clock to `until`. Handlers may schedule further events.
  template <class Handler>
  std::uint64_t run(double until, Handler&& handler) {
    if (until < clock_) throw std::logic_error("Kernel::run: horizon precedes clock");
    std::uint64_t count = 0;
    while (!calendar_.empty() && calendar_.top().time <= until) {
      Event ev = calendar_.top();
      calendar_.pop();
      clock_ = ev.time;
      if (observer_) observer_(ev);
      ++dispatched_;
      ++count;
      handler(ev);
    }
    clock_ = until;
    return count;
  }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const noexcept {
      if (a.time != b.time) return a.time > b.time;
      return a.sequence > b.sequence;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> calendar_;
  double clock_ = 0.0;
  std::uint64_t nextSequence_ = 0;
  std::uint64_t dispatched_ = 0;
  Observer observer_;
};

}  // namespace dynmcda::des
