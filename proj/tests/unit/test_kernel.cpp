#include <catch_amalgamated.hpp>

#include <atomic>
#include <random>
#include <vector>

#include "dynmcda/des/capacity_queue.hpp"
#include "dynmcda/des/kernel.hpp"
#include "dynmcda/parallel.hpp"

using namespace dynmcda;
using namespace dynmcda::des;

TEST_CASE("equal times dispatch in insertion order", "[kernel]") {
  Kernel<int> k;
  std::vector<int> seen;
  k.schedule(1.0, 10);
  k.schedule(1.0, 20);
  k.schedule(1.0, 30);
  k.run(2.0, [&](const auto& ev) { seen.push_back(ev.kind); });
  CHECK(seen == std::vector<int>{10, 20, 30});
}

TEST_CASE("earlier events dispatch first", "[kernel]") {
  Kernel<int> k;
  std::vector<double> times;
  k.schedule(5.0, 0);
  k.schedule(3.0, 0);
  k.run(10.0, [&](const auto& ev) { times.push_back(ev.time); });
  CHECK(times == std::vector<double>{3.0, 5.0});
}

TEST_CASE("event at the current clock dispatches before time advances", "[kernel]") {
  Kernel<int> k;
  k.run(4.0, [](const auto&) {});
  std::vector<double> clock;
  k.schedule(4.0, 1);
  k.schedule(6.0, 2);
  k.run(10.0, [&](const auto&) { clock.push_back(k.now()); });
  CHECK(clock == std::vector<double>{4.0, 6.0});
}

TEST_CASE("run returns dispatched counts and advances the clock", "[kernel]") {
  Kernel<int> k;
  CHECK(k.run(7.5, [](const auto&) {}) == 0);
  CHECK(k.now() == 7.5);
  k.schedule(8.0, 0);
  k.schedule(9.0, 0);
  k.schedule(10.0, 0);
  k.schedule(11.0, 0);
  CHECK(k.run(10.0, [](const auto&) {}) == 3);
  CHECK(k.now() == 10.0);
  CHECK(k.pending() == 1);
  CHECK(k.dispatched() == 3);
}

TEST_CASE("past events and horizons are rejected", "[kernel][errors]") {
  Kernel<int> k;
  k.run(5.0, [](const auto&) {});
  CHECK_THROWS_AS(k.schedule(4.0, 0), std::logic_error);
  CHECK_THROWS_AS(k.run(1.0, [](const auto&) {}), std::logic_error);
}

TEST_CASE("schedule returns the inserted record", "[kernel]") {
  Kernel<int> k;
  k.schedule(1.0, 0);
  const auto ev = k.schedule(9.0, 4, 77);
  CHECK(ev.time == 9.0);
  CHECK(ev.kind == 4);
  CHECK(ev.subject == 77);
  CHECK(ev.sequence == 1);
  CHECK(k.schedule_in(2.0, 1).time == 2.0);
}

TEST_CASE("randomized schedule fuzz keeps (time, sequence) order", "[kernel][property]") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 20; ++trial) {
    Kernel<int> k;
    EventRecord<int> last{-1.0, 0, 0, 0};
    bool first = true;
    std::uint64_t violations = 0;
    k.set_observer([&](const EventRecord<int>& ev) {
      if (!first && (ev.time < last.time || (ev.time == last.time && ev.sequence < last.sequence))) ++violations;
      if (ev.time < k.now()) ++violations;
      first = false;
      last = ev;
    });
    std::uniform_real_distribution<double> delay(0.0, 10.0);
    std::uniform_int_distribution<int> coarse(0, 5);
    for (int i = 0; i < 200; ++i) k.schedule(static_cast<double>(coarse(rng)), 0);
    std::uint64_t budget = 5000;
    const auto n = k.run(1e9, [&](const EventRecord<int>&) {
      if (budget == 0) return;
      --budget;
      // Mix exact ties (zero delay, integer times) with continuous delays.
      const int choice = coarse(rng);
      if (choice == 0) k.schedule_in(0.0, 1);
      else if (choice == 1) k.schedule(std::ceil(k.now()) + 1.0, 2);
      else k.schedule_in(delay(rng), 3);
    });
    CHECK(violations == 0);
    CHECK(n == 5200);
  }
}

TEST_CASE("bounded queue never exceeds capacity and keeps FIFO", "[kernel]") {
  CapacityQueue<int> q("lane", 3);
  CHECK(q.bounded());
  CHECK(q.try_push(1));
  CHECK(q.try_push(2));
  CHECK(q.try_push(3));
  CHECK_FALSE(q.try_push(4));
  CHECK(q.full());
  CHECK(q.free_capacity() == 0);
  CHECK_THROWS_AS(q.push(5), std::overflow_error);
  CHECK(q.pop() == 1);
  CHECK(q.front() == 2);
  CHECK(q.free_capacity() == 1);
  CHECK_THROWS_AS(CapacityQueue<int>("zero", 0), std::invalid_argument);
  CapacityQueue<int> empty("e");
  CHECK_THROWS_AS(empty.pop(), std::out_of_range);
}

TEST_CASE("bounded queue capacity holds under random operations", "[kernel][property]") {
  std::mt19937_64 rng(99);
  for (std::size_t cap = 1; cap <= 8; ++cap) {
    CapacityQueue<int> q("q", cap);
    std::deque<int> model;
    for (int i = 0; i < 2000; ++i) {
      if (rng() % 2) {
        const bool pushed = q.try_push(i);
        CHECK(pushed == (model.size() < cap));
        if (pushed) model.push_back(i);
      } else if (!model.empty()) {
        CHECK(q.pop() == model.front());
        model.pop_front();
      }
      REQUIRE(q.size() <= cap);
    }
  }
}

TEST_CASE("unbounded queue", "[kernel]") {
  CapacityQueue<int> q("pre");
  for (int i = 0; i < 10000; ++i) q.push(i);
  CHECK_FALSE(q.full());
  CHECK(q.size() == 10000);
}

TEST_CASE("parallel_for covers every index once and rethrows", "[kernel]") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i].fetch_add(1); });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(100, 4,
                               [](std::size_t i) {
                                 if (i == 37) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  CHECK(resolve_threads(3) == 3);
  CHECK(resolve_threads(0) >= 1);
}
