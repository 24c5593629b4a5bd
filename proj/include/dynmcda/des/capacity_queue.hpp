#pragma once

#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace dynmcda::des {

// FIFO with an optional bound. std::nullopt capacity means unbounded.
template <class T>
class CapacityQueue {
 public:
  explicit CapacityQueue(std::string name, std::optional<std::size_t> capacity = std::nullopt)
      : name_(std::move(name)), capacity_(capacity) {
    if (capacity_ && *capacity_ == 0) throw std::invalid_argument("CapacityQueue " + name_ + ": zero capacity");
  }

  const std::string& name() const noexcept { return name_; }
  std::optional<std::size_t> capacity() const noexcept { return capacity_; }
  bool bounded() const noexcept { return capacity_.has_value(); }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  bool full() const noexcept { return capacity_ && items_.size() >= *capacity_; }

  std::size_t free_capacity() const noexcept {
    return capacity_ ? *capacity_ - items_.size() : std::numeric_limits<std::size_t>::max();
  }

  bool try_push(T item) {
    if (full()) return false;
    items_.push_back(std::move(item));
    return true;
  }

  void push(T item) {
    if (!try_push(std::move(item))) throw std::overflow_error("CapacityQueue " + name_ + " is full");
  }

  const T& front() const {
    if (items_.empty()) throw std::out_of_range("CapacityQueue " + name_ + " is empty");
    return items_.front();
  }

  T pop() {
    if (items_.empty()) throw std::out_of_range("CapacityQueue " + name_ + " is empty");
    T v = std::move(items_.front());
    items_.pop_front();
    return v;
  }

  auto begin() const noexcept { return items_.begin(); }
  auto end() const noexcept { return items_.end(); }

 private:
  std::string name_;
  std::optional<std::size_t> capacity_;
  std::deque<T> items_;
};

}  // namespace dynmcda::des
