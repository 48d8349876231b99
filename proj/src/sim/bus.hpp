#pragma once

#include <cstdint>
#include <deque>
#include <utility>

namespace explore {

// Fixed-delay FIFO channel on the simulation clock. A message sent at t is
// handed out by the first Deliver call with now >= t + delay.
template <typename T>
class Channel {
 public:
  explicit Channel(int64_t delay_ms = 0) : delay_ms_(delay_ms) {}

  void Send(int64_t now_ms, T payload) {
    queue_.push_back({now_ms + delay_ms_, std::move(payload)});
  }

  template <typename Fn>
  void Deliver(int64_t now_ms, Fn &&fn) {
    while (!queue_.empty() && queue_.front().deliver_ms <= now_ms) {
      T payload = std::move(queue_.front().payload);
      queue_.pop_front();
      fn(payload);
    }
  }

  size_t pending() const { return queue_.size(); }

 private:
  struct Item {
    int64_t deliver_ms;
    T payload;
  };
  int64_t delay_ms_;
  std::deque<Item> queue_;
};

}  // namespace explore
