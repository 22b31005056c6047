#pragma once

#include <coroutine>
#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "smchain/common/task.hpp"
#include "smchain/common/types.hpp"

namespace smchain {

/// Single-threaded discrete-event loop. In virtual mode time jumps to the next
/// event; in real-time mode the loop sleeps on the steady clock until the
/// event is due. Events at equal times run in scheduling order.
class EventLoop {
 public:
  enum class Mode { Virtual, RealTime };

  explicit EventLoop(Mode mode = Mode::Virtual);
  ~EventLoop();
  EventLoop(const EventLoop&) = delete;
  EventLoop& operator=(const EventLoop&) = delete;

  Mode mode() const { return mode_; }
  Timestamp now() const;

  void call_at(Timestamp at, std::function<void()> fn);
  void resume_at(Timestamp at, std::coroutine_handle<> h);

  struct SleepAwaiter {
    EventLoop& loop;
    Timestamp until;
    bool await_ready() const { return until <= loop.now(); }
    void await_suspend(std::coroutine_handle<> h) { loop.resume_at(until, h); }
    void await_resume() const noexcept {}
  };
  SleepAwaiter sleep_until(Timestamp t) { return {*this, t}; }
  SleepAwaiter sleep_for(Duration d) { return {*this, now() + d}; }

  /// Takes ownership of a task and starts it at the current time.
  void spawn(Task<void> task);

  /// Runs until no events remain. Rethrows the first exception escaping a
  /// spawned task.
  void run();
  /// Runs events with time <= limit.
  void run_until(Timestamp limit);

  std::uint64_t events_processed() const { return processed_; }
  bool idle() const { return queue_.empty(); }

 private:
  struct Event {
    Timestamp at;
    std::uint64_t seq;
    std::coroutine_handle<> handle;
    std::function<void()> fn;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.at != b.at ? a.at > b.at : a.seq > b.seq;
    }
  };

  void dispatch(Event& ev);
  void check_spawned();

  Mode mode_;
  Timestamp virtual_now_{0};
  std::int64_t real_origin_ns_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t processed_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::vector<Task<void>> spawned_;
};

/// Runs a task to completion on a loop and returns its value.
template <typename T>
T run_to_completion(EventLoop& loop, Task<T> task) {
  std::optional<T> result;
  auto wrapper = [](Task<T> t, std::optional<T>& out) -> Task<void> { out.emplace(co_await t); };
  loop.spawn(wrapper(std::move(task), result));
  loop.run();
  return std::move(*result);
}

inline void run_to_completion(EventLoop& loop, Task<void> task) {
  loop.spawn(std::move(task));
  loop.run();
}

}  // namespace smchain
