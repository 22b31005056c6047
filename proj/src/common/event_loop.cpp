#include "smchain/common/event_loop.hpp"

#include <thread>

namespace smchain {

namespace {
std::int64_t steady_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}
}  // namespace

EventLoop::EventLoop(Mode mode) : mode_(mode), real_origin_ns_(steady_ns()) {}

EventLoop::~EventLoop() {
  // Drop queued resumptions before the frames they point into are destroyed.
  while (!queue_.empty()) queue_.pop();
  spawned_.clear();
}

Timestamp EventLoop::now() const {
  if (mode_ == Mode::Virtual) return virtual_now_;
  return Timestamp{steady_ns() - real_origin_ns_};
}

void EventLoop::call_at(Timestamp at, std::function<void()> fn) {
  queue_.push(Event{at, next_seq_++, {}, std::move(fn)});
}

void EventLoop::resume_at(Timestamp at, std::coroutine_handle<> h) {
  queue_.push(Event{at, next_seq_++, h, {}});
}

void EventLoop::spawn(Task<void> task) {
  auto h = task.handle();
  spawned_.push_back(std::move(task));
  resume_at(now(), h);
}

void EventLoop::dispatch(Event& ev) {
  if (mode_ == Mode::Virtual) {
    if (ev.at > virtual_now_) virtual_now_ = ev.at;
  } else {
    const auto wait = ev.at - now();
    if (wait.count() > 0) std::this_thread::sleep_for(wait);
  }
  ++processed_;
  if (ev.handle) {
    ev.handle.resume();
  } else {
    ev.fn();
  }
}

void EventLoop::check_spawned() {
  for (auto it = spawned_.begin(); it != spawned_.end();) {
    auto h = it->handle();
    if (h.done()) {
      auto err = h.promise().error;
      it = spawned_.erase(it);
      if (err) std::rethrow_exception(err);
    } else {
      ++it;
    }
  }
}

void EventLoop::run() {
  while (!queue_.empty()) {
    Event ev = queue_.top();
    queue_.pop();
    dispatch(ev);
    if (ev.handle) check_spawned();
  }
  check_spawned();
}

void EventLoop::run_until(Timestamp limit) {
  while (!queue_.empty() && queue_.top().at <= limit) {
    Event ev = queue_.top();
    queue_.pop();
    dispatch(ev);
    if (ev.handle) check_spawned();
  }
  check_spawned();
  if (mode_ == Mode::Virtual && virtual_now_ < limit) virtual_now_ = limit;
}

}  // namespace smchain
