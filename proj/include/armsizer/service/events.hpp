// Copyright 2026 The armsizer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Per-session event stream. Every event gets the next sequence number of
// its session; subscribers read from bounded queues that shed the oldest
// state/progress frame when full and never shed anything else.

#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace armsizer::service {

struct Event {
  std::uint64_t seq = 0;
  double ts = 0.0;  // seconds since the Unix epoch
  std::string type;
  nlohmann::json payload;

  bool droppable() const { return type == "state" || type == "progress"; }
  nlohmann::json envelope() const { return {{"seq", seq}, {"ts", ts}, {"type", type}, {"payload", payload}}; }
};

class Subscription {
 public:
  explicit Subscription(std::size_t capacity) : capacity_(std::max<std::size_t>(capacity, 1)) {}

  void push(const Event& e) {
    {
      std::lock_guard lock(mu_);
      if (closed_) return;
      if (queue_.size() >= capacity_) {
        auto it = std::find_if(queue_.begin(), queue_.end(), [](const Event& x) { return x.droppable(); });
        if (it != queue_.end()) {
          queue_.erase(it);
          ++dropped_;
        } else if (e.droppable()) {
          ++dropped_;
          return;
        }
      }
      queue_.push_back(e);
    }
    cv_.notify_one();
  }

  /// Next event, or nothing after `timeout` or once closed and drained.
  std::optional<Event> pop(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, timeout, [&] { return !queue_.empty() || closed_; });
    if (queue_.empty()) return std::nullopt;
    Event e = std::move(queue_.front());
    queue_.pop_front();
    return e;
  }

  std::vector<Event> drain() {
    std::lock_guard lock(mu_);
    std::vector<Event> out(std::make_move_iterator(queue_.begin()), std::make_move_iterator(queue_.end()));
    queue_.clear();
    return out;
  }

  void close() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    cv_.notify_all();
  }
  bool closed() const {
    std::lock_guard lock(mu_);
    return closed_;
  }
  std::uint64_t dropped() const {
    std::lock_guard lock(mu_);
    return dropped_;
  }

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Event> queue_;
  std::size_t capacity_;
  std::uint64_t dropped_ = 0;
  bool closed_ = false;
};

class EventBus {
 public:
  static constexpr std::size_t kDefaultCapacity = 256;

  std::shared_ptr<Subscription> subscribe(std::size_t capacity = kDefaultCapacity) {
    auto s = std::make_shared<Subscription>(capacity);
    std::lock_guard lock(mu_);
    subs_.push_back(s);
    return s;
  }

  /// Stamps and delivers one event; returns its sequence number.
  std::uint64_t publish(const std::string& type, nlohmann::json payload) {
    std::lock_guard lock(mu_);
    Event e;
    e.seq = next_seq_++;
    e.ts = std::chrono::duration<double>(std::chrono::system_clock::now().time_since_epoch()).count();
    e.type = type;
    e.payload = std::move(payload);
    std::erase_if(subs_, [](const std::weak_ptr<Subscription>& w) {
      auto s = w.lock();
      return !s || s->closed();
    });
    for (auto& w : subs_) {
      if (auto s = w.lock()) s->push(e);
    }
    return e.seq;
  }

  void close_all() {
    std::lock_guard lock(mu_);
    for (auto& w : subs_) {
      if (auto s = w.lock()) s->close();
    }
    subs_.clear();
  }

  std::uint64_t last_seq() const {
    std::lock_guard lock(mu_);
    return next_seq_ - 1;
  }

 private:
  mutable std::mutex mu_;
  std::uint64_t next_seq_ = 1;
  std::vector<std::weak_ptr<Subscription>> subs_;
};

}  // namespace armsizer::service
