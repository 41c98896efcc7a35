// Copyright 2026 The SkyVault Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>

namespace skyvault {

// Unix seconds. Every time-dependent component takes a Clock so expiry and
// timestamp windows are deterministic under test.
using UnixSeconds = std::int64_t;
using Clock = std::function<UnixSeconds()>;

inline UnixSeconds system_now() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

inline Clock system_clock() { return &system_now; }

// Logical clock for tests and simulations; copies share the same time.
class ManualClock {
 public:
  explicit ManualClock(UnixSeconds start = 1'700'000'000)
      : now_(std::make_shared<std::atomic<UnixSeconds>>(start)) {}

  UnixSeconds now() const { return now_->load(); }
  void set(UnixSeconds t) { now_->store(t); }
  void advance(UnixSeconds dt) { now_->fetch_add(dt); }

  Clock clock() const {
    return [state = now_] { return state->load(); };
  }

 private:
  std::shared_ptr<std::atomic<UnixSeconds>> now_;
};

}  // namespace skyvault
