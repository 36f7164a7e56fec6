#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>

namespace blobgate {

// Injectable time source. Unix seconds; the quota engine and session expiry
// only need second resolution.
class Clock {
public:
    virtual ~Clock() = default;
    virtual std::int64_t now_seconds() const = 0;
};

class SystemClock final : public Clock {
public:
    std::int64_t now_seconds() const override {
        return std::chrono::duration_cast<std::chrono::seconds>(
                   std::chrono::system_clock::now().time_since_epoch())
            .count();
    }
};

// Test clock; advances only when told.
class ManualClock final : public Clock {
public:
    explicit ManualClock(std::int64_t start = 0) : now_(start) {}
    std::int64_t now_seconds() const override { return now_.load(); }
    void set(std::int64_t t) { now_.store(t); }
    void advance(std::int64_t dt) { now_.fetch_add(dt); }

private:
    std::atomic<std::int64_t> now_;
};

}  // namespace blobgate
