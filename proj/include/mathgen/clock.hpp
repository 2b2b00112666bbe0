#pragma once

#include <chrono>
#include <string>
#include <vector>

namespace mathgen {

// Time source for retries, rate limiting, and record timestamps. Tests and
// replay runs substitute a deterministic implementation.
class Clock {
public:
    virtual ~Clock() = default;
    virtual std::chrono::milliseconds monotonic() = 0;
    virtual void sleep_for(std::chrono::milliseconds d) = 0;
    // ISO-8601 UTC, second resolution (e.g. "2026-08-10T12:00:00Z").
    virtual std::string utc_timestamp() = 0;
};

class SystemClock final : public Clock {
public:
    std::chrono::milliseconds monotonic() override;
    void sleep_for(std::chrono::milliseconds d) override;
    std::string utc_timestamp() override;
};

// Virtual clock: sleeping advances time instantly and every sleep is
// recorded, so backoff schedules can be asserted exactly.
class FakeClock final : public Clock {
public:
    explicit FakeClock(std::string timestamp = "2000-01-01T00:00:00Z")
        : m_timestamp(std::move(timestamp)) {}

    std::chrono::milliseconds monotonic() override { return m_now; }
    void sleep_for(std::chrono::milliseconds d) override {
        m_sleeps.push_back(d);
        m_now += d;
    }
    std::string utc_timestamp() override { return m_timestamp; }

    const std::vector<std::chrono::milliseconds>& sleeps() const { return m_sleeps; }
    std::chrono::milliseconds total_slept() const;

private:
    std::chrono::milliseconds m_now{0};
    std::vector<std::chrono::milliseconds> m_sleeps;
    std::string m_timestamp;
};

Clock& system_clock();

}  // namespace mathgen
