#include "mathgen/clock.hpp"

#include <ctime>
#include <numeric>
#include <thread>

namespace mathgen {

std::chrono::milliseconds SystemClock::monotonic() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now().time_since_epoch());
}

void SystemClock::sleep_for(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

std::string SystemClock::utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::chrono::milliseconds FakeClock::total_slept() const {
    return std::accumulate(m_sleeps.begin(), m_sleeps.end(), std::chrono::milliseconds{0});
}

Clock& system_clock() {
    static SystemClock clock;
    return clock;
}

}  // namespace mathgen
