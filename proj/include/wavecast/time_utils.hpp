#pragma once

#include <cstdint>
#include <string>

namespace wavecast {

// Seconds since the Unix epoch, UTC. All buoy records are hourly UTC instants.
using Timestamp = std::int64_t;

constexpr std::int64_t kSecondsPerHour = 3600;

// Civil calendar <-> epoch conversions (proleptic Gregorian, no time zones).
std::int64_t days_from_civil(int year, int month, int day);
void civil_from_days(std::int64_t days, int& year, int& month, int& day);

Timestamp make_timestamp(int year, int month, int day, int hour, int minute = 0,
                         int second = 0);

// "2019-01-01T00:00:00Z"
std::string format_iso8601(Timestamp t);
Timestamp parse_iso8601(const std::string& text);

// Hours between two instants as a real number.
inline double hours_between(Timestamp from, Timestamp to) {
    return static_cast<double>(to - from) / static_cast<double>(kSecondsPerHour);
}

}  // namespace wavecast
