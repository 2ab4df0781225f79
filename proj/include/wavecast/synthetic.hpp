#pragma once

#include <cstdint>

#include "wavecast/ndbc.hpp"

namespace wavecast::synthetic {

// Deterministic hourly buoy-like table: daily and annual cycles, AR(1)
// noise, occasional spikes, sparse missing cells, and a few multi-hour row
// gaps. Used by the desk-scale end-to-end checks and runnable offline.
ndbc::TimeSeriesTable generate_table(std::size_t hours, std::uint64_t seed,
                                     int start_year = 2019);

}  // namespace wavecast::synthetic
