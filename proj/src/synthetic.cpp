#include "wavecast/synthetic.hpp"

#include <cmath>
#include <random>

namespace wavecast::synthetic {

namespace {
constexpr double kPi = 3.14159265358979323846;

double wrap_degrees(double x) {
    double r = std::fmod(x, 360.0);
    if (r < 0.0) {
        r += 360.0;
    }
    return r;
}
}  // namespace

ndbc::TimeSeriesTable generate_table(std::size_t hours, std::uint64_t seed, int start_year) {
    std::mt19937 rng(static_cast<std::uint32_t>(seed));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const Timestamp start = make_timestamp(start_year, 1, 1, 0);

    ndbc::TimeSeriesTable t;
    double ar_wvht = 0.0, ar_wspd = 0.0, ar_pres = 0.0;
    double wdir = 360.0 * unit(rng);
    std::size_t gap_remaining = 0;

    for (std::size_t i = 0; i < hours; ++i) {
        const double day = 2.0 * kPi * static_cast<double>(i) / 24.0;
        const double year = 2.0 * kPi * static_cast<double>(i) / (24.0 * 365.0);

        ar_wvht = 0.8 * ar_wvht + 0.05 * gauss(rng);
        ar_wspd = 0.7 * ar_wspd + 0.30 * gauss(rng);
        ar_pres = 0.9 * ar_pres + 0.30 * gauss(rng);
        wdir = wrap_degrees(wdir + 8.0 * gauss(rng));
        const bool spike = unit(rng) < 1.0 / 2000.0;

        if (gap_remaining > 0) {
            --gap_remaining;
            continue;  // omitted rows form a recorded gap
        }
        if (unit(rng) < 0.001) {
            gap_remaining = 4 + static_cast<std::size_t>(unit(rng) * 8.0);
        }

        double wvht = 1.1 + 0.45 * std::sin(day) + 0.25 * std::sin(year + 1.0) + ar_wvht;
        if (spike) {
            wvht += 1.0 + unit(rng);
        }
        wvht = std::max(wvht, 0.05);

        const double wspd =
            std::max(0.0, 5.5 + 2.0 * std::sin(day + 0.6) + 1.2 * std::sin(year) + ar_wspd);
        const double gst = 1.25 * wspd + std::abs(0.4 * gauss(rng));
        const double dpd = std::max(2.0, 8.0 + 2.0 * std::sin(year + 2.0) + 0.8 * gauss(rng));
        const double apd = std::max(2.0, 0.75 * dpd + 0.3 * gauss(rng));
        const double mwd = wrap_degrees(wdir + 15.0 + 10.0 * gauss(rng));
        const double pres = 1015.0 + 4.0 * std::sin(year + 3.0) + ar_pres;
        const double atmp =
            22.0 + 6.0 * std::sin(year + 4.2) + 2.5 * std::sin(day + 1.0) + 0.5 * gauss(rng);
        const double wtmp = 23.0 + 5.0 * std::sin(year + 4.0) + 0.2 * gauss(rng);
        const double dewp = atmp - 4.0 + 0.7 * gauss(rng);

        t.timestamps.push_back(start + static_cast<Timestamp>(i) * kSecondsPerHour);
        const double values[11] = {wdir, wspd, gst, wvht, dpd, apd, mwd, pres, atmp, wtmp, dewp};
        for (std::size_t f = 0; f < 11; ++f) {
            if (unit(rng) < 0.003) {
                t.columns[f].push_back(std::nullopt);
            } else {
                t.columns[f].push_back(values[f]);
            }
        }
    }
    t.validate();
    return t;
}

}  // namespace wavecast::synthetic
