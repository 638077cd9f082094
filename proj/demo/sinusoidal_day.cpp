// SPDX-License-Identifier: Apache-2.0
//
// Arrivals with a daily cycle: simulate one day both ways, then ask where the
// next three arrivals after noon are likely to fall.

#include <cstdio>
#include <numbers>

#include "ippp/ippp.hpp"

int main() {
  // 6 + 4 sin(2 pi t / 24 - pi / 2): quiet at midnight, busy at noon.
  const auto rate = ippp::RateModel::sinusoidal(6.0, 4.0, 2 * std::numbers::pi / 24, -std::numbers::pi / 2);
  const ippp::Interval day(0.0, 24.0);

  std::printf("expected arrivals per day: %.6f\n", ippp::expected_count(rate, day));

  ippp::Rng rng(2024);
  const auto by_rejection = ippp::simulate_window(rate, day, rng);
  const ippp::CumulativeIntensity R(rate);
  const auto by_time_change = ippp::sample_path_timechange(R, day, rng);
  std::printf("rejection sample: %zu arrivals, time-change sample: %zu arrivals\n", by_rejection.size(),
              by_time_change.size());

  // Reseeding per n reuses the same exponential increments, so the three
  // answers belong to one realization and come out increasing.
  for (long long n = 1; n <= 3; ++n) {
    ippp::Rng shared(7);
    const ippp::NthPointQuery query{12.0, n, ippp::Direction::above};
    const auto next = ippp::sample_nth_point(R, query, shared);
    std::printf("arrival %lld after noon: %s%.4f h\n", n, next ? "" : "none ", next ? *next : 0.0);
  }
  return 0;
}
