#pragma once

#include <cassert>
#include <cmath>
#include <vector>

namespace oppsim {

// Simulation time is real-valued seconds since the simulation epoch (t = 0
// is the start of day 1). No tick quantization anywhere; trace timestamps
// are taken at face value.
using SimTime = double;

inline constexpr double kSecondsPerDay = 86400.0;

// Position of an instant within the daily sampling grid. Days are 1-based
// so that the sample-closing recursion reads literally in terms of the day
// count; samples are 0-based within a day.
struct SampleRef {
  int day = 1;     // 1-based
  int sample = 0;  // 0..samples_per_day-1

  bool operator==(const SampleRef&) const = default;
};

// samples_per_day * sample_duration must equal 86400.
inline SampleRef sample_index(SimTime t, int samples_per_day, double sample_duration) {
  assert(t >= 0.0);
  assert(samples_per_day > 0);
  double day = std::floor(t / kSecondsPerDay);
  double within = t - day * kSecondsPerDay;
  int sample = static_cast<int>(std::floor(within / sample_duration));
  if (sample >= samples_per_day) sample = samples_per_day - 1;  // guard t landing on 86400*k via rounding
  return SampleRef{static_cast<int>(day) + 1, sample};
}

// One piece of a time interval after cutting at sample boundaries. Each
// segment lies entirely inside a single (day, sample) cell.
struct SampleSegment {
  SampleRef cell;
  SimTime begin = 0;
  SimTime end = 0;

  double length() const { return end - begin; }
};

// Splits [begin, end) at every multiple of sample_duration. Zero-length
// input yields no segments.
inline std::vector<SampleSegment> split_at_sample_boundaries(SimTime begin, SimTime end,
                                                             int samples_per_day,
                                                             double sample_duration) {
  std::vector<SampleSegment> out;
  if (!(begin < end)) return out;
  SimTime cursor = begin;
  while (cursor < end) {
    double k = std::floor(cursor / sample_duration);
    SimTime next = (k + 1.0) * sample_duration;
    if (next <= cursor) next = cursor + sample_duration;  // fp safety at exact boundaries
    SimTime stop = std::min(next, end);
    out.push_back({sample_index(cursor, samples_per_day, sample_duration), cursor, stop});
    cursor = stop;
  }
  return out;
}

}  // namespace oppsim
