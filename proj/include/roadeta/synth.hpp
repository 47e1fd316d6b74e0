#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "roadeta/graph.hpp"

namespace roadeta {

// Piecewise-constant per-segment speeds on a fixed tick grid, plus a
// time-of-day historical profile averaged over independently simulated days
// (the synthetic stand-in for "average across the past 17 weeks").
struct SpeedField {
  int64_t start_s = 0;  // absolute time of live grid tick 0
  int32_t tick_s = 60;
  int64_t n_ticks = 0;
  int32_t n_segments = 0;
  std::vector<float> speeds;        // [n_segments][n_ticks]
  std::vector<float> free_flow;     // [n_segments], m/s
  int32_t hist_ticks = 0;           // ticks per day in the historical profile
  std::vector<float> hist_profile;  // [n_segments][hist_ticks], may be empty

  int64_t end_s() const { return start_s + n_ticks * tick_s; }
  bool covers(int64_t a_s, int64_t b_s) const { return a_s >= start_s && b_s <= end_s(); }

  double speed_at(int32_t seg, int64_t time_s) const;
  // time-average of speed over [a_s, b_s); NaN if outside the live grid
  double mean_speed(int32_t seg, int64_t a_s, int64_t b_s) const;
  // same but from the historical profile (wraps by time of day); NaN if no profile
  double hist_mean_speed(int32_t seg, int64_t a_s, int64_t b_s) const;
};

// Binary speed-field file: header, free-flow vector, live grid, historical
// profile; all floats little-endian f32. See save_speed_field for the layout.
void save_speed_field(const std::string& path, const SpeedField& field);
SpeedField load_speed_field(const std::string& path);

struct NetworkParams {
  int32_t n_segments = 1200;
  double seg_len_lo = 50.0;   // meters
  double seg_len_hi = 100.0;
  double diag_fraction = 0.15;  // fraction of intersections gaining a diagonal street
  int arterial_every = 4;       // every k-th grid line is an arterial
  int highway_every = 8;        // every k-th grid line is a highway (wins over arterial)
};

// Deterministic grid-with-diagonals road network. Segments are directed
// street edges; adjacency connects a->b when b departs from the intersection
// a arrives at (U-turns excluded).
RoadNetwork generate_network(uint64_t seed, const NetworkParams& params);

void save_network(const std::string& path, const RoadNetwork& net);
RoadNetwork load_network(const std::string& path);

struct TrafficProfile {
  // two sinusoidal rush-hour dips (raised cosine lobes)
  double am_center_h = 8.0;
  double pm_center_h = 17.5;
  double am_depth = 0.45;
  double pm_depth = 0.40;
  double dip_width_h = 2.2;  // half-width of each lobe

  // incidents: spawn on random segments, diffuse upstream with per-hop decay
  // and delayed onset; this spatial coupling is what makes graph structure
  // informative for the learned models.
  double incidents_per_day = 120.0;  // expected count, network-wide
  double incident_factor = 0.35;     // speed multiplier at the source segment
  double incident_factor_jitter = 0.1;
  int64_t incident_min_s = 3600;
  int64_t incident_max_s = 9000;
  double hop_decay = 0.5;
  int max_hops = 2;
  int64_t hop_delay_s = 600;  // onset delay per upstream hop

  int hist_days = 17;  // independent days averaged into the historical profile
};

// Simulates `days` consecutive days of traffic and builds the historical
// profile from `profile.hist_days` additional independent days. Deterministic
// per (network, seed, days, profile).
SpeedField simulate_traffic(const RoadNetwork& net, uint64_t seed, int days,
                            const TrafficProfile& profile);

// Exact traversal labels: enter segment j at t + sum of earlier segment
// times; segment time integrates the piecewise-constant speed across tick
// boundaries. Throws FieldExhausted if the traversal runs off the grid.
struct TravelTimes {
  double y_ss = 0.0;
  std::vector<double> y_seg;
};
TravelTimes ground_truth_travel_time(const SpeedField& field, const RoadNetwork& net,
                                     const Supersegment& ss, int64_t departure_s);

struct MiningParams {
  int32_t count = 300;
  int min_len = 10;
  int max_len = 30;
};

// Random walks biased toward high-priority edges, deduplicated; mirrors
// "typical traffic routes" without trip logs.
std::vector<Supersegment> mine_supersegments(const RoadNetwork& net, uint64_t seed,
                                             const MiningParams& params);

}  // namespace roadeta
