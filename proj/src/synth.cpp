#include "roadeta/synth.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <unordered_set>

#include "roadeta/rng.hpp"

namespace roadeta {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int64_t kDayS = 86400;
}  // namespace

double SpeedField::speed_at(int32_t seg, int64_t time_s) const {
  if (time_s < start_s || time_s >= end_s()) return kNaN;
  int64_t tick = (time_s - start_s) / tick_s;
  return speeds[static_cast<size_t>(seg) * static_cast<size_t>(n_ticks) +
                static_cast<size_t>(tick)];
}

double SpeedField::mean_speed(int32_t seg, int64_t a_s, int64_t b_s) const {
  if (b_s <= a_s || !covers(a_s, b_s)) return kNaN;
  const float* row = speeds.data() + static_cast<size_t>(seg) * static_cast<size_t>(n_ticks);
  double acc = 0.0;
  int64_t t = a_s;
  while (t < b_s) {
    int64_t tick = (t - start_s) / tick_s;
    int64_t tick_end = start_s + (tick + 1) * tick_s;
    int64_t seg_end = std::min(b_s, tick_end);
    acc += static_cast<double>(row[tick]) * static_cast<double>(seg_end - t);
    t = seg_end;
  }
  return acc / static_cast<double>(b_s - a_s);
}

double SpeedField::hist_mean_speed(int32_t seg, int64_t a_s, int64_t b_s) const {
  if (hist_ticks == 0 || hist_profile.empty() || b_s <= a_s) return kNaN;
  const float* row =
      hist_profile.data() + static_cast<size_t>(seg) * static_cast<size_t>(hist_ticks);
  const int64_t day_ticks = hist_ticks;
  double acc = 0.0;
  int64_t t = a_s;
  while (t < b_s) {
    int64_t tod = ((t % kDayS) + kDayS) % kDayS;
    int64_t tick = tod / tick_s;
    int64_t tick_end = t + (tick_s - tod % tick_s);
    int64_t seg_end = std::min(b_s, tick_end);
    acc += static_cast<double>(row[tick % day_ticks]) * static_cast<double>(seg_end - t);
    t = seg_end;
  }
  return acc / static_cast<double>(b_s - a_s);
}

// ---------------------------------------------------------------------------
// speed field file io

namespace {
constexpr char kFieldMagic[4] = {'R', 'E', 'S', 'F'};
constexpr uint32_t kFieldVersion = 1;

template <typename T>
void wr(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T rd(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}
}  // namespace

void save_speed_field(const std::string& path, const SpeedField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open field file for write: " + path);
  // header: magic, version, n_segments, tick_s, start_s, n_ticks, hist_ticks
  os.write(kFieldMagic, 4);
  wr<uint32_t>(os, kFieldVersion);
  wr<int32_t>(os, f.n_segments);
  wr<int32_t>(os, f.tick_s);
  wr<int64_t>(os, f.start_s);
  wr<int64_t>(os, f.n_ticks);
  wr<int32_t>(os, f.hist_ticks);
  os.write(reinterpret_cast<const char*>(f.free_flow.data()),
           static_cast<std::streamsize>(f.free_flow.size() * sizeof(float)));
  os.write(reinterpret_cast<const char*>(f.speeds.data()),
           static_cast<std::streamsize>(f.speeds.size() * sizeof(float)));
  os.write(reinterpret_cast<const char*>(f.hist_profile.data()),
           static_cast<std::streamsize>(f.hist_profile.size() * sizeof(float)));
  if (!os) throw std::runtime_error("field write failed: " + path);
}

SpeedField load_speed_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open field file: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kFieldMagic, 4) != 0)
    throw std::runtime_error("bad field magic: " + path);
  if (rd<uint32_t>(is) != kFieldVersion) throw std::runtime_error("unsupported field version");
  SpeedField f;
  f.n_segments = rd<int32_t>(is);
  f.tick_s = rd<int32_t>(is);
  f.start_s = rd<int64_t>(is);
  f.n_ticks = rd<int64_t>(is);
  f.hist_ticks = rd<int32_t>(is);
  f.free_flow.resize(static_cast<size_t>(f.n_segments));
  f.speeds.resize(static_cast<size_t>(f.n_segments) * static_cast<size_t>(f.n_ticks));
  f.hist_profile.resize(static_cast<size_t>(f.n_segments) * static_cast<size_t>(f.hist_ticks));
  is.read(reinterpret_cast<char*>(f.free_flow.data()),
          static_cast<std::streamsize>(f.free_flow.size() * sizeof(float)));
  is.read(reinterpret_cast<char*>(f.speeds.data()),
          static_cast<std::streamsize>(f.speeds.size() * sizeof(float)));
  is.read(reinterpret_cast<char*>(f.hist_profile.data()),
          static_cast<std::streamsize>(f.hist_profile.size() * sizeof(float)));
  if (!is) throw std::runtime_error("truncated field file: " + path);
  return f;
}

// ---------------------------------------------------------------------------
// network generation

namespace {

int priority_for_line(int line, const NetworkParams& p) {
  if (p.highway_every > 0 && line % p.highway_every == 0) return kHighway;
  if (p.arterial_every > 0 && line % p.arterial_every == 0) return kArterial;
  return kLocal;
}

double free_flow_for_priority(int priority, Rng& rng) {
  switch (priority) {
    case kHighway: return rng.uniform(24.0, 31.0);
    case kArterial: return rng.uniform(15.0, 19.0);
    default: return rng.uniform(11.0, 14.0);
  }
}

}  // namespace

RoadNetwork generate_network(uint64_t seed, const NetworkParams& params) {
  if (params.n_segments < 1) throw InvalidParams("n_segments must be >= 1");
  if (params.seg_len_lo <= 0 || params.seg_len_hi < params.seg_len_lo)
    throw InvalidParams("bad seg_len_range");

  Rng rng(derive_seed(seed, "network"));

  // grid side large enough that directed street edges cover n_segments
  int g = 2;
  auto capacity = [&](int side) {
    int64_t undirected = 2ll * side * (side - 1);  // horizontal + vertical
    int64_t diag = static_cast<int64_t>(params.diag_fraction * (side - 1) * (side - 1));
    return 2 * (undirected + diag);
  };
  while (capacity(g) < params.n_segments) ++g;

  RoadNetwork net;
  struct Street {
    int from_r, from_c, to_r, to_c;
    int priority;
  };
  std::vector<Street> streets;
  // enumerate intersections row-major; each contributes east, south and an
  // occasional diagonal street, both directions each
  for (int r = 0; r < g; ++r) {
    for (int c = 0; c < g; ++c) {
      if (c + 1 < g) {
        int pr = priority_for_line(r, params);
        streets.push_back({r, c, r, c + 1, pr});
        streets.push_back({r, c + 1, r, c, pr});
      }
      if (r + 1 < g) {
        int pr = priority_for_line(c, params);
        streets.push_back({r, c, r + 1, c, pr});
        streets.push_back({r + 1, c, r, c, pr});
      }
      if (r + 1 < g && c + 1 < g && rng.uniform() < params.diag_fraction) {
        streets.push_back({r, c, r + 1, c + 1, kLocal});
        streets.push_back({r + 1, c + 1, r, c, kLocal});
      }
    }
  }

  const auto n = std::min<size_t>(static_cast<size_t>(params.n_segments), streets.size());
  net.segments.reserve(n);
  // segment endpoints (intersection keys) for adjacency derivation
  std::vector<std::pair<int, int>> head(n), tail(n);
  auto key = [g](int r, int c) { return r * g + c; };
  for (size_t i = 0; i < n; ++i) {
    const auto& st = streets[i];
    Segment s;
    s.id = "seg" + std::to_string(i);
    s.length_m = rng.uniform(params.seg_len_lo, params.seg_len_hi);
    s.priority = st.priority;
    tail[i] = {key(st.from_r, st.from_c), 0};
    head[i] = {key(st.to_r, st.to_c), 0};
    net.index_of[s.id] = static_cast<int32_t>(i);
    net.segments.push_back(std::move(s));
  }

  // a -> b when b departs from a's head intersection; skip exact U-turns
  std::unordered_map<int, std::vector<int32_t>> by_tail;
  for (size_t i = 0; i < n; ++i) by_tail[tail[i].first].push_back(static_cast<int32_t>(i));
  for (size_t a = 0; a < n; ++a) {
    auto it = by_tail.find(head[a].first);
    if (it == by_tail.end()) continue;
    for (auto b : it->second) {
      if (static_cast<size_t>(b) == a) continue;
      if (head[static_cast<size_t>(b)].first == tail[a].first &&
          tail[static_cast<size_t>(b)].first == head[a].first)
        continue;  // U-turn
      net.adjacency.emplace_back(static_cast<int32_t>(a), b);
    }
  }
  std::sort(net.adjacency.begin(), net.adjacency.end());
  net.region.assign(net.segments.size(), 0);
  net.rebuild_adjacency_index();
  return net;
}

void save_network(const std::string& path, const RoadNetwork& net) {
  nlohmann::json j;
  j["format"] = "roadeta-network";
  j["version"] = 1;
  auto& segs = j["segments"] = nlohmann::json::array();
  for (const auto& s : net.segments)
    segs.push_back({{"id", s.id}, {"length_m", s.length_m}, {"priority", s.priority}});
  auto& adj = j["adjacency"] = nlohmann::json::array();
  for (auto [a, b] : net.adjacency) adj.push_back({a, b});
  j["regions"] = net.region;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open network file for write: " + path);
  os << j.dump() << "\n";
}

RoadNetwork load_network(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open network file: " + path);
  nlohmann::json j;
  is >> j;
  RoadNetwork net;
  int32_t idx = 0;
  for (const auto& sj : j.at("segments")) {
    Segment s;
    s.id = sj.at("id").get<std::string>();
    s.length_m = sj.at("length_m").get<double>();
    s.priority = sj.at("priority").get<int>();
    net.index_of[s.id] = idx++;
    net.segments.push_back(std::move(s));
  }
  for (const auto& ej : j.at("adjacency"))
    net.adjacency.emplace_back(ej.at(0).get<int32_t>(), ej.at(1).get<int32_t>());
  net.region = j.value("regions", std::vector<int32_t>(net.segments.size(), 0));
  net.rebuild_adjacency_index();
  return net;
}

// ---------------------------------------------------------------------------
// traffic simulation

namespace {

double daily_factor(double tod_s, const TrafficProfile& p) {
  double tod_h = tod_s / 3600.0;
  double f = 1.0;
  auto lobe = [&](double center, double depth) {
    double d = std::abs(tod_h - center);
    d = std::min(d, 24.0 - d);  // wrap
    if (d < p.dip_width_h) f -= depth * 0.5 * (1.0 + std::cos(M_PI * d / p.dip_width_h));
  };
  lobe(p.am_center_h, p.am_depth);
  lobe(p.pm_center_h, p.pm_depth);
  return std::max(f, 0.05);
}

struct Incident {
  int32_t segment;
  int64_t start_s;  // within-day
  int64_t duration_s;
  double factor;
};

std::vector<Incident> draw_incidents(const RoadNetwork& net, uint64_t day_seed,
                                     const TrafficProfile& p) {
  Rng rng(day_seed);
  std::vector<Incident> out;
  if (p.incidents_per_day <= 0.0 || net.segments.empty()) return out;
  int count = rng.poisson(p.incidents_per_day);
  out.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    Incident inc;
    inc.segment = static_cast<int32_t>(rng.uniform_int(static_cast<int64_t>(net.segments.size())));
    inc.start_s = rng.uniform_int(kDayS);
    inc.duration_s = p.incident_min_s + rng.uniform_int(p.incident_max_s - p.incident_min_s + 1);
    double jitter = rng.uniform(-p.incident_factor_jitter, p.incident_factor_jitter);
    inc.factor = std::clamp(p.incident_factor + jitter, 0.05, 0.95);
    out.push_back(inc);
  }
  return out;
}

// per-segment list of (start, end, factor) effects after upstream diffusion
using EffectLists = std::vector<std::vector<std::array<double, 3>>>;

EffectLists diffuse_incidents(const RoadNetwork& net, const std::vector<Incident>& incidents,
                              const TrafficProfile& p) {
  EffectLists effects(net.segments.size());
  for (const auto& inc : incidents) {
    // BFS upstream (queues form behind the incident)
    std::vector<std::pair<int32_t, int>> frontier{{inc.segment, 0}};
    std::unordered_set<int32_t> seen{inc.segment};
    for (size_t qi = 0; qi < frontier.size(); ++qi) {
      auto [seg, hop] = frontier[qi];
      double f = 1.0 - (1.0 - inc.factor) * std::pow(p.hop_decay, hop);
      double onset = static_cast<double>(inc.start_s + hop * p.hop_delay_s);
      effects[static_cast<size_t>(seg)].push_back(
          {onset, onset + static_cast<double>(inc.duration_s), f});
      if (hop >= p.max_hops) continue;
      for (auto prev : net.in_adj[static_cast<size_t>(seg)]) {
        if (seen.insert(prev).second) frontier.emplace_back(prev, hop + 1);
      }
    }
  }
  return effects;
}

// one day of per-tick speeds for every segment, appended to out[seg]
void simulate_day(const RoadNetwork& net, const std::vector<float>& free_flow, uint64_t day_seed,
                  const TrafficProfile& p, int32_t tick_s, int ticks_per_day,
                  std::vector<std::vector<float>>& out) {
  auto effects = diffuse_incidents(net, draw_incidents(net, day_seed, p), p);
  for (size_t seg = 0; seg < net.segments.size(); ++seg) {
    auto& list = effects[seg];
    std::sort(list.begin(), list.end());
    for (int tk = 0; tk < ticks_per_day; ++tk) {
      double tod = (static_cast<double>(tk) + 0.5) * tick_s;
      double f = daily_factor(tod, p);
      double worst = 1.0;
      for (const auto& e : list) {
        if (tod >= e[0] && tod < e[1]) worst = std::min(worst, e[2]);
        if (e[0] > tod) break;
      }
      out[seg].push_back(static_cast<float>(free_flow[seg] * f * worst));
    }
  }
}

}  // namespace

SpeedField simulate_traffic(const RoadNetwork& net, uint64_t seed, int days,
                            const TrafficProfile& profile) {
  if (days < 1) throw InvalidParams("days must be >= 1");
  SpeedField field;
  field.tick_s = 60;
  field.start_s = 0;
  field.n_segments = static_cast<int32_t>(net.segments.size());
  const int ticks_per_day = static_cast<int>(kDayS / field.tick_s);
  field.n_ticks = static_cast<int64_t>(days) * ticks_per_day;
  field.hist_ticks = ticks_per_day;

  Rng ff_rng(derive_seed(seed, "free_flow"));
  field.free_flow.reserve(net.segments.size());
  for (const auto& s : net.segments)
    field.free_flow.push_back(static_cast<float>(free_flow_for_priority(s.priority, ff_rng)));

  // live days
  std::vector<std::vector<float>> rows(net.segments.size());
  for (auto& r : rows) r.reserve(static_cast<size_t>(field.n_ticks));
  for (int d = 0; d < days; ++d)
    simulate_day(net, field.free_flow, derive_seed(seed, "live", static_cast<uint64_t>(d)),
                 profile, field.tick_s, ticks_per_day, rows);
  field.speeds.resize(static_cast<size_t>(field.n_segments) * static_cast<size_t>(field.n_ticks));
  for (size_t seg = 0; seg < rows.size(); ++seg)
    std::copy(rows[seg].begin(), rows[seg].end(),
              field.speeds.begin() + static_cast<int64_t>(seg) * field.n_ticks);

  // historical profile: mean over hist_days independent days at each tick
  if (profile.hist_days > 0) {
    std::vector<double> acc(static_cast<size_t>(field.n_segments) * ticks_per_day, 0.0);
    for (int d = 0; d < profile.hist_days; ++d) {
      std::vector<std::vector<float>> hrows(net.segments.size());
      for (auto& r : hrows) r.reserve(static_cast<size_t>(ticks_per_day));
      simulate_day(net, field.free_flow, derive_seed(seed, "hist", static_cast<uint64_t>(d)),
                   profile, field.tick_s, ticks_per_day, hrows);
      for (size_t seg = 0; seg < hrows.size(); ++seg)
        for (int tk = 0; tk < ticks_per_day; ++tk)
          acc[seg * static_cast<size_t>(ticks_per_day) + static_cast<size_t>(tk)] +=
              hrows[seg][static_cast<size_t>(tk)];
    }
    field.hist_profile.resize(acc.size());
    for (size_t i = 0; i < acc.size(); ++i)
      field.hist_profile[i] = static_cast<float>(acc[i] / profile.hist_days);
  }
  return field;
}

TravelTimes ground_truth_travel_time(const SpeedField& field, const RoadNetwork& net,
                                     const Supersegment& ss, int64_t departure_s) {
  TravelTimes out;
  out.y_seg.reserve(ss.nodes.size());
  double clock = static_cast<double>(departure_s);
  for (const auto& node : ss.nodes) {
    int32_t seg = net.require_index(node);
    double remaining = net.segments[static_cast<size_t>(seg)].length_m;
    double entered = clock;
    while (remaining > 0.0) {
      if (clock >= static_cast<double>(field.end_s()) || clock < static_cast<double>(field.start_s))
        throw FieldExhausted("traversal ran off the speed field");
      int64_t tick = (static_cast<int64_t>(clock) - field.start_s) / field.tick_s;
      double tick_end = static_cast<double>(field.start_s + (tick + 1) * field.tick_s);
      double v = field.speeds[static_cast<size_t>(seg) * static_cast<size_t>(field.n_ticks) +
                              static_cast<size_t>(tick)];
      double dt = tick_end - clock;
      if (v * dt >= remaining) {
        clock += remaining / v;
        remaining = 0.0;
      } else {
        remaining -= v * dt;
        clock = tick_end;
      }
    }
    out.y_seg.push_back(clock - entered);
  }
  for (double y : out.y_seg) out.y_ss += y;
  return out;
}

std::vector<Supersegment> mine_supersegments(const RoadNetwork& net, uint64_t seed,
                                             const MiningParams& params) {
  if (params.count < 0 || params.min_len < 1 || params.max_len < params.min_len)
    throw InvalidParams("bad mining params");
  Rng rng(derive_seed(seed, "mining"));
  std::vector<Supersegment> out;
  std::unordered_set<uint64_t> dedup;
  const auto n = static_cast<int64_t>(net.segments.size());
  if (n == 0) return out;

  // start sampling weighted by (1 + 2*priority)
  std::vector<double> start_w(static_cast<size_t>(n));
  double total_w = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    start_w[static_cast<size_t>(i)] = 1.0 + 2.0 * net.segments[static_cast<size_t>(i)].priority;
    total_w += start_w[static_cast<size_t>(i)];
  }

  int64_t attempts = 0;
  const int64_t max_attempts = 200ll * std::max<int64_t>(params.count, 1);
  while (static_cast<int32_t>(out.size()) < params.count && attempts++ < max_attempts) {
    double pick = rng.uniform() * total_w;
    int32_t cur = 0;
    for (int64_t i = 0; i < n; ++i) {
      pick -= start_w[static_cast<size_t>(i)];
      if (pick <= 0.0) {
        cur = static_cast<int32_t>(i);
        break;
      }
    }
    int target_len = params.min_len +
                     static_cast<int>(rng.uniform_int(params.max_len - params.min_len + 1));
    std::vector<int32_t> walk{cur};
    std::unordered_set<int32_t> visited{cur};
    while (static_cast<int>(walk.size()) < target_len) {
      const auto& succ = net.out_adj[static_cast<size_t>(cur)];
      std::vector<int32_t> options;
      std::vector<double> w;
      double wt = 0.0;
      for (auto nb : succ) {
        if (visited.count(nb)) continue;
        options.push_back(nb);
        double ww = 1.0 + 2.0 * net.segments[static_cast<size_t>(nb)].priority;
        w.push_back(ww);
        wt += ww;
      }
      if (options.empty()) break;
      double p2 = rng.uniform() * wt;
      int32_t next = options.back();
      for (size_t k = 0; k < options.size(); ++k) {
        p2 -= w[k];
        if (p2 <= 0.0) {
          next = options[k];
          break;
        }
      }
      walk.push_back(next);
      visited.insert(next);
      cur = next;
    }
    if (static_cast<int>(walk.size()) < params.min_len) continue;

    uint64_t h = 14695981039346656037ull;
    for (auto sidx : walk) {
      h ^= static_cast<uint64_t>(sidx);
      h *= 1099511628211ull;
    }
    if (!dedup.insert(h).second) continue;

    Supersegment ss;
    ss.id = "ss" + std::to_string(out.size());
    ss.nodes.reserve(walk.size());
    for (auto sidx : walk) ss.nodes.push_back(net.segments[static_cast<size_t>(sidx)].id);
    for (int32_t i = 0; i + 1 < static_cast<int32_t>(walk.size()); ++i)
      ss.edges.emplace_back(i, i + 1);
    out.push_back(std::move(ss));
  }
  return out;
}

}  // namespace roadeta
