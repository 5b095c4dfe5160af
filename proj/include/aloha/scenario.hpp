#pragma once

// Dynamic-population experiments: every active user runs its own estimator
// and retunes its transmission probability at each interval boundary while
// the number of active users follows a stage timeline.
//
// Scenario file grammar (line oriented, '#' starts a comment):
//
//   [channel]      mpr = <int>  deadline = <int>
//   [estimator]    interval_len = <int>  memory_factor = <real>
//                  probe_low = <int>  probe_high = <int>  n_max = <int>
//   [timeline]     seed = <uint64>  total_intervals = <int>
//                  stage = <first>-<last> : <active users>   (repeatable)
//
// One `key = value` per line. Stages must tile 1..total_intervals in order.
// When a stage grows the population, the new users take the next user ids.
// When it shrinks, the highest ids leave.

#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aloha/analytic.hpp"
#include "aloha/csv.hpp"
#include "aloha/estimator.hpp"
#include "aloha/rng.hpp"
#include "aloha/sim.hpp"

namespace aloha {

struct Stage {
  int first_interval;
  int last_interval;
  int active_users;
};

struct ScenarioTimeline {
  std::vector<Stage> stages;
  int total_intervals = 0;
  EstimatorConfig estimator;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on any broken invariant.
  void validate() const {
    estimator.validate();
    if (total_intervals < 1) throw std::invalid_argument("total_intervals must be >= 1");
    if (stages.empty()) throw std::invalid_argument("timeline has no stages");
    int expected = 1;
    for (const auto& s : stages) {
      if (s.first_interval != expected || s.last_interval < s.first_interval) {
        throw std::invalid_argument("stages must tile 1..total_intervals in order; "
                                    "stage starting at " +
                                    std::to_string(s.first_interval) + " breaks this");
      }
      if (s.active_users <= estimator.mpr || s.active_users > estimator.n_max) {
        throw std::invalid_argument("stage active users must lie in (M, N_max]");
      }
      expected = s.last_interval + 1;
    }
    if (expected != total_intervals + 1) {
      throw std::invalid_argument("stages do not end at total_intervals");
    }
  }
};

class ScenarioParseError : public std::runtime_error {
 public:
  ScenarioParseError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view s, int line) {
  s = trim(s);
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ScenarioParseError(line, "expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

inline Stage parse_stage(std::string_view v, int line) {
  const auto colon = v.find(':');
  const auto range = v.substr(0, colon);
  const auto dash = range.find('-');
  if (colon == std::string_view::npos || dash == std::string_view::npos) {
    throw ScenarioParseError(line, "stage must look like '<first>-<last> : <users>'");
  }
  return {parse_number<int>(range.substr(0, dash), line),
          parse_number<int>(range.substr(dash + 1), line),
          parse_number<int>(v.substr(colon + 1), line)};
}

}  // namespace detail

/// Parses and validates a scenario. Errors name the offending line. A
/// consistency error that spans lines, such as a gap in the stages, names
/// the line of the last stage read.
inline ScenarioTimeline parse_scenario(std::istream& in) {
  using detail::parse_number;
  ScenarioTimeline t;
  std::string section;
  std::map<std::string, int> seen;  // "section.key" -> line
  int last_stage_line = 0;
  std::string raw;
  int line = 0;

  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = detail::trim(s);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']') throw ScenarioParseError(line, "unterminated section header");
      section = std::string(detail::trim(s.substr(1, s.size() - 2)));
      if (section != "channel" && section != "estimator" && section != "timeline") {
        throw ScenarioParseError(line, "unknown section [" + section + "]");
      }
      continue;
    }

    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ScenarioParseError(line, "expected 'key = value'");
    const std::string key(detail::trim(s.substr(0, eq)));
    const std::string_view val = detail::trim(s.substr(eq + 1));
    if (section.empty()) throw ScenarioParseError(line, "key outside of any section");

    const std::string qualified = section + "." + key;
    if (key != "stage" && !seen.emplace(qualified, line).second) {
      throw ScenarioParseError(line, "duplicate key '" + key + "'");
    }

    auto& e = t.estimator;
    if (qualified == "channel.mpr") {
      e.mpr = parse_number<int>(val, line);
    } else if (qualified == "channel.deadline") {
      e.deadline = parse_number<int>(val, line);
    } else if (qualified == "estimator.interval_len") {
      e.interval_len = parse_number<int>(val, line);
    } else if (qualified == "estimator.memory_factor") {
      e.memory_factor = parse_number<double>(val, line);
    } else if (qualified == "estimator.probe_low") {
      e.probe_low = parse_number<int>(val, line);
    } else if (qualified == "estimator.probe_high") {
      e.probe_high = parse_number<int>(val, line);
    } else if (qualified == "estimator.n_max") {
      e.n_max = parse_number<int>(val, line);
    } else if (qualified == "timeline.seed") {
      t.seed = parse_number<std::uint64_t>(val, line);
    } else if (qualified == "timeline.total_intervals") {
      t.total_intervals = parse_number<int>(val, line);
    } else if (qualified == "timeline.stage") {
      t.stages.push_back(detail::parse_stage(val, line));
      last_stage_line = line;
    } else {
      throw ScenarioParseError(line, "unknown key '" + key + "' in [" + section + "]");
    }
  }

  for (const char* required :
       {"channel.mpr", "channel.deadline", "estimator.interval_len",
        "estimator.memory_factor", "estimator.probe_low", "estimator.probe_high",
        "estimator.n_max", "timeline.seed", "timeline.total_intervals"}) {
    if (!seen.count(required)) {
      throw ScenarioParseError(line, std::string("missing required key '") + required + "'");
    }
  }
  try {
    t.validate();
  } catch (const std::invalid_argument& err) {
    throw ScenarioParseError(last_stage_line, err.what());
  }
  return t;
}

struct TraceRow {
  int interval;
  int user;
  int active_users;
  int n_est;      // estimate at the end of the interval
  double tau;     // probability in force during the interval
  std::optional<double> sdp;  // empty if no packet completed in the interval
};

struct StageStats {
  int stage;
  int first_interval;
  int last_interval;
  int active_users;
  double theoretical_max_sdp;
  double mean_sdp;  // over all (user, interval) samples in the stage
  double var_sdp;   // population variance of the same samples
  std::uint64_t samples;
};

struct DynamicResult {
  std::vector<TraceRow> trace;
  std::vector<StageStats> stages;
};

/// Runs the whole timeline on one seeded stream. Each interval's SDP for a
/// user counts only packets completed inside that interval. Stage
/// statistics pool every (user, interval) sample of the stage, including
/// transient intervals.
inline DynamicResult run_dynamic(const ScenarioTimeline& t) {
  t.validate();
  const auto& ec = t.estimator;
  const SlotRules rules{ec.mpr, ec.deadline};
  const EstimatorState fresh = init_state(ec);

  Rng rng(t.seed);
  std::vector<UserState> users;
  std::vector<EstimatorState> est;
  std::vector<UserSlotOutcome> out;
  DynamicResult res;
  res.trace.reserve(static_cast<std::size_t>(t.total_intervals) * 2 * t.stages.front().active_users);

  for (std::size_t si = 0; si < t.stages.size(); ++si) {
    const Stage& stage = t.stages[si];
    const double theory =
        solve_optimal_tau(ChannelConfig(stage.active_users, ec.mpr, ec.deadline)).sdp_max;
    double sum = 0.0;
    double sum_sq = 0.0;
    std::uint64_t samples = 0;

    const auto active = static_cast<std::size_t>(stage.active_users);
    users.resize(std::min(users.size(), active));
    est.resize(users.size());
    while (users.size() < active) {
      users.push_back(UserState{fresh.tau_current});
      est.push_back(fresh);
    }
    out.resize(active);

    for (int interval = stage.first_interval; interval <= stage.last_interval; ++interval) {
      for (auto& u : users) u.packets_completed = u.packets_succeeded = 0;
      for (int slot = 0; slot < ec.interval_len; ++slot) {
        step_slot(users, rules, rng, out);
        for (std::size_t u = 0; u < active; ++u) observe_slot(ec, est[u], out[u].observation);
      }
      for (std::size_t u = 0; u < active; ++u) {
        const double tau_used = users[u].tx_prob.value();
        const auto sdp = empirical_sdp(users[u]);
        end_interval(ec, est[u]);
        users[u].tx_prob = est[u].tau_current;
        res.trace.push_back({interval, static_cast<int>(u), stage.active_users,
                             est[u].n_est, tau_used, sdp});
        if (sdp) {
          sum += *sdp;
          sum_sq += *sdp * *sdp;
          ++samples;
        }
      }
    }

    const double mean = samples ? sum / samples : 0.0;
    const double var = samples ? std::max(0.0, sum_sq / samples - mean * mean) : 0.0;
    res.stages.push_back({static_cast<int>(si + 1), stage.first_interval, stage.last_interval,
                          stage.active_users, theory, mean, var, samples});
  }
  return res;
}

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
  csv::Writer w(os);
  for (const char* h : {"interval", "user", "active_users", "n_est", "tau", "sdp"}) w.field(h);
  w.end_row();
  for (const auto& r : rows) {
    w.field(r.interval).field(r.user).field(r.active_users).field(r.n_est).field(r.tau)
        .field(r.sdp);
    w.end_row();
  }
}

inline void write_stage_csv(std::ostream& os, const std::vector<StageStats>& rows) {
  csv::Writer w(os);
  for (const char* h : {"stage", "first_interval", "last_interval", "active_users",
                        "theoretical_max_sdp", "mean_sdp", "var_sdp", "samples"}) {
    w.field(h);
  }
  w.end_row();
  for (const auto& r : rows) {
    w.field(r.stage).field(r.first_interval).field(r.last_interval).field(r.active_users)
        .field(r.theoretical_max_sdp).field(r.mean_sdp).field(r.var_sdp).field(r.samples);
    w.end_row();
  }
}

}  // namespace aloha
