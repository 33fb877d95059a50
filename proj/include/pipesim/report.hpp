#pragma once

/// @file
/// Run statistics, scheme comparison and their JSON / text renderings.

#include <cstdint>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "pipesim/hazard.hpp"

namespace pipesim {

/// Cycles in which WB saw a bubble, by the cause that injected it.
struct BubbleCounters {
  std::uint64_t load_use_stall_cycles = 0;
  std::uint64_t branch_flush_cycles = 0;
  std::uint64_t cache_miss_stall_cycles = 0;
  std::uint64_t nobypass_interlock_cycles = 0;

  std::uint64_t total() const {
    return load_use_stall_cycles + branch_flush_cycles + cache_miss_stall_cycles + nobypass_interlock_cycles;
  }

  friend bool operator==(const BubbleCounters&, const BubbleCounters&) = default;
};

/// Summary of one pipeline run. `cycles` is the cycle in which the halting
/// instruction completed WB, counting the first fetch as cycle 1, so a
/// hazard-free run of N instructions takes N + 4 cycles.
struct RunReport {
  SchemeId scheme = SchemeId::STALL;
  std::uint64_t cycles = 0;
  std::uint64_t retired = 0;
  double cpi = 0.0;
  BubbleCounters bubbles;
  std::uint64_t load_use_events = 0;  // retired load immediately followed by a reader of its rd
  std::uint64_t final_state_digest = 0;
  bool halted_cleanly = false;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

inline double compute_cpi(std::uint64_t cycles, std::uint64_t retired) {
  return retired == 0 ? 0.0 : static_cast<double>(cycles) / static_cast<double>(retired);
}

/// `speedup_pct` divides by the candidate's cycles (the convention behind a
/// +6.9% rate for 247888 -> 231862 clocks); `reduction_pct` divides by the
/// baseline's.
struct ComparisonReport {
  RunReport baseline;
  RunReport candidate;
  double speedup_pct = 0.0;
  double reduction_pct = 0.0;
  bool states_match = false;
};

/// Two runs that should agree architecturally but do not.
class StateMismatch : public std::runtime_error {
 public:
  StateMismatch(const RunReport& baseline, const RunReport& candidate)
      : std::runtime_error(message(baseline, candidate)), baseline_(baseline), candidate_(candidate) {}

  const RunReport& baseline() const noexcept { return baseline_; }
  const RunReport& candidate() const noexcept { return candidate_; }

 private:
  static std::string message(const RunReport& b, const RunReport& c) {
    std::ostringstream os;
    os << "architectural state mismatch: " << scheme_name(b.scheme) << " digest " << std::hex
       << b.final_state_digest << " retired " << std::dec << b.retired << " vs " << scheme_name(c.scheme)
       << " digest " << std::hex << c.final_state_digest << " retired " << std::dec << c.retired;
    return os.str();
  }

  RunReport baseline_;
  RunReport candidate_;
};

/// Throws StateMismatch when the two runs disagree on final state or
/// retired count.
inline ComparisonReport compare(const RunReport& baseline, const RunReport& candidate) {
  if (baseline.final_state_digest != candidate.final_state_digest || baseline.retired != candidate.retired) {
    throw StateMismatch(baseline, candidate);
  }
  ComparisonReport r;
  r.baseline = baseline;
  r.candidate = candidate;
  r.states_match = true;
  const auto diff = static_cast<double>(baseline.cycles) - static_cast<double>(candidate.cycles);
  r.speedup_pct = candidate.cycles == 0 ? 0.0 : diff / static_cast<double>(candidate.cycles) * 100.0;
  r.reduction_pct = baseline.cycles == 0 ? 0.0 : diff / static_cast<double>(baseline.cycles) * 100.0;
  return r;
}

/// Signed percentage with a fixed number of decimals, e.g. "+6.9%".
inline std::string format_pct(double pct, int decimals) {
  std::ostringstream os;
  os << std::showpos << std::fixed << std::setprecision(decimals) << pct << '%';
  return os.str();
}

// ---------------------------------------------------------------------------
// JSON

using ordered_json = nlohmann::ordered_json;

inline std::string digest_string(std::uint64_t digest) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

inline ordered_json to_json(const RunReport& r) {
  ordered_json j;
  j["scheme"] = std::string(scheme_name(r.scheme));
  j["cycles"] = r.cycles;
  j["retired"] = r.retired;
  j["cpi"] = r.cpi;
  j["bubbles"] = ordered_json{
      {"load_use", r.bubbles.load_use_stall_cycles},
      {"branch_flush", r.bubbles.branch_flush_cycles},
      {"cache_miss", r.bubbles.cache_miss_stall_cycles},
      {"interlock", r.bubbles.nobypass_interlock_cycles},
  };
  j["load_use_events"] = r.load_use_events;
  j["digest"] = digest_string(r.final_state_digest);
  j["halted"] = r.halted_cleanly;
  return j;
}

inline ordered_json to_json(const ComparisonReport& c) {
  ordered_json j;
  j["baseline"] = to_json(c.baseline);
  j["candidate"] = to_json(c.candidate);
  j["speedup_pct"] = c.speedup_pct;
  j["reduction_pct"] = c.reduction_pct;
  j["states_match"] = c.states_match;
  return j;
}

/// Inverse of to_json(RunReport). Throws nlohmann::json exceptions or
/// std::invalid_argument on malformed input.
inline RunReport run_report_from_json(const nlohmann::json& j) {
  RunReport r;
  const auto scheme = parse_scheme(j.at("scheme").get<std::string>());
  if (!scheme) throw std::invalid_argument("unknown scheme in report");
  r.scheme = *scheme;
  r.cycles = j.at("cycles").get<std::uint64_t>();
  r.retired = j.at("retired").get<std::uint64_t>();
  r.cpi = j.at("cpi").get<double>();
  const auto& b = j.at("bubbles");
  r.bubbles.load_use_stall_cycles = b.at("load_use").get<std::uint64_t>();
  r.bubbles.branch_flush_cycles = b.at("branch_flush").get<std::uint64_t>();
  r.bubbles.cache_miss_stall_cycles = b.at("cache_miss").get<std::uint64_t>();
  r.bubbles.nobypass_interlock_cycles = b.at("interlock").get<std::uint64_t>();
  r.load_use_events = j.at("load_use_events").get<std::uint64_t>();
  r.final_state_digest = std::stoull(j.at("digest").get<std::string>(), nullptr, 16);
  r.halted_cleanly = j.at("halted").get<bool>();
  return r;
}

inline std::string emit_json(const RunReport& r) { return to_json(r).dump(2); }
inline std::string emit_json(const ComparisonReport& c) { return to_json(c).dump(2); }

// ---------------------------------------------------------------------------
// Text table

/// One column per run, then one optimization-rate line per comparison.
inline std::string render_table(const std::vector<RunReport>& runs, const std::vector<ComparisonReport>& comparisons,
                                int decimals = 2) {
  std::ostringstream os;
  constexpr int kLabel = 26;
  constexpr int kCol = 20;
  const auto row = [&](const std::string& label, auto cell) {
    os << std::left << std::setw(kLabel) << label << std::right;
    for (const auto& r : runs) os << std::setw(kCol) << cell(r);
    os << '\n';
  };

  os << std::left << std::setw(kLabel) << "scheme" << std::right;
  for (const auto& r : runs) os << std::setw(kCol) << scheme_name(r.scheme);
  os << '\n';
  row("cycles", [](const RunReport& r) { return std::to_string(r.cycles); });
  row("retired", [](const RunReport& r) { return std::to_string(r.retired); });
  row("CPI", [](const RunReport& r) {
    std::ostringstream c;
    c << std::fixed << std::setprecision(6) << r.cpi;
    return c.str();
  });
  row("load-use stall cycles", [](const RunReport& r) { return std::to_string(r.bubbles.load_use_stall_cycles); });
  row("branch flush cycles", [](const RunReport& r) { return std::to_string(r.bubbles.branch_flush_cycles); });
  row("cache miss stall cycles", [](const RunReport& r) { return std::to_string(r.bubbles.cache_miss_stall_cycles); });
  row("interlock stall cycles", [](const RunReport& r) { return std::to_string(r.bubbles.nobypass_interlock_cycles); });
  row("load-use events", [](const RunReport& r) { return std::to_string(r.load_use_events); });
  row("state digest", [](const RunReport& r) { return digest_string(r.final_state_digest); });

  for (const auto& c : comparisons) {
    os << (&c == &comparisons.front() ? "\n" : "")
       << scheme_name(c.candidate.scheme) << " vs " << scheme_name(c.baseline.scheme) << ": cycles "
       << c.baseline.cycles << " -> " << c.candidate.cycles << ", optimization rate "
       << format_pct(c.speedup_pct, decimals) << " (over candidate cycles), cycle reduction "
       << format_pct(c.reduction_pct, decimals) << " (over baseline cycles), states "
       << (c.states_match ? "match" : "DIFFER") << '\n';
  }
  return os.str();
}

}  // namespace pipesim
