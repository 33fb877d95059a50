#pragma once

/// @file
/// Per-cycle pipeline occupancy table.
///
/// One row per cycle, columns IF | ID | EX | MEM | WB. A cell shows the
/// instruction in that stage, `*bub*` for an injected bubble, `=stall=` for a
/// stage held by a stall or miss, and `-` for an empty slot during fill or
/// drain.

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "pipesim/isa.hpp"
#include "pipesim/pipeline.hpp"

namespace pipesim {

inline constexpr std::string_view kBubbleCell = "*bub*";
inline constexpr std::string_view kStallCell = "=stall=";
inline constexpr std::string_view kEmptyCell = "-";
inline constexpr const char* kStageNames[5] = {"IF", "ID", "EX", "MEM", "WB"};

inline std::string cell_text(const CycleSnapshot::Cell& c) {
  switch (c.slot) {
    case CycleSnapshot::Slot::Empty: return std::string(kEmptyCell);
    case CycleSnapshot::Slot::Bubble: return std::string(kBubbleCell);
    case CycleSnapshot::Slot::Frozen: return std::string(kStallCell);
    case CycleSnapshot::Slot::Busy: return disassemble(c.instr);
  }
  return std::string(kEmptyCell);
}

class TraceRecorder {
 public:
  struct Row {
    std::uint64_t cycle = 0;
    std::string cells[5];
  };

  /// Observer to install on a Pipeline; the recorder must outlive the run.
  Pipeline::Observer observer() {
    return [this](const CycleSnapshot& snap) {
      Row row;
      row.cycle = snap.cycle;
      for (int i = 0; i < 5; ++i) row.cells[i] = cell_text(snap.stage[i]);
      rows_.push_back(std::move(row));
    };
  }

  const std::vector<Row>& rows() const noexcept { return rows_; }

  /// Column `stage` (0 = IF ... 4 = WB) over all cycles.
  std::vector<std::string> column(int stage) const {
    std::vector<std::string> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(r.cells[stage]);
    return out;
  }

  std::string render() const {
    std::size_t width = 8;
    for (const auto& r : rows_) {
      for (const auto& c : r.cells) width = std::max(width, c.size());
    }
    std::ostringstream os;
    os << std::setw(6) << "cycle";
    for (const char* name : kStageNames) os << " | " << std::left << std::setw(static_cast<int>(width)) << name;
    os << std::right << '\n';
    os << std::string(6, '-');
    for (int i = 0; i < 5; ++i) os << "-+-" << std::string(width, '-');
    os << '\n';
    for (const auto& r : rows_) {
      os << std::setw(6) << r.cycle;
      for (const auto& c : r.cells) os << " | " << std::left << std::setw(static_cast<int>(width)) << c;
      os << std::right << '\n';
    }
    return os.str();
  }

 private:
  std::vector<Row> rows_;
};

}  // namespace pipesim
