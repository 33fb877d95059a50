#pragma once

/// @file
/// Hazard-resolution schemes for the 5-stage pipeline.
///
/// Each decision is a pure function of what the pipeline latches hold at the
/// start of a cycle:
///   - `id`    : the instruction in ID (held in the IF/ID latch)
///   - `idex`  : the instruction in EX (ID/EX latch), the operand consumer
///   - `exmem` : the instruction in MEM (EX/MEM latch)
///   - `memwb` : the instruction in WB (MEM/WB latch)
///
/// The pipeline resolves EX operands from the selected source and, when
/// `stall_id` is set, freezes IF/ID and sends a bubble into EX.

#include <cstdint>
#include <optional>
#include <string_view>

#include "pipesim/isa.hpp"

namespace pipesim {

enum class SchemeId : std::uint8_t {
  NO_BYPASS,  // interlock only, no forwarding
  STALL,      // EX-input forwarding plus the ID-stage load-use stall
  SSR,        // STALL's forwarding plus an EX-stage load detector, no load-use stall
};

inline constexpr SchemeId kAllSchemes[] = {SchemeId::NO_BYPASS, SchemeId::STALL, SchemeId::SSR};

constexpr std::string_view scheme_name(SchemeId s) {
  switch (s) {
    case SchemeId::NO_BYPASS: return "nobypass";
    case SchemeId::STALL: return "stall";
    case SchemeId::SSR: return "ssr";
  }
  return "?";
}

inline std::optional<SchemeId> parse_scheme(std::string_view name) {
  for (const auto s : kAllSchemes) {
    if (scheme_name(s) == name) return s;
  }
  return std::nullopt;
}

enum class ForwardSelect : std::uint8_t {
  REGFILE,       // value latched when the consumer left ID
  EXMEM_ALU,     // ALU result of the instruction in MEM
  MEM_LOADDATA,  // data the MEM stage loaded this cycle
  MEMWB_VALUE,   // value being written back this cycle
};

constexpr std::string_view forward_name(ForwardSelect f) {
  switch (f) {
    case ForwardSelect::REGFILE: return "regfile";
    case ForwardSelect::EXMEM_ALU: return "exmem_alu";
    case ForwardSelect::MEM_LOADDATA: return "mem_loaddata";
    case ForwardSelect::MEMWB_VALUE: return "memwb_value";
  }
  return "?";
}

/// What hazard logic needs to know about one pipeline slot.
struct StageView {
  bool valid = false;
  RegIndex rd = 0;
  bool writes_rd = false;  // register write enable; false when rd == x0
  bool is_load = false;
  RegIndex rs1 = 0;
  RegIndex rs2 = 0;
  bool reads_rs1 = false;
  bool reads_rs2 = false;

  static constexpr StageView of(const Instruction& in) {
    StageView v;
    v.valid = true;
    v.rd = in.rd;
    v.writes_rd = pipesim::writes_rd(in.op) && in.rd != 0;
    v.is_load = pipesim::is_load(in.op);
    v.rs1 = in.rs1;
    v.rs2 = in.rs2;
    v.reads_rs1 = pipesim::reads_rs1(in.op);
    v.reads_rs2 = pipesim::reads_rs2(in.op);
    return v;
  }

  /// True when this slot will write `reg` (never x0).
  constexpr bool produces(RegIndex reg) const { return valid && writes_rd && rd != 0 && rd == reg; }

  /// True when this slot reads `reg` as a source (never x0).
  constexpr bool consumes(RegIndex reg) const {
    return valid && reg != 0 && ((reads_rs1 && rs1 == reg) || (reads_rs2 && rs2 == reg));
  }
};

struct HazardDecision {
  bool stall_id = false;
  ForwardSelect fwd_rs1 = ForwardSelect::REGFILE;
  ForwardSelect fwd_rs2 = ForwardSelect::REGFILE;

  friend constexpr bool operator==(const HazardDecision&, const HazardDecision&) = default;
};

namespace detail {

/// EX-input forwarding shared by STALL and SSR. The younger producer (MEM)
/// wins over WB. `load_detector` enables the EX-stage load detector that
/// takes the MEM stage's loaded data; without it a load in MEM is not a
/// source, since the ID-stage stall keeps its consumers out of EX.
constexpr ForwardSelect select_forward(bool reads, RegIndex rs, const StageView& exmem, const StageView& memwb,
                                       bool load_detector) {
  if (!reads || rs == 0) return ForwardSelect::REGFILE;
  if (exmem.produces(rs)) {
    if (!exmem.is_load) return ForwardSelect::EXMEM_ALU;
    if (load_detector) return ForwardSelect::MEM_LOADDATA;
  }
  if (memwb.produces(rs)) return ForwardSelect::MEMWB_VALUE;
  return ForwardSelect::REGFILE;
}

}  // namespace detail

/// Traditional scheme: stall ID for one cycle when the instruction in EX is
/// a load whose rd the ID instruction reads; forward ALU results from MEM and
/// write-back values from WB into EX.
constexpr HazardDecision decide_traditional(const StageView& idex, const StageView& exmem, const StageView& memwb,
                                            const StageView& id) {
  HazardDecision d;
  d.stall_id = idex.is_load && idex.produces(idex.rd) && id.consumes(idex.rd);
  if (idex.valid) {
    d.fwd_rs1 = detail::select_forward(idex.reads_rs1, idex.rs1, exmem, memwb, false);
    d.fwd_rs2 = detail::select_forward(idex.reads_rs2, idex.rs2, exmem, memwb, false);
  }
  return d;
}

/// SSR: never stalls. For each operand the EX instruction reads, a nonzero
/// match against the MEM instruction's rd selects the loaded data when that
/// instruction is a load and its ALU result otherwise; failing that, a match
/// against WB selects the write-back value.
constexpr HazardDecision decide_ssr(const StageView& idex, const StageView& exmem, const StageView& memwb) {
  HazardDecision d;
  if (idex.valid) {
    d.fwd_rs1 = detail::select_forward(idex.reads_rs1, idex.rs1, exmem, memwb, true);
    d.fwd_rs2 = detail::select_forward(idex.reads_rs2, idex.rs2, exmem, memwb, true);
  }
  return d;
}

/// No forwarding at all: ID waits while EX or MEM holds a producer of one of
/// its sources. A producer in WB needs no stall because the register file is
/// written before ID reads it.
constexpr HazardDecision decide_no_bypass(const StageView& idex, const StageView& exmem, const StageView& memwb,
                                          const StageView& id) {
  (void)memwb;
  HazardDecision d;
  const auto blocked = [&](RegIndex reg) { return idex.produces(reg) || exmem.produces(reg); };
  d.stall_id = id.valid && ((id.reads_rs1 && id.rs1 != 0 && blocked(id.rs1)) ||
                            (id.reads_rs2 && id.rs2 != 0 && blocked(id.rs2)));
  return d;
}

constexpr HazardDecision decide(SchemeId scheme, const StageView& idex, const StageView& exmem,
                                const StageView& memwb, const StageView& id) {
  switch (scheme) {
    case SchemeId::NO_BYPASS: return decide_no_bypass(idex, exmem, memwb, id);
    case SchemeId::STALL: return decide_traditional(idex, exmem, memwb, id);
    case SchemeId::SSR: return decide_ssr(idex, exmem, memwb);
  }
  return {};
}

}  // namespace pipesim
