#pragma once

/// @file
/// Cycle-accurate 5-stage (IF, ID, EX, MEM, WB) in-order pipeline.
///
/// Within one tick the stages are evaluated back to front:
///   1. WB writes the register file.
///   2. MEM performs its access, or counts down an outstanding miss.
///   3. EX executes with operands chosen by the hazard scheme. A load that
///      finished MEM in step 2 can feed EX in the same cycle (SSR).
///   4. ID reads the register file, so it sees step 1's write.
///   5. IF fetches.
/// Latches then advance. A MEM miss freezes IF, ID and EX and sends bubbles
/// into WB. An ID stall freezes IF/ID and sends a bubble into EX. A taken
/// branch or jump, resolved in EX, squashes IF/ID and ID/EX.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "pipesim/arch_state.hpp"
#include "pipesim/errors.hpp"
#include "pipesim/exec.hpp"
#include "pipesim/hazard.hpp"
#include "pipesim/image.hpp"
#include "pipesim/isa.hpp"
#include "pipesim/memory.hpp"
#include "pipesim/report.hpp"

namespace pipesim {

inline constexpr std::uint64_t kDefaultMaxCycles = 10'000'000;

struct RunConfig {
  CacheConfig cache;
  std::uint64_t max_cycles = kDefaultMaxCycles;
  Presets presets;
};

/// An inter-stage latch. An invalid latch is a hole: either a bubble that a
/// stall, flush or miss injected, or an empty slot during fill and drain.
struct StageLatch {
  bool valid = false;
  bool bubble = false;
  Instruction instr{};
  Address pc = 0;
  Word rs1_val = 0;
  Word rs2_val = 0;
  Word alu_result = 0;  // ALU value, link address, or effective address
  Word mem_result = 0;  // extended load data once MEM has read it
  bool rd_write_enable = false;

  static StageLatch make_bubble() {
    StageLatch l;
    l.bubble = true;
    return l;
  }

  StageView view() const { return valid ? StageView::of(instr) : StageView{}; }

  /// Value this instruction writes back.
  Word writeback_value() const { return is_load(instr.op) ? mem_result : alu_result; }
};

struct PipelineState {
  Address pc = 0;
  StageLatch ifid, idex, exmem, memwb;
  ArchState arch;
  std::uint64_t cycle = 0;  // ticks completed
  std::uint32_t mem_stall_remaining = 0;
  bool mem_accessed = false;  // the EX/MEM instruction has issued its access
  bool fetch_halted = false;  // ECALL has left ID; nothing younger is fetched
  BubbleCounters counters;
  std::uint64_t load_use_events = 0;
  RegIndex last_retired_load_rd = 0;
};

/// What happened to each stage in one tick, for trace rendering.
struct CycleSnapshot {
  enum class Slot { Empty, Bubble, Busy, Frozen };
  struct Cell {
    Slot slot = Slot::Empty;
    Instruction instr{};
    Address pc = 0;
  };

  std::uint64_t cycle = 0;  // 1-based
  Cell stage[5];            // IF, ID, EX, MEM, WB
  HazardDecision decision;
};

class CycleLimitExceeded : public SimError {
 public:
  CycleLimitExceeded(Address pc, std::uint64_t cycle, RunReport partial)
      : SimError(SimErrorKind::NonTermination, pc, cycle, "no ecall retired within the cycle limit"),
        partial_(partial) {}

  const RunReport& partial() const noexcept { return partial_; }

 private:
  RunReport partial_;
};

class Pipeline {
 public:
  using Observer = std::function<void(const CycleSnapshot&)>;

  Pipeline(const MemoryImage& image, SchemeId scheme, const RunConfig& config = {})
      : scheme_(scheme), max_cycles_(config.max_cycles), dmem_cache_(config.cache) {
    if (max_cycles_ == 0) throw std::invalid_argument("max_cycles must be > 0");
    state_.arch = make_initial_state(image, config.presets);
    state_.pc = image.entry;
    dmem_.emplace(state_.arch.mem, dmem_cache_);
  }

  // DataMemory points into state_.arch.
  Pipeline(const Pipeline&) = delete;
  Pipeline& operator=(const Pipeline&) = delete;

  void set_observer(Observer observer) { observer_ = std::move(observer); }

  SchemeId scheme() const noexcept { return scheme_; }
  const PipelineState& state() const noexcept { return state_; }
  bool halted() const noexcept { return state_.arch.halted; }
  const DataMemory& data_memory() const { return *dmem_; }

  /// Advances one clock edge.
  void tick() {
    if (halted()) throw std::logic_error("tick() on a halted pipeline");
    PipelineState& s = state_;
    const std::uint64_t cycle = s.cycle + 1;
    CycleSnapshot snap;
    snap.cycle = cycle;
    const auto busy = [](const StageLatch& l) {
      CycleSnapshot::Cell c;
      c.slot = l.valid ? CycleSnapshot::Slot::Busy
                       : (l.bubble ? CycleSnapshot::Slot::Bubble : CycleSnapshot::Slot::Empty);
      c.instr = l.instr;
      c.pc = l.pc;
      return c;
    };
    snap.stage[1] = busy(s.ifid);
    snap.stage[2] = busy(s.idex);
    snap.stage[3] = busy(s.exmem);
    snap.stage[4] = busy(s.memwb);

    // (1) WB
    if (s.memwb.valid) retire(s.memwb);
    if (s.arch.halted) {
      s.cycle = cycle;
      publish(snap);
      return;
    }

    // (2) MEM
    const bool mem_frozen = mem_stage(cycle);

    const StageView id_view = s.ifid.view();
    const StageView ex_view = s.idex.view();
    const StageView mem_view = s.exmem.view();
    const StageView wb_view = s.memwb.view();
    const HazardDecision d = decide(scheme_, ex_view, mem_view, wb_view, id_view);
    snap.decision = d;

    if (mem_frozen) {
      // Hold IF, ID and EX. A WB value this EX instruction forwards from is
      // gone next cycle, so capture it into the held ID/EX latch now.
      if (s.idex.valid) {
        if (d.fwd_rs1 == ForwardSelect::MEMWB_VALUE) s.idex.rs1_val = s.memwb.writeback_value();
        if (d.fwd_rs2 == ForwardSelect::MEMWB_VALUE) s.idex.rs2_val = s.memwb.writeback_value();
      }
      s.memwb = StageLatch::make_bubble();
      ++s.counters.cache_miss_stall_cycles;
      snap.stage[0] = fetch_cell(/*frozen=*/true);
      if (snap.stage[1].slot != CycleSnapshot::Slot::Empty) snap.stage[1].slot = CycleSnapshot::Slot::Frozen;
      if (snap.stage[2].slot != CycleSnapshot::Slot::Empty) snap.stage[2].slot = CycleSnapshot::Slot::Frozen;
      s.cycle = cycle;
      publish(snap);
      check_cycle_limit();
      return;
    }

    // (3) EX
    std::optional<Address> redirect;
    const StageLatch ex_out = s.idex.valid ? execute(d, cycle, redirect) : s.idex;

    // (4) ID: register file read after this cycle's write-back.
    StageLatch id_out = s.ifid;
    if (id_out.valid) {
      id_out.rs1_val = s.arch.regs[id_out.instr.rs1];
      id_out.rs2_val = s.arch.regs[id_out.instr.rs2];
      id_out.rd_write_enable = writes_rd(id_out.instr.op) && id_out.instr.rd != 0;
    }

    // (5) IF and latch update.
    snap.stage[0] = fetch_cell(d.stall_id && !redirect);
    s.memwb = s.exmem;
    s.exmem = ex_out;
    s.mem_accessed = false;
    if (redirect) {
      s.idex = StageLatch::make_bubble();
      s.ifid = StageLatch::make_bubble();
      s.pc = *redirect;
      s.counters.branch_flush_cycles += 2;
    } else if (d.stall_id) {
      s.idex = StageLatch::make_bubble();
      if (scheme_ == SchemeId::NO_BYPASS) {
        ++s.counters.nobypass_interlock_cycles;
      } else {
        ++s.counters.load_use_stall_cycles;
      }
      snap.stage[1].slot = CycleSnapshot::Slot::Frozen;
    } else {
      s.idex = id_out;
      if (id_out.valid && id_out.instr.op == Op::ECALL) s.fetch_halted = true;
      if (s.fetch_halted) {
        s.ifid = StageLatch{};
      } else {
        s.ifid = fetch();
        s.pc += 4;
      }
    }
    s.cycle = cycle;
    publish(snap);
    check_cycle_limit();
  }

  /// Ticks until ECALL retires. Throws CycleLimitExceeded with a partial
  /// report once max_cycles ticks pass without halting.
  RunReport run() {
    while (!halted()) tick();
    return report();
  }

  RunReport report() const {
    RunReport r;
    r.scheme = scheme_;
    r.cycles = state_.cycle;
    r.retired = state_.arch.retired;
    r.cpi = compute_cpi(r.cycles, r.retired);
    r.bubbles = state_.counters;
    r.load_use_events = state_.load_use_events;
    r.final_state_digest = state_digest(state_.arch);
    r.halted_cleanly = state_.arch.halted;
    return r;
  }

 private:
  void retire(const StageLatch& wb) {
    PipelineState& s = state_;
    if (wb.rd_write_enable) s.arch.set_reg(wb.instr.rd, wb.writeback_value());
    ++s.arch.retired;
    if (s.last_retired_load_rd != 0 && reads_reg(wb.instr, s.last_retired_load_rd)) ++s.load_use_events;
    s.last_retired_load_rd = is_load(wb.instr.op) ? wb.instr.rd : 0;
    if (wb.instr.op == Op::ECALL) {
      s.arch.halted = true;
      s.arch.pc = wb.pc;
    }
  }

  /// Returns true while an outstanding miss holds the MEM stage.
  bool mem_stage(std::uint64_t cycle) {
    PipelineState& s = state_;
    StageLatch& m = s.exmem;
    if (!m.valid) return false;
    const unsigned width = access_width(m.instr.op);
    if (width == 0) return false;
    if (s.mem_accessed) {
      if (s.mem_stall_remaining > 0) --s.mem_stall_remaining;
      return s.mem_stall_remaining > 0;
    }
    const Address addr = m.alu_result;
    if (addr % width != 0) {
      throw SimError(SimErrorKind::MisalignedAccess, m.pc, cycle, "address " + hex32(addr));
    }
    AccessResult r;
    if (is_load(m.instr.op)) {
      r = dmem_->access(addr, width, AccessKind::Read);
      m.mem_result = exec::extend_load(m.instr.op, r.value);
    } else {
      r = dmem_->access(addr, width, AccessKind::Write, m.rs2_val);
    }
    s.mem_accessed = true;
    s.mem_stall_remaining = r.latency - 1;
    return s.mem_stall_remaining > 0;
  }

  Word operand(ForwardSelect sel, Word latched) const {
    switch (sel) {
      case ForwardSelect::REGFILE: return latched;
      case ForwardSelect::EXMEM_ALU: return state_.exmem.alu_result;
      case ForwardSelect::MEM_LOADDATA: return state_.exmem.mem_result;
      case ForwardSelect::MEMWB_VALUE: return state_.memwb.writeback_value();
    }
    return latched;
  }

  StageLatch execute(const HazardDecision& d, std::uint64_t cycle, std::optional<Address>& redirect) {
    PipelineState& s = state_;
    StageLatch out = s.idex;
    const Instruction& in = out.instr;

    if (scheme_ == SchemeId::STALL) {
      // The ID-stage stall must keep a load's consumer out of EX while the
      // load is in MEM; reaching here means the stall logic is broken.
      const StageView mem = s.exmem.view();
      if (mem.is_load && s.idex.view().consumes(mem.rd) && mem.produces(mem.rd)) {
        throw std::logic_error("load-use consumer reached EX under the stall scheme at cycle " +
                               std::to_string(cycle));
      }
    }

    if (op_class(in.op) == OpClass::Illegal) {
      throw SimError(SimErrorKind::IllegalInstruction, out.pc, cycle, "word " + hex32(in.raw));
    }
    const Word a = operand(d.fwd_rs1, out.rs1_val);
    const Word b = operand(d.fwd_rs2, out.rs2_val);
    out.rs1_val = a;
    out.rs2_val = b;
    out.alu_result = exec::alu_result(in, out.pc, a, b);

    if (is_load(in.op) || is_store(in.op)) {
      if (out.alu_result % access_width(in.op) != 0) {
        throw SimError(SimErrorKind::MisalignedAccess, out.pc, cycle, "address " + hex32(out.alu_result));
      }
    }
    if (is_jump(in.op) || (is_branch(in.op) && exec::branch_taken(in.op, a, b))) {
      const Address target = exec::jump_target(in, out.pc, a);
      if (target % 4 != 0) {
        throw SimError(SimErrorKind::MisalignedFetch, out.pc, cycle, "target " + hex32(target));
      }
      redirect = target;
    }
    return out;
  }

  StageLatch fetch() const {
    StageLatch l;
    l.valid = true;
    l.pc = state_.pc;
    l.instr = decode(state_.arch.mem.read32(state_.pc));
    return l;
  }

  CycleSnapshot::Cell fetch_cell(bool frozen) const {
    CycleSnapshot::Cell c;
    if (state_.fetch_halted) return c;
    if (state_.ifid.valid && state_.ifid.instr.op == Op::ECALL) return c;
    c.slot = frozen ? CycleSnapshot::Slot::Frozen : CycleSnapshot::Slot::Busy;
    c.pc = state_.pc;
    c.instr = decode(state_.arch.mem.read32(state_.pc));
    return c;
  }

  void publish(const CycleSnapshot& snap) {
    if (observer_) observer_(snap);
  }

  void check_cycle_limit() const {
    if (!halted() && state_.cycle >= max_cycles_) {
      throw CycleLimitExceeded(state_.pc, state_.cycle, report());
    }
  }

  SchemeId scheme_;
  std::uint64_t max_cycles_;
  CacheConfig dmem_cache_;
  PipelineState state_;
  std::optional<DataMemory> dmem_;
  Observer observer_;
};

/// Runs `image` to completion under `scheme`.
inline RunReport run(const MemoryImage& image, SchemeId scheme, const RunConfig& config = {},
                     Pipeline::Observer observer = {}) {
  Pipeline p(image, scheme, config);
  if (observer) p.set_observer(std::move(observer));
  return p.run();
}

}  // namespace pipesim
