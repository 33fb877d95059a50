#pragma once

/// @file
/// Single-cycle reference interpreter. It defines the architectural result
/// every pipeline scheme must reproduce.

#include <cstdint>
#include <string>

#include "pipesim/arch_state.hpp"
#include "pipesim/errors.hpp"
#include "pipesim/exec.hpp"
#include "pipesim/image.hpp"
#include "pipesim/isa.hpp"

namespace pipesim::golden {

/// Thrown by run() when the step budget is exhausted before ECALL.
class StepLimitExceeded : public SimError {
 public:
  explicit StepLimitExceeded(ArchState partial)
      : SimError(SimErrorKind::NonTermination, partial.pc, std::nullopt,
                 "no ecall after " + std::to_string(partial.retired) + " steps"),
        partial_(std::move(partial)) {}

  const ArchState& partial() const noexcept { return partial_; }

 private:
  ArchState partial_;
};

/// Applies one instruction to `s` in place.
inline void execute(ArchState& s, const Instruction& in) {
  const Word a = s.regs[in.rs1];
  const Word b = s.regs[in.rs2];
  Address next = s.pc + 4;

  switch (op_class(in.op)) {
    case OpClass::Illegal:
      throw SimError(SimErrorKind::IllegalInstruction, s.pc, std::nullopt, "word " + hex32(in.raw));
    case OpClass::Nop:
      break;
    case OpClass::Ecall:
      s.halted = true;
      break;
    case OpClass::AluReg:
    case OpClass::AluImm:
    case OpClass::Lui:
    case OpClass::Auipc:
      s.set_reg(in.rd, exec::alu_result(in, s.pc, a, b));
      break;
    case OpClass::Jal:
    case OpClass::Jalr:
      next = exec::jump_target(in, s.pc, a);
      s.set_reg(in.rd, s.pc + 4);
      break;
    case OpClass::Branch:
      if (exec::branch_taken(in.op, a, b)) next = exec::jump_target(in, s.pc, a);
      break;
    case OpClass::Load:
    case OpClass::Store: {
      const Address addr = a + static_cast<Word>(in.imm);
      const unsigned width = access_width(in.op);
      if (addr % width != 0) {
        throw SimError(SimErrorKind::MisalignedAccess, s.pc, std::nullopt, "address " + hex32(addr));
      }
      if (is_load(in.op)) {
        s.set_reg(in.rd, exec::extend_load(in.op, s.mem.read(addr, width)));
      } else {
        s.mem.write(addr, width, b);
      }
      break;
    }
  }

  if (!s.halted && next % 4 != 0) {
    throw SimError(SimErrorKind::MisalignedFetch, s.pc, std::nullopt, "target not 4-byte aligned");
  }
  s.pc = s.halted ? s.pc : next;
  ++s.retired;
}

/// Value-semantics form of execute().
inline ArchState step(ArchState s, const Instruction& in) {
  execute(s, in);
  return s;
}

/// Runs from `initial` until ECALL retires. Throws StepLimitExceeded
/// carrying the partial state after `max_steps` instructions without halting.
inline ArchState run(ArchState state, std::uint64_t max_steps) {
  while (!state.halted) {
    if (state.retired >= max_steps) throw StepLimitExceeded(std::move(state));
    execute(state, decode(state.mem.read32(state.pc)));
  }
  return state;
}

inline ArchState run(const MemoryImage& image, std::uint64_t max_steps, const Presets& presets = {}) {
  return run(make_initial_state(image, presets), max_steps);
}

}  // namespace pipesim::golden
