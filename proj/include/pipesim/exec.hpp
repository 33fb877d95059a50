#pragma once

/// @file
/// Combinational instruction semantics shared by the golden interpreter and
/// the pipeline's EX stage: ALU results, branch outcomes, load extension.

#include <cstdint>

#include "pipesim/isa.hpp"

namespace pipesim::exec {

/// Value written to rd by ALU, LUI, AUIPC, JAL and JALR. `pc` is the
/// instruction's own address.
constexpr Word alu_result(const Instruction& in, Word pc, Word a, Word b) {
  const auto imm = static_cast<Word>(in.imm);
  const auto sa = static_cast<std::int32_t>(a);
  const auto sb = static_cast<std::int32_t>(b);
  switch (in.op) {
    case Op::ADD: return a + b;
    case Op::SUB: return a - b;
    case Op::SLL: return a << (b & 31);
    case Op::SLT: return sa < sb ? 1 : 0;
    case Op::SLTU: return a < b ? 1 : 0;
    case Op::XOR: return a ^ b;
    case Op::SRL: return a >> (b & 31);
    case Op::SRA: return static_cast<Word>(sa >> (b & 31));
    case Op::OR: return a | b;
    case Op::AND: return a & b;
    case Op::ADDI: return a + imm;
    case Op::SLTI: return sa < in.imm ? 1 : 0;
    case Op::SLTIU: return a < imm ? 1 : 0;
    case Op::XORI: return a ^ imm;
    case Op::ORI: return a | imm;
    case Op::ANDI: return a & imm;
    case Op::SLLI: return a << (imm & 31);
    case Op::SRLI: return a >> (imm & 31);
    case Op::SRAI: return static_cast<Word>(sa >> (imm & 31));
    case Op::LUI: return imm;
    case Op::AUIPC: return pc + imm;
    case Op::JAL:
    case Op::JALR: return pc + 4;
    default:
      // Loads and stores: effective address.
      return a + imm;
  }
}

constexpr bool branch_taken(Op op, Word a, Word b) {
  const auto sa = static_cast<std::int32_t>(a);
  const auto sb = static_cast<std::int32_t>(b);
  switch (op) {
    case Op::BEQ: return a == b;
    case Op::BNE: return a != b;
    case Op::BLT: return sa < sb;
    case Op::BGE: return sa >= sb;
    case Op::BLTU: return a < b;
    case Op::BGEU: return a >= b;
    default: return false;
  }
}

/// Next PC if control transfers, given rs1's value for JALR.
constexpr Word jump_target(const Instruction& in, Word pc, Word rs1_val) {
  if (in.op == Op::JALR) return (rs1_val + static_cast<Word>(in.imm)) & ~Word{1};
  return pc + static_cast<Word>(in.imm);
}

/// Extends a raw little-endian memory value to 32 bits for the load kind.
constexpr Word extend_load(Op op, Word raw) {
  switch (op) {
    case Op::LB: return static_cast<Word>(static_cast<std::int32_t>(static_cast<std::int8_t>(raw & 0xff)));
    case Op::LH: return static_cast<Word>(static_cast<std::int32_t>(static_cast<std::int16_t>(raw & 0xffff)));
    case Op::LBU: return raw & 0xff;
    case Op::LHU: return raw & 0xffff;
    default: return raw;
  }
}

}  // namespace pipesim::exec
