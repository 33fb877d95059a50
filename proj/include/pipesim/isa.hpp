#pragma once

/// @file
/// RV32I subset: instruction representation, decode, encode and classification.
///
/// FENCE, EBREAK and the CSR instructions are not part of the subset and decode
/// to Op::ILLEGAL. ECALL is the simulation halt instruction.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pipesim {

using Word = std::uint32_t;
using Address = std::uint32_t;
using RegIndex = std::uint8_t;

inline constexpr unsigned kNumRegs = 32;

enum class Op : std::uint8_t {
  ILLEGAL,
  NOP,
  LUI,
  AUIPC,
  JAL,
  JALR,
  BEQ,
  BNE,
  BLT,
  BGE,
  BLTU,
  BGEU,
  LB,
  LH,
  LW,
  LBU,
  LHU,
  SB,
  SH,
  SW,
  ADDI,
  SLTI,
  SLTIU,
  XORI,
  ORI,
  ANDI,
  SLLI,
  SRLI,
  SRAI,
  ADD,
  SUB,
  SLL,
  SLT,
  SLTU,
  XOR,
  SRL,
  SRA,
  OR,
  AND,
  ECALL,
};

inline constexpr unsigned kNumOps = static_cast<unsigned>(Op::ECALL) + 1;

/// Coarse operation class, one per Op.
enum class OpClass : std::uint8_t {
  Illegal,
  Nop,
  AluReg,
  AluImm,
  Load,
  Store,
  Branch,
  Jal,
  Jalr,
  Lui,
  Auipc,
  Ecall,
};

/// A decoded instruction. Fields a format does not use are zero, so two
/// instructions with the same meaning compare equal regardless of `raw`.
struct Instruction {
  Op op = Op::ILLEGAL;
  RegIndex rd = 0;
  RegIndex rs1 = 0;
  RegIndex rs2 = 0;
  std::int32_t imm = 0;  // sign-extended; U-type holds the shifted value
  Word raw = 0;

  friend constexpr bool operator==(const Instruction& a, const Instruction& b) {
    return a.op == b.op && a.rd == b.rd && a.rs1 == b.rs1 && a.rs2 == b.rs2 && a.imm == b.imm;
  }
};

inline constexpr Word kNopWord = 0x00000013;
inline constexpr Word kEcallWord = 0x00000073;

constexpr OpClass op_class(Op op) {
  switch (op) {
    case Op::ILLEGAL:
      return OpClass::Illegal;
    case Op::NOP:
      return OpClass::Nop;
    case Op::LUI:
      return OpClass::Lui;
    case Op::AUIPC:
      return OpClass::Auipc;
    case Op::JAL:
      return OpClass::Jal;
    case Op::JALR:
      return OpClass::Jalr;
    case Op::BEQ:
    case Op::BNE:
    case Op::BLT:
    case Op::BGE:
    case Op::BLTU:
    case Op::BGEU:
      return OpClass::Branch;
    case Op::LB:
    case Op::LH:
    case Op::LW:
    case Op::LBU:
    case Op::LHU:
      return OpClass::Load;
    case Op::SB:
    case Op::SH:
    case Op::SW:
      return OpClass::Store;
    case Op::ADDI:
    case Op::SLTI:
    case Op::SLTIU:
    case Op::XORI:
    case Op::ORI:
    case Op::ANDI:
    case Op::SLLI:
    case Op::SRLI:
    case Op::SRAI:
      return OpClass::AluImm;
    case Op::ADD:
    case Op::SUB:
    case Op::SLL:
    case Op::SLT:
    case Op::SLTU:
    case Op::XOR:
    case Op::SRL:
    case Op::SRA:
    case Op::OR:
    case Op::AND:
      return OpClass::AluReg;
    case Op::ECALL:
      return OpClass::Ecall;
  }
  return OpClass::Illegal;
}

constexpr bool is_load(Op op) { return op_class(op) == OpClass::Load; }
constexpr bool is_store(Op op) { return op_class(op) == OpClass::Store; }
/// Conditional branches only; JAL/JALR are jumps.
constexpr bool is_branch(Op op) { return op_class(op) == OpClass::Branch; }
constexpr bool is_jump(Op op) { return op == Op::JAL || op == Op::JALR; }

constexpr bool writes_rd(Op op) {
  switch (op_class(op)) {
    case OpClass::AluReg:
    case OpClass::AluImm:
    case OpClass::Load:
    case OpClass::Jal:
    case OpClass::Jalr:
    case OpClass::Lui:
    case OpClass::Auipc:
      return true;
    default:
      return false;
  }
}

constexpr bool reads_rs1(Op op) {
  switch (op_class(op)) {
    case OpClass::AluReg:
    case OpClass::AluImm:
    case OpClass::Load:
    case OpClass::Store:
    case OpClass::Branch:
    case OpClass::Jalr:
      return true;
    default:
      return false;
  }
}

constexpr bool reads_rs2(Op op) {
  switch (op_class(op)) {
    case OpClass::AluReg:
    case OpClass::Store:
    case OpClass::Branch:
      return true;
    default:
      return false;
  }
}

/// Whether `instr` reads register `reg` as a source operand.
constexpr bool reads_reg(const Instruction& instr, RegIndex reg) {
  return (reads_rs1(instr.op) && instr.rs1 == reg) || (reads_rs2(instr.op) && instr.rs2 == reg);
}

/// Access width in bytes for loads and stores, 0 otherwise.
constexpr unsigned access_width(Op op) {
  switch (op) {
    case Op::LB:
    case Op::LBU:
    case Op::SB:
      return 1;
    case Op::LH:
    case Op::LHU:
    case Op::SH:
      return 2;
    case Op::LW:
    case Op::SW:
      return 4;
    default:
      return 0;
  }
}

constexpr std::string_view mnemonic(Op op) {
  constexpr std::string_view names[kNumOps] = {
      "illegal", "nop",  "lui",  "auipc", "jal",  "jalr", "beq",   "bne",  "blt",  "bge",
      "bltu",    "bgeu", "lb",   "lh",    "lw",   "lbu",  "lhu",   "sb",   "sh",   "sw",
      "addi",    "slti", "sltiu", "xori", "ori",  "andi", "slli",  "srli", "srai", "add",
      "sub",     "sll",  "slt",  "sltu",  "xor",  "srl",  "sra",   "or",   "and",  "ecall",
  };
  return names[static_cast<unsigned>(op)];
}

// ---------------------------------------------------------------------------
// Decode

namespace detail {

constexpr std::int32_t sign_extend(Word value, unsigned bits) {
  const Word m = Word{1} << (bits - 1);
  value &= (bits == 32) ? ~Word{0} : ((Word{1} << bits) - 1);
  return static_cast<std::int32_t>((value ^ m) - m);
}

constexpr std::int32_t imm_i(Word w) { return sign_extend(w >> 20, 12); }
constexpr std::int32_t imm_s(Word w) { return sign_extend(((w >> 25) << 5) | ((w >> 7) & 0x1f), 12); }
constexpr std::int32_t imm_b(Word w) {
  const Word v = (((w >> 31) & 1) << 12) | (((w >> 7) & 1) << 11) | (((w >> 25) & 0x3f) << 5) |
                 (((w >> 8) & 0xf) << 1);
  return sign_extend(v, 13);
}
constexpr std::int32_t imm_u(Word w) { return static_cast<std::int32_t>(w & 0xfffff000u); }
constexpr std::int32_t imm_j(Word w) {
  const Word v = (((w >> 31) & 1) << 20) | (((w >> 12) & 0xff) << 12) | (((w >> 20) & 1) << 11) |
                 (((w >> 21) & 0x3ff) << 1);
  return sign_extend(v, 21);
}

}  // namespace detail

/// Decodes any 32-bit word. Unsupported encodings yield Op::ILLEGAL with
/// only `raw` set.
constexpr Instruction decode(Word word) {
  using detail::imm_b;
  using detail::imm_i;
  using detail::imm_j;
  using detail::imm_s;
  using detail::imm_u;

  Instruction illegal{};
  illegal.raw = word;

  const Word opcode = word & 0x7f;
  const auto rd = static_cast<RegIndex>((word >> 7) & 0x1f);
  const auto rs1 = static_cast<RegIndex>((word >> 15) & 0x1f);
  const auto rs2 = static_cast<RegIndex>((word >> 20) & 0x1f);
  const Word funct3 = (word >> 12) & 0x7;
  const Word funct7 = word >> 25;

  Instruction out{};
  out.raw = word;

  switch (opcode) {
    case 0x37:
      out.op = Op::LUI;
      out.rd = rd;
      out.imm = imm_u(word);
      return out;
    case 0x17:
      out.op = Op::AUIPC;
      out.rd = rd;
      out.imm = imm_u(word);
      return out;
    case 0x6f:
      out.op = Op::JAL;
      out.rd = rd;
      out.imm = imm_j(word);
      return out;
    case 0x67:
      if (funct3 != 0) return illegal;
      out.op = Op::JALR;
      out.rd = rd;
      out.rs1 = rs1;
      out.imm = imm_i(word);
      return out;
    case 0x63: {
      constexpr Op kBranch[8] = {Op::BEQ,     Op::BNE, Op::ILLEGAL, Op::ILLEGAL,
                                 Op::BLT,     Op::BGE, Op::BLTU,    Op::BGEU};
      if (kBranch[funct3] == Op::ILLEGAL) return illegal;
      out.op = kBranch[funct3];
      out.rs1 = rs1;
      out.rs2 = rs2;
      out.imm = imm_b(word);
      return out;
    }
    case 0x03: {
      constexpr Op kLoad[8] = {Op::LB,  Op::LH,  Op::LW,      Op::ILLEGAL,
                               Op::LBU, Op::LHU, Op::ILLEGAL, Op::ILLEGAL};
      if (kLoad[funct3] == Op::ILLEGAL) return illegal;
      out.op = kLoad[funct3];
      out.rd = rd;
      out.rs1 = rs1;
      out.imm = imm_i(word);
      return out;
    }
    case 0x23: {
      constexpr Op kStore[8] = {Op::SB,      Op::SH,      Op::SW,      Op::ILLEGAL,
                                Op::ILLEGAL, Op::ILLEGAL, Op::ILLEGAL, Op::ILLEGAL};
      if (kStore[funct3] == Op::ILLEGAL) return illegal;
      out.op = kStore[funct3];
      out.rs1 = rs1;
      out.rs2 = rs2;
      out.imm = imm_s(word);
      return out;
    }
    case 0x13: {
      out.rd = rd;
      out.rs1 = rs1;
      switch (funct3) {
        case 0: out.op = Op::ADDI; break;
        case 2: out.op = Op::SLTI; break;
        case 3: out.op = Op::SLTIU; break;
        case 4: out.op = Op::XORI; break;
        case 6: out.op = Op::ORI; break;
        case 7: out.op = Op::ANDI; break;
        case 1:
          if (funct7 != 0) return illegal;
          out.op = Op::SLLI;
          out.imm = rs2;
          return out;
        case 5:
          if (funct7 == 0) {
            out.op = Op::SRLI;
          } else if (funct7 == 0x20) {
            out.op = Op::SRAI;
          } else {
            return illegal;
          }
          out.imm = rs2;
          return out;
      }
      out.imm = imm_i(word);
      if (out.op == Op::ADDI && rd == 0 && rs1 == 0 && out.imm == 0) {
        out = Instruction{Op::NOP, 0, 0, 0, 0, word};
      }
      return out;
    }
    case 0x33: {
      out.rd = rd;
      out.rs1 = rs1;
      out.rs2 = rs2;
      if (funct7 == 0) {
        constexpr Op kBase[8] = {Op::ADD, Op::SLL, Op::SLT, Op::SLTU,
                                 Op::XOR, Op::SRL, Op::OR,  Op::AND};
        out.op = kBase[funct3];
        return out;
      }
      if (funct7 == 0x20 && funct3 == 0) {
        out.op = Op::SUB;
        return out;
      }
      if (funct7 == 0x20 && funct3 == 5) {
        out.op = Op::SRA;
        return out;
      }
      return illegal;
    }
    case 0x73:
      if (word == kEcallWord) {
        out.op = Op::ECALL;
        return out;
      }
      return illegal;
    default:
      return illegal;
  }
}

// ---------------------------------------------------------------------------
// Encode

/// Thrown by encode() when a field does not fit its format.
class EncodingError : public std::runtime_error {
 public:
  EncodingError(std::string field, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

namespace detail {

inline void check_reg(RegIndex r, const char* field) {
  if (r >= kNumRegs) throw EncodingError(field, std::string(field) + " out of range: " + std::to_string(r));
}

inline void check_imm(std::int64_t imm, std::int64_t lo, std::int64_t hi, std::int64_t align,
                      const char* format) {
  if (imm < lo || imm > hi || imm % align != 0) {
    throw EncodingError("imm", std::string(format) + " immediate " + std::to_string(imm) +
                                   " outside [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                   "]" + (align > 1 ? " or not a multiple of " + std::to_string(align) : ""));
  }
}

inline Word r_type(Word funct7, RegIndex rs2, RegIndex rs1, Word funct3, RegIndex rd, Word opcode) {
  return (funct7 << 25) | (Word{rs2} << 20) | (Word{rs1} << 15) | (funct3 << 12) | (Word{rd} << 7) | opcode;
}

inline Word i_type(std::int32_t imm, RegIndex rs1, Word funct3, RegIndex rd, Word opcode) {
  return ((static_cast<Word>(imm) & 0xfff) << 20) | (Word{rs1} << 15) | (funct3 << 12) | (Word{rd} << 7) |
         opcode;
}

inline Word s_type(std::int32_t imm, RegIndex rs2, RegIndex rs1, Word funct3, Word opcode) {
  const auto u = static_cast<Word>(imm);
  return (((u >> 5) & 0x7f) << 25) | (Word{rs2} << 20) | (Word{rs1} << 15) | (funct3 << 12) |
         ((u & 0x1f) << 7) | opcode;
}

inline Word b_type(std::int32_t imm, RegIndex rs2, RegIndex rs1, Word funct3) {
  const auto u = static_cast<Word>(imm);
  return (((u >> 12) & 1) << 31) | (((u >> 5) & 0x3f) << 25) | (Word{rs2} << 20) | (Word{rs1} << 15) |
         (funct3 << 12) | (((u >> 1) & 0xf) << 8) | (((u >> 11) & 1) << 7) | 0x63;
}

inline Word j_type(std::int32_t imm, RegIndex rd) {
  const auto u = static_cast<Word>(imm);
  return (((u >> 20) & 1) << 31) | (((u >> 1) & 0x3ff) << 21) | (((u >> 11) & 1) << 20) |
         (((u >> 12) & 0xff) << 12) | (Word{rd} << 7) | 0x6f;
}

}  // namespace detail

/// Encodes a legal instruction. Throws EncodingError naming the offending
/// field when a register or immediate does not fit.
inline Word encode(const Instruction& in) {
  using namespace detail;
  check_reg(in.rd, "rd");
  check_reg(in.rs1, "rs1");
  check_reg(in.rs2, "rs2");

  const auto funct3_of = [](Op op) -> Word {
    switch (op) {
      case Op::BEQ: case Op::LB: case Op::SB: case Op::ADDI: case Op::ADD: case Op::SUB: case Op::JALR:
        return 0;
      case Op::BNE: case Op::LH: case Op::SH: case Op::SLLI: case Op::SLL:
        return 1;
      case Op::LW: case Op::SW: case Op::SLTI: case Op::SLT:
        return 2;
      case Op::SLTIU: case Op::SLTU:
        return 3;
      case Op::BLT: case Op::LBU: case Op::XORI: case Op::XOR:
        return 4;
      case Op::BGE: case Op::LHU: case Op::SRLI: case Op::SRAI: case Op::SRL: case Op::SRA:
        return 5;
      case Op::BLTU: case Op::ORI: case Op::OR:
        return 6;
      case Op::BGEU: case Op::ANDI: case Op::AND:
        return 7;
      default:
        return 0;
    }
  };

  switch (op_class(in.op)) {
    case OpClass::Illegal:
      throw EncodingError("op", "cannot encode an illegal instruction");
    case OpClass::Nop:
      return kNopWord;
    case OpClass::Ecall:
      return kEcallWord;
    case OpClass::Lui:
    case OpClass::Auipc:
      if ((static_cast<Word>(in.imm) & 0xfff) != 0) {
        throw EncodingError("imm", "U-type immediate has nonzero low 12 bits");
      }
      return (static_cast<Word>(in.imm) & 0xfffff000u) | (Word{in.rd} << 7) |
             (in.op == Op::LUI ? 0x37u : 0x17u);
    case OpClass::Jal:
      check_imm(in.imm, -(1 << 20), (1 << 20) - 2, 2, "J-type");
      return j_type(in.imm, in.rd);
    case OpClass::Jalr:
      check_imm(in.imm, -2048, 2047, 1, "I-type");
      return i_type(in.imm, in.rs1, 0, in.rd, 0x67);
    case OpClass::Branch:
      check_imm(in.imm, -4096, 4094, 2, "B-type");
      return b_type(in.imm, in.rs2, in.rs1, funct3_of(in.op));
    case OpClass::Load:
      check_imm(in.imm, -2048, 2047, 1, "I-type");
      return i_type(in.imm, in.rs1, funct3_of(in.op), in.rd, 0x03);
    case OpClass::Store:
      check_imm(in.imm, -2048, 2047, 1, "S-type");
      return s_type(in.imm, in.rs2, in.rs1, funct3_of(in.op), 0x23);
    case OpClass::AluImm:
      if (in.op == Op::SLLI || in.op == Op::SRLI || in.op == Op::SRAI) {
        check_imm(in.imm, 0, 31, 1, "shift");
        return r_type(in.op == Op::SRAI ? 0x20 : 0, static_cast<RegIndex>(in.imm), in.rs1,
                      funct3_of(in.op), in.rd, 0x13);
      }
      check_imm(in.imm, -2048, 2047, 1, "I-type");
      return i_type(in.imm, in.rs1, funct3_of(in.op), in.rd, 0x13);
    case OpClass::AluReg:
      return r_type((in.op == Op::SUB || in.op == Op::SRA) ? 0x20 : 0, in.rs2, in.rs1, funct3_of(in.op),
                    in.rd, 0x33);
  }
  throw EncodingError("op", "unknown operation");
}

/// Builds an instruction with the fields its format does not use zeroed.
inline Instruction make_instruction(Op op, RegIndex rd, RegIndex rs1, RegIndex rs2, std::int32_t imm) {
  Instruction in{op, 0, 0, 0, 0, 0};
  if (writes_rd(op)) in.rd = rd;
  if (reads_rs1(op)) in.rs1 = rs1;
  if (reads_rs2(op)) in.rs2 = rs2;
  switch (op_class(op)) {
    case OpClass::AluReg:
    case OpClass::Nop:
    case OpClass::Ecall:
    case OpClass::Illegal:
      break;
    default:
      in.imm = imm;
  }
  return in;
}

// ---------------------------------------------------------------------------
// Disassembly

inline std::string reg_name(RegIndex r) { return "x" + std::to_string(r); }

/// Renders `instr` in assembler syntax with numeric registers and
/// PC-relative branch/jump offsets.
inline std::string disassemble(const Instruction& in) {
  const std::string m(mnemonic(in.op));
  const auto imm = std::to_string(in.imm);
  switch (op_class(in.op)) {
    case OpClass::Illegal:
      return "illegal";
    case OpClass::Nop:
    case OpClass::Ecall:
      return m;
    case OpClass::AluReg:
      return m + " " + reg_name(in.rd) + ", " + reg_name(in.rs1) + ", " + reg_name(in.rs2);
    case OpClass::AluImm:
      return m + " " + reg_name(in.rd) + ", " + reg_name(in.rs1) + ", " + imm;
    case OpClass::Load:
      return m + " " + reg_name(in.rd) + ", " + imm + "(" + reg_name(in.rs1) + ")";
    case OpClass::Store:
      return m + " " + reg_name(in.rs2) + ", " + imm + "(" + reg_name(in.rs1) + ")";
    case OpClass::Branch:
      return m + " " + reg_name(in.rs1) + ", " + reg_name(in.rs2) + ", " + imm;
    case OpClass::Jal:
      return m + " " + reg_name(in.rd) + ", " + imm;
    case OpClass::Jalr:
      return m + " " + reg_name(in.rd) + ", " + imm + "(" + reg_name(in.rs1) + ")";
    case OpClass::Lui:
    case OpClass::Auipc:
      return m + " " + reg_name(in.rd) + ", " + std::to_string(static_cast<Word>(in.imm) >> 12);
  }
  return m;
}

}  // namespace pipesim
