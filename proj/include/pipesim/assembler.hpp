#pragma once

/// @file
/// Two-pass assembler for the RV32I subset.
///
/// One statement per line: `[label:] [mnemonic operands] [# comment]`.
/// Registers are x0-x31 or ABI names. Immediates are decimal or 0x-hex,
/// optionally signed. Branch and jump targets are labels or PC-relative
/// byte offsets. Directives: `.org <addr>` starts a new segment, `.word
/// <value>[, <value>...]` emits raw words (labels allowed).

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pipesim/image.hpp"
#include "pipesim/isa.hpp"

namespace pipesim {

class AsmError : public std::runtime_error {
 public:
  AsmError(std::size_t line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line), msg_(msg) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& message() const noexcept { return msg_; }

 private:
  std::size_t line_;
  std::string msg_;
};

inline std::optional<RegIndex> parse_register(std::string_view name) {
  static const std::unordered_map<std::string_view, RegIndex> kAbi = {
      {"zero", 0}, {"ra", 1},   {"sp", 2},   {"gp", 3},   {"tp", 4},  {"t0", 5},  {"t1", 6},
      {"t2", 7},   {"s0", 8},   {"fp", 8},   {"s1", 9},   {"a0", 10}, {"a1", 11}, {"a2", 12},
      {"a3", 13},  {"a4", 14},  {"a5", 15},  {"a6", 16},  {"a7", 17}, {"s2", 18}, {"s3", 19},
      {"s4", 20},  {"s5", 21},  {"s6", 22},  {"s7", 23},  {"s8", 24}, {"s9", 25}, {"s10", 26},
      {"s11", 27}, {"t3", 28},  {"t4", 29},  {"t5", 30},  {"t6", 31},
  };
  if (name.size() >= 2 && name.front() == 'x') {
    unsigned n = 0;
    const auto* end = name.data() + name.size();
    const auto [ptr, ec] = std::from_chars(name.data() + 1, end, n);
    if (ec == std::errc{} && ptr == end && n < kNumRegs && !(name.size() > 2 && name[1] == '0')) {
      return static_cast<RegIndex>(n);
    }
    return std::nullopt;
  }
  if (const auto it = kAbi.find(name); it != kAbi.end()) return it->second;
  return std::nullopt;
}

/// Parses `[+|-]digits` or `[+|-]0xhex`. Values outside the 64-bit signed
/// range are rejected.
inline std::optional<std::int64_t> parse_integer(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  int base = 10;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    base = 16;
    text.remove_prefix(2);
  }
  if (text.empty()) return std::nullopt;
  std::uint64_t magnitude = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, magnitude, base);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  if (magnitude > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) return std::nullopt;
  const auto v = static_cast<std::int64_t>(magnitude);
  return negative ? -v : v;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool is_identifier(std::string_view s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

struct Statement {
  std::size_t line = 0;
  std::string mnemonic;
  std::vector<std::string> operands;
  Address address = 0;
};

enum class Form {
  RegRegReg,   // add rd, rs1, rs2
  RegRegImm,   // addi rd, rs1, imm
  Load,        // lw rd, imm(rs1)
  Store,       // sw rs2, imm(rs1)
  Branch,      // beq rs1, rs2, target
  Upper,       // lui rd, imm20
  Jal,         // jal [rd,] target
  Jalr,        // jalr [rd,] imm(rs1) | jalr rd, rs1, imm | jalr rs1
  None,        // ecall
};

struct OpSpec {
  Op op;
  Form form;
};

inline const std::unordered_map<std::string_view, OpSpec>& op_table() {
  static const std::unordered_map<std::string_view, OpSpec> table = {
      {"lui", {Op::LUI, Form::Upper}},       {"auipc", {Op::AUIPC, Form::Upper}},
      {"jal", {Op::JAL, Form::Jal}},         {"jalr", {Op::JALR, Form::Jalr}},
      {"beq", {Op::BEQ, Form::Branch}},      {"bne", {Op::BNE, Form::Branch}},
      {"blt", {Op::BLT, Form::Branch}},      {"bge", {Op::BGE, Form::Branch}},
      {"bltu", {Op::BLTU, Form::Branch}},    {"bgeu", {Op::BGEU, Form::Branch}},
      {"lb", {Op::LB, Form::Load}},          {"lh", {Op::LH, Form::Load}},
      {"lw", {Op::LW, Form::Load}},          {"lbu", {Op::LBU, Form::Load}},
      {"lhu", {Op::LHU, Form::Load}},        {"sb", {Op::SB, Form::Store}},
      {"sh", {Op::SH, Form::Store}},         {"sw", {Op::SW, Form::Store}},
      {"addi", {Op::ADDI, Form::RegRegImm}}, {"slti", {Op::SLTI, Form::RegRegImm}},
      {"sltiu", {Op::SLTIU, Form::RegRegImm}}, {"xori", {Op::XORI, Form::RegRegImm}},
      {"ori", {Op::ORI, Form::RegRegImm}},   {"andi", {Op::ANDI, Form::RegRegImm}},
      {"slli", {Op::SLLI, Form::RegRegImm}}, {"srli", {Op::SRLI, Form::RegRegImm}},
      {"srai", {Op::SRAI, Form::RegRegImm}}, {"add", {Op::ADD, Form::RegRegReg}},
      {"sub", {Op::SUB, Form::RegRegReg}},   {"sll", {Op::SLL, Form::RegRegReg}},
      {"slt", {Op::SLT, Form::RegRegReg}},   {"sltu", {Op::SLTU, Form::RegRegReg}},
      {"xor", {Op::XOR, Form::RegRegReg}},   {"srl", {Op::SRL, Form::RegRegReg}},
      {"sra", {Op::SRA, Form::RegRegReg}},   {"or", {Op::OR, Form::RegRegReg}},
      {"and", {Op::AND, Form::RegRegReg}},   {"ecall", {Op::ECALL, Form::None}},
  };
  return table;
}

class Assembler {
 public:
  MemoryImage run(std::string_view source) {
    first_pass(source);
    MemoryImage image;
    for (const auto& seg : segments_) image.segments.push_back(Segment{seg.base, {}});
    for (std::size_t i = 0; i < statements_.size(); ++i) emit(image.segments[seg_ordinal_[i]], statements_[i]);
    std::erase_if(image.segments, [](const Segment& s) { return s.words.empty(); });
    image.entry = image.segments.empty() ? 0 : image.segments.front().base;
    return image;
  }

 private:
  struct SegmentInfo {
    Address base;
  };

  void first_pass(std::string_view source) {
    segments_.push_back(SegmentInfo{0});
    Address cursor = 0;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= source.size()) {
      const auto nl = source.find('\n', pos);
      std::string_view line =
          source.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      pos = (nl == std::string_view::npos) ? source.size() + 1 : nl + 1;
      ++line_no;

      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = trim(line);

      // Leading labels.
      while (true) {
        const auto colon = line.find(':');
        if (colon == std::string_view::npos) break;
        const auto name = trim(line.substr(0, colon));
        if (!is_identifier(name)) throw AsmError(line_no, "malformed label '" + std::string(name) + "'");
        if (!labels_.emplace(std::string(name), cursor).second) {
          throw AsmError(line_no, "duplicate label '" + std::string(name) + "'");
        }
        line = trim(line.substr(colon + 1));
      }
      if (line.empty()) continue;

      Statement st;
      st.line = line_no;
      const auto space = line.find_first_of(" \t");
      st.mnemonic = std::string(line.substr(0, space));
      std::transform(st.mnemonic.begin(), st.mnemonic.end(), st.mnemonic.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      if (space != std::string_view::npos) {
        std::string_view rest = trim(line.substr(space));
        while (!rest.empty()) {
          const auto comma = rest.find(',');
          const auto operand = trim(rest.substr(0, comma));
          if (operand.empty()) throw AsmError(line_no, "empty operand");
          st.operands.emplace_back(operand);
          if (comma == std::string_view::npos) break;
          rest = rest.substr(comma + 1);
          if (trim(rest).empty()) throw AsmError(line_no, "trailing comma");
        }
      }

      if (st.mnemonic == ".org") {
        if (st.operands.size() != 1) throw AsmError(line_no, ".org takes one address");
        const auto addr = parse_integer(st.operands[0]);
        if (!addr || *addr < 0 || *addr > 0xffffffffll) throw AsmError(line_no, "malformed .org address");
        if (*addr % 4 != 0) throw AsmError(line_no, ".org address not 4-byte aligned");
        cursor = static_cast<Address>(*addr);
        segments_.push_back(SegmentInfo{cursor});
        continue;
      }

      const auto words = st.mnemonic == ".word" ? st.operands.size() : 1;
      if (st.mnemonic == ".word" && words == 0) throw AsmError(line_no, ".word needs a value");
      st.address = cursor;
      claim(line_no, cursor, words);
      cursor += static_cast<Address>(4 * words);
      statements_.push_back(std::move(st));
      seg_ordinal_.push_back(segments_.size() - 1);
    }
  }

  // Rejects placements that overlap earlier output.
  void claim(std::size_t line_no, Address start, std::size_t words) {
    const std::uint64_t end = std::uint64_t{start} + 4 * words;
    if (end > 0x100000000ull) throw AsmError(line_no, "output runs past the end of the address space");
    const auto it = used_.upper_bound(start);
    if (it != used_.end() && it->first < end) throw AsmError(line_no, "overlapping placement");
    if (it != used_.begin()) {
      const auto prev = std::prev(it);
      if (prev->second > start) throw AsmError(line_no, "overlapping placement");
    }
    used_[start] = end;
  }

  RegIndex reg(const Statement& st, std::size_t i) const {
    const auto r = parse_register(st.operands.at(i));
    if (!r) throw AsmError(st.line, "malformed register '" + st.operands[i] + "'");
    return *r;
  }

  std::int64_t number(const Statement& st, std::string_view text) const {
    const auto v = parse_integer(text);
    if (!v) throw AsmError(st.line, "malformed immediate '" + std::string(text) + "'");
    return *v;
  }

  // Label or numeric value; labels resolve to absolute addresses.
  std::int64_t value_or_label(const Statement& st, std::string_view text) const {
    if (const auto v = parse_integer(text)) return *v;
    if (!is_identifier(text)) throw AsmError(st.line, "malformed operand '" + std::string(text) + "'");
    const auto it = labels_.find(std::string(text));
    if (it == labels_.end()) throw AsmError(st.line, "undefined label '" + std::string(text) + "'");
    return it->second;
  }

  // PC-relative offset: numeric operands are already offsets.
  std::int64_t target(const Statement& st, std::string_view text) const {
    if (const auto v = parse_integer(text)) return *v;
    return value_or_label(st, text) - static_cast<std::int64_t>(st.address);
  }

  // `imm(reg)` or `(reg)`.
  std::pair<std::int64_t, RegIndex> mem_operand(const Statement& st, std::string_view text) const {
    const auto open = text.find('(');
    const auto close = text.rfind(')');
    if (open == std::string_view::npos || close != text.size() - 1 || close < open) {
      throw AsmError(st.line, "malformed memory operand '" + std::string(text) + "'");
    }
    const auto imm_text = trim(text.substr(0, open));
    const auto reg_text = trim(text.substr(open + 1, close - open - 1));
    const auto r = parse_register(reg_text);
    if (!r) throw AsmError(st.line, "malformed register '" + std::string(reg_text) + "'");
    return {imm_text.empty() ? 0 : number(st, imm_text), *r};
  }

  void expect_operands(const Statement& st, std::size_t n) const {
    if (st.operands.size() != n) {
      throw AsmError(st.line, "'" + st.mnemonic + "' expects " + std::to_string(n) + " operand" +
                                  (n == 1 ? "" : "s") + ", got " + std::to_string(st.operands.size()));
    }
  }

  Word encode_checked(const Statement& st, Op op, RegIndex rd, RegIndex rs1, RegIndex rs2,
                      std::int64_t imm) const {
    if (imm < std::numeric_limits<std::int32_t>::min() || imm > std::numeric_limits<std::int32_t>::max()) {
      throw AsmError(st.line, "immediate overflow: " + std::to_string(imm));
    }
    try {
      return encode(make_instruction(op, rd, rs1, rs2, static_cast<std::int32_t>(imm)));
    } catch (const EncodingError& e) {
      throw AsmError(st.line, std::string("immediate overflow: ") + e.what());
    }
  }

  void emit(Segment& seg, const Statement& st) {
    const auto& m = st.mnemonic;
    if (m == ".word") {
      for (const auto& operand : st.operands) {
        const auto v = value_or_label(st, operand);
        if (v < std::numeric_limits<std::int32_t>::min() || v > 0xffffffffll) {
          throw AsmError(st.line, "immediate overflow: .word value " + operand);
        }
        seg.words.push_back(static_cast<Word>(v));
      }
      return;
    }
    seg.words.push_back(encode_statement(st));
  }

  Word encode_statement(const Statement& st) const {
    const auto& m = st.mnemonic;

    // Pseudo-instructions.
    if (m == "nop") {
      expect_operands(st, 0);
      return kNopWord;
    }
    if (m == "mv") {
      expect_operands(st, 2);
      return encode_checked(st, Op::ADDI, reg(st, 0), reg(st, 1), 0, 0);
    }
    if (m == "li") {
      expect_operands(st, 2);
      const auto imm = number(st, st.operands[1]);
      if (imm < -2048 || imm > 2047) {
        throw AsmError(st.line, "immediate overflow: li supports 12-bit values only (use lui/addi)");
      }
      return encode_checked(st, Op::ADDI, reg(st, 0), 0, 0, imm);
    }
    if (m == "beqz" || m == "bnez") {
      expect_operands(st, 2);
      return encode_checked(st, m == "beqz" ? Op::BEQ : Op::BNE, 0, reg(st, 0), 0, target(st, st.operands[1]));
    }
    if (m == "j") {
      expect_operands(st, 1);
      return encode_checked(st, Op::JAL, 0, 0, 0, target(st, st.operands[0]));
    }
    if (m == "jr") {
      expect_operands(st, 1);
      return encode_checked(st, Op::JALR, 0, reg(st, 0), 0, 0);
    }
    if (m == "ret") {
      expect_operands(st, 0);
      return encode_checked(st, Op::JALR, 0, 1, 0, 0);
    }

    const auto& table = op_table();
    const auto it = table.find(m);
    if (it == table.end()) throw AsmError(st.line, "unknown mnemonic '" + m + "'");
    const auto [op, form] = it->second;

    switch (form) {
      case Form::RegRegReg:
        expect_operands(st, 3);
        return encode_checked(st, op, reg(st, 0), reg(st, 1), reg(st, 2), 0);
      case Form::RegRegImm:
        expect_operands(st, 3);
        return encode_checked(st, op, reg(st, 0), reg(st, 1), 0, number(st, st.operands[2]));
      case Form::Load: {
        expect_operands(st, 2);
        const auto [imm, base] = mem_operand(st, st.operands[1]);
        return encode_checked(st, op, reg(st, 0), base, 0, imm);
      }
      case Form::Store: {
        expect_operands(st, 2);
        const auto [imm, base] = mem_operand(st, st.operands[1]);
        return encode_checked(st, op, 0, base, reg(st, 0), imm);
      }
      case Form::Branch:
        expect_operands(st, 3);
        return encode_checked(st, op, 0, reg(st, 0), reg(st, 1), target(st, st.operands[2]));
      case Form::Upper: {
        expect_operands(st, 2);
        const auto imm = number(st, st.operands[1]);
        if (imm < 0 || imm > 0xfffff) throw AsmError(st.line, "immediate overflow: 20-bit upper immediate");
        return encode_checked(st, op, reg(st, 0), 0, 0,
                              static_cast<std::int32_t>(static_cast<Word>(imm) << 12));
      }
      case Form::Jal:
        if (st.operands.size() == 1) return encode_checked(st, op, 1, 0, 0, target(st, st.operands[0]));
        expect_operands(st, 2);
        return encode_checked(st, op, reg(st, 0), 0, 0, target(st, st.operands[1]));
      case Form::Jalr:
        if (st.operands.size() == 1) {
          if (st.operands[0].find('(') != std::string::npos) {
            const auto [imm, base] = mem_operand(st, st.operands[0]);
            return encode_checked(st, op, 1, base, 0, imm);
          }
          return encode_checked(st, op, 1, reg(st, 0), 0, 0);
        }
        if (st.operands.size() == 2) {
          const auto [imm, base] = mem_operand(st, st.operands[1]);
          return encode_checked(st, op, reg(st, 0), base, 0, imm);
        }
        expect_operands(st, 3);
        return encode_checked(st, op, reg(st, 0), reg(st, 1), 0, number(st, st.operands[2]));
      case Form::None:
        expect_operands(st, 0);
        return encode_checked(st, op, 0, 0, 0, 0);
    }
    throw AsmError(st.line, "unknown mnemonic '" + m + "'");
  }

  std::vector<SegmentInfo> segments_;
  std::vector<Statement> statements_;
  std::vector<std::size_t> seg_ordinal_;
  std::map<std::string, Address> labels_;
  std::map<Address, std::uint64_t> used_;
};

}  // namespace detail

/// Assembles `source` into a memory image. Throws AsmError with the 1-based
/// line number on undefined or duplicate labels, immediate overflow, unknown
/// mnemonics and malformed operands.
inline MemoryImage assemble(std::string_view source) { return detail::Assembler{}.run(source); }

}  // namespace pipesim
