#pragma once

/// @file
/// Deterministic assembly generators: random halting programs for
/// differential testing, and loop kernels with a known number of load-use
/// adjacencies.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pipesim::benchgen {

struct RandomProgramOptions {
  std::uint32_t max_trip_count = 4;   // loop iterations are drawn from [1, max_trip_count]
  std::uint32_t data_base = 0x10000;  // loads and stores stay inside [data_base, data_base + data_bytes)
  std::uint32_t data_bytes = 256;
  std::uint32_t working_regs = 9;     // x1..x9 carry values; x0 also appears
  // Relative weights of the top-level statement kinds.
  unsigned w_alu_reg = 6;
  unsigned w_alu_imm = 5;
  unsigned w_upper = 1;
  unsigned w_load = 6;
  unsigned w_store = 3;
  unsigned w_branch = 2;
  unsigned w_jump = 1;
  unsigned w_loop = 1;
};

/// Upper bound on dynamic instructions for gen_random_program(seed, length, opts).
inline std::uint64_t random_program_step_bound(std::uint32_t length, const RandomProgramOptions& opts = {}) {
  // Prologue and final ecall, plus the longest item: a loop of up to 10
  // instructions per trip behind its counter setup.
  return 2 + opts.working_regs + std::uint64_t{length} * (1 + 10 * std::max<std::uint32_t>(opts.max_trip_count, 1));
}

namespace detail {

// Fixed-width draw from mt19937_64 so text is identical across standard
// libraries (uniform_int_distribution is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint32_t below(std::uint32_t n) { return static_cast<std::uint32_t>(engine_() % n); }
  std::int32_t range(std::int32_t lo, std::int32_t hi) {
    return lo + static_cast<std::int32_t>(below(static_cast<std::uint32_t>(hi - lo + 1)));
  }
  bool chance(std::uint32_t percent) { return below(100) < percent; }

 private:
  std::mt19937_64 engine_;
};

inline constexpr const char* kAluReg[] = {"add", "sub", "sll", "slt", "sltu", "xor", "srl", "sra", "or", "and"};
inline constexpr const char* kAluImm[] = {"addi", "slti", "sltiu", "xori", "ori", "andi"};
inline constexpr const char* kShiftImm[] = {"slli", "srli", "srai"};
inline constexpr const char* kBranches[] = {"beq", "bne", "blt", "bge", "bltu", "bgeu"};
inline constexpr const char* kLoads[] = {"lb", "lh", "lw", "lbu", "lhu"};
inline constexpr const char* kStores[] = {"sb", "sh", "sw"};

constexpr const char* kDataReg = "x31";
constexpr const char* kLoopReg = "x30";
constexpr const char* kLinkBase = "x29";

class RandomProgram {
 public:
  RandomProgram(std::uint64_t seed, const RandomProgramOptions& opts) : rng_(seed), opts_(opts) {}

  std::string generate(std::uint32_t length) {
    out_ << "# random program\n";
    out_ << "    lui " << kDataReg << ", 0x" << std::hex << (opts_.data_base >> 12) << std::dec << "\n";
    if ((opts_.data_base & 0xfff) != 0) {
      throw std::invalid_argument("data_base must be 4 KiB aligned");
    }
    for (std::uint32_t r = 1; r <= opts_.working_regs; ++r) {
      out_ << "    addi x" << r << ", x0, " << rng_.range(-2048, 2047) << "\n";
    }
    for (std::uint32_t i = 0; i < length; ++i) top_level_item();
    out_ << "    ecall\n";

    out_ << ".org 0x" << std::hex << opts_.data_base << std::dec << "\n";
    for (std::uint32_t i = 0; i < opts_.data_bytes / 4; ++i) {
      out_ << "    .word 0x" << std::hex << (static_cast<std::uint32_t>(rng_.below(0xffffffffu))) << std::dec
           << "\n";
    }
    return out_.str();
  }

 private:
  std::string src() { return "x" + std::to_string(rng_.below(opts_.working_regs + 1)); }
  std::string dst() { return rng_.chance(5) ? "x0" : "x" + std::to_string(1 + rng_.below(opts_.working_regs)); }
  std::string label() { return "L" + std::to_string(next_label_++); }

  template <std::size_t N>
  const char* pick(const char* const (&names)[N]) {
    return names[rng_.below(N)];
  }

  void alu_reg() { out_ << "    " << pick(kAluReg) << " " << dst() << ", " << src() << ", " << src() << "\n"; }

  void alu_imm() {
    if (rng_.chance(25)) {
      out_ << "    " << pick(kShiftImm) << " " << dst() << ", " << src() << ", " << rng_.below(32) << "\n";
    } else {
      out_ << "    " << pick(kAluImm) << " " << dst() << ", " << src() << ", " << rng_.range(-2048, 2047) << "\n";
    }
  }

  void upper() {
    out_ << "    " << (rng_.chance(50) ? "lui" : "auipc") << " " << dst() << ", 0x" << std::hex
         << rng_.below(0x100000) << std::dec << "\n";
  }

  std::uint32_t offset(unsigned width) { return width * rng_.below(opts_.data_bytes / width); }

  void load() {
    const char* op = pick(kLoads);
    const unsigned width = op[1] == 'w' ? 4 : (op[1] == 'h' ? 2 : 1);
    out_ << "    " << op << " " << dst() << ", " << offset(width) << "(" << kDataReg << ")\n";
  }

  void store() {
    const char* op = pick(kStores);
    const unsigned width = op[1] == 'w' ? 4 : (op[1] == 'h' ? 2 : 1);
    out_ << "    " << op << " " << src() << ", " << offset(width) << "(" << kDataReg << ")\n";
  }

  void simple() {
    const std::uint32_t total = opts_.w_alu_reg + opts_.w_alu_imm + opts_.w_upper + opts_.w_load + opts_.w_store;
    std::uint32_t roll = rng_.below(std::max<std::uint32_t>(total, 1));
    if (roll < opts_.w_alu_reg) return alu_reg();
    roll -= opts_.w_alu_reg;
    if (roll < opts_.w_alu_imm) return alu_imm();
    roll -= opts_.w_alu_imm;
    if (roll < opts_.w_upper) return upper();
    roll -= opts_.w_upper;
    if (roll < opts_.w_load) return load();
    store();
  }

  // Conditional branch forward over 1-3 simple instructions.
  void forward_branch() {
    const auto target = label();
    out_ << "    " << pick(kBranches) << " " << src() << ", " << src() << ", " << target << "\n";
    const auto skipped = 1 + rng_.below(3);
    for (std::uint32_t i = 0; i < skipped; ++i) simple();
    out_ << target << ":\n";
  }

  // JAL over one or two instructions, or AUIPC + JALR to a fixed offset.
  void jump() {
    if (rng_.chance(50)) {
      const auto target = label();
      out_ << "    jal " << dst() << ", " << target << "\n";
      const auto skipped = 1 + rng_.below(2);
      for (std::uint32_t i = 0; i < skipped; ++i) simple();
      out_ << target << ":\n";
    } else {
      // auipc at A, jalr at A+4 lands on A+12, skipping one instruction.
      out_ << "    auipc " << kLinkBase << ", 0\n";
      out_ << "    jalr " << dst() << ", 12(" << kLinkBase << ")\n";
      simple();
    }
  }

  void loop() {
    const auto head = label();
    out_ << "    addi " << kLoopReg << ", x0, " << 1 + rng_.below(std::max<std::uint32_t>(opts_.max_trip_count, 1))
         << "\n";
    out_ << head << ":\n";
    const auto body = 1 + rng_.below(4);
    for (std::uint32_t i = 0; i < body; ++i) {
      if (rng_.chance(20)) {
        // Keep the loop body within the per-item instruction bound.
        const auto target = label();
        out_ << "    " << pick(kBranches) << " " << src() << ", " << src() << ", " << target << "\n";
        simple();
        out_ << target << ":\n";
      } else {
        simple();
      }
    }
    out_ << "    addi " << kLoopReg << ", " << kLoopReg << ", -1\n";
    out_ << "    bne " << kLoopReg << ", x0, " << head << "\n";
  }

  void top_level_item() {
    const std::uint32_t simple_weight =
        opts_.w_alu_reg + opts_.w_alu_imm + opts_.w_upper + opts_.w_load + opts_.w_store;
    const std::uint32_t total = simple_weight + opts_.w_branch + opts_.w_jump + opts_.w_loop;
    std::uint32_t roll = rng_.below(std::max<std::uint32_t>(total, 1));
    if (roll < simple_weight) return simple();
    roll -= simple_weight;
    if (roll < opts_.w_branch) return forward_branch();
    roll -= opts_.w_branch;
    if (roll < opts_.w_jump) return jump();
    loop();
  }

  Rng rng_;
  RandomProgramOptions opts_;
  std::ostringstream out_;
  unsigned next_label_ = 0;
};

}  // namespace detail

/// A random program over the supported subset that halts by construction:
/// forward branches and jumps only, plus non-nested counted loops. Loads and
/// stores use x31 as the base of the data region, x30 counts loop trips and
/// x29 holds AUIPC results for JALR. `length` is the number of top-level
/// items; random_program_step_bound() bounds the dynamic instruction count.
inline std::string gen_random_program(std::uint64_t seed, std::uint32_t length,
                                      const RandomProgramOptions& opts = {}) {
  if (length < 1) throw std::invalid_argument("length must be >= 1");
  if (opts.working_regs < 1 || opts.working_regs > 28) throw std::invalid_argument("working_regs must be in [1, 28]");
  if (opts.data_bytes < 4 || opts.data_bytes % 4 != 0 || opts.data_bytes > 2048) {
    throw std::invalid_argument("data_bytes must be a multiple of 4 in [4, 2048]");
  }
  return detail::RandomProgram(seed, opts).generate(length);
}

// ---------------------------------------------------------------------------
// Load-use kernels

/// Per-iteration shape of a load-use kernel: `adjacent_pairs` loads each
/// read by the very next instruction, one load whose reader is one
/// instruction later (no adjacency), `filler` independent ALU instructions,
/// and the counter decrement plus backward branch.
struct LoadUseLayout {
  std::uint32_t adjacent_pairs = 1;
  std::uint32_t filler = 5;

  std::uint32_t instructions_per_iteration() const { return 2 * adjacent_pairs + 3 + filler + 2; }
  double density() const {
    return static_cast<double>(adjacent_pairs) / static_cast<double>(instructions_per_iteration());
  }
};

struct LoadUseBench {
  std::string source;
  std::uint64_t expected_adjacencies = 0;  // dynamic load-use adjacencies
  LoadUseLayout layout;
  std::uint32_t iterations = 0;
};

inline constexpr std::uint32_t kMaxAdjacentPairs = 8;
inline constexpr std::uint32_t kMaxFiller = 64;

/// Layout whose fraction of dynamic instructions that consume a load in the
/// adjacent slot is closest to `density`. Ties go to the shorter body.
inline LoadUseLayout layout_for_density(double density) {
  if (!(density > 0.0 && density <= 1.0)) throw std::invalid_argument("hazard density must be in (0, 1]");
  LoadUseLayout best{0, 0};
  double best_err = std::abs(best.density() - density);
  for (std::uint32_t p = 0; p <= kMaxAdjacentPairs; ++p) {
    for (std::uint32_t f = 0; f <= kMaxFiller; ++f) {
      const LoadUseLayout l{p, f};
      const double err = std::abs(l.density() - density);
      if (err < best_err - 1e-12 ||
          (std::abs(err - best_err) <= 1e-12 && l.instructions_per_iteration() < best.instructions_per_iteration())) {
        best = l;
        best_err = err;
      }
    }
  }
  return best;
}

inline LoadUseBench gen_loaduse_bench(std::uint32_t iterations, const LoadUseLayout& layout) {
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  std::ostringstream os;
  const std::uint32_t data_base = 0x10000;
  const std::uint32_t slots = layout.adjacent_pairs + 1;

  os << "# load-use kernel: " << iterations << " iterations, " << layout.adjacent_pairs
     << " adjacent load-use pair(s) per iteration\n";
  os << "    lui x31, 0x" << std::hex << (data_base >> 12) << std::dec << "\n";
  // Loop counter via lui/addi so any 32-bit trip count fits.
  const std::uint32_t hi = (iterations + 0x800) >> 12;
  const auto lo = static_cast<std::int32_t>(iterations - (hi << 12));
  if (hi != 0) {
    os << "    lui x30, 0x" << std::hex << (hi & 0xfffff) << std::dec << "\n";
    os << "    addi x30, x30, " << lo << "\n";
  } else {
    os << "    addi x30, x0, " << lo << "\n";
  }
  os << "loop:\n";
  for (std::uint32_t p = 0; p < layout.adjacent_pairs; ++p) {
    const auto dst = 5 + (p % 4);
    os << "    lw x" << dst << ", " << 4 * p << "(x31)\n";
    os << "    add x" << 10 + (p % 4) << ", x" << 10 + (p % 4) << ", x" << dst << "\n";
  }
  // One load used at distance two: forwarded, never stalled.
  os << "    lw x9, " << 4 * (slots - 1) << "(x31)\n";
  os << "    addi x14, x14, 1\n";
  os << "    add x15, x15, x9\n";
  for (std::uint32_t f = 0; f < layout.filler; ++f) {
    const auto r = 16 + (f % 8);
    os << "    addi x" << r << ", x" << r << ", " << 1 + (f % 7) << "\n";
  }
  os << "    addi x30, x30, -1\n";
  os << "    bne x30, x0, loop\n";
  os << "    ecall\n";
  os << ".org 0x" << std::hex << data_base << std::dec << "\n";
  for (std::uint32_t i = 0; i < slots; ++i) os << "    .word " << 3 * i + 1 << "\n";

  LoadUseBench bench;
  bench.source = os.str();
  bench.expected_adjacencies = std::uint64_t{iterations} * layout.adjacent_pairs;
  bench.layout = layout;
  bench.iterations = iterations;
  return bench;
}

/// Kernel of `iterations` loop trips whose body approximates `density`
/// load-use adjacencies per dynamic instruction.
inline LoadUseBench gen_loaduse_bench(std::uint32_t iterations, double density) {
  return gen_loaduse_bench(iterations, layout_for_density(density));
}

}  // namespace pipesim::benchgen
