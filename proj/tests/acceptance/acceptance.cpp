// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pipesim/pipesim.hpp"
#include "reference_vectors.hpp"

using namespace pipesim;

namespace {

int g_failures = 0;

void report(const char* id, const char* title, bool ok, const std::string& detail) {
  std::printf("%s %s: %s (%s)\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
  if (!ok) ++g_failures;
}

struct CorpusEntry {
  std::uint64_t seed;
  std::uint32_t length;
  MemoryImage image;
  ArchState golden;
};

std::uint32_t corpus_length(std::uint64_t seed) { return 5 + static_cast<std::uint32_t>(seed % 36); }

CorpusEntry make_entry(std::uint64_t seed) {
  CorpusEntry e{seed, corpus_length(seed), {}, {}};
  e.image = assemble(benchgen::gen_random_program(seed, e.length));
  e.golden = golden::run(e.image, benchgen::random_program_step_bound(e.length));
  return e;
}

bool matches_golden(const RunReport& r, const ArchState& g) {
  return r.halted_cleanly && r.final_state_digest == state_digest(g) && r.retired == g.retired;
}

bool identity_holds(const RunReport& r) { return r.cycles == r.retired + 4 + r.bubbles.total(); }

// Random differential corpus plus the ordering property over the same runs.
void differential_and_ordering() {
  const auto start = std::chrono::steady_clock::now();
  constexpr std::uint64_t kPrograms = 1000;
  std::uint64_t agree = 0, ordered = 0, strict_needed = 0, strict_ok = 0;
  std::string first_bad;
  for (std::uint64_t seed = 1; seed <= kPrograms; ++seed) {
    const auto e = make_entry(seed);
    RunReport r[3];
    bool ok = true;
    for (int i = 0; i < 3; ++i) {
      r[i] = run(e.image, kAllSchemes[i]);
      ok = ok && matches_golden(r[i], e.golden);
    }
    if (ok) {
      ++agree;
    } else if (first_bad.empty()) {
      first_bad = "seed " + std::to_string(seed);
    }
    const auto& nob = r[0];
    const auto& stall = r[1];
    const auto& ssr = r[2];
    if (nob.cycles >= stall.cycles && stall.cycles >= ssr.cycles) ++ordered;
    if (stall.load_use_events > 0) {
      ++strict_needed;
      if (stall.cycles > ssr.cycles) ++strict_ok;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ostringstream d1;
  d1 << agree << "/" << kPrograms << " programs agree on digest and retired count, " << secs << " s";
  if (!first_bad.empty()) d1 << ", first mismatch " << first_bad;
  report("AC1", "random differential corpus", agree == kPrograms && secs < 60.0, d1.str());

  std::ostringstream d6;
  d6 << ordered << "/" << kPrograms << " ordered nobypass >= stall >= ssr; " << strict_ok << "/" << strict_needed
     << " with load-use events have stall > ssr";
  report("AC6", "cycle ordering across corpus", ordered == kPrograms && strict_ok == strict_needed, d6.str());
}

void micro_diagrams() {
  RunConfig rc;
  rc.presets.regs[2] = 0x100;
  rc.presets.words[0x100] = 21;
  const auto lu = assemble("lw x1, 0(x2)\nadd x3, x1, x1\necall\n");
  const auto lu_stall = run(lu, SchemeId::STALL, rc);
  const auto lu_ssr = run(lu, SchemeId::SSR, rc);

  RunConfig rb;
  rb.presets.regs[10] = 0x200;
  rb.presets.words[0x200] = 5;  // nonzero: beqz not taken
  const auto br = assemble("lw a1, 0(a0)\nbeqz a1, done\ndone: ecall\n");
  const auto br_stall = run(br, SchemeId::STALL, rb);
  const auto br_ssr = run(br, SchemeId::SSR, rb);

  const auto pair = run(assemble("addi x1, x0, 1\necall\n"), SchemeId::SSR);

  const bool ok = lu_stall.cycles == 8 && lu_ssr.cycles == 7 && br_stall.cycles == 8 && br_ssr.cycles == 7 &&
                  br_stall.final_state_digest == br_ssr.final_state_digest && br_stall.retired == br_ssr.retired &&
                  pair.cycles == 6;
  std::ostringstream d;
  d << "lw/add/ecall stall=" << lu_stall.cycles << " ssr=" << lu_ssr.cycles << "; lw/beqz/ecall stall="
    << br_stall.cycles << " ssr=" << br_ssr.cycles
    << (br_stall.final_state_digest == br_ssr.final_state_digest ? " same state" : " STATE DIFFERS")
    << "; addi/ecall=" << pair.cycles;
  report("AC2", "micro pipeline diagrams", ok, d.str());
}

void loaduse_kernel() {
  const auto bench = benchgen::gen_loaduse_bench(1000, benchgen::LoadUseLayout{1, 5});
  const auto image = assemble(bench.source);
  const auto stall = run(image, SchemeId::STALL);
  const auto ssr = run(image, SchemeId::SSR);
  const auto diff = static_cast<std::int64_t>(stall.cycles) - static_cast<std::int64_t>(ssr.cycles);
  const bool ok = bench.expected_adjacencies == 1000 && diff == 1000 && ssr.bubbles.load_use_stall_cycles == 0 &&
                  stall.final_state_digest == ssr.final_state_digest;
  std::ostringstream d;
  d << "stall=" << stall.cycles << " ssr=" << ssr.cycles << " difference=" << diff
    << " ssr load-use stalls=" << ssr.bubbles.load_use_stall_cycles;
  report("AC3", "load-use kernel, 1000 iterations", ok, d.str());
}

void rate_analogue() {
  const auto bench = benchgen::gen_loaduse_bench(10000, 0.10);
  const auto image = assemble(bench.source);
  const auto stall = run(image, SchemeId::STALL);
  const auto ssr = run(image, SchemeId::SSR);
  const auto c = compare(stall, ssr);
  const double measured_density =
      static_cast<double>(stall.load_use_events) / static_cast<double>(stall.retired);

  RunReport base, cand;
  base.scheme = SchemeId::STALL;
  cand.scheme = SchemeId::SSR;
  base.cycles = 247888;
  cand.cycles = 231862;
  const auto fixed_pair = compare(base, cand);
  const auto printed = format_pct(fixed_pair.speedup_pct, 1);

  const bool ok = c.speedup_pct >= 5.0 && c.speedup_pct <= 10.0 && printed == "+6.9%";
  std::ostringstream d;
  d << "density " << measured_density << " load-use events per retired instruction, stall=" << stall.cycles
    << " ssr=" << ssr.cycles << " optimization rate " << format_pct(c.speedup_pct, 2) << "; 247888 vs 231862 -> "
    << printed;
  report("AC4", "optimization-rate analogue", ok, d.str());
}

void cache_enabled() {
  constexpr std::uint64_t kPrograms = 200;
  std::uint64_t good = 0, total = 0;
  std::string first_bad;
  for (const std::uint32_t penalty : {3u, 10u}) {
    RunConfig rc;
    rc.cache.enabled = true;
    rc.cache.num_lines = 8;
    rc.cache.line_bytes = 16;
    rc.cache.miss_penalty = penalty;
    for (std::uint64_t seed = 10001; seed < 10001 + kPrograms; ++seed) {
      const auto e = make_entry(seed);
      RunReport r[3];
      bool ok = true;
      for (int i = 0; i < 3; ++i) {
        r[i] = run(e.image, kAllSchemes[i], rc);
        ok = ok && matches_golden(r[i], e.golden) && identity_holds(r[i]);
      }
      ok = ok && r[2].cycles <= r[1].cycles;
      ++total;
      if (ok) {
        ++good;
      } else if (first_bad.empty()) {
        first_bad = "seed " + std::to_string(seed) + " penalty " + std::to_string(penalty);
      }
    }
  }
  std::ostringstream d;
  d << good << "/" << total << " runs (penalties 3 and 10, 8 lines x 16 bytes) match golden, ssr <= stall, "
    << "cycle identity exact";
  if (!first_bad.empty()) d << ", first failure " << first_bad;
  report("AC5", "cache-enabled differential", good == total, d.str());
}

void encoding() {
  std::mt19937_64 rng(77);
  const auto pick = [&](std::int64_t lo, std::int64_t hi) {
    return static_cast<std::int32_t>(lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1)));
  };
  int survived = 0;
  constexpr int kCount = 10000;
  for (int i = 0; i < kCount;) {
    const auto op = static_cast<Op>(1 + rng() % (kNumOps - 1));
    std::int32_t imm = 0;
    switch (op_class(op)) {
      case OpClass::Branch: imm = 2 * pick(-2048, 2047); break;
      case OpClass::Jal: imm = 2 * pick(-(1 << 19), (1 << 19) - 1); break;
      case OpClass::Lui:
      case OpClass::Auipc: imm = static_cast<std::int32_t>(static_cast<Word>(pick(0, 0xfffff)) << 12); break;
      case OpClass::AluImm:
        imm = (op == Op::SLLI || op == Op::SRLI || op == Op::SRAI) ? pick(0, 31) : pick(-2048, 2047);
        break;
      case OpClass::Load:
      case OpClass::Store:
      case OpClass::Jalr: imm = pick(-2048, 2047); break;
      default: break;
    }
    const auto in = make_instruction(op, static_cast<RegIndex>(rng() % 32), static_cast<RegIndex>(rng() % 32),
                                     static_cast<RegIndex>(rng() % 32), imm);
    if (in.op == Op::ADDI && in.rd == 0 && in.rs1 == 0 && in.imm == 0) continue;  // canonical nop
    ++i;
    if (decode(encode(in)) == in) ++survived;
  }

  const auto reference = [](std::string_view src) -> Word {
    for (const auto& v : fixtures::kReferenceEncodings) {
      if (v.source == src) return v.word;
    }
    return 0xffffffffu;
  };
  const Word nop = encode(make_instruction(Op::NOP, 0, 0, 0, 0));
  const Word addi = encode(make_instruction(Op::ADDI, 1, 0, 0, 5));
  const Word lw = encode(make_instruction(Op::LW, 10, 2, 0, 0));
  const bool refs = nop == 0x00000013 && addi == 0x00500093 && lw == 0x00012503 && reference("nop") == nop &&
                    reference("addi x1, x0, 5") == addi && reference("lw x10, 0(x2)") == lw;

  std::ostringstream d;
  d << survived << "/" << kCount << " round-trips; nop=" << hex32(nop) << " addi=" << hex32(addi)
    << " lw=" << hex32(lw) << (refs ? " match" : " DO NOT match") << " the reference assembler";
  report("AC7", "encode/decode round trip and reference encodings", survived == kCount && refs, d.str());
}

template <typename F>
void guarded(const char* id, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(id, "unexpected exception", false, e.what());
  }
}

}  // namespace

int main() {
  guarded("AC1/AC6", differential_and_ordering);
  guarded("AC2", micro_diagrams);
  guarded("AC3", loaduse_kernel);
  guarded("AC4", rate_analogue);
  guarded("AC5", cache_enabled);
  guarded("AC7", encoding);
  std::printf("%s: %d failing criteria\n", g_failures == 0 ? "ALL PASS" : "FAILURES", g_failures);
  return g_failures == 0 ? 0 : 1;
}
