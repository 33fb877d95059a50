#pragma once

/// @file
/// Command-line front end.
///
///   pipesim asm FILE -o OUT
///   pipesim run FILE --scheme nobypass|stall|ssr [options]
///   pipesim compare FILE --schemes stall,ssr[,...] [options]
///   pipesim gen random --seed N --length L [-o OUT]
///   pipesim gen loaduse --iterations M (--density D | --pairs P --filler F) [-o OUT]
///
/// Exit codes: 0 success, 1 simulation failure (illegal instruction,
/// misaligned access, cycle limit, state mismatch between schemes), 2 usage,
/// input or assembly error.

#include <fstream>
#include <future>
#include <iostream>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pipesim/assembler.hpp"
#include "pipesim/benchgen.hpp"
#include "pipesim/hazard.hpp"
#include "pipesim/image.hpp"
#include "pipesim/pipeline.hpp"
#include "pipesim/report.hpp"
#include "pipesim/trace.hpp"

namespace pipesim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSimulation = 1;
inline constexpr int kExitUsage = 2;

/// Usage or input problem; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class InputFormat { Auto, Asm, Hex };

struct CliConfig {
  std::string subcommand;
  std::string input;
  std::string output;
  InputFormat format = InputFormat::Auto;
  std::string scheme = "ssr";
  std::vector<std::string> schemes;
  std::string cache = "off";
  std::uint32_t cache_lines = CacheConfig{}.num_lines;
  std::uint32_t line_bytes = CacheConfig{}.line_bytes;
  std::uint32_t miss_penalty = CacheConfig{}.miss_penalty;
  bool trace = false;
  std::string trace_out;
  std::string json_out;
  std::uint64_t max_cycles = kDefaultMaxCycles;
  std::vector<std::string> sets;
  std::vector<std::string> pokes;
  int decimals = 2;
  // gen
  std::uint64_t seed = 1;
  std::uint32_t length = 20;
  std::uint32_t iterations = 1000;
  std::optional<double> density;
  std::optional<std::uint32_t> pairs;
  std::optional<std::uint32_t> filler;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

inline MemoryImage load_image(const std::string& path, InputFormat format) {
  if (format == InputFormat::Auto) {
    format = path.size() >= 4 && path.compare(path.size() - 4, 4, ".hex") == 0 ? InputFormat::Hex : InputFormat::Asm;
  }
  const auto text = read_file(path);
  try {
    return format == InputFormat::Hex ? read_hex(text) : assemble(text);
  } catch (const AsmError& e) {
    throw UsageError(path + ":" + std::to_string(e.line()) + ": " + e.message());
  } catch (const ImageFormatError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

inline Word parse_value(const std::string& text, const std::string& what) {
  const auto v = parse_integer(text);
  if (!v || *v < -(std::int64_t{1} << 31) || *v > 0xffffffffll) {
    throw UsageError("bad " + what + " value '" + text + "'");
  }
  return static_cast<Word>(*v);
}

inline Presets parse_presets(const CliConfig& cfg) {
  Presets p;
  for (const auto& s : cfg.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects xN=VALUE, got '" + s + "'");
    const auto reg = parse_register(s.substr(0, eq));
    if (!reg) throw UsageError("--set: bad register '" + s.substr(0, eq) + "'");
    if (*reg == 0) throw UsageError("--set: x0 is hardwired to zero");
    p.regs[*reg] = parse_value(s.substr(eq + 1), "--set");
  }
  for (const auto& s : cfg.pokes) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw UsageError("--poke expects ADDR=VALUE, got '" + s + "'");
    const auto addr = parse_integer(s.substr(0, eq));
    if (!addr || *addr < 0 || *addr > 0xffffffffll || *addr % 4 != 0) {
      throw UsageError("--poke: address must be a 4-byte aligned 32-bit value, got '" + s.substr(0, eq) + "'");
    }
    p.words[static_cast<Address>(*addr)] = parse_value(s.substr(eq + 1), "--poke");
  }
  return p;
}

inline RunConfig make_run_config(const CliConfig& cfg, bool cache_flags_given) {
  RunConfig rc;
  if (cfg.cache != "on" && cfg.cache != "off") throw UsageError("--cache must be 'on' or 'off'");
  rc.cache.enabled = cfg.cache == "on";
  if (!rc.cache.enabled && cache_flags_given) {
    throw UsageError("--cache-lines, --line-bytes and --miss-penalty require --cache on");
  }
  rc.cache.num_lines = cfg.cache_lines;
  rc.cache.line_bytes = cfg.line_bytes;
  rc.cache.miss_penalty = cfg.miss_penalty;
  try {
    rc.cache.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (cfg.max_cycles == 0) throw UsageError("--max-cycles must be > 0");
  rc.max_cycles = cfg.max_cycles;
  rc.presets = parse_presets(cfg);
  return rc;
}

inline SchemeId scheme_from(const std::string& name) {
  const auto s = parse_scheme(name);
  if (!s) throw UsageError("unknown scheme '" + name + "' (expected nobypass, stall or ssr)");
  return *s;
}

struct SchemeRun {
  RunReport report;
  std::string trace;
};

inline SchemeRun run_scheme(const MemoryImage& image, SchemeId scheme, const RunConfig& rc, bool want_trace) {
  TraceRecorder recorder;
  SchemeRun out;
  out.report = run(image, scheme, rc, want_trace ? recorder.observer() : Pipeline::Observer{});
  if (want_trace) out.trace = recorder.render();
  return out;
}

inline void emit_trace(const CliConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.trace_out.empty()) {
    out << text;
  } else {
    write_file(cfg.trace_out, text);
  }
}

inline void emit_json_text(const CliConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.json_out == "-") {
    out << text << '\n';
  } else {
    write_file(cfg.json_out, text + "\n");
  }
}

inline int cmd_asm(const CliConfig& cfg, std::ostream& out) {
  const auto image = load_image(cfg.input, cfg.format);
  const auto hex = write_hex(image);
  if (cfg.output.empty() || cfg.output == "-") {
    out << hex;
  } else {
    write_file(cfg.output, hex);
  }
  return kExitOk;
}

inline int cmd_run(const CliConfig& cfg, bool cache_flags_given, std::ostream& out) {
  const auto image = load_image(cfg.input, cfg.format);
  const auto rc = make_run_config(cfg, cache_flags_given);
  const auto scheme = scheme_from(cfg.scheme);
  const auto result = run_scheme(image, scheme, rc, cfg.trace || !cfg.trace_out.empty());
  if (!result.trace.empty()) emit_trace(cfg, result.trace, out);
  if (!cfg.json_out.empty()) emit_json_text(cfg, emit_json(result.report), out);
  if (cfg.json_out != "-") out << render_table({result.report}, {}, cfg.decimals);
  return kExitOk;
}

inline int cmd_compare(const CliConfig& cfg, bool cache_flags_given, std::ostream& out) {
  const auto image = load_image(cfg.input, cfg.format);
  const auto rc = make_run_config(cfg, cache_flags_given);
  std::vector<SchemeId> schemes;
  std::set<SchemeId> seen;
  for (const auto& name : cfg.schemes) {
    const auto s = scheme_from(name);
    if (!seen.insert(s).second) throw UsageError("scheme '" + name + "' listed twice");
    schemes.push_back(s);
  }
  if (schemes.size() < 2) throw UsageError("compare needs at least two distinct schemes");

  const bool want_trace = cfg.trace || !cfg.trace_out.empty();
  std::vector<std::future<SchemeRun>> pending;
  for (const auto s : schemes) {
    pending.push_back(std::async(std::launch::async, [&image, s, &rc, want_trace] {
      return run_scheme(image, s, rc, want_trace);
    }));
  }
  std::vector<SchemeRun> results;
  for (auto& f : pending) results.push_back(f.get());

  std::vector<RunReport> reports;
  for (const auto& r : results) reports.push_back(r.report);
  std::vector<ComparisonReport> comparisons;
  for (std::size_t i = 1; i < reports.size(); ++i) comparisons.push_back(compare(reports[0], reports[i]));

  if (want_trace) {
    std::string text;
    for (const auto& r : results) text += "== " + std::string(scheme_name(r.report.scheme)) + "\n" + r.trace + "\n";
    emit_trace(cfg, text, out);
  }
  if (!cfg.json_out.empty()) {
    ordered_json j;
    j["runs"] = ordered_json::array();
    for (const auto& r : reports) j["runs"].push_back(to_json(r));
    j["comparisons"] = ordered_json::array();
    for (const auto& c : comparisons) j["comparisons"].push_back(to_json(c));
    emit_json_text(cfg, j.dump(2), out);
  }
  if (cfg.json_out != "-") out << render_table(reports, comparisons, cfg.decimals);
  return kExitOk;
}

inline int cmd_gen(const CliConfig& cfg, const std::string& kind, std::ostream& out, std::ostream& err) {
  std::string text;
  if (kind == "random") {
    if (cfg.length < 1) throw UsageError("--length must be >= 1");
    text = benchgen::gen_random_program(cfg.seed, cfg.length);
  } else {
    if (cfg.iterations < 1) throw UsageError("--iterations must be >= 1");
    benchgen::LoadUseBench bench;
    if (cfg.density) {
      if (cfg.pairs || cfg.filler) throw UsageError("use either --density or --pairs/--filler");
      if (!(*cfg.density > 0.0 && *cfg.density <= 1.0)) throw UsageError("--density must be in (0, 1]");
      bench = benchgen::gen_loaduse_bench(cfg.iterations, *cfg.density);
    } else {
      benchgen::LoadUseLayout layout;
      if (cfg.pairs) layout.adjacent_pairs = *cfg.pairs;
      if (cfg.filler) layout.filler = *cfg.filler;
      bench = benchgen::gen_loaduse_bench(cfg.iterations, layout);
    }
    text = bench.source;
    err << "load-use adjacencies: " << bench.expected_adjacencies << " (density " << bench.layout.density()
        << ")\n";
  }
  if (cfg.output.empty() || cfg.output == "-") {
    out << text;
  } else {
    write_file(cfg.output, text);
  }
  return kExitOk;
}

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cycle-accurate RV32I 5-stage pipeline simulator"};
  app.require_subcommand(1);
  CliConfig cfg;
  std::string format = "auto";

  const auto add_input = [&](CLI::App* sub) {
    sub->add_option("file", cfg.input, "Assembly (.s) or hex image (.hex)")->required();
    sub->add_option("--format", format, "Input format: auto, asm or hex")
        ->check(CLI::IsMember({"auto", "asm", "hex"}));
  };
  std::vector<CLI::Option*> cache_opts;
  const auto add_sim = [&](CLI::App* sub) {
    sub->add_option("--cache", cfg.cache, "Data cache: on or off")->check(CLI::IsMember({"on", "off"}));
    cache_opts.push_back(sub->add_option("--cache-lines", cfg.cache_lines, "Number of cache lines (power of two)"));
    cache_opts.push_back(sub->add_option("--line-bytes", cfg.line_bytes, "Cache line size in bytes (power of two)"));
    cache_opts.push_back(sub->add_option("--miss-penalty", cfg.miss_penalty, "Extra cycles per miss"));
    sub->add_flag("--trace", cfg.trace, "Print the per-cycle pipeline table");
    sub->add_option("--trace-out", cfg.trace_out, "Write the trace to a file instead of stdout");
    sub->add_option("--json", cfg.json_out, "Write the JSON report to a file ('-' for stdout)");
    sub->add_option("--max-cycles", cfg.max_cycles, "Cycle limit");
    sub->add_option("--set", cfg.sets, "Preset register, e.g. --set a1=5")->allow_extra_args(false);
    sub->add_option("--poke", cfg.pokes, "Preset memory word, e.g. --poke 0x100=42")->allow_extra_args(false);
    sub->add_option("--decimals", cfg.decimals, "Decimals for percentages")->check(CLI::Range(0, 9));
  };

  auto* asm_cmd = app.add_subcommand("asm", "Assemble to a hex image");
  add_input(asm_cmd);
  asm_cmd->add_option("-o,--output", cfg.output, "Output hex file ('-' for stdout)");

  auto* run_cmd = app.add_subcommand("run", "Simulate one scheme");
  add_input(run_cmd);
  run_cmd->add_option("--scheme", cfg.scheme, "nobypass, stall or ssr");
  add_sim(run_cmd);

  auto* cmp_cmd = app.add_subcommand("compare", "Simulate several schemes on the same input");
  add_input(cmp_cmd);
  cmp_cmd->add_option("--schemes", cfg.schemes, "Comma-separated schemes; the first is the baseline")
      ->delimiter(',')
      ->required();
  add_sim(cmp_cmd);

  auto* gen_cmd = app.add_subcommand("gen", "Generate workloads");
  gen_cmd->require_subcommand(1);
  auto* gen_random = gen_cmd->add_subcommand("random", "Random halting program");
  gen_random->add_option("--seed", cfg.seed, "RNG seed");
  gen_random->add_option("--length", cfg.length, "Top-level items");
  gen_random->add_option("-o,--output", cfg.output, "Output file");
  auto* gen_loaduse = gen_cmd->add_subcommand("loaduse", "Load-use kernel with a known hazard count");
  gen_loaduse->add_option("--iterations", cfg.iterations, "Loop iterations");
  gen_loaduse->add_option("--density", cfg.density, "Target load-use adjacencies per instruction");
  gen_loaduse->add_option("--pairs", cfg.pairs, "Adjacent load-use pairs per iteration");
  gen_loaduse->add_option("--filler", cfg.filler, "Independent ALU instructions per iteration");
  gen_loaduse->add_option("-o,--output", cfg.output, "Output file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  cfg.format = format == "hex" ? InputFormat::Hex : (format == "asm" ? InputFormat::Asm : InputFormat::Auto);
  bool cache_flags_given = false;
  for (const auto* o : cache_opts) cache_flags_given = cache_flags_given || (o->count() > 0);

  try {
    if (asm_cmd->parsed()) return cmd_asm(cfg, out);
    if (run_cmd->parsed()) return cmd_run(cfg, cache_flags_given, out);
    if (cmp_cmd->parsed()) return cmd_compare(cfg, cache_flags_given, out);
    if (gen_random->parsed()) return cmd_gen(cfg, "random", out, err);
    if (gen_loaduse->parsed()) return cmd_gen(cfg, "loaduse", out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const StateMismatch& e) {
    err << "error: " << e.what() << '\n';
    return kExitSimulation;
  } catch (const SimError& e) {
    err << "simulation error: " << e.what() << '\n';
    return kExitSimulation;
  }
  return kExitUsage;
}

}  // namespace pipesim::cli
