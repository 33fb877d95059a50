#pragma once

/// @file
/// Data-memory access path with a direct-mapped cache latency model.
///
/// The cache holds tags only: data always comes from the flat backing store,
/// so enabling it changes MEM-stage occupancy and nothing else. Write-allocate,
/// write-through, all lines invalid at reset. Instruction fetch bypasses it.

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pipesim/arch_state.hpp"
#include "pipesim/isa.hpp"

namespace pipesim {

struct CacheConfig {
  bool enabled = false;
  std::uint32_t num_lines = 64;
  std::uint32_t line_bytes = 16;
  std::uint32_t miss_penalty = 10;  // extra cycles on a miss; a hit costs 1

  /// Throws std::invalid_argument describing the first bad field.
  void validate() const {
    if (num_lines == 0 || !std::has_single_bit(num_lines)) {
      throw std::invalid_argument("cache lines must be a power of two >= 1, got " + std::to_string(num_lines));
    }
    if (line_bytes < 4 || !std::has_single_bit(line_bytes)) {
      throw std::invalid_argument("cache line size must be a power of two >= 4, got " + std::to_string(line_bytes));
    }
    if (enabled && miss_penalty < 1) throw std::invalid_argument("cache miss penalty must be >= 1");
  }
};

enum class AccessKind { Read, Write };

struct AccessResult {
  Word value = 0;             // raw zero-extended bytes for reads, 0 for writes
  std::uint32_t latency = 1;  // MEM-stage occupancy in cycles
  bool hit = true;
};

class DataMemory {
 public:
  DataMemory(SparseMemory& backing, CacheConfig config) : backing_(&backing), config_(config) {
    config_.validate();
    if (config_.enabled) lines_.assign(config_.num_lines, Line{});
  }

  const CacheConfig& config() const noexcept { return config_; }
  std::uint64_t hits() const noexcept { return hits_; }
  std::uint64_t misses() const noexcept { return misses_; }

  /// Performs a read or write of `width` bytes. `addr` must be aligned to
  /// `width`; callers check alignment before reaching memory.
  AccessResult access(Address addr, unsigned width, AccessKind kind, Word data = 0) {
    if (width != 1 && width != 2 && width != 4) throw std::invalid_argument("access width must be 1, 2 or 4");
    if (addr % width != 0) throw std::invalid_argument("misaligned access at " + std::to_string(addr));

    AccessResult result;
    if (kind == AccessKind::Read) {
      result.value = backing_->read(addr, width);
    } else {
      backing_->write(addr, width, data);
    }
    if (!config_.enabled) return result;

    const Address block = addr / config_.line_bytes;
    Line& line = lines_[block & (config_.num_lines - 1)];
    const Address tag = block / config_.num_lines;
    if (line.valid && line.tag == tag) {
      ++hits_;
      return result;
    }
    ++misses_;
    line.valid = true;
    line.tag = tag;
    result.hit = false;
    result.latency = 1 + config_.miss_penalty;
    return result;
  }

 private:
  struct Line {
    bool valid = false;
    Address tag = 0;
  };

  SparseMemory* backing_;
  CacheConfig config_;
  std::vector<Line> lines_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

}  // namespace pipesim
