#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "pipesim/image.hpp"
#include "pipesim/isa.hpp"

namespace pipesim {

/// Byte-addressable, default-zero 32-bit address space. Only bytes that were
/// ever written are stored.
class SparseMemory {
 public:
  std::uint8_t read8(Address addr) const {
    const auto it = bytes_.find(addr);
    return it == bytes_.end() ? 0 : it->second;
  }

  /// Little-endian read of `width` bytes (1, 2 or 4), zero-extended.
  Word read(Address addr, unsigned width) const {
    Word value = 0;
    for (unsigned i = 0; i < width; ++i) value |= Word{read8(addr + i)} << (8 * i);
    return value;
  }

  void write(Address addr, unsigned width, Word value) {
    for (unsigned i = 0; i < width; ++i) bytes_[addr + i] = static_cast<std::uint8_t>(value >> (8 * i));
  }

  Word read32(Address addr) const { return read(addr, 4); }
  void write32(Address addr, Word value) { write(addr, 4, value); }

  /// Written bytes in ascending address order.
  const std::map<Address, std::uint8_t>& written() const noexcept { return bytes_; }

  friend bool operator==(const SparseMemory&, const SparseMemory&) = default;

 private:
  std::map<Address, std::uint8_t> bytes_;
};

struct ArchState {
  std::array<Word, kNumRegs> regs{};
  Address pc = 0;
  SparseMemory mem;
  bool halted = false;
  std::uint64_t retired = 0;

  void set_reg(RegIndex r, Word value) {
    if (r != 0) regs[r] = value;
  }
};

/// Register and memory values applied before execution starts.
struct Presets {
  std::map<RegIndex, Word> regs;
  std::map<Address, Word> words;  // 32-bit little-endian pokes
};

/// Fresh state with `image` loaded, `presets` applied and pc at the entry.
inline ArchState make_initial_state(const MemoryImage& image, const Presets& presets = {}) {
  ArchState state;
  for (const auto& seg : image.segments) {
    for (std::size_t i = 0; i < seg.words.size(); ++i) {
      state.mem.write32(seg.base + static_cast<Address>(4 * i), seg.words[i]);
    }
  }
  for (const auto& [addr, value] : presets.words) state.mem.write32(addr, value);
  for (const auto& [reg, value] : presets.regs) state.set_reg(reg, value);
  state.pc = image.entry;
  return state;
}

/// FNV-1a over the 32 registers followed by every written (address, byte)
/// pair in address order. PC and counters are excluded: they are
/// microarchitecture-dependent.
inline std::uint64_t state_digest(const std::array<Word, kNumRegs>& regs, const SparseMemory& mem) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  const auto mix = [&h](std::uint8_t byte) {
    h ^= byte;
    h *= 0x100000001b3ull;
  };
  const auto mix_word = [&mix](Word w) {
    for (int i = 0; i < 4; ++i) mix(static_cast<std::uint8_t>(w >> (8 * i)));
  };
  for (const Word r : regs) mix_word(r);
  for (const auto& [addr, byte] : mem.written()) {
    mix_word(addr);
    mix(byte);
  }
  return h;
}

inline std::uint64_t state_digest(const ArchState& s) { return state_digest(s.regs, s.mem); }

}  // namespace pipesim
