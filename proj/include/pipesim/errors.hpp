#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "pipesim/isa.hpp"

namespace pipesim {

inline std::string hex32(std::uint32_t value) {
  char buf[11];
  std::snprintf(buf, sizeof buf, "0x%08x", value);
  return buf;
}

enum class SimErrorKind {
  IllegalInstruction,
  MisalignedAccess,
  MisalignedFetch,
  NonTermination,
};

/// A simulation that cannot continue. `cycle` is set by the pipeline model
/// and left empty by the golden interpreter.
class SimError : public std::runtime_error {
 public:
  SimError(SimErrorKind kind, Address pc, std::optional<std::uint64_t> cycle, const std::string& detail)
      : std::runtime_error(format(kind, pc, cycle, detail)), kind_(kind), pc_(pc), cycle_(cycle) {}

  SimErrorKind kind() const noexcept { return kind_; }
  Address pc() const noexcept { return pc_; }
  std::optional<std::uint64_t> cycle() const noexcept { return cycle_; }

 private:
  static std::string format(SimErrorKind kind, Address pc, std::optional<std::uint64_t> cycle,
                            const std::string& detail) {
    std::ostringstream os;
    switch (kind) {
      case SimErrorKind::IllegalInstruction: os << "illegal instruction"; break;
      case SimErrorKind::MisalignedAccess: os << "misaligned data access"; break;
      case SimErrorKind::MisalignedFetch: os << "misaligned jump target"; break;
      case SimErrorKind::NonTermination: os << "possible non-termination"; break;
    }
    os << " at pc=" << hex32(pc);
    if (cycle) os << " cycle=" << *cycle;
    if (!detail.empty()) os << ": " << detail;
    return os.str();
  }

  SimErrorKind kind_;
  Address pc_;
  std::optional<std::uint64_t> cycle_;
};

}  // namespace pipesim
