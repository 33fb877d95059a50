#pragma once

/// @file
/// Memory images and the hex image text format.
///
/// Hex format: one 8-hex-digit word per line, placed at consecutive word
/// addresses. A line `@hexaddr` moves placement to that (4-byte aligned)
/// address and starts a new segment. Blank lines and `#` comments are
/// ignored. Words land in memory little-endian.

#include <cctype>
#include <charconv>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pipesim/isa.hpp"

namespace pipesim {

struct Segment {
  Address base = 0;
  std::vector<Word> words;

  Address end() const { return base + static_cast<Address>(4 * words.size()); }
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Contiguous word segments plus the start PC. The entry point is the base
/// of the first segment.
struct MemoryImage {
  Address entry = 0;
  std::vector<Segment> segments;

  std::size_t word_count() const {
    std::size_t n = 0;
    for (const auto& s : segments) n += s.words.size();
    return n;
  }

  friend bool operator==(const MemoryImage&, const MemoryImage&) = default;
};

class ImageFormatError : public std::runtime_error {
 public:
  ImageFormatError(std::size_t line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

inline std::string write_hex(const MemoryImage& image) {
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  bool first = true;
  for (const auto& seg : image.segments) {
    if (!first || seg.base != 0) os << '@' << std::setw(8) << seg.base << '\n';
    for (const Word w : seg.words) os << std::setw(8) << w << '\n';
    first = false;
  }
  return os.str();
}

inline MemoryImage read_hex(std::string_view text) {
  MemoryImage image;
  std::size_t line_no = 0;
  bool placed = false;
  Address cursor = 0;

  const auto parse_hex = [&](std::string_view digits) -> Word {
    Word value = 0;
    const auto* end = digits.data() + digits.size();
    const auto [ptr, ec] = std::from_chars(digits.data(), end, value, 16);
    if (ec != std::errc{} || ptr != end || digits.empty()) {
      throw ImageFormatError(line_no, "bad hex value '" + std::string(digits) + "'");
    }
    return value;
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    if (line.empty()) continue;

    if (line.front() == '@') {
      cursor = parse_hex(line.substr(1));
      if (cursor % 4 != 0) throw ImageFormatError(line_no, "placement address not 4-byte aligned");
      image.segments.push_back(Segment{cursor, {}});
      placed = true;
      continue;
    }
    if (line.size() != 8) throw ImageFormatError(line_no, "expected an 8-digit hex word");
    if (!placed) {
      image.segments.push_back(Segment{0, {}});
      placed = true;
    }
    image.segments.back().words.push_back(parse_hex(line));
  }
  std::erase_if(image.segments, [](const Segment& s) { return s.words.empty(); });
  image.entry = image.segments.empty() ? 0 : image.segments.front().base;
  return image;
}

}  // namespace pipesim
