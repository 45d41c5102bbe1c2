#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "cemax/errors.hpp"

namespace cemax {

// Scenario files may write quantities as strings with SI prefixes, e.g.
// "2MHz", "50mW", "1s", "20kbps". The prefix sets the scale; the unit word
// is informational only. Everything is converted to base SI units (Hz, W,
// s, bits/s, cycles/s) at parse time; solvers never see prefixed values.

inline bool si_unit_word(const std::string& w) {
  return w == "Hz" || w == "W" || w == "s" || w == "bps" || w == "b/s" ||
         w == "J" || w == "bit/s" || w == "cycles/s";
}

/// Parses "2MHz" -> 2e6, "50mW" -> 0.05, "1e-24" -> 1e-24.
/// Throws Error(ConfigParseError) on malformed input.
inline double parse_si(const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  double value = std::strtod(begin, &end);
  if (end == begin) {
    throw Error(Errc::ConfigParseError, "no number in quantity '" + text + "'");
  }
  std::string rest(end);
  // trim surrounding whitespace
  while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.front()))) rest.erase(rest.begin());
  while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.back()))) rest.pop_back();
  if (rest.empty()) return value;

  double scale = 1.0;
  std::string unit = rest;
  if (!si_unit_word(unit)) {
    switch (rest[0]) {
      case 'G': scale = 1e9; break;
      case 'M': scale = 1e6; break;
      case 'k': scale = 1e3; break;
      case 'm': scale = 1e-3; break;
      case 'u': scale = 1e-6; break;
      case 'n': scale = 1e-9; break;
      case 'p': scale = 1e-12; break;
      default:
        throw Error(Errc::ConfigParseError, "unknown unit '" + rest + "' in '" + text + "'");
    }
    unit = rest.substr(1);
    if (!si_unit_word(unit)) {
      throw Error(Errc::ConfigParseError, "unknown unit '" + rest + "' in '" + text + "'");
    }
  }
  return value * scale;
}

/// Fixed 12-significant-digit rendering used for CSV output.
inline std::string format_sig12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace cemax
