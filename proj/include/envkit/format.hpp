#pragma once

#include <charconv>
#include <cmath>
#include <span>
#include <string>

namespace envkit {

/// Shortest general-format rendering with at most 15 significant digits.
/// Locale independent; "inf", "-inf" and "nan" for non-finite values.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 15);
  return std::string(buf, res.ptr);
}

/// v rounded to 15 significant digits.
inline double round15(double v) {
  if (!std::isfinite(v)) return v;
  const std::string s = format_double(v);
  double out = v;
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

inline std::string format_vector(std::span<const double> x, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out += sep;
    out += format_double(x[i]);
  }
  return out;
}

}  // namespace envkit
