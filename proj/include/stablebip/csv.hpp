#ifndef STABLEBIP_CSV_HPP_
#define STABLEBIP_CSV_HPP_

#include <cstdio>
#include <ostream>
#include <string>

namespace stablebip {

// 17 significant digits: enough to round-trip any double.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Short form for column labels such as quantile levels.
inline std::string format_label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

}  // namespace stablebip

#endif  // STABLEBIP_CSV_HPP_
