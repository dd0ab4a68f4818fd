#include "sohb/number_format.hpp"

#include <cmath>
#include <cstdio>

namespace sohb {

std::string fp17(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace sohb
