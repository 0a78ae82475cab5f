#include "spherimax/detail/format.hpp"

#include <cstdio>

namespace spherimax::detail {

std::string sig12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace spherimax::detail
