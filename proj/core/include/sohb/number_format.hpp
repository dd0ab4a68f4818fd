#pragma once

#include <string>

namespace sohb {

/// Formats with 17 significant digits ("%.17g"); infinities print as
/// "inf"/"-inf" so they stand out from numeric CSV columns.
std::string fp17(double x);

}  // namespace sohb
