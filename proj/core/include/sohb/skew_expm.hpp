#pragma once

#include "sohb/son_core.hpp"

namespace sohb {

/// exp(S) for antisymmetric S, by scaling-and-squaring with Pade
/// approximants (degree up to 13); always lands on SO(n).
Rotation exp_skew(const SkewMatrix& s);

/// Raw matrix exponential used by exp_skew; exposed for tests.
Mat expm(const Mat& m);

}  // namespace sohb
