#pragma once

#include "dmtlink/common.hpp"

#include <span>

namespace dmtlink {

inline constexpr int kMaxQamOrder = 6;

// Unit-mean-power constellation for `order` bits per symbol, indexed by the
// label formed from the bit group MSB-first.
//   order 1      BPSK {-1, +1}
//   even orders  square QAM, Gray-coded per axis (MSB half on I)
//   order 3      4x2 rectangular, Gray-coded per axis
//   order 5      32-point cross (8x4 rectangle with the |I|=7 columns folded
//                onto the Q=+-5 rows)
const std::vector<Complex>& constellation(int order);

// Maps `order` bits (each 0/1, MSB first) to a constellation point.
Complex qam_map(std::span<const std::uint8_t> bits, int order);

// Nearest-neighbour hard decision in the constellation scaled by sqrt(power).
// Ties resolve to the smaller label.
unsigned qam_decide_label(Complex symbol, int order, double power);
Complex qam_decide_point(Complex symbol, int order, double power);

// Writes the `order` bits of the decided label into out (MSB first).
void qam_demap(Complex symbol, int order, double power, std::span<std::uint8_t> out);
Bits qam_demap(Complex symbol, int order, double power);

} // namespace dmtlink
