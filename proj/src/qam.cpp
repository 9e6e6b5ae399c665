#include "dmtlink/qam.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace dmtlink {
namespace {

unsigned gray_to_binary(unsigned g) {
  unsigned b = g;
  for (unsigned s = g >> 1; s; s >>= 1) b ^= s;
  return b;
}

double pam_level(unsigned gray, unsigned levels) {
  return 2.0 * gray_to_binary(gray) - (static_cast<double>(levels) - 1.0);
}

std::vector<Complex> build_constellation(int order) {
  const unsigned size = 1u << order;
  std::vector<Complex> points(size);
  if (order == 1) {
    points[0] = -1.0;
    points[1] = 1.0;
    return points;
  }
  const int i_bits = (order + 1) / 2;
  const int q_bits = order / 2;
  const unsigned q_mask = (1u << q_bits) - 1;
  for (unsigned label = 0; label < size; ++label) {
    double re = pam_level(label >> q_bits, 1u << i_bits);
    double im = pam_level(label & q_mask, 1u << q_bits);
    if (order == 5 && std::abs(re) == 7.0) {
      const double new_re = std::copysign(std::abs(im), re);
      im = std::copysign(5.0, im);
      re = new_re;
    }
    points[label] = {re, im};
  }
  double power = 0.0;
  for (const Complex& p : points) power += std::norm(p);
  const double scale = 1.0 / std::sqrt(power / size);
  for (Complex& p : points) p *= scale;
  return points;
}

void check_order(int order) {
  if (order < 1 || order > kMaxQamOrder)
    throw InvalidArgument("QAM order must be in 1..6, got " + std::to_string(order));
}

} // namespace

const std::vector<Complex>& constellation(int order) {
  check_order(order);
  static const std::array<std::vector<Complex>, kMaxQamOrder> tables = [] {
    std::array<std::vector<Complex>, kMaxQamOrder> t;
    for (int k = 1; k <= kMaxQamOrder; ++k) t[k - 1] = build_constellation(k);
    return t;
  }();
  return tables[order - 1];
}

Complex qam_map(std::span<const std::uint8_t> bits, int order) {
  check_order(order);
  if (bits.size() != static_cast<std::size_t>(order))
    throw InvalidArgument("qam_map: bit group length does not match order");
  unsigned label = 0;
  for (std::uint8_t b : bits) label = (label << 1) | (b & 1u);
  return constellation(order)[label];
}

unsigned qam_decide_label(Complex symbol, int order, double power) {
  const auto& points = constellation(order);
  const double scale = std::sqrt(power);
  unsigned best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (unsigned label = 0; label < points.size(); ++label) {
    const double d = std::norm(symbol - scale * points[label]);
    if (d < best_d) {
      best_d = d;
      best = label;
    }
  }
  return best;
}

Complex qam_decide_point(Complex symbol, int order, double power) {
  return std::sqrt(power) * constellation(order)[qam_decide_label(symbol, order, power)];
}

void qam_demap(Complex symbol, int order, double power, std::span<std::uint8_t> out) {
  const unsigned label = qam_decide_label(symbol, order, power);
  for (int i = 0; i < order; ++i)
    out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((label >> (order - 1 - i)) & 1u);
}

Bits qam_demap(Complex symbol, int order, double power) {
  Bits out(static_cast<std::size_t>(order));
  qam_demap(symbol, order, power, out);
  return out;
}

} // namespace dmtlink
