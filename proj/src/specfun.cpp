#include "dephase/specfun.hpp"

#include <cmath>
#include <numbers>

#include "dephase/errors.hpp"

namespace dephase {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

// Lanczos, g = 7, nine terms.
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {0.99999999999980993,     676.5203681218851,      -1259.1392167224028,
                                771.32342877765313,      -176.61502916214059,    12.507343278686905,
                                -0.13857109526572012,    9.9843695780195716e-6,  1.5056327351493116e-7};

void require_finite(cplx z, const char* who) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    fail(ErrorKind::Domain, std::string(who) + ": non-finite argument");
}

cplx log_gamma_upper_half(cplx z) {
  const cplx zm = z - 1.0;
  cplx x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[i] / (zm + static_cast<double>(i));
  const cplx t = zm + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (zm + 0.5) * std::log(t) - t + std::log(x);
}

// The continued fraction stalls next to the negative axis, where the series loses only a factor
// e^{|z| + Re z} to cancellation.
constexpr double kSeriesLossExponent = 2.0;

cplx e1_upper_half(cplx z) {
  const double r = std::abs(z);
  if (r < detail::kE1SwitchRadius || r + z.real() < kSeriesLossExponent) return detail::e1_series(z);
  return detail::e1_continued_fraction(z);
}

}  // namespace

cplx log_gamma(cplx z) {
  require_finite(z, "log_gamma");
  if (!(z.real() > 0.0)) fail(ErrorKind::Domain, "log_gamma: requires Re z > 0");
  // Evaluating on Im z >= 0 and reflecting keeps conj symmetry exact.
  if (z.imag() < 0.0) return std::conj(log_gamma_upper_half(std::conj(z)));
  return log_gamma_upper_half(z);
}

namespace detail {

cplx e1_series(cplx z) {
  // E1(z) = -gamma - ln z - sum_{k>=1} (-z)^k / (k k!)
  cplx term = 1.0;
  cplx sum = 0.0;
  for (int k = 1; k < 20000; ++k) {
    term *= -z / static_cast<double>(k);
    const cplx add = term / static_cast<double>(k);
    sum += add;
    if (std::abs(add) <= kEps * 0.25 * std::abs(sum)) break;
  }
  return -std::numbers::egamma - std::log(z) - sum;
}

cplx e1_continued_fraction(cplx z) {
  // Modified Lentz on E1(z) = e^{-z} / (z + 1 - 1^2/(z + 3 - 2^2/(z + 5 - ...))).
  cplx b = z + 1.0;
  cplx c = 1.0 / kTiny;
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 1; i < 200000; ++i) {
    const double an = -static_cast<double>(i) * static_cast<double>(i);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const cplx del = c * d;
    h *= del;
    if (std::abs(del - 1.0) <= kEps) return h * std::exp(-z);
  }
  fail(ErrorKind::Numerical, "e1_continued_fraction: no convergence");
}

}  // namespace detail

cplx upper_gamma(int s, cplx z) {
  require_finite(z, "upper_gamma");
  if (s == 1) return std::exp(-z);
  if (s != 0 && s != -1) fail(ErrorKind::Domain, "upper_gamma: order must be -1, 0 or 1");
  if (z == cplx(0.0, 0.0)) fail(ErrorKind::Domain, "upper_gamma: singular at z = 0");
  if (z.imag() == 0.0 && z.real() < 0.0) fail(ErrorKind::Domain, "upper_gamma: z on the branch cut");

  const bool lower = z.imag() < 0.0;
  const cplx w = lower ? std::conj(z) : z;
  cplx g = e1_upper_half(w);
  if (s == -1) g = std::exp(-w) / w - g;  // Gamma(0,w) = -Gamma(-1,w) + e^{-w}/w
  return lower ? std::conj(g) : g;
}

}  // namespace dephase
