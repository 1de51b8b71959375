#pragma once

#include "dephase/qstate.hpp"

namespace dephase {

// Principal branch of log Gamma(z), continuous in Re z > 0. Throws Domain otherwise.
cplx log_gamma(cplx z);

// Upper incomplete gamma Gamma(s, z) for s in {-1, 0, 1}, principal branch.
// s <= 0: throws Domain at z = 0 and on the negative real axis (the cut).
// s == 1 is entire and accepts any finite z.
cplx upper_gamma(int s, cplx z);

namespace detail {

// E1(z) = Gamma(0, z) by the two evaluation regimes; used directly by overlap tests.
cplx e1_series(cplx z);
cplx e1_continued_fraction(cplx z);

inline constexpr double kE1SwitchRadius = 4.0;

}  // namespace detail
}  // namespace dephase
