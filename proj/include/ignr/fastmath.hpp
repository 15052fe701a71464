#pragma once

#include <cmath>
#include <cstdint>

namespace ignr {

// Element-wise sin and cos of x[0..n). Cody-Waite reduction by pi/2 and
// minimax polynomials on [-pi/4, pi/4]; absolute error about 1 ulp for
// |x| < 1e5. Written branch-free so the loop vectorizes.
inline void sincos_array(const double* x, double* s, double* c, long n) {
  constexpr double two_over_pi = 0.63661977236758134308;
  constexpr double p1 = 1.57079625129699707031;
  constexpr double p2 = 7.54978941586159635335e-8;
  constexpr double p3 = 5.39030285815811905290e-15;
  for (long k = 0; k < n; ++k) {
    const double q = std::nearbyint(x[k] * two_over_pi);
    const double r = ((x[k] - q * p1) - q * p2) - q * p3;
    const double z = r * r;
    const double sp =
        r + r * z *
                (((((1.58962301576546568060e-10 * z - 2.50507477628578072866e-8) * z +
                    2.75573136213857245213e-6) * z - 1.98412698295895385996e-4) * z +
                  8.33333333332211858878e-3) * z - 1.66666666666666307295e-1);
    const double cp =
        1.0 - 0.5 * z +
        z * z *
            (((((-1.13585365213876817300e-11 * z + 2.08757008419747316778e-9) * z -
                2.75573141792967388112e-7) * z + 2.48015872888517045348e-5) * z -
              1.38888888888730564116e-3) * z + 4.16666666666665929218e-2);
    const std::int64_t qi = static_cast<std::int64_t>(q);
    const double ss = (qi & 1) ? cp : sp;
    const double cc = (qi & 1) ? sp : cp;
    s[k] = (qi & 2) ? -ss : ss;
    c[k] = ((qi + 1) & 2) ? -cc : cc;
  }
}

inline double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace ignr
