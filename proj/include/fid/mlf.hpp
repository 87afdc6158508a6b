#ifndef FID_MLF_HPP
#define FID_MLF_HPP

#include <stdexcept>

namespace fid::mlf {

enum class MlfMethod { power_series, global_pade_or_integral };

struct MlfEval {
  double value;
  double abs_err_bound;
  MlfMethod method_used;
};

/// Mittag-Leffler function E_nu(z) on the negative real axis, nu in (0,1].
/// Power series with compensated summation near the origin; the completely
/// monotone spectral-integral representation elsewhere. Throws on z > 0.
MlfEval mlf(double nu, double z);

/// E_nu(-b n t^nu): the eigen-relaxation factor of mode n at time t.
double mlf_relaxation(double nu, double b, long n, double t);

/// K(t0, nu) = Gamma(1+nu)/t0^nu, a uniform bound for b n E_nu(-b n t^nu)
/// over t >= t0 and all n >= 0.
double mlf_uniform_bound(double nu, double t0);

}  // namespace fid::mlf

#endif  // FID_MLF_HPP
