#pragma once

#include <vector>

#include "trajent/types.hpp"

namespace trajent {

struct PhaseSpaceGrid {
  RealVec re;      // n_re axis values
  RealVec im;      // n_im axis values
  RealMat values;  // values(i, j) = W(re(j) + i*im(i)); rows follow im
  double cell_area() const;
  /// Riemann sum of W over the grid.
  double integral() const;
};

struct WignerOptions {
  int jobs = 0;  // worker threads for the pointwise evaluation
};

/// W(alpha) = (2/pi) tr[D†(alpha) rho D(alpha) PI] with PI = (-1)^{a†a},
/// evaluated pointwise, one displacement per grid point. The displacement
/// matrix elements are generated by an exact Fock-basis recurrence, so the
/// grid may extend past the truncation radius; TruncationError is raised
/// only when rho itself carries weight in its top Fock levels.
PhaseSpaceGrid wigner_function(const DensityMatrix& rho_a, double re_min,
                               double re_max, int n_re, double im_min,
                               double im_max, int n_im,
                               const WignerOptions& opt = {});

/// Default grid of the figure runs: 121x121 over [-omega-3, omega+3]^2.
PhaseSpaceGrid wigner_function_default(const DensityMatrix& rho_a,
                                       double omega_bar,
                                       const WignerOptions& opt = {});

struct WignerPeak {
  double re = 0.0, im = 0.0, value = 0.0;
};

/// Strict interior local maxima above floor_fraction * max(W).
std::vector<WignerPeak> local_maxima(const PhaseSpaceGrid& grid,
                                     double floor_fraction = 1e-3);

}  // namespace trajent
