#include "trajent/wigner.hpp"

#include <cmath>

#include "trajent/errors.hpp"
#include "trajent/parallel.hpp"

namespace trajent {

double PhaseSpaceGrid::cell_area() const {
  const double dre = re.size() > 1 ? re(1) - re(0) : 1.0;
  const double dim_ = im.size() > 1 ? im(1) - im(0) : 1.0;
  return dre * dim_;
}

double PhaseSpaceGrid::integral() const {
  return values.sum() * cell_area();
}

namespace {

/// Fills k(n,m) = <n|D(beta)|m> for the full F x F block. First row from
/// <0|D|m> = e^{-|beta|^2/2} (-beta*)^m / sqrt(m!), then upward via
/// sqrt(n+1) K_{n+1,m} = sqrt(m) K_{n,m-1} + beta K_{n,m} (from a D = D(a+beta)).
/// All target elements sit below the |beta|^2 turning point, where the
/// recurrence runs along the growing solution and stays relatively accurate.
void displacement_kernel(Complex beta, int fock_dim, Mat& k) {
  const int F = fock_dim;
  k.resize(F, F);
  k(0, 0) = std::exp(-0.5 * std::norm(beta));
  for (int m = 1; m < F; ++m)
    k(0, m) = k(0, m - 1) * (-std::conj(beta)) / std::sqrt(double(m));
  for (int n = 0; n + 1 < F; ++n) {
    const double rn = 1.0 / std::sqrt(double(n + 1));
    k(n + 1, 0) = rn * beta * k(n, 0);
    for (int m = 1; m < F; ++m)
      k(n + 1, m) = rn * (std::sqrt(double(m)) * k(n, m - 1) + beta * k(n, m));
  }
}

}  // namespace

PhaseSpaceGrid wigner_function(const DensityMatrix& rho_a, double re_min,
                               double re_max, int n_re, double im_min,
                               double im_max, int n_im,
                               const WignerOptions& opt) {
  if (rho_a.space != Subspace::Cavity)
    throw DomainError("wigner_function expects a cavity-space density matrix");
  if (n_re < 2 || n_im < 2) throw DomainError("grid needs at least 2x2 points");
  const int F = rho_a.dim();

  // The pointwise kernel is exact for any alpha; the only truncation concern
  // is the state itself.
  double top_pop = 0.0;
  for (int n = std::max(0, F - 3); n < F; ++n)
    top_pop += rho_a.rho(n, n).real();
  if (top_pop > 1e-6)
    throw TruncationError("rho_a carries >1e-6 population in its top Fock levels");

  PhaseSpaceGrid grid;
  grid.re = RealVec::LinSpaced(n_re, re_min, re_max);
  grid.im = RealVec::LinSpaced(n_im, im_min, im_max);
  grid.values.resize(n_im, n_re);

  // Parity-weighted columns of rho: rho(m,n) (-1)^m folded in once.
  Mat rho_parity = rho_a.rho;
  for (int m = 1; m < F; m += 2) rho_parity.row(m) *= -1.0;

  RealVec row_imag_max = RealVec::Zero(n_im);
  parallel_for(static_cast<std::size_t>(n_im), opt.jobs, [&](std::size_t i) {
    Mat kernel;
    double imag_max = 0.0;
    for (int j = 0; j < n_re; ++j) {
      const Complex alpha(grid.re(j), grid.im(static_cast<int>(i)));
      // W = (2/pi) tr[rho D(2 alpha) PI]; tr[rho M] = sum_{m,n} rho(m,n) M(n,m)
      displacement_kernel(2.0 * alpha, F, kernel);
      Complex w = 0.0;
      for (int m = 0; m < F; ++m)
        for (int n = 0; n < F; ++n) w += rho_parity(m, n) * kernel(n, m);
      imag_max = std::max(imag_max, std::abs(w.imag()));
      grid.values(static_cast<int>(i), j) = (2.0 / M_PI) * w.real();
    }
    row_imag_max(static_cast<int>(i)) = imag_max;
  });
  if (row_imag_max.maxCoeff() > 1e-10)
    throw NumericalError("Wigner value has imaginary part above 1e-10");
  return grid;
}

PhaseSpaceGrid wigner_function_default(const DensityMatrix& rho_a,
                                       double omega_bar,
                                       const WignerOptions& opt) {
  const double r = omega_bar + 3.0;
  return wigner_function(rho_a, -r, r, 121, -r, r, 121, opt);
}

std::vector<WignerPeak> local_maxima(const PhaseSpaceGrid& grid,
                                     double floor_fraction) {
  std::vector<WignerPeak> peaks;
  const double wmax = grid.values.maxCoeff();
  const double floor = floor_fraction * wmax;
  for (int i = 1; i + 1 < grid.values.rows(); ++i)
    for (int j = 1; j + 1 < grid.values.cols(); ++j) {
      const double v = grid.values(i, j);
      if (v <= floor) continue;
      bool strict_max = true;
      for (int di = -1; di <= 1 && strict_max; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          if (grid.values(i + di, j + dj) >= v) {
            strict_max = false;
            break;
          }
        }
      if (strict_max) peaks.push_back(WignerPeak{grid.re(j), grid.im(i), v});
    }
  return peaks;
}

}  // namespace trajent
