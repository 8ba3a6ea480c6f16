#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>

namespace trajent {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RealVec = Eigen::VectorXd;
using RealMat = Eigen::MatrixXd;
using SparseMat = Eigen::SparseMatrix<Complex>;

/// Which tensor factor a state or operator lives on.
///
/// Joint basis ordering is qubit-major: index = s*(n_max+1) + n with the
/// atom s in {g=0, e=1} and the cavity Fock level n in {0..n_max}. This
/// convention is fixed for all file formats and vectorized superoperators.
enum class Subspace { Joint, Cavity, Atom };

/// Dimensionless model parameters. All rates are in units of the coupling g,
/// all times in units of 1/g; the coupling itself is scaled out and has no
/// stored field.
struct SystemParams {
  double omega_bar = 1.0;    // drive amplitude
  double gamma_a_bar = 0.0;  // cavity damping
  double gamma_b_bar = 0.0;  // atomic damping
  int n_max = 1;             // Fock truncation: cavity levels |0>..|n_max>

  /// Truncation covering the semiclassical amplitudes (|alpha| <= omega_bar)
  /// plus a 4-sigma coherent-state buffer.
  static int default_n_max(double omega_bar);

  /// Validates fields; n_max <= 0 selects default_n_max(omega_bar).
  static SystemParams make(double omega_bar, double gamma_a_bar,
                           double gamma_b_bar, int n_max = 0);

  int fock_dim() const { return n_max + 1; }
  int dim() const { return 2 * (n_max + 1); }

  /// Bifurcation parameter 1/(2*gamma_a_bar*omega_bar); +inf at gamma_a=0.
  double xi() const;
};

struct StateVector {
  Vec amps;
  Subspace space = Subspace::Joint;

  double norm() const { return amps.norm(); }
  int dim() const { return static_cast<int>(amps.size()); }
  StateVector& normalize();
};

struct DensityMatrix {
  Mat rho;
  Subspace space = Subspace::Joint;

  int dim() const { return static_cast<int>(rho.rows()); }
  double trace_real() const { return rho.trace().real(); }

  /// Hermiticity within 1e-10, unit trace within 1e-10, eigenvalues >= -1e-10.
  void check_valid() const;
};

DensityMatrix pure_density(const StateVector& psi);

}  // namespace trajent
