#pragma once

#include <utility>
#include <vector>

#include "trajent/types.hpp"

namespace trajent {

/// Original: drive on the atom, i*omega_bar*(b† - b).
/// Displaced: drive moved onto the cavity, i*gamma_a*omega_bar*(a - a†);
/// steady states are related by rho_original = D(omega_bar) rho' D†(omega_bar)
/// with the displacement acting on the cavity factor.
enum class Frame { Original, Displaced };

/// Generator of d(rho)/dt = L rho acting on column-major vectorized density
/// matrices, dimension d^2 x d^2 with d = 2(n_max+1).
struct Liouvillian {
  SparseMat matrix;
  Frame frame = Frame::Original;
  SystemParams params;
  int dim = 0;  // d
};

/// Interaction-picture Hamiltonian in scaled units (hbar = 1):
/// i(a†b - b†a) plus the frame's drive term.
Mat hamiltonian(const SystemParams& p, Frame frame);

/// Generic Lindblad superoperator for dissipators
/// gamma (2 d . d† - d†d . - . d†d) over the given (gamma, d) channels.
SparseMat liouvillian_matrix(const Mat& h,
                             const std::vector<std::pair<double, Mat>>& channels);

Liouvillian build_liouvillian(const SystemParams& p, Frame frame);

struct SteadyStateOptions {
  double shift = 1e-12;          // inverse-iteration shift sigma
  int max_iterations = 50;
  double residual_tol = 1e-8;    // required ||L rho_ss||
  double degeneracy_tol = 1e-10; // second-eigenvalue magnitude threshold
  bool probe_degeneracy = true;
};

/// Null vector of L by shifted inverse iteration, Hermitized, eigenvalue-
/// clipped and trace-normalized. Throws DegenerateSteadyStateError when the
/// kernel is not one-dimensional (estimated by deflated inverse iteration).
DensityMatrix steady_state(const Liouvillian& liou,
                           const SteadyStateOptions& opt = {});

/// Estimate of the second-closest-to-zero eigenvalue magnitude of L.
double liouvillian_spectral_gap_estimate(const Liouvillian& liou,
                                         const SteadyStateOptions& opt = {});

/// Stability-limited default step for explicit 4th-order integration of L.
double default_evolve_dt(const SystemParams& p);

/// rho(t_bar) by classical RK4 on the vectorized master equation.
/// dt_bar <= 0 selects default_evolve_dt. Monitors top-Fock population.
DensityMatrix evolve(const DensityMatrix& rho0, const Liouvillian& liou,
                     double t_bar, double dt_bar = 0.0);

/// Closed-form 2x2 steady state of the driven damped two-level atom
/// (drive omega_bar, dissipator gamma_b(2 b.b† - b†b. - .b†b)).
DensityMatrix resonance_fluorescence_steady_state(double omega_bar,
                                                  double gamma_b_bar);

}  // namespace trajent
