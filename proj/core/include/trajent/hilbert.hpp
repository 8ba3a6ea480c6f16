#pragma once

#include "trajent/types.hpp"

namespace trajent {

/// Ladder and qubit operators embedded in the joint space (qubit-major).
struct JointOperators {
  Mat a, a_dag;  // cavity annihilation / creation
  Mat b, b_dag;  // atomic lowering |g><e| / raising
  Mat n_a, n_b;  // number operators a†a, b†b
  int dim = 0;
};

Mat kron(const Mat& x, const Mat& y);

/// Truncated ladder matrices tensored with identities; b = |g><e|.
JointOperators build_operators(const SystemParams& p);

/// Cavity-factor annihilation operator, a|n> = sqrt(n)|n-1>.
Mat fock_annihilation(int n_max);

StateVector fock_state(int n, int n_max);

/// c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!), renormalized on the truncated
/// space. Throws TruncationError if the discarded weight exceeds 1e-8.
StateVector coherent_state(Complex alpha, int n_max);

/// (sqrt(beta)|e> + sqrt(beta*)|g>)/sqrt(2) with the principal square root.
/// Requires |beta| = 1 within 1e-10.
StateVector atomic_state(Complex beta);

/// kron(atom, cavity) in the fixed qubit-major ordering.
StateVector product_state(const StateVector& atom, const StateVector& cavity);

/// exp(omega_bar (a† - a)) on the cavity factor, unitary on the truncated
/// space by construction (Hermitian eigendecomposition of i(a†-a)).
Mat displacement_operator(double omega_bar, int n_max);
Mat displacement_operator(Complex alpha, int n_max);

/// Displacement on the cavity factor of the joint space: kron(I2, D).
Mat joint_displacement(double omega_bar, int n_max);

DensityMatrix partial_trace(const DensityMatrix& joint, Subspace keep);

/// -sum lambda_i log2 lambda_i; 2x2 inputs use the closed Bloch-vector form.
/// Eigenvalues below -1e-8 raise NumericalError; smaller negatives clip to 0.
double von_neumann_entropy(const DensityMatrix& rho);

/// -l log2 l - (1-l) log2 (1-l) with 0 log 0 := 0.
double binary_entropy(double lam);

/// Entropy of the atom-side reduction of a joint pure state, computed from
/// the (possibly unnormalized) amplitude vector.
double entanglement_entropy(const Vec& joint_amps, int n_max);

/// (1/2) sum |eig(x - y)|.
double trace_distance(const DensityMatrix& x, const DensityMatrix& y);

/// Fraction of (normalized) population in the top `levels` Fock levels,
/// summed over both atomic states.
double top_level_population(const Vec& joint_amps, int n_max, int levels = 3);

/// Raises TruncationError when the top three Fock levels carry > 1e-6.
void check_truncation(const Vec& joint_amps, int n_max);

}  // namespace trajent
