#pragma once

#include <vector>

#include "trajent/types.hpp"

namespace trajent {

/// Steady-state branch amplitudes: alpha/omega_bar = 1, beta = 1/xi above
/// threshold (xi >= 1); alpha_pm/omega_bar = xi*beta_pm,
/// beta_pm = xi +- i sqrt(1-xi^2) below (xi < 1).
struct SemiclassicalFixedPoint {
  enum class Branch { AboveThreshold, BelowPlus, BelowMinus };
  double xi = 0.0;
  Branch branch = Branch::AboveThreshold;
  Complex alpha;  // cavity amplitude (units of field amplitude)
  Complex beta;   // atomic polarization
  double x = 0.0, y = 0.0;  // Re, Im of alpha/omega_bar
};

/// One point for xi >= 1, the (+,-) pair for xi < 1; continuous at xi = 1.
/// Requires gamma_a_bar > 0.
std::vector<SemiclassicalFixedPoint> fixed_points(const SystemParams& p);

enum class DampingRegime { Small, Large };

/// Small: lambda = omega^4 gamma_a^6. Large: lambda = (2/gamma_a)^2 (4 omega/gamma_b)^4.
double asymptotic_lambda(const SystemParams& p, DampingRegime regime);

/// Binary entropy of the regime's lambda; DomainError if lambda > 1/2.
double asymptotic_entanglement(const SystemParams& p, DampingRegime regime);

struct EnsembleMemberSpec {
  enum class Kind { Dichotomous, Phase };
  Kind kind = Kind::Phase;
  int theta_rec = 1;      // Dichotomous: 1 -> (+) branch, 0 -> (-) branch
  double phi_rec = 0.0;   // Phase: in [0, pi)
};

struct EnsembleMember {
  EnsembleMemberSpec spec;
  StateVector state;       // joint, unit norm
  Complex normalization;   // Phase kind: N from the exact overlaps; else 1
};

/// Joint state assembled from coherent and atomic branch states. Requires
/// xi < 1 and truncation adequate for |alpha_pm|.
EnsembleMember construct_ensemble_state(const SystemParams& p,
                                        const EnsembleMemberSpec& spec);

struct PhaseEnsembleEntropy {
  double lambda_literal_plus = 0.0;   // printed closed form, denominator B
  double lambda_literal_minus = 0.0;
  bool literal_in_range = false;      // both literal lambdas in [0,1]
  double entropy_literal = 0.0;       // NaN unless literal_in_range
  double entropy_corrected = 0.0;     // denominator 1 + xi K cos(chi); see impl
  double entropy_oracle = 0.0;        // explicit state construction + reduction
};

/// Entropy of the Phase-kind member at phi_rec, via the closed forms and the
/// explicit-construction oracle. Requires xi < 1.
PhaseEnsembleEntropy analytic_phase_ensemble_entropy(const SystemParams& p,
                                                     double phi_rec);

/// Uniform midpoint average over phi in [0, pi) of the oracle entropy.
/// Requires n_phi >= 16. Returns 0 for xi >= 1 (single branch).
double averaged_phase_entanglement(const SystemParams& p, int n_phi);

/// (1/2, 1/2) mixture of the two Dichotomous members.
DensityMatrix dichotomous_mixture_density(const SystemParams& p);

/// Record-weighted midpoint average of the Phase-member projectors over
/// phi uniform on [0, pi); decomposes the same mixed state as the
/// dichotomous mixture (weights are the squared norms of the unnormalized
/// members, i.e. the record probabilities).
DensityMatrix phase_ensemble_average_density(const SystemParams& p, int n_phi);

}  // namespace trajent
