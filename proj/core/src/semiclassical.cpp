#include "trajent/semiclassical.hpp"

#include <cmath>
#include <limits>

#include "trajent/errors.hpp"
#include "trajent/hilbert.hpp"

namespace trajent {

std::vector<SemiclassicalFixedPoint> fixed_points(const SystemParams& p) {
  if (!(p.gamma_a_bar > 0.0) || !(p.omega_bar > 0.0))
    throw DomainError("fixed_points requires gamma_a_bar > 0 and omega_bar > 0");
  const double xi = p.xi();
  std::vector<SemiclassicalFixedPoint> out;
  if (xi >= 1.0) {
    SemiclassicalFixedPoint fp;
    fp.xi = xi;
    fp.branch = SemiclassicalFixedPoint::Branch::AboveThreshold;
    fp.alpha = Complex(p.omega_bar, 0.0);
    fp.beta = Complex(1.0 / xi, 0.0);
    fp.x = 1.0;
    fp.y = 0.0;
    out.push_back(fp);
    return out;
  }
  const double root = std::sqrt(1.0 - xi * xi);
  for (int sgn : {+1, -1}) {
    SemiclassicalFixedPoint fp;
    fp.xi = xi;
    fp.branch = (sgn > 0) ? SemiclassicalFixedPoint::Branch::BelowPlus
                          : SemiclassicalFixedPoint::Branch::BelowMinus;
    fp.beta = Complex(xi, sgn * root);
    fp.alpha = p.omega_bar * xi * fp.beta;
    fp.x = xi * xi;
    fp.y = sgn * xi * root;
    out.push_back(fp);
  }
  return out;
}

double asymptotic_lambda(const SystemParams& p, DampingRegime regime) {
  if (regime == DampingRegime::Small)
    return std::pow(p.omega_bar, 4) * std::pow(p.gamma_a_bar, 6);
  if (!(p.gamma_b_bar > 0.0))
    throw DomainError("large-damping lambda requires gamma_b_bar > 0");
  const double f = 2.0 / p.gamma_a_bar;
  const double g = 4.0 * p.omega_bar / p.gamma_b_bar;
  return f * f * std::pow(g, 4);
}

double asymptotic_entanglement(const SystemParams& p, DampingRegime regime) {
  double lam = asymptotic_lambda(p, regime);
  if (lam > 0.5)
    throw DomainError("asymptotic lambda > 1/2: formula used outside its regime");
  lam = std::clamp(lam, 0.0, 0.5);
  return binary_entropy(lam);
}

namespace {

struct BranchData {
  Complex alpha_p, alpha_m, beta_p, beta_m;
  double x, y;        // (+)-branch alpha/omega parts
  double xi;
  Complex k_alpha;    // <alpha_+|alpha_-> = exp(-2 W^2 y^2 - 2i W^2 x y)
};

BranchData branch_data(const SystemParams& p) {
  const double xi = p.xi();
  if (!(xi < 1.0))
    throw DomainError("two-branch construction requires xi < 1");
  auto fps = fixed_points(p);
  BranchData b;
  b.xi = xi;
  b.alpha_p = fps[0].alpha;
  b.alpha_m = fps[1].alpha;
  b.beta_p = fps[0].beta;
  b.beta_m = fps[1].beta;
  b.x = fps[0].x;
  b.y = fps[0].y;
  const double w2 = p.omega_bar * p.omega_bar;
  b.k_alpha = std::exp(Complex(-2.0 * w2 * b.y * b.y, -2.0 * w2 * b.x * b.y));
  return b;
}

}  // namespace

EnsembleMember construct_ensemble_state(const SystemParams& p,
                                        const EnsembleMemberSpec& spec) {
  BranchData b = branch_data(p);
  StateVector plus =
      product_state(atomic_state(b.beta_p), coherent_state(b.alpha_p, p.n_max));
  StateVector minus =
      product_state(atomic_state(b.beta_m), coherent_state(b.alpha_m, p.n_max));

  EnsembleMember member;
  member.spec = spec;
  if (spec.kind == EnsembleMemberSpec::Kind::Dichotomous) {
    member.normalization = 1.0;
    member.state = (spec.theta_rec != 0) ? std::move(plus) : std::move(minus);
    return member;
  }
  // N from the exact overlaps <alpha_+|alpha_-> and <beta_+|beta_-> = xi.
  const Complex phase = std::exp(Complex(0.0, -2.0 * spec.phi_rec));
  const double n2 = 2.0 + 2.0 * (phase * b.k_alpha * b.xi).real();
  member.normalization = 1.0 / std::sqrt(n2);
  Vec amps = member.normalization *
             (std::exp(Complex(0.0, spec.phi_rec)) * plus.amps +
              std::exp(Complex(0.0, -spec.phi_rec)) * minus.amps);
  member.state = StateVector{std::move(amps), Subspace::Joint};
  return member;
}

PhaseEnsembleEntropy analytic_phase_ensemble_entropy(const SystemParams& p,
                                                     double phi_rec) {
  BranchData b = branch_data(p);
  const double w2 = p.omega_bar * p.omega_bar;
  const double big_k = std::exp(-2.0 * w2 * b.y * b.y);
  const double chi = 2.0 * (w2 * b.x * b.y + phi_rec);
  const double a_val = std::sqrt(1.0 - b.xi * b.xi) * big_k * std::sin(chi);
  const double b_val = b.xi + big_k * std::cos(chi);
  const double mag = std::sqrt(a_val * a_val + b_val * b_val);

  PhaseEnsembleEntropy out;
  out.lambda_literal_plus = 0.5 + 0.5 * mag / b_val;
  out.lambda_literal_minus = 0.5 - 0.5 * mag / b_val;
  out.literal_in_range = out.lambda_literal_plus >= -1e-12 &&
                         out.lambda_literal_plus <= 1.0 + 1e-12 &&
                         out.lambda_literal_minus >= -1e-12 &&
                         out.lambda_literal_minus <= 1.0 + 1e-12;
  out.entropy_literal =
      out.literal_in_range
          ? binary_entropy(std::clamp(out.lambda_literal_plus, 0.0, 1.0))
          : std::numeric_limits<double>::quiet_NaN();
  // As printed the denominator is B, which puts lambda outside [0,1] whenever
  // A != 0; the reduced state of the constructed member gives the member
  // normalization 1 + xi K cos(chi) instead.
  const double lam_cor = 0.5 + 0.5 * mag / (1.0 + b.xi * big_k * std::cos(chi));
  out.entropy_corrected = binary_entropy(std::clamp(lam_cor, 0.0, 1.0));

  EnsembleMemberSpec spec;
  spec.kind = EnsembleMemberSpec::Kind::Phase;
  spec.phi_rec = phi_rec;
  EnsembleMember member = construct_ensemble_state(p, spec);
  out.entropy_oracle = entanglement_entropy(member.state.amps, p.n_max);
  return out;
}

double averaged_phase_entanglement(const SystemParams& p, int n_phi) {
  if (n_phi < 16) throw DomainError("n_phi must be >= 16");
  if (!(p.xi() < 1.0)) return 0.0;
  double acc = 0.0;
  for (int j = 0; j < n_phi; ++j) {
    const double phi = (j + 0.5) * M_PI / n_phi;
    EnsembleMemberSpec spec;
    spec.kind = EnsembleMemberSpec::Kind::Phase;
    spec.phi_rec = phi;
    EnsembleMember member = construct_ensemble_state(p, spec);
    acc += entanglement_entropy(member.state.amps, p.n_max);
  }
  return acc / n_phi;
}

DensityMatrix dichotomous_mixture_density(const SystemParams& p) {
  EnsembleMemberSpec sp;
  sp.kind = EnsembleMemberSpec::Kind::Dichotomous;
  sp.theta_rec = 1;
  EnsembleMember plus = construct_ensemble_state(p, sp);
  sp.theta_rec = 0;
  EnsembleMember minus = construct_ensemble_state(p, sp);
  Mat rho = 0.5 * (plus.state.amps * plus.state.amps.adjoint()) +
            0.5 * (minus.state.amps * minus.state.amps.adjoint());
  return DensityMatrix{std::move(rho), Subspace::Joint};
}

DensityMatrix phase_ensemble_average_density(const SystemParams& p, int n_phi) {
  if (n_phi < 16) throw DomainError("n_phi must be >= 16");
  BranchData b = branch_data(p);
  StateVector plus =
      product_state(atomic_state(b.beta_p), coherent_state(b.alpha_p, p.n_max));
  StateVector minus =
      product_state(atomic_state(b.beta_m), coherent_state(b.alpha_m, p.n_max));
  const int d = plus.dim();
  Mat acc = Mat::Zero(d, d);
  for (int j = 0; j < n_phi; ++j) {
    const double phi = (j + 0.5) * M_PI / n_phi;
    // Unnormalized member / sqrt(2): the uniform-phi average of these
    // projectors carries the record weights and reproduces the mixture.
    Vec u = (std::exp(Complex(0.0, phi)) * plus.amps +
             std::exp(Complex(0.0, -phi)) * minus.amps) /
            std::sqrt(2.0);
    acc += u * u.adjoint();
  }
  acc /= double(n_phi);
  return DensityMatrix{std::move(acc), Subspace::Joint};
}

}  // namespace trajent
