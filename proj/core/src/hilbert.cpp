#include "trajent/hilbert.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <sstream>

#include "trajent/errors.hpp"

namespace trajent {

namespace {
constexpr double kTruncTol = 1e-8;
constexpr double kTopPopTol = 1e-6;
}  // namespace

int SystemParams::default_n_max(double omega_bar) {
  return static_cast<int>(std::ceil((omega_bar + 4.0) * (omega_bar + 4.0)));
}

SystemParams SystemParams::make(double omega_bar, double gamma_a_bar,
                                double gamma_b_bar, int n_max) {
  if (!(omega_bar > 0.0)) throw DomainError("omega_bar must be > 0");
  if (gamma_a_bar < 0.0 || gamma_b_bar < 0.0)
    throw DomainError("damping rates must be >= 0");
  if (n_max <= 0) n_max = default_n_max(omega_bar);
  if (n_max < 1) throw DomainError("n_max must be >= 1");
  return SystemParams{omega_bar, gamma_a_bar, gamma_b_bar, n_max};
}

double SystemParams::xi() const {
  if (gamma_a_bar <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (2.0 * gamma_a_bar * omega_bar);
}

StateVector& StateVector::normalize() {
  const double n = amps.norm();
  if (!(n > 0.0)) throw NumericalError("cannot normalize zero state");
  amps /= n;
  return *this;
}

void DensityMatrix::check_valid() const {
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-10) {
    std::ostringstream os;
    os << "density matrix not Hermitian (dev " << herm << ")";
    throw NumericalError(os.str());
  }
  if (std::abs(trace_real() - 1.0) > 1e-10)
    throw NumericalError("density matrix trace != 1");
  Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw NumericalError("density matrix has a negative eigenvalue");
}

DensityMatrix pure_density(const StateVector& psi) {
  const double n2 = psi.amps.squaredNorm();
  if (!(n2 > 0.0)) throw NumericalError("zero state");
  Mat rho = psi.amps * psi.amps.adjoint() / n2;
  return DensityMatrix{std::move(rho), psi.space};
}

Mat kron(const Mat& x, const Mat& y) {
  Mat out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return out;
}

Mat fock_annihilation(int n_max) {
  const int F = n_max + 1;
  Mat a = Mat::Zero(F, F);
  for (int n = 1; n < F; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

JointOperators build_operators(const SystemParams& p) {
  const int F = p.fock_dim();
  Mat a_f = fock_annihilation(p.n_max);
  Mat i_f = Mat::Identity(F, F);
  Mat i_q = Mat::Identity(2, 2);
  Mat b_q = Mat::Zero(2, 2);
  b_q(0, 1) = 1.0;  // |g><e| with s = {g=0, e=1}

  JointOperators ops;
  ops.a = kron(i_q, a_f);
  ops.a_dag = ops.a.adjoint();
  ops.b = kron(b_q, i_f);
  ops.b_dag = ops.b.adjoint();
  ops.n_a = ops.a_dag * ops.a;
  ops.n_b = ops.b_dag * ops.b;
  ops.dim = p.dim();
  return ops;
}

StateVector fock_state(int n, int n_max) {
  if (n < 0 || n > n_max) throw DomainError("Fock index outside truncation");
  Vec v = Vec::Zero(n_max + 1);
  v(n) = 1.0;
  return StateVector{std::move(v), Subspace::Cavity};
}

StateVector coherent_state(Complex alpha, int n_max) {
  const int F = n_max + 1;
  Vec c(F);
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < F; ++n) c(n) = c(n - 1) * alpha / std::sqrt(double(n));
  const double kept = c.squaredNorm();
  if (1.0 - kept > kTruncTol) {
    std::ostringstream os;
    os << "coherent state |alpha|=" << std::abs(alpha)
       << " loses weight " << 1.0 - kept << " at n_max=" << n_max;
    throw TruncationError(os.str());
  }
  c /= std::sqrt(kept);
  return StateVector{std::move(c), Subspace::Cavity};
}

StateVector atomic_state(Complex beta) {
  if (std::abs(std::abs(beta) - 1.0) > 1e-10)
    throw DomainError("atomic_state requires |beta| = 1");
  const Complex sq = std::sqrt(beta);  // principal branch
  Vec v(2);
  v(0) = std::conj(sq) / std::sqrt(2.0);  // |g>
  v(1) = sq / std::sqrt(2.0);             // |e>
  return StateVector{std::move(v), Subspace::Atom};
}

StateVector product_state(const StateVector& atom, const StateVector& cavity) {
  if (atom.space != Subspace::Atom || cavity.space != Subspace::Cavity)
    throw DomainError("product_state expects (Atom, Cavity) factors");
  const int F = cavity.dim();
  Vec v(2 * F);
  v.segment(0, F) = atom.amps(0) * cavity.amps;
  v.segment(F, F) = atom.amps(1) * cavity.amps;
  return StateVector{std::move(v), Subspace::Joint};
}

Mat displacement_operator(Complex alpha, int n_max) {
  const int F = n_max + 1;
  // exp(alpha a† - alpha* a) = P_phi exp(r(a† - a)) P_phi† with alpha = r e^{i phi},
  // P_phi = diag(e^{i phi n}); the real generator is handled by the Hermitian
  // eigendecomposition of K = i(a† - a).
  const double r = std::abs(alpha);
  const double phi = std::arg(alpha);
  Mat a = fock_annihilation(n_max);
  Mat gen = Complex(0, 1) * (a.adjoint() - a);
  Eigen::SelfAdjointEigenSolver<Mat> es(gen);
  Vec phase(F);
  for (int k = 0; k < F; ++k)
    phase(k) = std::exp(Complex(0, -r * es.eigenvalues()(k)));
  Mat d = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
  if (phi != 0.0) {
    Vec rot(F);
    for (int n = 0; n < F; ++n) rot(n) = std::exp(Complex(0, phi * n));
    d = rot.asDiagonal() * d * rot.conjugate().asDiagonal();
  }
  // Unitarity on the lower 3/4 of the Fock space; exact here by construction,
  // kept as a guard on the contract.
  const int lo = (3 * F) / 4;
  Mat dev = (d.adjoint() * d - Mat::Identity(F, F)).topLeftCorner(lo, lo);
  if (dev.cwiseAbs().maxCoeff() > 1e-6)
    throw TruncationError("displacement operator not unitary on lower Fock block");
  return d;
}

Mat displacement_operator(double omega_bar, int n_max) {
  return displacement_operator(Complex(omega_bar, 0.0), n_max);
}

Mat joint_displacement(double omega_bar, int n_max) {
  return kron(Mat::Identity(2, 2), displacement_operator(omega_bar, n_max));
}

DensityMatrix partial_trace(const DensityMatrix& joint, Subspace keep) {
  if (joint.space != Subspace::Joint)
    throw DomainError("partial_trace expects a joint-space density matrix");
  const int d = joint.dim();
  const int F = d / 2;
  if (keep == Subspace::Atom) {
    Mat r = Mat::Zero(2, 2);
    for (int s = 0; s < 2; ++s)
      for (int sp = 0; sp < 2; ++sp)
        r(s, sp) = joint.rho.block(s * F, sp * F, F, F).trace();
    return DensityMatrix{std::move(r), Subspace::Atom};
  }
  if (keep == Subspace::Cavity) {
    Mat r = joint.rho.block(0, 0, F, F) + joint.rho.block(F, F, F, F);
    return DensityMatrix{std::move(r), Subspace::Cavity};
  }
  throw DomainError("keep must be Atom or Cavity");
}

double binary_entropy(double lam) {
  if (lam <= 0.0 || lam >= 1.0) return 0.0;
  return -lam * std::log2(lam) - (1.0 - lam) * std::log2(1.0 - lam);
}

namespace {

double entropy_from_eigs(const RealVec& eigs) {
  double e = 0.0;
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    double l = eigs(i);
    if (l < -1e-8) throw NumericalError("entropy: eigenvalue below -1e-8");
    if (l <= 0.0) continue;
    if (l > 1.0) l = 1.0;
    e -= l * std::log2(l);
  }
  return e;
}

}  // namespace

double von_neumann_entropy(const DensityMatrix& rho) {
  if (rho.dim() == 2) {
    const double dz = (rho.rho(0, 0) - rho.rho(1, 1)).real();
    const double r = std::sqrt(dz * dz + 4.0 * std::norm(rho.rho(0, 1)));
    const double lam = 0.5 * (1.0 + std::min(r, 1.0));
    if (lam > 1.0 + 1e-8) throw NumericalError("entropy: Bloch vector > 1");
    return binary_entropy(std::min(lam, 1.0));
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(rho.rho, Eigen::EigenvaluesOnly);
  return entropy_from_eigs(es.eigenvalues());
}

double entanglement_entropy(const Vec& joint_amps, int n_max) {
  const int F = n_max + 1;
  const double n2 = joint_amps.squaredNorm();
  if (!(n2 > 0.0)) throw NumericalError("zero state");
  // rho_B(s,s') = sum_n psi(s,n) psi*(s',n) / |psi|^2
  const auto seg_g = joint_amps.segment(0, F);
  const auto seg_e = joint_amps.segment(F, F);
  const double pg = seg_g.squaredNorm() / n2;
  const double pe = seg_e.squaredNorm() / n2;
  const Complex c_ge = seg_g.dot(seg_e) / n2;  // <g-row, e-row> = rho_B(e,g)*
  const double dz = pg - pe;
  const double r = std::sqrt(dz * dz + 4.0 * std::norm(c_ge));
  return binary_entropy(0.5 * (1.0 + std::min(r, 1.0)));
}

double trace_distance(const DensityMatrix& x, const DensityMatrix& y) {
  Mat diff = x.rho - y.rho;
  diff = 0.5 * (diff + diff.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Mat> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double top_level_population(const Vec& joint_amps, int n_max, int levels) {
  const int F = n_max + 1;
  const double n2 = joint_amps.squaredNorm();
  if (!(n2 > 0.0)) return 0.0;
  double pop = 0.0;
  for (int s = 0; s < 2; ++s)
    for (int n = std::max(0, F - levels); n < F; ++n)
      pop += std::norm(joint_amps(s * F + n));
  return pop / n2;
}

void check_truncation(const Vec& joint_amps, int n_max) {
  const double pop = top_level_population(joint_amps, n_max);
  if (pop > kTopPopTol) {
    std::ostringstream os;
    os << "top Fock levels hold population " << pop << " (n_max=" << n_max
       << " too small)";
    throw TruncationError(os.str());
  }
}

}  // namespace trajent
