#include "trajent/master_equation.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <cmath>
#include <sstream>

#include "trajent/errors.hpp"
#include "trajent/hilbert.hpp"

namespace trajent {

namespace {

constexpr double kSparseDrop = 1e-15;

/// Triplets of x (i,j) scaled kron: out[(i*br+k, j*bc+l)] += x(i,j)*y(k,l).
void append_kron(std::vector<Eigen::Triplet<Complex>>& trips, const Mat& x,
                 const Mat& y, Complex scale) {
  const Eigen::Index br = y.rows(), bc = y.cols();
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const Complex xij = x(i, j) * scale;
      if (std::abs(xij) < kSparseDrop) continue;
      for (Eigen::Index k = 0; k < br; ++k)
        for (Eigen::Index l = 0; l < bc; ++l) {
          const Complex v = xij * y(k, l);
          if (std::abs(v) >= kSparseDrop)
            trips.emplace_back(i * br + k, j * bc + l, v);
        }
    }
}

Vec to_vec(const Mat& rho) {
  return Eigen::Map<const Vec>(rho.data(), rho.size());
}

Mat to_mat(const Vec& v, int d) {
  return Eigen::Map<const Mat>(v.data(), d, d);
}

DensityMatrix clean_density(Mat rho, Subspace space) {
  rho = 0.5 * (rho + rho.adjoint().eval());
  rho /= rho.trace().real();
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  RealVec ev = es.eigenvalues();
  if (ev.minCoeff() < -1e-8)
    throw NumericalError("steady state has eigenvalue below -1e-8");
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    ev(i) = std::clamp(ev(i), 0.0, 1.0);
  ev /= ev.sum();
  Mat out = es.eigenvectors() * ev.asDiagonal().toDenseMatrix().cast<Complex>() *
            es.eigenvectors().adjoint();
  return DensityMatrix{std::move(out), space};
}

}  // namespace

Mat hamiltonian(const SystemParams& p, Frame frame) {
  JointOperators ops = build_operators(p);
  const Complex i(0, 1);
  Mat h = i * (ops.a_dag * ops.b - ops.b_dag * ops.a);
  if (frame == Frame::Original) {
    h += i * p.omega_bar * (ops.b_dag - ops.b);
  } else {
    h += i * p.gamma_a_bar * p.omega_bar * (ops.a - ops.a_dag);
  }
  return h;
}

SparseMat liouvillian_matrix(const Mat& h,
                             const std::vector<std::pair<double, Mat>>& channels) {
  const int d = static_cast<int>(h.rows());
  const Mat id = Mat::Identity(d, d);
  std::vector<Eigen::Triplet<Complex>> trips;
  const Complex i(0, 1);
  // vec(H rho) = (I x H) v, vec(rho H) = (H^T x I) v
  append_kron(trips, id, h, -i);
  append_kron(trips, h.transpose(), id, i);
  for (const auto& [gamma, dop] : channels) {
    if (gamma == 0.0) continue;
    const Mat dd = dop.adjoint() * dop;
    append_kron(trips, dop.conjugate(), dop, 2.0 * gamma);
    append_kron(trips, id, dd, -gamma);
    append_kron(trips, dd.transpose(), id, -gamma);
  }
  SparseMat out(d * d, d * d);
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

Liouvillian build_liouvillian(const SystemParams& p, Frame frame) {
  JointOperators ops = build_operators(p);
  Mat h = hamiltonian(p, frame);
  SparseMat m = liouvillian_matrix(
      h, {{p.gamma_a_bar, ops.a}, {p.gamma_b_bar, ops.b}});
  return Liouvillian{std::move(m), frame, p, p.dim()};
}

namespace {

struct ShiftedSolver {
  Eigen::SparseLU<SparseMat> lu;
  bool ok = false;
};

void factorize(ShiftedSolver& s, const SparseMat& l, double shift) {
  SparseMat shifted = l;
  SparseMat id(l.rows(), l.cols());
  id.setIdentity();
  shifted -= Complex(shift, 0.0) * id;
  s.lu.compute(shifted);
  s.ok = (s.lu.info() == Eigen::Success);
}

/// Inverse iteration toward the eigenvalue closest to the shift. `deflate`
/// (unit norm) is projected out each sweep when non-empty.
Vec inverse_iterate(const ShiftedSolver& s, const SparseMat& l, Vec x,
                    const Vec* deflate, int max_iterations, double tol,
                    double* residual_out) {
  double res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iterations; ++it) {
    if (deflate) x -= (*deflate) * deflate->dot(x);
    x.normalize();
    Vec y = s.lu.solve(x);
    if (deflate) y -= (*deflate) * deflate->dot(y);
    const double ny = y.norm();
    if (!(ny > 0.0) || !std::isfinite(ny))
      throw NumericalError("inverse iteration produced a zero/NaN vector");
    x = y / ny;
    res = (l * x).norm();
    if (res < tol) break;
  }
  if (residual_out) *residual_out = res;
  return x;
}

}  // namespace

double liouvillian_spectral_gap_estimate(const Liouvillian& liou,
                                         const SteadyStateOptions& opt) {
  ShiftedSolver s;
  factorize(s, liou.matrix, opt.shift);
  if (!s.ok) throw NumericalError("sparse LU factorization failed");
  const int d = liou.dim;
  Vec x0 = to_vec(Mat::Identity(d, d) / double(d));
  double res0 = 0.0;
  Vec null_vec =
      inverse_iterate(s, liou.matrix, x0, nullptr, opt.max_iterations,
                      1e-13, &res0);
  // Deterministic pseudo-random start for the deflated probe.
  Vec y0(d * d);
  std::uint64_t h = 0x243F6A8885A308D3ull;
  for (int i = 0; i < d * d; ++i) {
    h ^= h << 13; h ^= h >> 7; h ^= h << 17;
    y0(i) = Complex(double(h % 1000) / 1000.0 - 0.5,
                    double((h >> 10) % 1000) / 1000.0 - 0.5);
  }
  double res2 = 0.0;
  inverse_iterate(s, liou.matrix, y0, &null_vec, 8, 0.0, &res2);
  return res2;
}

DensityMatrix steady_state(const Liouvillian& liou,
                           const SteadyStateOptions& opt) {
  const SystemParams& p = liou.params;
  if (p.gamma_a_bar + p.gamma_b_bar <= 0.0)
    throw DegenerateSteadyStateError(
        "no damping channel: steady state not unique");

  ShiftedSolver s;
  double shift = opt.shift;
  for (int attempt = 0; attempt < 3; ++attempt) {
    factorize(s, liou.matrix, shift);
    if (s.ok) break;
    shift *= 100.0;
  }
  if (!s.ok) throw NumericalError("sparse LU factorization failed");

  const int d = liou.dim;
  Vec x0 = to_vec(Mat::Identity(d, d) / double(d));
  double residual = 0.0;
  Vec x = inverse_iterate(s, liou.matrix, x0, nullptr, opt.max_iterations,
                          1e-13, &residual);

  if (opt.probe_degeneracy) {
    Vec y0(d * d);
    std::uint64_t h = 0x243F6A8885A308D3ull;
    for (int i = 0; i < d * d; ++i) {
      h ^= h << 13; h ^= h >> 7; h ^= h << 17;
      y0(i) = Complex(double(h % 1000) / 1000.0 - 0.5,
                      double((h >> 10) % 1000) / 1000.0 - 0.5);
    }
    double second = 0.0;
    inverse_iterate(s, liou.matrix, y0, &x, 8, 0.0, &second);
    if (second < opt.degeneracy_tol) {
      std::ostringstream os;
      os << "Liouvillian kernel not one-dimensional (second eigenvalue est. "
         << second << ")";
      throw DegenerateSteadyStateError(os.str());
    }
  }

  // Fix the arbitrary global phase so the result is a positive matrix:
  // scale by trace phase before Hermitization.
  Mat rho = to_mat(x, d);
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-14) throw NumericalError("null vector has zero trace");
  rho /= tr;
  DensityMatrix out = clean_density(std::move(rho), Subspace::Joint);

  const double final_res = (liou.matrix * to_vec(out.rho)).norm();
  if (final_res > opt.residual_tol) {
    std::ostringstream os;
    os << "steady-state residual " << final_res << " exceeds "
       << opt.residual_tol;
    throw NumericalError(os.str());
  }
  return out;
}

double default_evolve_dt(const SystemParams& p) {
  const double rate_rule =
      0.2 / std::max({1.0, p.gamma_a_bar, p.gamma_b_bar, p.omega_bar,
                      2.0 * p.gamma_a_bar * p.omega_bar});
  // Explicit RK4 also has to resolve the fastest decaying mode of the
  // truncated ladder, ~2*gamma_a*n_max.
  const double stiffness = 2.0 * (p.gamma_a_bar * p.fock_dim() + p.gamma_b_bar) +
                           2.0 * p.omega_bar + 4.0 * std::sqrt(double(p.fock_dim()));
  return std::min(rate_rule, 2.0 / stiffness);
}

DensityMatrix evolve(const DensityMatrix& rho0, const Liouvillian& liou,
                     double t_bar, double dt_bar) {
  if (rho0.dim() != liou.dim) throw DomainError("dimension mismatch");
  if (t_bar < 0.0) throw DomainError("t_bar must be >= 0");
  const int d = liou.dim;
  const int fock = d / 2;
  double dt = dt_bar > 0.0 ? dt_bar : default_evolve_dt(liou.params);
  const long steps = std::max(1L, std::lround(std::ceil(t_bar / dt)));
  dt = t_bar / double(steps);
  if (t_bar == 0.0) return rho0;

  const SparseMat& l = liou.matrix;
  Vec v = to_vec(rho0.rho);
  Vec k1, k2, k3, k4;
  for (long i = 0; i < steps; ++i) {
    k1 = l * v;
    k2 = l * (v + 0.5 * dt * k1);
    k3 = l * (v + 0.5 * dt * k2);
    k4 = l * (v + dt * k3);
    v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    // population monitor on the top Fock levels
    double pop = 0.0;
    for (int sidx = 0; sidx < 2; ++sidx)
      for (int n = std::max(0, fock - 3); n < fock; ++n) {
        const int j = sidx * fock + n;
        pop += v(j * d + j).real();
      }
    if (pop > 1e-6)
      throw TruncationError("evolve: top Fock levels exceeded 1e-6 population");
    if (!std::isfinite(v(0).real()))
      throw NumericalError("evolve: state diverged (dt too large?)");
  }
  Mat rho = to_mat(v, d);
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-9)
    throw NumericalError("evolve: Hermiticity drift above 1e-9");
  rho = 0.5 * (rho + rho.adjoint().eval());
  return DensityMatrix{std::move(rho), Subspace::Joint};
}

DensityMatrix resonance_fluorescence_steady_state(double omega_bar,
                                                  double gamma_b_bar) {
  if (!(gamma_b_bar > 0.0)) throw DomainError("gamma_b_bar must be > 0");
  // Bloch steady state: <s_z> = -G^2/(G^2+2W^2), <s_x> = 2WG/(G^2+2W^2).
  const double denom = gamma_b_bar * gamma_b_bar + 2.0 * omega_bar * omega_bar;
  const double pe = omega_bar * omega_bar / denom;
  const double coh = omega_bar * gamma_b_bar / denom;
  Mat rho(2, 2);  // basis (g, e)
  rho(0, 0) = 1.0 - pe;
  rho(1, 1) = pe;
  rho(0, 1) = coh;
  rho(1, 0) = coh;
  return DensityMatrix{std::move(rho), Subspace::Atom};
}

}  // namespace trajent
