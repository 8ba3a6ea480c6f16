#include "trajent/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "trajent/errors.hpp"
#include "trajent/hilbert.hpp"
#include "trajent/parallel.hpp"
#include "trajent/rng.hpp"

namespace trajent {

void UnravelingConfig::check(const SystemParams& p) const {
  if (!(t_transient < t_total))
    throw DomainError("t_transient must be < t_total");
  if (!(sample_interval > 0.0)) throw DomainError("sample_interval must be > 0");
  if (dt_bar > sample_interval)
    throw DomainError("dt_bar must be <= sample_interval");
  if (kind == UnravelingKind::Homodyne && !(p.gamma_a_bar > 0.0))
    throw DomainError("homodyne unraveling requires gamma_a_bar > 0");
  if (kind == UnravelingKind::Direct &&
      !(p.gamma_a_bar + p.gamma_b_bar > 0.0))
    throw DomainError("direct unraveling requires a damping channel");
}

double default_direct_dt(const SystemParams& p) {
  const double stiffness =
      2.0 * (p.gamma_a_bar * p.fock_dim() + p.gamma_b_bar) +
      2.0 * p.omega_bar + 4.0 * std::sqrt(double(p.fock_dim()));
  return std::min({0.01, 2.0 / stiffness, 0.1});
}

double default_homodyne_dt(const SystemParams& p) {
  return 1e-3 * std::min(1.0, 1.0 / p.gamma_a_bar);
}

namespace {

struct StepperContext {
  SparseMat drift;      // -i H - (gamma_a n_a + gamma_b n_b), joint space
  SparseMat jump_a;     // sqrt(2 gamma_a) a (times any debug scale)
  SparseMat jump_b;     // sqrt(2 gamma_b) b
  SparseMat op_a;       // bare a, for homodyne expectations
  int dim = 0;
  int fock = 0;
  // RK4 scratch
  mutable Vec k1, k2, k3, k4, tmp;
};

StepperContext make_context(const SystemParams& p, const UnravelingConfig& cfg) {
  JointOperators ops = build_operators(p);
  Mat h = hamiltonian(p, cfg.frame);
  // The jump-operator scale hook only applies to photon counting; the drift
  // is built from the jump operators themselves, -iH - (1/2) sum C†C, so a
  // mis-normalized operator unravels a visibly different master equation.
  const double scale = (cfg.kind == UnravelingKind::Direct)
                           ? cfg.debug_jump_a_scale
                           : 1.0;
  Mat c_a = scale * std::sqrt(2.0 * p.gamma_a_bar) * ops.a;
  Mat c_b = std::sqrt(2.0 * p.gamma_b_bar) * ops.b;
  Mat drift = Complex(0, -1) * h -
              0.5 * (c_a.adjoint() * c_a + c_b.adjoint() * c_b);
  StepperContext ctx;
  ctx.drift = drift.sparseView(1.0, 1e-15);
  ctx.jump_a = c_a.sparseView(1.0, 1e-15);
  ctx.jump_b = c_b.sparseView(1.0, 1e-15);
  ctx.op_a = ops.a.sparseView(1.0, 1e-15);
  ctx.dim = p.dim();
  ctx.fock = p.fock_dim();
  const int d = ctx.dim;
  ctx.k1.resize(d); ctx.k2.resize(d); ctx.k3.resize(d); ctx.k4.resize(d);
  ctx.tmp.resize(d);
  return ctx;
}

/// One RK4 step of dpsi/dt = drift * psi.
void rk4_step(const StepperContext& ctx, const Vec& psi, double h, Vec& out) {
  ctx.k1.noalias() = ctx.drift * psi;
  ctx.tmp = psi + (0.5 * h) * ctx.k1;
  ctx.k2.noalias() = ctx.drift * ctx.tmp;
  ctx.tmp = psi + (0.5 * h) * ctx.k2;
  ctx.k3.noalias() = ctx.drift * ctx.tmp;
  ctx.tmp = psi + h * ctx.k3;
  ctx.k4.noalias() = ctx.drift * ctx.tmp;
  out = psi + (h / 6.0) * (ctx.k1 + 2.0 * ctx.k2 + 2.0 * ctx.k3 + ctx.k4);
}

Vec initial_amps(const SystemParams& p, const StateVector* initial) {
  if (initial) {
    if (initial->space != Subspace::Joint || initial->dim() != p.dim())
      throw DomainError("initial state must live on the joint space");
    Vec v = initial->amps;
    const double n = v.norm();
    if (!(n > 0.0)) throw DomainError("initial state has zero norm");
    return v / n;
  }
  Vec v = Vec::Zero(p.dim());
  v(0) = 1.0;  // |g, 0>
  return v;
}

struct SampleGrid {
  double dt = 0.0;
  int steps_per_sample = 0;
  long n_samples = 0;      // over [0, t_total]
  long first_kept = 0;     // first sample index strictly after t_transient
};

SampleGrid make_grid(const UnravelingConfig& cfg, double default_dt) {
  SampleGrid g;
  const double want = cfg.dt_bar > 0.0 ? cfg.dt_bar : default_dt;
  g.steps_per_sample =
      std::max(1, int(std::ceil(cfg.sample_interval / want - 1e-12)));
  g.dt = cfg.sample_interval / g.steps_per_sample;
  g.n_samples = std::lround(std::ceil(cfg.t_total / cfg.sample_interval));
  g.first_kept = std::lround(std::floor(cfg.t_transient / cfg.sample_interval)) + 1;
  return g;
}

}  // namespace

TrajectoryResult simulate_direct(const SystemParams& p,
                                 const UnravelingConfig& cfg,
                                 std::uint64_t seed,
                                 const StateVector* initial) {
  if (cfg.kind != UnravelingKind::Direct)
    throw DomainError("simulate_direct requires cfg.kind == Direct");
  cfg.check(p);
  StepperContext ctx = make_context(p, cfg);
  // A scaled jump operator stiffens the drift; fold it into the step default.
  SystemParams p_eff = p;
  p_eff.gamma_a_bar *= cfg.debug_jump_a_scale * cfg.debug_jump_a_scale;
  SampleGrid grid = make_grid(cfg, default_direct_dt(p_eff));

  std::mt19937_64 engine = make_engine(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  TrajectoryResult result;
  result.record.seed = seed;
  result.times.reserve(grid.n_samples - grid.first_kept + 1);
  result.entropy.reserve(grid.n_samples - grid.first_kept + 1);

  Vec psi = initial_amps(p, initial);
  Vec trial(ctx.dim), jumped(ctx.dim);
  double threshold = uniform(engine);
  double t = 0.0;

  auto do_jump = [&](double t_jump) {
    // Channel with probability proportional to ||J psi||^2.
    jumped.noalias() = ctx.jump_a * psi;
    const double wa = jumped.squaredNorm();
    ctx.tmp.noalias() = ctx.jump_b * psi;
    const double wb = ctx.tmp.squaredNorm();
    if (!(wa + wb > 0.0))
      throw NumericalError("jump with zero channel weights");
    int channel;
    if (uniform(engine) * (wa + wb) < wa) {
      channel = 0;
      psi = jumped / std::sqrt(wa);
    } else {
      channel = 1;
      psi = ctx.tmp / std::sqrt(wb);
    }
    result.record.jumps.push_back(JumpEvent{t_jump, channel});
    threshold = uniform(engine);
  };

  for (long s = 1; s <= grid.n_samples; ++s) {
    for (int k = 0; k < grid.steps_per_sample; ++k) {
      double h_left = grid.dt;
      while (h_left > 1e-15 * grid.dt) {
        const double n2_before = psi.squaredNorm();
        rk4_step(ctx, psi, h_left, trial);
        const double n2_after = trial.squaredNorm();
        if (n2_after > n2_before * 1.001)
          throw StepSizeError("norm grew during a deterministic segment");
        if (n2_before - n2_after > 0.1 * n2_before) {
          std::ostringstream os;
          os << "single-step norm loss "
             << (n2_before - n2_after) / n2_before << " exceeds 0.1";
          throw StepSizeError(os.str());
        }
        if (n2_after > threshold) {
          psi.swap(trial);
          t += h_left;
          h_left = 0.0;
          break;
        }
        // Norm crossed the waiting-time threshold inside this step: locate
        // the crossing by bisection to 1e-3 dt, then jump.
        double lo = 0.0, hi = h_left;
        while (hi - lo > 1e-3 * grid.dt) {
          const double mid = 0.5 * (lo + hi);
          rk4_step(ctx, psi, mid, trial);
          if (trial.squaredNorm() > threshold)
            lo = mid;
          else
            hi = mid;
        }
        rk4_step(ctx, psi, hi, trial);
        psi.swap(trial);
        t += hi;
        h_left -= hi;
        do_jump(t);
      }
    }
    check_truncation(psi, p.n_max);
    if (s >= grid.first_kept) {
      result.times.push_back(s * cfg.sample_interval);
      result.entropy.push_back(entanglement_entropy(psi, p.n_max));
    }
  }

  psi /= psi.norm();
  result.final_state = StateVector{std::move(psi), Subspace::Joint};
  return result;
}

TrajectoryResult simulate_homodyne(const SystemParams& p,
                                   const UnravelingConfig& cfg,
                                   std::uint64_t seed,
                                   const StateVector* initial) {
  if (cfg.kind != UnravelingKind::Homodyne)
    throw DomainError("simulate_homodyne requires cfg.kind == Homodyne");
  cfg.check(p);
  StepperContext ctx = make_context(p, cfg);
  SampleGrid grid = make_grid(cfg, default_homodyne_dt(p));
  const double dt = grid.dt;
  const double sqrt_dt = std::sqrt(dt);
  const double sqrt_2ga = std::sqrt(2.0 * p.gamma_a_bar);
  const Complex coupling = std::exp(Complex(0.0, -cfg.theta)) * sqrt_2ga;
  const Complex phase_fwd = std::exp(Complex(0.0, cfg.theta));
  const bool hybrid = p.gamma_b_bar > 0.0;

  std::mt19937_64 engine = make_engine(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  TrajectoryResult result;
  result.record.seed = seed;
  result.record.hybrid_b_jumps = hybrid;
  const int stride = cfg.record_stride > 0 ? cfg.record_stride
                                           : grid.steps_per_sample;
  result.record.record_dt = stride * dt;
  result.times.reserve(grid.n_samples - grid.first_kept + 1);
  result.entropy.reserve(grid.n_samples - grid.first_kept + 1);

  Vec psi = initial_amps(p, initial);
  Vec apsi(ctx.dim);
  double t = 0.0;
  double charge_acc = 0.0;
  int stride_count = 0;

  for (long s = 1; s <= grid.n_samples; ++s) {
    for (int k = 0; k < grid.steps_per_sample; ++k) {
      if (hybrid) {
        ctx.tmp.noalias() = ctx.jump_b * psi;
        const double pb = ctx.tmp.squaredNorm() * dt;
        if (uniform(engine) < pb) {
          psi = ctx.tmp / std::sqrt(ctx.tmp.squaredNorm());
          result.record.jumps.push_back(JumpEvent{t + dt, 1});
          t += dt;
          if (++stride_count == stride) {
            result.record.charge.push_back(charge_acc);
            charge_acc = 0.0;
            stride_count = 0;
          }
          continue;
        }
      }
      apsi.noalias() = ctx.op_a * psi;
      // dq = sqrt(2 gamma_a) <e^{i theta} a + e^{-i theta} a†> dt + dW
      const double quad = 2.0 * (phase_fwd * psi.dot(apsi)).real();
      const double dq = sqrt_2ga * quad * dt + sqrt_dt * gauss(engine);
      ctx.k1.noalias() = ctx.drift * psi;
      psi += dt * ctx.k1 + (coupling * dq) * apsi;
      const double n = psi.norm();
      if (!(n > 0.0) || !std::isfinite(n))
        throw StepSizeError("homodyne step produced a non-finite state");
      psi /= n;
      t += dt;
      charge_acc += dq;
      if (++stride_count == stride) {
        result.record.charge.push_back(charge_acc);
        charge_acc = 0.0;
        stride_count = 0;
      }
    }
    check_truncation(psi, p.n_max);
    if (s >= grid.first_kept) {
      result.times.push_back(s * cfg.sample_interval);
      result.entropy.push_back(entanglement_entropy(psi, p.n_max));
    }
  }

  result.final_state = StateVector{std::move(psi), Subspace::Joint};
  return result;
}

namespace {

/// Integrated autocorrelation time in samples, Sokal's automatic window.
double integrated_autocorrelation(const std::vector<double>& x, double mean) {
  const long n = static_cast<long>(x.size());
  if (n < 4) return 0.5;
  double c0 = 0.0;
  for (double v : x) c0 += (v - mean) * (v - mean);
  c0 /= double(n);
  if (!(c0 > 0.0)) return 0.5;
  const long max_lag = std::min<long>(n / 4, 2000);
  double tau = 0.5;
  for (long k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (long i = 0; i + k < n; ++i) ck += (x[i] - mean) * (x[i + k] - mean);
    ck /= double(n - k);
    tau += ck / c0;
    if (double(k) >= 6.0 * tau) break;  // window c = 6
  }
  return std::max(tau, 0.5);
}

}  // namespace

EntanglementEstimate average_entanglement(
    const std::vector<std::vector<double>>& runs) {
  if (runs.empty()) throw InsufficientDataError("no entropy series");
  const std::size_t len = runs.front().size();
  for (const auto& r : runs)
    if (r.size() != len)
      throw DomainError("entropy series do not share a sampling grid");
  if (len == 0) throw InsufficientDataError("empty entropy series");

  EntanglementEstimate est;
  double sum = 0.0;
  for (const auto& r : runs) sum = std::accumulate(r.begin(), r.end(), sum);
  est.n_samples = static_cast<long>(len * runs.size());
  est.mean = sum / double(est.n_samples);

  double tau = 0.0;
  for (const auto& r : runs) tau += integrated_autocorrelation(r, est.mean);
  tau /= double(runs.size());
  est.tau_int = tau;

  est.block_len = std::max(1, int(std::ceil(10.0 * tau)));
  std::vector<double> block_means;
  for (const auto& r : runs) {
    const std::size_t blocks = r.size() / est.block_len;
    for (std::size_t b = 0; b < blocks; ++b) {
      double acc = 0.0;
      for (int i = 0; i < est.block_len; ++i) acc += r[b * est.block_len + i];
      block_means.push_back(acc / est.block_len);
    }
  }
  est.n_blocks = static_cast<int>(block_means.size());
  if (est.n_blocks < 20) {
    std::ostringstream os;
    os << "only " << est.n_blocks << " blocks of length " << est.block_len
       << " (need >= 20); extend t_total or add trajectories";
    throw InsufficientDataError(os.str());
  }
  double var = 0.0;
  for (double b : block_means) var += (b - est.mean) * (b - est.mean);
  var /= double(est.n_blocks - 1);
  est.stderr = std::sqrt(var / double(est.n_blocks));
  return est;
}

std::vector<SweepRow> sweep_entanglement(const std::vector<SweepPoint>& grid,
                                         std::uint64_t master_seed, int n_traj,
                                         int jobs) {
  if (grid.empty()) throw DomainError("empty sweep grid");
  if (n_traj < 1) throw DomainError("n_traj must be >= 1");

  struct Item {
    std::size_t point;
    int traj;
  };
  std::vector<Item> items;
  items.reserve(grid.size() * n_traj);
  for (std::size_t pi = 0; pi < grid.size(); ++pi)
    for (int ti = 0; ti < n_traj; ++ti) items.push_back(Item{pi, ti});

  std::vector<std::vector<double>> series(items.size());
  std::vector<std::string> item_errors(items.size());

  parallel_for(items.size(), jobs, [&](std::size_t i) {
    const Item& it = items[i];
    const SweepPoint& pt = grid[it.point];
    const std::uint64_t seed = derive_seed(master_seed, it.point, it.traj);
    try {
      TrajectoryResult r =
          (pt.cfg.kind == UnravelingKind::Direct)
              ? simulate_direct(pt.params, pt.cfg, seed)
              : simulate_homodyne(pt.params, pt.cfg, seed);
      series[i] = std::move(r.entropy);
    } catch (const std::exception& e) {
      item_errors[i] = e.what();
    }
  });

  std::vector<SweepRow> rows(grid.size());
  for (std::size_t pi = 0; pi < grid.size(); ++pi) {
    SweepRow& row = rows[pi];
    row.point = grid[pi];
    std::vector<std::vector<double>> runs;
    runs.reserve(n_traj);
    for (int ti = 0; ti < n_traj; ++ti) {
      const std::size_t i = pi * n_traj + ti;
      if (!item_errors[i].empty()) {
        row.error = item_errors[i];
        break;
      }
      runs.push_back(std::move(series[i]));
    }
    if (!row.error.empty()) continue;
    try {
      row.estimate = average_entanglement(runs);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }
  return rows;
}

}  // namespace trajent
