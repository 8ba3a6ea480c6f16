// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned here, not configurable.

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "experiments.hpp"
#include "trajent/hilbert.hpp"
#include "trajent/master_equation.hpp"
#include "trajent/parallel.hpp"
#include "trajent/rng.hpp"
#include "trajent/semiclassical.hpp"
#include "trajent/trajectories.hpp"
#include "trajent/wigner.hpp"

using namespace trajent;
namespace exps = trajent::experiments;

namespace {

int g_jobs = 0;
std::uint64_t g_seed = 424242;
int g_failures = 0;

void report(int id, const std::string& name, bool passed,
            const std::string& details) {
  std::cout << (passed ? "[PASS] " : "[FAIL] ") << "C" << id << " " << name
            << ": " << details << std::endl;
  if (!passed) ++g_failures;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

StateVector dark_vector(const SystemParams& p) {
  Vec g(2);
  g(0) = 1.0;
  g(1) = 0.0;
  return product_state(StateVector{g, Subspace::Atom},
                       coherent_state(Complex(p.omega_bar, 0.0), p.n_max));
}

UnravelingConfig sweep_cfg(UnravelingKind kind, double theta, double t_total) {
  UnravelingConfig u;
  u.kind = kind;
  u.theta = theta;
  u.t_transient = 20.0;
  u.t_total = t_total;
  u.sample_interval = 0.1;
  return u;
}

// ---------------------------------------------------------------- C1 ----

void criterion_1() {
  const double tol = 1e-6;
  auto p = SystemParams::make(1.0, 0.0, 0.5, 0);
  auto rho_ss = steady_state(build_liouvillian(p, Frame::Original));
  auto target = pure_density(dark_vector(p));
  const double td = trace_distance(rho_ss, target);

  UnravelingConfig u = sweep_cfg(UnravelingKind::Direct, 0.0, 2000.0);
  u.t_transient = 0.0;
  auto initial = dark_vector(p);
  auto r = simulate_direct(p, u, derive_seed(g_seed, 1), &initial);
  double emax = 0.0;
  for (double e : r.entropy) emax = std::max(emax, e);

  const bool pass = td <= tol && r.record.jumps.empty() && emax <= 1e-9;
  report(1, "dark state",
         pass,
         "steady-state trace distance " + fmt(td) + " (tol 1e-6); " +
             std::to_string(r.record.jumps.size()) + " jumps and max entropy " +
             fmt(emax) + " over t_bar=2000");
}

// ---------------------------------------------------------------- C2 ----

void criterion_2() {
  const int m = 500;
  const double tol = 3.0 / std::sqrt(double(m));  // 0.1342
  auto p = SystemParams::make(1.0, 2.0, 0.5, 0);
  auto rho_ss = steady_state(build_liouvillian(p, Frame::Original));

  double tds[2];
  for (int kind = 0; kind < 2; ++kind) {
    UnravelingConfig u;
    u.kind = kind == 0 ? UnravelingKind::Direct : UnravelingKind::Homodyne;
    u.t_total = 30.0;
    u.t_transient = 0.0;
    u.sample_interval = 1.0;
    std::vector<StateVector> finals(m);
    parallel_for(m, g_jobs, [&](std::size_t i) {
      auto r = (u.kind == UnravelingKind::Direct)
                   ? simulate_direct(p, u, derive_seed(g_seed, 2 + kind, i))
                   : simulate_homodyne(p, u, derive_seed(g_seed, 2 + kind, i));
      finals[i] = std::move(r.final_state);
    });
    Mat acc = Mat::Zero(p.dim(), p.dim());
    for (const auto& f : finals) acc += f.amps * f.amps.adjoint();
    acc /= double(m);
    tds[kind] =
        trace_distance(DensityMatrix{std::move(acc), Subspace::Joint}, rho_ss);
  }
  const bool pass = tds[0] <= tol && tds[1] <= tol;
  report(2, "unraveling-mean consistency", pass,
         "M=500: direct " + fmt(tds[0]) + ", homodyne " + fmt(tds[1]) +
             " vs steady state (tol " + fmt(tol) + ")");
}

// ------------------------------------------------------------- C3, C4 ----

std::vector<SweepRow> direct_sweep(const std::vector<double>& gas,
                                   const std::vector<double>& gbs,
                                   std::uint64_t stream, int n_traj,
                                   double t_total) {
  std::vector<SweepPoint> grid;
  for (std::size_t i = 0; i < gas.size(); ++i)
    grid.push_back({SystemParams::make(1.0, gas[i], gbs[i], 0),
                    sweep_cfg(UnravelingKind::Direct, 0.0, t_total)});
  return sweep_entanglement(grid, derive_seed(g_seed, stream), n_traj, g_jobs);
}

void criterion_3() {
  auto rows = direct_sweep({0.3, 2.0, 20.0}, {0.5, 0.5, 0.5}, 10, 4, 2000.0);
  bool ok = rows[0].ok() && rows[1].ok() && rows[2].ok();
  std::ostringstream os;
  if (ok) {
    const double e03 = rows[0].estimate.mean, s03 = rows[0].estimate.stderr;
    const double e2 = rows[1].estimate.mean, s2 = rows[1].estimate.stderr;
    const double e20 = rows[2].estimate.mean, s20 = rows[2].estimate.stderr;
    const double gap_low = e2 - e03, gap_high = e2 - e20;
    const double need_low = 2.0 * std::sqrt(s2 * s2 + s03 * s03);
    const double need_high = 2.0 * std::sqrt(s2 * s2 + s20 * s20);
    ok = gap_low > need_low && gap_high > need_high;
    os << "E_D(0.3)=" << fmt(e03) << ", E_D(2)=" << fmt(e2)
       << ", E_D(20)=" << fmt(e20) << "; gaps " << fmt(gap_low) << "/"
       << fmt(gap_high) << " exceed 2*stderr " << fmt(need_low) << "/"
       << fmt(need_high);
  } else {
    os << "sweep failure";
  }
  report(3, "Fig. 1(d) interior peak", ok, os.str());
}

void criterion_4() {
  const std::vector<double> gbs = {0.25, 0.5, 1.0, 2.0};
  auto rows = direct_sweep({2.0, 2.0, 2.0, 2.0}, gbs, 11, 4, 2000.0);
  bool ok = true;
  std::ostringstream os;
  os << "E_D over gamma_b {0.25,0.5,1,2}: ";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ok = ok && rows[i].ok();
    if (rows[i].ok()) os << fmt(rows[i].estimate.mean) << " ";
  }
  if (ok) {
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      const double slack =
          2.0 * std::sqrt(rows[i].estimate.stderr * rows[i].estimate.stderr +
                          rows[i + 1].estimate.stderr *
                              rows[i + 1].estimate.stderr);
      if (rows[i + 1].estimate.mean > rows[i].estimate.mean + slack) {
        ok = false;
        os << "(increase at step " << i << ")";
      }
    }
    os << "(non-increasing within 2*stderr)";
  }
  report(4, "monotone decrease in gamma_b", ok, os.str());
}

// ---------------------------------------------------------------- C5 ----

void criterion_5() {
  bool ok = true;
  std::ostringstream os;
  const double om = 1.7;  // arbitrary positive drive
  for (double xi : {2.0, 1.0, 1.0 / std::sqrt(2.0), 0.1}) {
    auto p = SystemParams::make(om, 1.0 / (2.0 * xi * om), 0.0, 4);
    auto fps = fixed_points(p);
    if (xi >= 1.0) {
      ok = ok && fps.size() == 1 &&
           std::abs(fps[0].alpha - Complex(om, 0.0)) < 1e-12 * om &&
           std::abs(fps[0].beta - Complex(1.0 / xi, 0.0)) < 1e-12;
    } else {
      // hand values via the angle form: beta = e^{+-i phi}, cos(phi) = xi
      const double phi = std::acos(xi);
      const Complex beta_hand = std::exp(Complex(0.0, phi));
      const Complex alpha_hand = om * xi * beta_hand;
      ok = ok && fps.size() == 2 &&
           std::abs(fps[0].beta - beta_hand) < 1e-12 &&
           std::abs(fps[0].alpha - alpha_hand) < 1e-12 * om &&
           std::abs(std::abs(fps[0].alpha / om - Complex(0.5, 0.0)) - 0.5) <
               1e-12;
      // <beta_+|beta_-> = xi
      auto bp = atomic_state(fps[0].beta);
      auto bm = atomic_state(fps[1].beta);
      ok = ok && std::abs(bp.amps.dot(bm.amps) - Complex(xi, 0.0)) < 1e-10;
    }
  }
  report(5, "semiclassical algebra", ok,
         ok ? "branch values, circle constraint, and <beta_+|beta_-> = xi at "
              "xi in {2, 1, 1/sqrt2, 0.1} (tol 1e-12 / 1e-10)"
            : "mismatch against hand-derived branch values");
}

// ---------------------------------------------------------------- C6 ----

void criterion_6() {
  const int n_phi = 64;
  bool ok = true;
  int literal_valid = 0;
  double worst_literal = 0.0, worst_corrected = 0.0;
  auto p = SystemParams::make(3.0, 1.0 / (3.0 * std::sqrt(2.0)), 0.0, 0);
  for (int q = 0; q < n_phi; ++q) {
    auto r = analytic_phase_ensemble_entropy(p, (q + 0.5) * M_PI / n_phi);
    if (r.literal_in_range) {
      ++literal_valid;
      worst_literal =
          std::max(worst_literal, std::abs(r.entropy_literal - r.entropy_oracle));
    }
    worst_corrected = std::max(
        worst_corrected, std::abs(r.entropy_corrected - r.entropy_oracle));
  }
  ok = ok && worst_literal <= 5e-2 && worst_corrected <= 5e-2;

  const double td =
      trace_distance(dichotomous_mixture_density(p),
                     phase_ensemble_average_density(p, n_phi));
  ok = ok && td <= 1e-6;

  double dichotomous_entropy = 0.0;
  for (int theta : {0, 1}) {
    EnsembleMemberSpec spec;
    spec.kind = EnsembleMemberSpec::Kind::Dichotomous;
    spec.theta_rec = theta;
    auto member = construct_ensemble_state(p, spec);
    dichotomous_entropy = std::max(
        dichotomous_entropy, entanglement_entropy(member.state.amps, p.n_max));
  }
  ok = ok && dichotomous_entropy <= 1e-12;

  std::ostringstream os;
  os << "literal form in range at " << literal_valid << "/" << n_phi
     << " points (max dev " << fmt(worst_literal)
     << "), corrected closed form max dev " << fmt(worst_corrected)
     << " (tol 5e-2); mixture equivalence td " << fmt(td)
     << " (tol 1e-6); dichotomous entropy " << fmt(dichotomous_entropy);
  report(6, "ensemble oracle", ok, os.str());
}

// ---------------------------------------------------------------- C7 ----

void criterion_7() {
  const std::vector<double> thetas = {0.0, M_PI / 40.0, M_PI / 10.0,
                                      M_PI / 2.0};
  const std::vector<double> gas = {0.2357, 0.33, 0.5, 0.65};
  const double t_total = 1200.0;
  const int n_traj = 4;

  std::vector<SweepPoint> grid;
  for (double theta : thetas)
    for (double ga : gas)
      grid.push_back({SystemParams::make(3.0, ga, 0.0, 0),
                      sweep_cfg(UnravelingKind::Homodyne, theta, t_total)});
  auto rows = sweep_entanglement(grid, derive_seed(g_seed, 20), n_traj, g_jobs);

  bool ok = true;
  for (const auto& r : rows) ok = ok && r.ok();
  std::ostringstream os;
  if (ok) {
    // pointwise ordering theta0 >= pi/40 >= pi/10 >= pi/2 within 2*stderr
    for (std::size_t t = 0; t + 1 < thetas.size() && ok; ++t)
      for (std::size_t g = 0; g < gas.size(); ++g) {
        const auto& hi = rows[t * gas.size() + g].estimate;
        const auto& lo = rows[(t + 1) * gas.size() + g].estimate;
        const double slack =
            2.0 * std::sqrt(hi.stderr * hi.stderr + lo.stderr * lo.stderr);
        if (lo.mean > hi.mean + slack) {
          ok = false;
          os << "ordering violated at theta index " << t << ", gamma_a "
             << gas[g] << "; ";
        }
      }
    // theta = 0 tracks the record-averaged analytic curve near its peak
    double best_analytic = -1.0, best_ga = 0.0, theta0_at_best = 0.0;
    for (std::size_t g = 0; g < gas.size(); ++g) {
      auto p = SystemParams::make(3.0, gas[g], 0.0, 0);
      const double analytic = averaged_phase_entanglement(p, 64);
      if (analytic > best_analytic) {
        best_analytic = analytic;
        best_ga = gas[g];
        theta0_at_best = rows[g].estimate.mean;
      }
    }
    const double dev = std::abs(theta0_at_best - best_analytic);
    ok = ok && dev <= 0.1;
    os << "theta-ordered at all " << gas.size() << " gamma_a points; at the "
       << "analytic peak (gamma_a=" << best_ga << ") E_H(0)="
       << fmt(theta0_at_best) << " vs analytic " << fmt(best_analytic)
       << ", dev " << fmt(dev) << " (tol 0.1)";
  } else {
    os << "sweep failure";
  }
  report(7, "Fig. 3 homodyne ordering", ok, os.str());
}

// ---------------------------------------------------------------- C8 ----

void criterion_8() {
  auto p = SystemParams::make(3.0, 1.0 / (3.0 * std::sqrt(2.0)), 0.0, 0);
  auto rho_ss = steady_state(build_liouvillian(p, Frame::Original));
  auto rho_a = partial_trace(rho_ss, Subspace::Cavity);
  WignerOptions wopt;
  wopt.jobs = g_jobs;
  auto grid = wigner_function_default(rho_a, p.omega_bar, wopt);
  auto peaks = local_maxima(grid);
  const double integral = grid.integral();

  bool ok = peaks.size() == 2 && std::abs(integral - 1.0) <= 2e-2;
  std::ostringstream os;
  os << peaks.size() << " local maxima at {";
  for (const auto& pk : peaks) {
    const Complex pos(pk.re, pk.im);
    const double dist = std::min(std::abs(pos - Complex(1.5, 1.5)),
                                 std::abs(pos - Complex(1.5, -1.5)));
    ok = ok && dist <= 0.5;
    os << "(" << fmt(pk.re) << "," << fmt(pk.im) << ") ";
  }
  os << "} vs 1.5+-1.5i (tol 0.5); grid integral " << fmt(integral)
     << " (tol 2e-2)";
  report(8, "Wigner double peak", ok, os.str());
}

// ---------------------------------------------------------------- C9 ----

void criterion_9() {
  std::mt19937_64 eng(g_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n_max = 9;
  const int F = n_max + 1;
  bool ok = true;

  // maximally mixed qubit
  ok = ok && std::abs(von_neumann_entropy(DensityMatrix{
                          0.5 * Mat::Identity(2, 2), Subspace::Atom}) -
                      1.0) < 1e-8;

  Mat dj = joint_displacement(0.7, n_max);
  double worst_pure = 0.0, worst_schmidt = 0.0, worst_disp = 0.0;
  for (int k = 0; k < 6; ++k) {
    Vec v(2 * F);
    for (int i = 0; i < 2 * F; ++i) v(i) = Complex(gauss(eng), gauss(eng));
    v.normalize();
    auto rho = pure_density(StateVector{v, Subspace::Joint});
    worst_pure = std::max(worst_pure, std::abs(von_neumann_entropy(rho)));
    const double ea = von_neumann_entropy(partial_trace(rho, Subspace::Cavity));
    const double eb = von_neumann_entropy(partial_trace(rho, Subspace::Atom));
    worst_schmidt = std::max(worst_schmidt, std::abs(ea - eb));
    DensityMatrix moved{dj * rho.rho * dj.adjoint(), Subspace::Joint};
    worst_disp = std::max(
        worst_disp,
        std::abs(von_neumann_entropy(partial_trace(moved, Subspace::Atom)) - eb));
  }
  ok = ok && worst_pure < 1e-8 && worst_schmidt < 1e-8 && worst_disp < 1e-8;
  report(9, "entropy unit suite", ok,
         "pure-state entropy " + fmt(worst_pure) + ", Schmidt asymmetry " +
             fmt(worst_schmidt) + ", displacement shift " + fmt(worst_disp) +
             " (all tol 1e-8)");
}

// ---------------------------------------------------------------- C10 ----

void criterion_10() {
  namespace fs = std::filesystem;
  const fs::path out = fs::temp_directory_path() / "trajent_acceptance";
  fs::remove_all(out);
  nlohmann::json j;
  j["experiment"] = "scaling";
  j["out_dir"] = out.string();
  j["jobs"] = g_jobs;
  j["seed"] = g_seed;
  j["scaling_small_gamma_a"] = {0.2, 0.3, 0.45, 0.67, 1.0};
  j["scaling_large_gamma_a"] = {30.0, 60.0, 120.0, 240.0};
  j["trajectory"] = {{"t_total", 600.0}, {"n_traj", 3}};
  bool ok = true;
  std::ostringstream os;
  try {
    exps::run_scaling(exps::config_from_json(j));
    auto report_json = nlohmann::json::parse(
        std::ifstream(out / "scaling" / "scaling_report.json"));
    for (const std::string regime : {"small", "large"}) {
      const auto& r = report_json.at(regime);
      const double slope = r.at("slope").get<double>();
      const double se = r.at("slope_stderr").get<double>();
      const double r2 = r.at("r2").get<double>();
      ok = ok && std::isfinite(slope) && std::isfinite(se) &&
           std::isfinite(r2) && r.at("n_points").get<int>() >= 3;
      os << regime << ": slope " << fmt(slope) << " +- " << fmt(se) << " (R2 "
         << fmt(r2) << ", printed exponent "
         << fmt(r.at("reference_exponent").get<double>()) << "); ";
    }
    os << "report written with fit diagnostics";
  } catch (const std::exception& e) {
    ok = false;
    os << "scaling run failed: " << e.what();
  }
  report(10, "asymptotic scaling report", ok, os.str());
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--jobs") == 0 && i + 1 < argc)
      g_jobs = std::atoi(argv[++i]);
    else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc)
      g_seed = std::strtoull(argv[++i], nullptr, 10);
  }
  std::cout << "acceptance suite (seed " << g_seed << ", jobs "
            << resolve_jobs(g_jobs) << ")" << std::endl;
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  if (g_failures == 0) {
    std::cout << "all 10 criteria passed" << std::endl;
    return 0;
  }
  std::cout << g_failures << " criteria failed" << std::endl;
  return 1;
}
