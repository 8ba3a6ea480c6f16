#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trajent/master_equation.hpp"
#include "trajent/types.hpp"

namespace trajent {

enum class UnravelingKind { Direct, Homodyne };

struct UnravelingConfig {
  UnravelingKind kind = UnravelingKind::Direct;
  double theta = 0.0;          // homodyne local-oscillator phase, [0, 2pi)
  Frame frame = Frame::Original;
  double dt_bar = 0.0;         // integration step; <= 0 selects a default
  double t_transient = 20.0;   // discarded before sampling
  double t_total = 2000.0;
  double sample_interval = 0.1;
  int record_stride = 0;       // homodyne charge decimation; 0 -> per sample

  // Test hook: scales the channel-A jump operator in direct detection.
  // Anything != 1 unravels a different master equation on purpose.
  double debug_jump_a_scale = 1.0;

  void check(const SystemParams& p) const;
};

struct JumpEvent {
  double t_bar = 0.0;
  int channel = 0;  // 0 = A (cavity output), 1 = B (atomic fluorescence)
};

/// The classical measurement record of one trajectory.
struct TrajectoryRecord {
  std::vector<JumpEvent> jumps;   // Direct; also channel-B jumps of the hybrid
  std::vector<double> charge;     // Homodyne: dq sums per stored interval
  double record_dt = 0.0;         // spacing of stored charge increments
  std::uint64_t seed = 0;
  bool hybrid_b_jumps = false;    // Homodyne with gamma_b > 0 (extension)
};

struct TrajectoryResult {
  std::vector<double> times;      // sample times (transient removed)
  std::vector<double> entropy;    // E(rho_B) of the conditioned state
  TrajectoryRecord record;
  StateVector final_state;        // normalized
};

/// Quantum-jump (photon counting) unraveling: deterministic segments under
/// H - i(gamma_a a†a + gamma_b b†b), jump times by the waiting-time
/// (norm-threshold) method, channels A/B with operators sqrt(2 gamma_a) a
/// and sqrt(2 gamma_b) b. Requires gamma_a + gamma_b > 0.
TrajectoryResult simulate_direct(const SystemParams& p,
                                 const UnravelingConfig& cfg,
                                 std::uint64_t seed,
                                 const StateVector* initial = nullptr);

/// Diffusive (homodyne) unraveling of channel A: explicit step of the linear
/// record-driven equation followed by renormalization; channel B (if damped)
/// is unraveled by jumps. Requires gamma_a > 0.
TrajectoryResult simulate_homodyne(const SystemParams& p,
                                   const UnravelingConfig& cfg,
                                   std::uint64_t seed,
                                   const StateVector* initial = nullptr);

struct EntanglementEstimate {
  double mean = 0.0;
  double stderr = 0.0;
  long n_samples = 0;
  int n_blocks = 0;
  int block_len = 0;
  double tau_int = 0.0;  // integrated autocorrelation time, in samples
};

/// Pooled time-and-ensemble average with block-averaged standard error;
/// block length >= 10 integrated autocorrelation times. All series must
/// share the sampling grid. Throws InsufficientDataError below 20 blocks.
EntanglementEstimate average_entanglement(
    const std::vector<std::vector<double>>& runs);

struct SweepPoint {
  SystemParams params;
  UnravelingConfig cfg;
};

struct SweepRow {
  SweepPoint point;
  EntanglementEstimate estimate;
  std::string error;  // empty on success
  bool ok() const { return error.empty(); }
};

/// One estimate per grid point from n_traj trajectories each; work items are
/// independent and merged in input order, so results do not depend on the
/// level of parallelism. Per-point failures are reported, not fatal.
std::vector<SweepRow> sweep_entanglement(const std::vector<SweepPoint>& grid,
                                         std::uint64_t master_seed, int n_traj,
                                         int jobs = 0);

/// Stability-limited default integration step for the jump unraveling.
double default_direct_dt(const SystemParams& p);

/// Default step for the diffusive unraveling: 1e-3 min(1, 1/gamma_a).
double default_homodyne_dt(const SystemParams& p);

}  // namespace trajent
