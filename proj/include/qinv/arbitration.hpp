#pragma once

// Decides between the generic LR phase coefficient 2 sqrt(D/2) G sinh(alpha)
// and the specialized single-G coefficient by propagating an invariant
// eigenstate and measuring its phase.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qinv/dynamics.hpp"
#include "qinv/phases.hpp"

namespace qinv {

struct ArbitrationOptions {
  Method method = Method::magnus2;
  double step = 0.0;  // 0: reference_step
  std::size_t samples = 64;
  /// Propagation length; 0 selects one period (or 4 pi when w = 0).
  double t_final = 0.0;
};

inline double arbitration_time(const ModelParams& p, double t_final) {
  if (t_final > 0.0) return t_final;
  return p.phase_rate == 0.0 ? 4.0 * std::numbers::pi : p.period();
}

inline ArbitrationRecord arbitrate(const Representation& rep, const ModelParams& p, std::size_t n,
                                   const ArbitrationOptions& opt = {}) {
  const double eps = solve_epsilon(rep.kind(), p);
  const double lambda = k0_eigenbasis(rep).at(n).lambda;
  const auto grid = uniform_grid(arbitration_time(p, opt.t_final), opt.samples);
  PropagationOptions po;
  po.method = opt.method;
  po.step = opt.step;
  po.track_index = n;
  const Trajectory tr = propagate(rep, p, frame_initial_state(rep, p, eps, n), grid, po);

  ArbitrationRecord a;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double num = tr.extracted_phase[k];
    a.generic_deviation =
        std::max(a.generic_deviation, std::abs(lr_phase(rep.kind(), p, eps, lambda, grid[k]) - num));
    a.specialized_deviation = std::max(
        a.specialized_deviation,
        std::abs(lr_phase_paper_specialized(rep.kind(), p, eps, lambda, grid[k]) - num));
  }
  const double t = grid.back();
  const auto af = alpha_functions(rep.kind(), eps);
  a.specialized_offset =
      lr_phase_paper_specialized(rep.kind(), p, eps, lambda, t) - tr.extracted_phase.back();
  a.predicted_offset = lambda * t * p.coupling * af.sqrt_half_d_sinh;
  const double g_term = lambda * t * p.coupling * af.sqrt_half_d_sinh;
  if (g_term != 0.0) {
    const double rest =
        -lambda * t * (p.omega_drive + 2.0 * (p.omega_drive + p.phase_rate) * af.sinh_sq_half);
    a.coefficient_ratio = (rest - tr.extracted_phase.back()) / g_term;
  }
  a.generic_matches_numeric = a.generic_deviation <= tol::arbitration;
  a.specialized_matches_numeric = a.specialized_deviation <= tol::arbitration;
  if (a.generic_matches_numeric && !a.specialized_matches_numeric)
    a.winner = "generic";
  else if (a.specialized_matches_numeric && !a.generic_matches_numeric)
    a.winner = "specialized";
  else if (a.generic_matches_numeric)
    a.winner = "both";
  else
    a.winner = "neither";
  return a;
}

/// Phase reports for every invariant eigenstate inside the frame, each with
/// its arbitration record.
inline std::vector<PhaseReport> phase_table(const Representation& rep, const ModelParams& p,
                                            const ArbitrationOptions& opt = {}) {
  const double eps = solve_epsilon(rep.kind(), p);
  const double t = arbitration_time(p, opt.t_final);
  const auto frame = invariant_eigenframe(rep, p, eps, 0.0);
  std::vector<PhaseReport> rows;
  for (const auto& s : frame.states) {
    PhaseReport r = phase_decompose(rep, p, eps, s.index, t);
    r.arbitration = arbitrate(rep, p, s.index, opt);
    rows.push_back(std::move(r));
  }
  return rows;
}

/// Winner over the rows whose record is decisive ("both" when none is,
/// "inconsistent" when decisive rows disagree).
inline std::string table_winner(const std::vector<PhaseReport>& rows) {
  std::string w;
  for (const auto& r : rows) {
    if (!r.arbitration) continue;
    const std::string& x = r.arbitration->winner;
    if (x == "both") continue;
    if (w.empty())
      w = x;
    else if (w != x)
      return "inconsistent";
  }
  return w.empty() ? "both" : w;
}

}  // namespace qinv
