#pragma once

#include <cstddef>
#include <vector>

#include "ilw/spectral.hpp"

namespace ilw {

struct EvolutionConfig {
  double t_end = 1.0;
  double dt = 1e-3;
  int record_every = 1;    // snapshot stride in steps; the final state is always recorded
  double cfl_guard = 0.5;  // |dt| <= cfl_guard * h / c_lin

  void validate() const;
};

struct EvolutionRecord {
  std::vector<double> times;
  std::vector<StatePair> states;
  // k = 0 coefficients after every step (index 0 is the initial state).
  std::vector<double> step_times;
  std::vector<Complex> zero_mode_zeta;
  std::vector<Complex> zero_mode_u;

  /// Largest |zero mode - initial zero mode| over all steps, both fields.
  double max_zero_mode_drift() const;
};

/// Frozen linear wave-speed bound: max over grid modes of the spectral radius
/// of the per-mode linear matrix divided by |k| (the k = 0 mode contributes its
/// spectral radius directly). For this system it equals
/// max_k sqrt((1 - gamma) J(k) / gamma).
double linear_speed_bound(const ModelParams& params, const SpectralGrid& grid);

/// Fourier-Galerkin right-hand side with the per-mode symbols precomputed.
///
///   d/dt zeta_k = -(1/gamma) J(k) ik u_k + (1/gamma) T(k) ik (zeta u)_k
///   d/dt u_k    = -(1 - gamma) ik zeta_k + (1/(2 gamma)) ik (u^2)_k
///
/// with the products from Transform::projected_product.
class GalerkinSystem {
 public:
  GalerkinSystem(const ModelParams& params, const SpectralGrid& grid, bool nonlinear = true);

  const ModelParams& params() const { return params_; }
  const SpectralGrid& grid() const { return transform_.grid(); }
  const Transform& transform() const { return transform_; }

  StatePair rhs(const StatePair& state) const;
  /// One classical RK4 step of size dt (either sign), followed by Hermitian
  /// symmetrization. Throws NonFiniteState if the result is not finite.
  StatePair step(const StatePair& state, double dt) const;

 private:
  ModelParams params_;
  Transform transform_;
  bool nonlinear_;
  std::vector<Complex> lin_zu_;  // -(1/gamma) J(k) ik
  std::vector<Complex> nl_z_;    // (1/gamma) T(k) ik
  std::vector<Complex> lin_uz_;  // -(1 - gamma) ik
  std::vector<Complex> nl_u_;    // (1/(2 gamma)) ik
};

StatePair semidiscrete_rhs(const ModelParams& params, const SpectralGrid& grid,
                           const StatePair& state);

StatePair step(const ModelParams& params, const SpectralGrid& grid, const StatePair& state,
               double dt);

/// Marches from the projected initial data to config.t_end. Throws
/// StepFailure (carrying the failing time) if a step goes non-finite and
/// InvalidArgument if the configuration or CFL guard is violated.
EvolutionRecord evolve(const GalerkinSystem& system, const StatePair& initial,
                       const EvolutionConfig& config);
EvolutionRecord evolve(const ModelParams& params, const SpectralGrid& grid,
                       const StatePair& initial, const EvolutionConfig& config);

}  // namespace ilw
