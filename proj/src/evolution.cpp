#include "ilw/evolution.hpp"

#include <algorithm>
#include <cmath>

namespace ilw {

void EvolutionConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidArgument("t_end must be non-negative");
  if (record_every < 1) throw InvalidArgument("record_every must be at least 1");
  if (!(cfl_guard > 0.0)) throw InvalidArgument("cfl_guard must be positive");
}

double EvolutionRecord::max_zero_mode_drift() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < zero_mode_zeta.size(); ++i) {
    worst = std::max(worst, std::abs(zero_mode_zeta[i] - zero_mode_zeta.front()));
    worst = std::max(worst, std::abs(zero_mode_u[i] - zero_mode_u.front()));
  }
  return worst;
}

double linear_speed_bound(const ModelParams& params, const SpectralGrid& grid) {
  // Per-mode linear matrix: -ik [[0, J/gamma], [1 - gamma, 0]], eigenvalues
  // +-ik sqrt((1 - gamma) J / gamma). J is even, so scanning k >= 0 suffices.
  double bound = 0.0;
  for (std::size_t j = 0; j <= grid.size() / 2; ++j) {
    const double k = grid.wavenumber(j);
    bound = std::max(bound, std::sqrt((1.0 - params.gamma) * symbol_J(params, k) / params.gamma));
  }
  return bound;
}

GalerkinSystem::GalerkinSystem(const ModelParams& params, const SpectralGrid& grid, bool nonlinear)
    : params_(params), transform_(grid), nonlinear_(nonlinear) {
  params_.validate();
  const std::size_t n = grid.size();
  lin_zu_.resize(n);
  nl_z_.resize(n);
  lin_uz_.resize(n);
  nl_u_.resize(n);
  const double g = params.gamma;
  for (std::size_t j = 0; j < n; ++j) {
    const Complex ik = derivative_symbol(grid.wavenumber(j));
    lin_zu_[j] = -(symbol_J(params, grid.wavenumber(j)) / g) * ik;
    nl_z_[j] = (symbol_T(params, grid.wavenumber(j)) / g) * ik;
    lin_uz_[j] = -(1.0 - g) * ik;
    nl_u_[j] = (0.5 / g) * ik;
  }
  // The Galerkin space has no Nyquist component.
  const std::size_t ny = grid.nyquist_slot();
  lin_zu_[ny] = nl_z_[ny] = lin_uz_[ny] = nl_u_[ny] = 0.0;
}

StatePair GalerkinSystem::rhs(const StatePair& state) const {
  const std::size_t n = grid().size();
  if (state.zeta.size() != n || state.u.size() != n) {
    throw InvalidArgument("semidiscrete_rhs: state does not match grid");
  }
  if (!is_finite(state)) throw NonFiniteState("semidiscrete_rhs: non-finite input coefficients");

  StatePair out = StatePair::zeros(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.zeta[j] = lin_zu_[j] * state.u[j];
    out.u[j] = lin_uz_[j] * state.zeta[j];
  }
  if (nonlinear_) {
    const Coefficients zu = transform_.projected_product(state.zeta, state.u);
    const Coefficients uu = transform_.projected_product(state.u, state.u);
    for (std::size_t j = 0; j < n; ++j) {
      out.zeta[j] += nl_z_[j] * zu[j];
      out.u[j] += nl_u_[j] * uu[j];
    }
  }
  return out;
}

StatePair GalerkinSystem::step(const StatePair& state, double dt) const {
  const StatePair k1 = rhs(state);
  const StatePair k2 = rhs(state + (0.5 * dt) * k1);
  const StatePair k3 = rhs(state + (0.5 * dt) * k2);
  const StatePair k4 = rhs(state + dt * k3);

  StatePair next = state;
  const double w = dt / 6.0;
  for (std::size_t j = 0; j < next.size(); ++j) {
    next.zeta[j] += w * (k1.zeta[j] + 2.0 * k2.zeta[j] + 2.0 * k3.zeta[j] + k4.zeta[j]);
    next.u[j] += w * (k1.u[j] + 2.0 * k2.u[j] + 2.0 * k3.u[j] + k4.u[j]);
  }
  make_hermitian(next);
  if (!is_finite(next)) throw NonFiniteState("RK4 step produced non-finite coefficients");
  return next;
}

StatePair semidiscrete_rhs(const ModelParams& params, const SpectralGrid& grid,
                           const StatePair& state) {
  return GalerkinSystem(params, grid).rhs(state);
}

StatePair step(const ModelParams& params, const SpectralGrid& grid, const StatePair& state,
               double dt) {
  return GalerkinSystem(params, grid).step(state, dt);
}

EvolutionRecord evolve(const GalerkinSystem& system, const StatePair& initial,
                       const EvolutionConfig& config) {
  config.validate();
  const SpectralGrid& grid = system.grid();
  if (initial.zeta.size() != grid.size() || initial.u.size() != grid.size()) {
    throw InvalidArgument("evolve: initial state does not match grid");
  }
  const double c_lin = linear_speed_bound(system.params(), grid);
  const double dt_max = config.cfl_guard * grid.spacing() / c_lin;
  if (config.dt > dt_max) {
    throw InvalidArgument("dt = " + std::to_string(config.dt) + " exceeds the CFL bound " +
                          std::to_string(dt_max));
  }

  StatePair state = initial;
  truncate(state);
  make_hermitian(state);

  EvolutionRecord rec;
  auto record_zero_modes = [&](double t) {
    rec.step_times.push_back(t);
    rec.zero_mode_zeta.push_back(state.zeta[0]);
    rec.zero_mode_u.push_back(state.u[0]);
  };
  rec.times.push_back(0.0);
  rec.states.push_back(state);
  record_zero_modes(0.0);

  const auto n_steps = static_cast<long>(std::ceil(config.t_end / config.dt - 1e-9));
  double t = 0.0;
  for (long s = 1; s <= n_steps; ++s) {
    const double t_next = (s == n_steps) ? config.t_end : static_cast<double>(s) * config.dt;
    try {
      state = system.step(state, t_next - t);
    } catch (const NonFiniteState& e) {
      throw StepFailure(t_next, e.what());
    }
    t = t_next;
    record_zero_modes(t);
    if (s % config.record_every == 0 || s == n_steps) {
      rec.times.push_back(t);
      rec.states.push_back(state);
    }
  }
  return rec;
}

EvolutionRecord evolve(const ModelParams& params, const SpectralGrid& grid,
                       const StatePair& initial, const EvolutionConfig& config) {
  return evolve(GalerkinSystem(params, grid), initial, config);
}

}  // namespace ilw
