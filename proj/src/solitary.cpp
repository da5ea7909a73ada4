#include "ilw/solitary.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ilw {

void SolitaryConfig::validate() const {
  if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
  if (max_iter < 1) throw InvalidArgument("max_iter must be at least 1");
  if (mw < 1) throw InvalidArgument("mw must be at least 1");
  if (speed == 0.0 || !std::isfinite(speed)) throw InvalidArgument("speed c must be finite and nonzero");
  if (seed_amplitude == 0.0) throw InvalidArgument("seed amplitude must be nonzero");
  if (!(seed_width > 0.0)) throw InvalidArgument("seed width lambda must be positive");
}

std::string_view to_string(Phase phase) {
  return phase == Phase::plain ? "plain" : "extrapolated";
}

std::vector<double> IterationTrace::residuals() const {
  std::vector<double> r;
  r.reserve(entries.size());
  for (const auto& e : entries) r.push_back(e.residual);
  return r;
}

std::vector<double> IterationTrace::m_factors() const {
  std::vector<double> m;
  m.reserve(entries.size());
  for (const auto& e : entries) m.push_back(e.m_factor);
  return m;
}

NonConvergence::NonConvergence(IterationTrace trace, StatePair best)
    : Error("no convergence after " + std::to_string(trace.iterations_used) +
            " iterations (last residual " +
            std::to_string(trace.entries.empty() ? 0.0 : trace.entries.back().residual) + ")"),
      trace_(std::move(trace)),
      best_(std::move(best)) {}

double ModeMatrix::max_norm() const {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

ModeMatrix assemble_S_mode(const ModelParams& params, double speed, double k) {
  const double g = symbol_g(params, k);
  const double gam = params.gamma;
  return {{-speed * (1.0 + g), (1.0 + (params.alpha - 1.0) / params.alpha * g) / gam, 1.0 - gam,
           -speed}};
}

FixedPointSystem::FixedPointSystem(const ModelParams& params, const SpectralGrid& grid, double speed)
    : params_(params), transform_(grid), speed_(speed), modes_(grid.size()) {
  params_.validate();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double k = grid.wavenumber(j);
    modes_[j] = assemble_S_mode(params, speed, k);
    if (std::abs(modes_[j].det()) < 1e-12 * modes_[j].max_norm()) {
      throw SingularMode(k, modes_[j].det());
    }
  }
}

StatePair FixedPointSystem::apply_S(const StatePair& z) const {
  StatePair out = StatePair::zeros(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    const auto& s = modes_[j].a;
    out.zeta[j] = s[0] * z.zeta[j] + s[1] * z.u[j];
    out.u[j] = s[2] * z.zeta[j] + s[3] * z.u[j];
  }
  return out;
}

StatePair FixedPointSystem::solve_S(const StatePair& rhs) const {
  if (rhs.size() != grid().size()) throw InvalidArgument("solve_S: right-hand side does not match grid");
  StatePair out = StatePair::zeros(rhs.size());
  for (std::size_t j = 0; j < rhs.size(); ++j) {
    const auto& s = modes_[j].a;
    const double inv_det = 1.0 / modes_[j].det();
    out.zeta[j] = inv_det * (s[3] * rhs.zeta[j] - s[1] * rhs.u[j]);
    out.u[j] = inv_det * (-s[2] * rhs.zeta[j] + s[0] * rhs.u[j]);
  }
  return out;
}

namespace {

StatePair quadratic_terms(const Transform& transform, double gamma, const StatePair& z) {
  const double inv_gamma = 1.0 / gamma;
  StatePair f{transform.projected_product(z.zeta, z.u), transform.projected_product(z.u, z.u)};
  for (std::size_t j = 0; j < f.size(); ++j) {
    f.zeta[j] *= inv_gamma;
    f.u[j] *= 0.5 * inv_gamma;
  }
  return f;
}

}  // namespace

StatePair FixedPointSystem::nonlinearity(const StatePair& z) const {
  return quadratic_terms(transform_, params_.gamma, z);
}

StatePair solve_S(const ModelParams& params, double speed, const SpectralGrid& grid,
                  const StatePair& rhs) {
  return FixedPointSystem(params, grid, speed).solve_S(rhs);
}

StatePair nonlinearity_F(const ModelParams& params, const SpectralGrid& grid, const StatePair& z) {
  return quadratic_terms(Transform(grid), params.gamma, z);
}

Evaluation evaluate(const FixedPointSystem& system, StatePair z) {
  Evaluation e;
  e.f = system.nonlinearity(z);
  const StatePair sz = system.apply_S(z);
  e.residual = nodal_norm(sz - e.f);
  const double num = nodal_inner(sz, z);
  const double den = nodal_inner(e.f, z);
  const double zz = nodal_inner(z, z);
  if (!(zz > 0.0) || !(std::abs(den) >= 1e-14 * zz)) {
    throw DenominatorCollapse("<F(Z), Z> vanished relative to |Z|^2; the iterate is degenerate");
  }
  e.m_factor = num / den;
  e.z = std::move(z);
  return e;
}

StatePair petviashvili_update(const FixedPointSystem& system, const Evaluation& e) {
  StatePair next = system.solve_S((e.m_factor * e.m_factor) * e.f);
  // The real inner product in m cannot damp the imaginary direction, so
  // rounding there would grow like 2^nu.
  make_hermitian(next);
  truncate(next);
  if (!is_finite(next)) throw NonFiniteState("Petviashvili update produced non-finite coefficients");
  return next;
}

SolitaryResult petviashvili_iterate(const FixedPointSystem& system, const SolitaryConfig& config,
                                    const StatePair& seed) {
  config.validate();
  if (seed.size() != system.grid().size()) throw InvalidArgument("seed does not match grid");
  if (nodal_norm(seed) == 0.0) throw InvalidArgument("seed must be nonzero");

  IterationTrace trace;
  Evaluation e = evaluate(system, seed);
  StatePair best = e.z;
  double best_res = e.residual;
  for (int nu = 0;; ++nu) {
    trace.entries.push_back({nu, e.residual, e.m_factor, Phase::plain});
    trace.iterations_used = nu;
    if (e.residual < best_res) {
      best_res = e.residual;
      best = e.z;
    }
    if (e.residual <= config.tol) {
      trace.converged = true;
      return {std::move(e.z), std::move(trace)};
    }
    if (nu + 1 >= config.max_iter) throw NonConvergence(std::move(trace), std::move(best));
    e = evaluate(system, petviashvili_update(system, e));
  }
}

SolitaryResult petviashvili_iterate(const ModelParams& params, const SpectralGrid& grid,
                                    const SolitaryConfig& config, const StatePair& seed) {
  return petviashvili_iterate(FixedPointSystem(params, grid, config.speed), config, seed);
}

StatePair seed_profile(const ModelParams& params, const Transform& transform,
                       const SolitaryConfig& config) {
  if (config.seed_amplitude == 0.0) throw InvalidArgument("seed amplitude must be nonzero");
  if (!(config.seed_width > 0.0)) throw InvalidArgument("seed width lambda must be positive");
  const SpectralGrid& grid = transform.grid();
  NodalValues zeta(grid.size());
  NodalValues u(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double s = 1.0 / std::cosh(config.seed_width * grid.node(j));
    zeta[j] = config.seed_amplitude * s * s;
    u[j] = (1.0 - params.gamma) * zeta[j] / config.speed;
  }
  StatePair z{transform.to_coefficients(zeta), transform.to_coefficients(u)};
  truncate(z);
  make_hermitian(z);
  return z;
}

double algebraic_residual(const ModelParams& params, const Transform& transform,
                          const StatePair& wave, double speed) {
  const NodalValues zeta = transform.to_nodal(wave.zeta);
  const NodalValues u = transform.to_nodal(wave.u);
  double worst = 0.0;
  for (std::size_t j = 0; j < zeta.size(); ++j) {
    const double r = -speed * u[j] + (1.0 - params.gamma) * zeta[j] - u[j] * u[j] / (2.0 * params.gamma);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace ilw
