#include "ilw/accel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ilw {

Eigen::VectorXd flatten(const StatePair& z) {
  const std::size_t n = z.size();
  const double scale = std::sqrt(static_cast<double>(n));
  Eigen::VectorXd v(4 * n);
  for (std::size_t j = 0; j < n; ++j) {
    v[2 * j] = scale * z.zeta[j].real();
    v[2 * j + 1] = scale * z.zeta[j].imag();
    v[2 * n + 2 * j] = scale * z.u[j].real();
    v[2 * n + 2 * j + 1] = scale * z.u[j].imag();
  }
  return v;
}

StatePair unflatten(const Eigen::VectorXd& v, std::size_t n) {
  if (static_cast<std::size_t>(v.size()) != 4 * n) throw InvalidArgument("unflatten: size mismatch");
  const double inv = 1.0 / std::sqrt(static_cast<double>(n));
  StatePair z = StatePair::zeros(n);
  for (std::size_t j = 0; j < n; ++j) {
    z.zeta[j] = inv * Complex(v[2 * j], v[2 * j + 1]);
    z.u[j] = inv * Complex(v[2 * n + 2 * j], v[2 * n + 2 * j + 1]);
  }
  return z;
}

std::vector<double> mpe_coefficients(const ExtrapolationWindow& window) {
  const int order = window.order();
  if (order < 0) throw InvalidArgument("MPE window needs at least two iterates");
  const Eigen::Index dim = window.iterates.front().size();

  std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
  c.back() = 1.0;
  const Eigen::VectorXd last = window.difference(order);

  Eigen::MatrixXd w(dim, order);
  bool stationary = last.squaredNorm() == 0.0;
  for (int i = 0; i < order; ++i) {
    w.col(i) = window.difference(i);
    stationary = stationary && w.col(i).squaredNorm() == 0.0;
  }
  if (stationary) return c;

  if (order > 0) {
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(w);
    const Eigen::VectorXd sol = cod.solve(-last);
    for (int i = 0; i < order; ++i) c[static_cast<std::size_t>(i)] = sol[i];
  }

  const double sum = std::accumulate(c.begin(), c.end(), 0.0);
  double cmax = 0.0;
  for (double v : c) cmax = std::max(cmax, std::abs(v));
  if (std::abs(sum) < 1e-12 * cmax) {
    throw DegenerateSum("MPE coefficient sum vanished; skip extrapolation for this cycle");
  }
  for (double& v : c) v /= sum;
  return c;
}

Eigen::VectorXd mpe_extrapolate(const ExtrapolationWindow& window, std::span<const double> gammas) {
  if (static_cast<int>(gammas.size()) != window.order() + 1) {
    throw InvalidArgument("mpe_extrapolate: coefficient count does not match window order");
  }
  const double sum = std::accumulate(gammas.begin(), gammas.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidArgument("mpe_extrapolate: coefficients must sum to 1");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(window.iterates.front().size());
  for (std::size_t j = 0; j < gammas.size(); ++j) x += gammas[j] * window.iterates[j + 1];
  return x;
}

StatePair mpe_extrapolate_state(const ExtrapolationWindow& window, std::span<const double> gammas,
                                std::size_t n) {
  StatePair z = unflatten(mpe_extrapolate(window, gammas), n);
  make_hermitian(z);
  truncate(z);
  return z;
}

SolitaryResult cycled_solve(const FixedPointSystem& system, const SolitaryConfig& config,
                            const StatePair& seed) {
  config.validate();
  if (config.mw == 1) return petviashvili_iterate(system, config, seed);
  if (seed.size() != system.grid().size()) throw InvalidArgument("seed does not match grid");
  if (nodal_norm(seed) == 0.0) throw InvalidArgument("seed must be nonzero");

  const std::size_t n = system.grid().size();
  IterationTrace trace;
  int updates = 0;
  StatePair best;
  double best_res = 0.0;

  auto record = [&](const Evaluation& e, Phase phase) {
    trace.entries.push_back({updates, e.residual, e.m_factor, phase});
    trace.iterations_used = updates;
    if (best.zeta.empty() || e.residual < best_res) {
      best_res = e.residual;
      best = e.z;
    }
    return e.residual <= config.tol;
  };
  auto finish = [&](Evaluation& e) {
    trace.converged = true;
    return SolitaryResult{std::move(e.z), std::move(trace)};
  };

  Evaluation current = evaluate(system, seed);
  if (record(current, Phase::plain)) return finish(current);

  for (;;) {
    ExtrapolationWindow window;
    window.iterates.push_back(flatten(current.z));
    Evaluation last = std::move(current);
    for (int j = 0; j < config.mw; ++j) {
      if (updates + 1 >= config.max_iter) throw NonConvergence(std::move(trace), std::move(best));
      Evaluation next = evaluate(system, petviashvili_update(system, last));
      ++updates;
      window.iterates.push_back(flatten(next.z));
      if (record(next, Phase::plain)) return finish(next);
      last = std::move(next);
    }

    std::vector<double> gammas;
    try {
      gammas = mpe_coefficients(window);
    } catch (const DegenerateSum&) {
      current = std::move(last);
      continue;
    }
    Evaluation extrapolated = evaluate(system, mpe_extrapolate_state(window, gammas, n));
    if (record(extrapolated, Phase::extrapolated)) return finish(extrapolated);
    current = extrapolated.residual > 10.0 * last.residual ? std::move(last) : std::move(extrapolated);
  }
}

SolitaryResult cycled_solve(const ModelParams& params, const SpectralGrid& grid,
                            const SolitaryConfig& config, const StatePair& seed) {
  return cycled_solve(FixedPointSystem(params, grid, config.speed), config, seed);
}

}  // namespace ilw
