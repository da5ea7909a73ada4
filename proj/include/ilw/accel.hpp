#pragma once

// Minimal polynomial extrapolation (MPE) in cycling mode.
//
// A window of iterates x_0 .. x_{L+1} has differences W_j = x_{j+1} - x_j,
// j = 0..L. The coefficients c_0 .. c_{L-1} minimize
//     || sum_{i<L} c_i W_i + W_L ||_2
// with c_L = 1, and gamma_j = c_j / sum_i c_i. The extrapolated point is
//     X = sum_{j=0}^{L} gamma_j x_{j+1}.
// On affine iterations x_{n+1} = M x_n + b this equals the fixed point as soon
// as the minimal polynomial of M for x_0 - x* has degree <= L. Anchoring the
// sum at x_1 makes order 0 (a width-1 cycle) the plain iteration.

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ilw/solitary.hpp"

namespace ilw {

/// Iterates of one cycle as flat real vectors; order() = iterates.size() - 2.
struct ExtrapolationWindow {
  std::vector<Eigen::VectorXd> iterates;

  int order() const { return static_cast<int>(iterates.size()) - 2; }
  Eigen::VectorXd difference(int j) const { return iterates[j + 1] - iterates[j]; }
};

/// Real/imaginary parts of zeta_hat then u_hat, scaled by sqrt(N) so that the
/// Euclidean norm equals the nodal norm.
Eigen::VectorXd flatten(const StatePair& z);
StatePair unflatten(const Eigen::VectorXd& v, std::size_t n);

/// gamma_0 .. gamma_L. Least squares by complete orthogonal decomposition
/// (minimum-norm on rank deficiency). A stationary window (every W_j = 0)
/// returns (0, .., 0, 1). Throws DegenerateSum when
/// |sum c_i| < 1e-12 max|c_i|, and InvalidArgument for windows shorter than 2.
std::vector<double> mpe_coefficients(const ExtrapolationWindow& window);

/// sum_j gamma_j x_{j+1}. Throws InvalidArgument unless the gammas sum to 1
/// within 1e-12.
Eigen::VectorXd mpe_extrapolate(const ExtrapolationWindow& window, std::span<const double> gammas);
/// StatePair form: unflattens and restores Hermitian symmetry.
StatePair mpe_extrapolate_state(const ExtrapolationWindow& window, std::span<const double> gammas,
                                std::size_t n);

/// Petviashvili + MPE in cycling mode with width config.mw.
///
/// Each cycle runs mw Petviashvili updates from the current point, checking
/// RES after every update, then extrapolates over the mw + 1 iterates and
/// checks RES of the extrapolated point. An extrapolated point whose residual
/// exceeds 10x that of the last plain iterate is rejected and the cycle
/// restarts from that plain iterate. As in the plain iteration, at most
/// max_iter - 1 Petviashvili updates are performed. mw = 1 is exactly
/// petviashvili_iterate.
SolitaryResult cycled_solve(const FixedPointSystem& system, const SolitaryConfig& config,
                            const StatePair& seed);
SolitaryResult cycled_solve(const ModelParams& params, const SpectralGrid& grid,
                            const SolitaryConfig& config, const StatePair& seed);

}  // namespace ilw
