#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "ilw/spectral.hpp"

namespace ilw {

struct SolitaryConfig {
  double speed = 0.52;
  double tol = 1e-10;
  int max_iter = 500;
  int mw = 1;  // extrapolation width; 1 disables MPE
  double seed_amplitude = -0.4;
  double seed_width = 0.5;  // lambda in A sech^2(lambda x)

  void validate() const;
};

enum class Phase { plain, extrapolated };
std::string_view to_string(Phase phase);

struct TraceEntry {
  int iteration;    // Petviashvili updates performed before this evaluation
  double residual;  // RES = ||S Z - F(Z)||_N
  double m_factor;  // <S Z, Z>_N / <F(Z), Z>_N
  Phase phase;
};

struct IterationTrace {
  std::vector<TraceEntry> entries;
  bool converged = false;
  int iterations_used = 0;

  std::vector<double> residuals() const;
  std::vector<double> m_factors() const;
};

struct SolitaryResult {
  StatePair wave;
  IterationTrace trace;
};

/// Iteration hit max_iter without RES <= tol. Carries the trace and the
/// iterate with the smallest residual seen.
class NonConvergence : public Error {
 public:
  NonConvergence(IterationTrace trace, StatePair best);
  const IterationTrace& trace() const { return trace_; }
  const StatePair& best() const { return best_; }

 private:
  IterationTrace trace_;
  StatePair best_;
};

/// 2x2 per-mode block of S, row-major.
struct ModeMatrix {
  std::array<double, 4> a{};
  double det() const { return a[0] * a[3] - a[1] * a[2]; }
  double max_norm() const;
};

/// S(k) = [[-c(1 + g(k)), (1 + (alpha-1)/alpha g(k))/gamma], [1 - gamma, -c]].
ModeMatrix assemble_S_mode(const ModelParams& params, double speed, double k);

/// Collocation fixed-point system S Z = F(Z) in Fourier component form.
/// Construction checks every grid mode for invertibility and throws
/// SingularMode when |det S(k)| < 1e-12 * max|S(k)|.
class FixedPointSystem {
 public:
  FixedPointSystem(const ModelParams& params, const SpectralGrid& grid, double speed);

  const ModelParams& params() const { return params_; }
  const SpectralGrid& grid() const { return transform_.grid(); }
  const Transform& transform() const { return transform_; }
  double speed() const { return speed_; }

  StatePair apply_S(const StatePair& z) const;
  /// Per-mode closed-form 2x2 inverse.
  StatePair solve_S(const StatePair& rhs) const;
  /// F(Z) = (1/gamma) (P_N(zeta u), P_N(u^2)/2).
  StatePair nonlinearity(const StatePair& z) const;

 private:
  ModelParams params_;
  Transform transform_;
  double speed_;
  std::vector<ModeMatrix> modes_;
};

StatePair solve_S(const ModelParams& params, double speed, const SpectralGrid& grid,
                  const StatePair& rhs);
StatePair nonlinearity_F(const ModelParams& params, const SpectralGrid& grid, const StatePair& z);

/// Residual, stabilizing factor, and F of one iterate.
struct Evaluation {
  StatePair z;
  StatePair f;
  double residual = 0.0;
  double m_factor = 0.0;
};

/// Throws DenominatorCollapse when |<F(Z), Z>| < 1e-14 |Z|^2.
Evaluation evaluate(const FixedPointSystem& system, StatePair z);
/// Z_next = S^{-1}(m^2 F(Z)), Hermitian-projected.
StatePair petviashvili_update(const FixedPointSystem& system, const Evaluation& e);

/// Plain Petviashvili iteration until RES <= tol. Iterates 0 .. max_iter - 1
/// are evaluated; NonConvergence is thrown if none meets the tolerance.
SolitaryResult petviashvili_iterate(const FixedPointSystem& system, const SolitaryConfig& config,
                                    const StatePair& seed);
SolitaryResult petviashvili_iterate(const ModelParams& params, const SpectralGrid& grid,
                                    const SolitaryConfig& config, const StatePair& seed);

/// zeta0 = A sech^2(lambda x), u0 = (1 - gamma) zeta0 / c, as coefficients in S_N.
StatePair seed_profile(const ModelParams& params, const Transform& transform,
                       const SolitaryConfig& config);

/// max_j |-c u_j + (1 - gamma) zeta_j - u_j^2/(2 gamma)| on the grid nodes.
double algebraic_residual(const ModelParams& params, const Transform& transform,
                          const StatePair& wave, double speed);

}  // namespace ilw
