#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ilw/evolution.hpp"
#include "ilw/solitary.hpp"

namespace ilw {

// ---------------------------------------------------------------------------
// Self-convergence of the Galerkin semidiscretization

/// Initial data as a function of x: returns (zeta0(x), u0(x)).
using InitialData = std::function<std::pair<double, double>(double)>;

struct ConvergenceSetup {
  ModelParams params;
  double half_length = 0.5;  // period 1
  std::vector<std::size_t> resolutions{32, 64, 128};
  double t_end = 0.1;
  double dt = 1e-4;
  unsigned threads = 1;
};

struct ConvergenceReport {
  std::vector<std::size_t> resolutions;
  /// ||zeta_N - zeta_ref|| + ||u_N - u_ref|| at t_end, continuous L2 on
  /// [-l, l]; the reference is the run at 2 * max(N).
  std::vector<double> errors;
  std::vector<double> ratios;          // errors[i] / errors[i+1]
  std::vector<double> observed_rates;  // log2(ratios[i]) / log2(N[i+1]/N[i])
  /// Same norm between the finest runs with dt and dt/2.
  double temporal_error = 0.0;
  /// Largest zero-mode drift per unit time over every run.
  double zero_mode_drift_rate = 0.0;
  /// Finest error within 10x of the temporal error: the spatial rate is no
  /// longer visible.
  bool temporal_floor_reached = false;

  bool all_ratios_at_least(double ratio) const;
};

ConvergenceReport convergence_study(const ConvergenceSetup& setup, const InitialData& data);

/// Samples data on the grid nodes and projects onto S_N.
StatePair sample_initial(const Transform& transform, const InitialData& data);

// ---------------------------------------------------------------------------
// Traveling-wave round trip

struct RoundtripResult {
  double relative_error = 0.0;  // |shifted - wave| / |wave|, both fields, L2
  double zero_mode_drift = 0.0;
  double t_end = 0.0;
};

/// Evolves the wave to t_end with step dt, translates back by the distance
/// c * t_end, and measures the relative deviation from the initial wave.
RoundtripResult traveling_wave_roundtrip(const ModelParams& params, const SpectralGrid& grid,
                                         const StatePair& wave, double speed, double t_end,
                                         double dt);

// ---------------------------------------------------------------------------
// Tail decay

enum class DecayModel { exponential, algebraic };
std::string_view to_string(DecayModel model);

struct DecayFit {
  double x_a = 0.0;  // window: x_a <= |x - center| <= x_b
  double x_b = 0.0;
  DecayModel model = DecayModel::exponential;
  double fitted_rate = 0.0;  // |zeta| ~ e^{-rate |x|} or |x|^{-rate}
  double fit_quality = 0.0;  // coefficient of determination of the log fit
  std::size_t points = 0;
};

/// Least-squares fit of log|profile| against |x - center| (exponential) or
/// log|x - center| (algebraic). Throws WindowUnderflow when the window holds
/// fewer than 3 points or any |profile| in it is at or below 1e-12.
DecayFit decay_fit(std::span<const double> x, std::span<const double> profile, DecayModel model,
                   double x_a, double x_b, double center = 0.0);

/// Default fit window: from 5 seed widths (5/lambda) out to 0.9 l for the
/// exponential model, and to l/2 for the algebraic one (periodic images of an
/// algebraic tail bias the slope beyond that).
std::pair<double, double> tail_window(const SpectralGrid& grid, double seed_width, DecayModel model);

/// Pulls x_b in so that every |profile| on the window exceeds floor.
double clip_to_floor(std::span<const double> x, std::span<const double> profile, double x_a,
                     double x_b, double floor, double center = 0.0);

/// Node of the largest |zeta|.
double crest_position(const SpectralGrid& grid, std::span<const double> zeta);

// ---------------------------------------------------------------------------
// Acceleration benchmark

struct AccelerationRow {
  int mw = 1;
  int iterations = 0;  // Petviashvili updates to reach tol (or the cap)
  double seconds = 0.0;
  bool converged = false;
  std::string status;  // "converged", "not converged", or the error text
  IterationTrace trace;
  StatePair wave;
};

std::vector<AccelerationRow> acceleration_benchmark(const ModelParams& params,
                                                    const SpectralGrid& grid,
                                                    const SolitaryConfig& base,
                                                    std::span<const int> mw_list);

/// count(mw=2) < count(mw=1), counts non-increasing along mw_list, and the
/// largest absolute drop at the first pair. Rows must be sorted by mw and all
/// converged.
bool acceleration_ordering_holds(std::span<const AccelerationRow> rows);

}  // namespace ilw
