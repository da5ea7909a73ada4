#include "ilw/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>

#include "ilw/accel.hpp"

namespace ilw {

// ---------------------------------------------------------------------------
// Convergence

bool ConvergenceReport::all_ratios_at_least(double ratio) const {
  return !ratios.empty() &&
         std::all_of(ratios.begin(), ratios.end(), [ratio](double r) { return r >= ratio; });
}

StatePair sample_initial(const Transform& transform, const InitialData& data) {
  const SpectralGrid& grid = transform.grid();
  NodalValues zeta(grid.size());
  NodalValues u(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    std::tie(zeta[j], u[j]) = data(grid.node(j));
  }
  StatePair z{transform.to_coefficients(zeta), transform.to_coefficients(u)};
  truncate(z);
  make_hermitian(z);
  return z;
}

namespace {

struct RunOutput {
  StatePair final_state;
  double drift_rate = 0.0;
};

RunOutput run_to(const ModelParams& params, double half_length, std::size_t n,
                 const InitialData& data, double t_end, double dt) {
  const GalerkinSystem system(params, SpectralGrid(half_length, n));
  const StatePair initial = sample_initial(system.transform(), data);
  EvolutionConfig cfg;
  cfg.t_end = t_end;
  cfg.dt = dt;
  cfg.record_every = std::max(1, static_cast<int>(std::ceil(t_end / dt)));
  EvolutionRecord rec = evolve(system, initial, cfg);
  const double drift = rec.max_zero_mode_drift();
  return {std::move(rec.states.back()), t_end > 0.0 ? drift / t_end : drift};
}

double pair_distance(const SpectralGrid& fine, const SpectralGrid& coarse, const StatePair& a,
                     const StatePair& reference) {
  const Coefficients dz = prolong(coarse, fine, a.zeta);
  const Coefficients du = prolong(coarse, fine, a.u);
  Coefficients ez(fine.size());
  Coefficients eu(fine.size());
  for (std::size_t j = 0; j < fine.size(); ++j) {
    ez[j] = dz[j] - reference.zeta[j];
    eu[j] = du[j] - reference.u[j];
  }
  return l2_norm(fine, ez) + l2_norm(fine, eu);
}

}  // namespace

ConvergenceReport convergence_study(const ConvergenceSetup& setup, const InitialData& data) {
  setup.params.validate();
  if (setup.resolutions.size() < 2) throw InvalidArgument("convergence study needs two resolutions");
  std::vector<std::size_t> ns = setup.resolutions;
  std::sort(ns.begin(), ns.end());
  if (ns.back() < 4 * ns.front()) {
    throw InvalidArgument("finest resolution must be at least 4x the coarsest");
  }
  const std::size_t n_ref = 2 * ns.back();

  // Runs: every N, the reference, and the dt/2 probe at the finest N.
  struct Job {
    std::size_t n;
    double dt;
  };
  std::vector<Job> jobs;
  for (std::size_t n : ns) jobs.push_back({n, setup.dt});
  jobs.push_back({n_ref, setup.dt});
  jobs.push_back({ns.back(), 0.5 * setup.dt});

  std::vector<RunOutput> out(jobs.size());
  const unsigned workers = std::max(1u, setup.threads);
  for (std::size_t first = 0; first < jobs.size(); first += workers) {
    std::vector<std::future<RunOutput>> pending;
    for (std::size_t i = first; i < std::min(jobs.size(), first + workers); ++i) {
      pending.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred,
                                   run_to, setup.params, setup.half_length, jobs[i].n,
                                   std::cref(data), setup.t_end, jobs[i].dt));
    }
    for (std::size_t i = 0; i < pending.size(); ++i) out[first + i] = pending[i].get();
  }

  ConvergenceReport report;
  report.resolutions = ns;
  const SpectralGrid ref_grid(setup.half_length, n_ref);
  const StatePair& reference = out[ns.size()].final_state;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    report.errors.push_back(
        pair_distance(ref_grid, SpectralGrid(setup.half_length, ns[i]), out[i].final_state, reference));
  }
  for (std::size_t i = 0; i + 1 < ns.size(); ++i) {
    const double r = report.errors[i] / report.errors[i + 1];
    report.ratios.push_back(r);
    report.observed_rates.push_back(std::log2(r) /
                                    std::log2(static_cast<double>(ns[i + 1]) / static_cast<double>(ns[i])));
  }
  const SpectralGrid finest(setup.half_length, ns.back());
  StatePair probe = out.back().final_state;
  report.temporal_error = pair_distance(finest, finest, probe, out[ns.size() - 1].final_state);
  report.temporal_floor_reached = report.errors.back() < 10.0 * report.temporal_error;
  for (const auto& o : out) report.zero_mode_drift_rate = std::max(report.zero_mode_drift_rate, o.drift_rate);
  return report;
}

// ---------------------------------------------------------------------------
// Round trip

RoundtripResult traveling_wave_roundtrip(const ModelParams& params, const SpectralGrid& grid,
                                         const StatePair& wave, double speed, double t_end,
                                         double dt) {
  RoundtripResult result;
  result.t_end = t_end;
  if (t_end == 0.0) return result;

  EvolutionConfig cfg;
  cfg.t_end = t_end;
  cfg.dt = dt;
  cfg.record_every = std::max(1, static_cast<int>(std::ceil(t_end / dt)));
  const EvolutionRecord rec = evolve(params, grid, wave, cfg);
  const StatePair back = translate(grid, rec.states.back(), -speed * t_end);

  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    num += std::norm(back.zeta[j] - wave.zeta[j]) + std::norm(back.u[j] - wave.u[j]);
    den += std::norm(wave.zeta[j]) + std::norm(wave.u[j]);
  }
  result.relative_error = std::sqrt(num / den);
  result.zero_mode_drift = rec.max_zero_mode_drift();
  return result;
}

// ---------------------------------------------------------------------------
// Decay

std::string_view to_string(DecayModel model) {
  return model == DecayModel::exponential ? "exponential" : "algebraic";
}

DecayFit decay_fit(std::span<const double> x, std::span<const double> profile, DecayModel model,
                   double x_a, double x_b, double center) {
  if (x.size() != profile.size()) throw InvalidArgument("decay_fit: x and profile lengths differ");
  if (!(x_a > 0.0 && x_b > x_a)) throw InvalidArgument("decay_fit: need 0 < x_a < x_b");

  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = std::abs(x[j] - center);
    if (d < x_a || d > x_b) continue;
    const double a = std::abs(profile[j]);
    if (!(a > 1e-12)) {
      throw WindowUnderflow("decay_fit: tail amplitude " + std::to_string(a) + " at |x| = " +
                            std::to_string(d) + " is at rounding level");
    }
    xs.push_back(model == DecayModel::exponential ? d : std::log(d));
    ys.push_back(std::log(a));
  }
  if (xs.size() < 3) throw WindowUnderflow("decay_fit: fewer than 3 points on the window");

  const auto m = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / m;
  const double my = sy / m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (my + slope * (xs[i] - mx));
    ss_res += r * r;
  }

  DecayFit fit;
  fit.x_a = x_a;
  fit.x_b = x_b;
  fit.model = model;
  fit.fitted_rate = -slope;
  fit.fit_quality = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.points = xs.size();
  return fit;
}

std::pair<double, double> tail_window(const SpectralGrid& grid, double seed_width, DecayModel model) {
  const double l = grid.half_length();
  return {5.0 / seed_width, model == DecayModel::exponential ? 0.9 * l : 0.5 * l};
}

double clip_to_floor(std::span<const double> x, std::span<const double> profile, double x_a,
                     double x_b, double floor, double center) {
  // Smallest |x| beyond x_a where the profile drops to the floor.
  double limit = x_b;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = std::abs(x[j] - center);
    if (d >= x_a && d <= x_b && std::abs(profile[j]) <= floor) limit = std::min(limit, d);
  }
  return limit;
}

double crest_position(const SpectralGrid& grid, std::span<const double> zeta) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < zeta.size(); ++j) {
    if (std::abs(zeta[j]) > std::abs(zeta[best])) best = j;
  }
  return grid.node(best);
}

// ---------------------------------------------------------------------------
// Acceleration

std::vector<AccelerationRow> acceleration_benchmark(const ModelParams& params,
                                                    const SpectralGrid& grid,
                                                    const SolitaryConfig& base,
                                                    std::span<const int> mw_list) {
  const FixedPointSystem system(params, grid, base.speed);
  const StatePair seed = seed_profile(params, system.transform(), base);
  std::vector<AccelerationRow> rows;
  for (int mw : mw_list) {
    AccelerationRow row;
    row.mw = mw;
    SolitaryConfig cfg = base;
    cfg.mw = mw;
    const auto start = std::chrono::steady_clock::now();
    try {
      SolitaryResult r = cycled_solve(system, cfg, seed);
      row.iterations = r.trace.iterations_used;
      row.converged = true;
      row.status = "converged";
      row.trace = std::move(r.trace);
      row.wave = std::move(r.wave);
    } catch (const NonConvergence& e) {
      row.iterations = e.trace().iterations_used;
      row.status = "not converged";
      row.trace = e.trace();
      row.wave = e.best();
    } catch (const Error& e) {
      row.status = e.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(std::move(row));
  }
  return rows;
}

bool acceleration_ordering_holds(std::span<const AccelerationRow> rows) {
  if (rows.size() < 2) return false;
  for (const auto& r : rows) {
    if (!r.converged) return false;
  }
  if (!(rows[1].iterations < rows[0].iterations)) return false;
  const int first_drop = rows[0].iterations - rows[1].iterations;
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    const int drop = rows[i].iterations - rows[i + 1].iterations;
    if (drop < 0 || drop >= first_drop) return false;
  }
  return true;
}

}  // namespace ilw
