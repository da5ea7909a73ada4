#include "ilw/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <string>

namespace ilw {

SingularMode::SingularMode(double wavenumber, double determinant)
    : Error("singular mode: det S(k) = " + std::to_string(determinant) +
            " at wavenumber k = " + std::to_string(wavenumber) +
            " (speed inside the discrete linear spectrum)"),
      wavenumber_(wavenumber),
      determinant_(determinant) {}

StepFailure::StepFailure(double time, const std::string& what)
    : Error(what + " at t = " + std::to_string(time)), time_(time) {}

std::string_view to_string(Regime regime) { return regime == Regime::ILW ? "ILW" : "BO"; }

Regime parse_regime(std::string_view name) {
  std::string s;
  for (char ch : name) {
    if (ch != '-' && ch != '_') s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
  }
  if (s == "ILW") return Regime::ILW;
  if (s == "BO") return Regime::BO;
  throw InvalidArgument("unknown regime '" + std::string(name) + "' (expected ILW or BO)");
}

void ModelParams::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("gamma must satisfy 0 < gamma < 1");
  if (!(alpha > 1.0)) throw InvalidArgument("alpha must satisfy alpha > 1");
}

// ---------------------------------------------------------------------------
// Grid

SpectralGrid::SpectralGrid(double half_length, std::size_t n_modes)
    : half_length_(half_length), n_(n_modes) {
  if (!(half_length > 0.0) || !std::isfinite(half_length)) {
    throw InvalidArgument("grid half-length must be positive");
  }
  if (n_modes < 8 || n_modes % 2 != 0) {
    throw InvalidArgument("grid size N must be even and at least 8");
  }
}

double SpectralGrid::node(std::size_t j) const {
  return -half_length_ + static_cast<double>(j) * spacing();
}

NodalValues SpectralGrid::nodes() const {
  NodalValues x(n_);
  for (std::size_t j = 0; j < n_; ++j) x[j] = node(j);
  return x;
}

int SpectralGrid::mode(std::size_t j) const {
  return j < n_ / 2 ? static_cast<int>(j) : static_cast<int>(j) - static_cast<int>(n_);
}

double SpectralGrid::wavenumber(std::size_t j) const {
  return std::numbers::pi * mode(j) / half_length_;
}

std::size_t SpectralGrid::slot(int k) const {
  const int half = static_cast<int>(n_ / 2);
  if (k < -half || k >= half) throw InvalidArgument("mode outside grid range");
  return k >= 0 ? static_cast<std::size_t>(k) : static_cast<std::size_t>(k + static_cast<int>(n_));
}

// ---------------------------------------------------------------------------
// StatePair

StatePair StatePair::zeros(std::size_t n) { return {Coefficients(n), Coefficients(n)}; }

StatePair& StatePair::operator+=(const StatePair& other) {
  for (std::size_t j = 0; j < zeta.size(); ++j) {
    zeta[j] += other.zeta[j];
    u[j] += other.u[j];
  }
  return *this;
}

StatePair& StatePair::operator-=(const StatePair& other) {
  for (std::size_t j = 0; j < zeta.size(); ++j) {
    zeta[j] -= other.zeta[j];
    u[j] -= other.u[j];
  }
  return *this;
}

StatePair& StatePair::operator*=(double s) {
  for (std::size_t j = 0; j < zeta.size(); ++j) {
    zeta[j] *= s;
    u[j] *= s;
  }
  return *this;
}

StatePair operator+(StatePair a, const StatePair& b) { return a += b; }
StatePair operator-(StatePair a, const StatePair& b) { return a -= b; }
StatePair operator*(double s, StatePair a) { return a *= s; }

bool is_finite(std::span<const Complex> c) {
  return std::all_of(c.begin(), c.end(),
                     [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

bool is_finite(const StatePair& z) { return is_finite(z.zeta) && is_finite(z.u); }

void make_hermitian(Coefficients& c) {
  const std::size_t n = c.size();
  c[0] = Complex(c[0].real(), 0.0);
  for (std::size_t j = 1; j < n / 2; ++j) {
    const Complex avg = 0.5 * (c[j] + std::conj(c[n - j]));
    c[j] = avg;
    c[n - j] = std::conj(avg);
  }
  c[n / 2] = Complex(c[n / 2].real(), 0.0);
}

void make_hermitian(StatePair& z) {
  make_hermitian(z.zeta);
  make_hermitian(z.u);
}

double hermitian_defect(std::span<const Complex> c) {
  const std::size_t n = c.size();
  double worst = std::abs(c[0].imag());
  for (std::size_t j = 1; j < n; ++j) worst = std::max(worst, std::abs(c[j] - std::conj(c[n - j])));
  return worst;
}

void truncate(Coefficients& c) { c[c.size() / 2] = 0.0; }

void truncate(StatePair& z) {
  truncate(z.zeta);
  truncate(z.u);
}

// ---------------------------------------------------------------------------
// Symbols

double symbol_g(const ModelParams& params, double k) {
  const double scale = params.alpha / params.gamma;
  const double ak = std::abs(k);
  if (params.regime == Regime::BO) return scale * ak;
  // |k| coth|k| has a removable singularity at 0 and tends to |k|.
  if (ak < 1e-8) return scale * (1.0 + ak * ak / 3.0);
  if (ak > 20.0) return scale * ak;
  return scale * ak / std::tanh(ak);
}

double symbol_T(const ModelParams& params, double k) { return 1.0 / (1.0 + symbol_g(params, k)); }

double symbol_J(const ModelParams& params, double k) {
  const double a = params.alpha;
  return (a - 1.0) / a + symbol_T(params, k) / a;
}

// ---------------------------------------------------------------------------
// Transform

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t padded_size_for(std::size_t n) {
  std::size_t m = 3 * n / 2;
  return m % 2 == 0 ? m : m + 1;
}

// (-1)^k for the mode stored in slot j of an n-point sequence.
double parity(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

struct Plan1d {
  std::size_t n = 0;
  fftw_complex* buf = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Plan1d(std::size_t size) : n(size) {
    buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    std::lock_guard lock(planner_mutex());
    forward = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    backward = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Plan1d() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(buf);
  }
  Plan1d(const Plan1d&) = delete;
  Plan1d& operator=(const Plan1d&) = delete;

  Complex* data() { return reinterpret_cast<Complex*>(buf); }
};

}  // namespace

struct Transform::Plans {
  Plan1d base;
  Plan1d padded;
  Plan1d padded2;
  Plans(std::size_t n, std::size_t m) : base(n), padded(m), padded2(m) {}
};

Transform::Transform(const SpectralGrid& grid)
    : grid_(grid), plans_(std::make_unique<Plans>(grid.size(), padded_size_for(grid.size()))) {}

Transform::~Transform() = default;
Transform::Transform(Transform&&) noexcept = default;
Transform& Transform::operator=(Transform&&) noexcept = default;

std::size_t Transform::padded_size() const { return plans_->padded.n; }

Coefficients Transform::to_coefficients(std::span<const Complex> nodal) const {
  const std::size_t n = grid_.size();
  if (nodal.size() != n) throw InvalidArgument("to_coefficients: nodal length does not match grid");
  Complex* buf = plans_->base.data();
  std::copy(nodal.begin(), nodal.end(), buf);
  fftw_execute(plans_->base.forward);
  Coefficients c(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) c[j] = buf[j] * (parity(grid_.mode(j)) * inv_n);
  return c;
}

Coefficients Transform::to_coefficients(std::span<const double> nodal) const {
  std::vector<Complex> z(nodal.begin(), nodal.end());
  return to_coefficients(std::span<const Complex>(z));
}

std::vector<Complex> Transform::to_nodal_complex(std::span<const Complex> c) const {
  const std::size_t n = grid_.size();
  if (c.size() != n) throw InvalidArgument("to_nodal: coefficient length does not match grid");
  Complex* buf = plans_->base.data();
  for (std::size_t j = 0; j < n; ++j) buf[j] = c[j] * parity(grid_.mode(j));
  fftw_execute(plans_->base.backward);
  return {buf, buf + n};
}

NodalValues Transform::to_nodal(std::span<const Complex> c) const {
  const auto z = to_nodal_complex(c);
  NodalValues out(z.size());
  std::transform(z.begin(), z.end(), out.begin(), [](const Complex& v) { return v.real(); });
  return out;
}

Coefficients Transform::projected_product(std::span<const Complex> f,
                                          std::span<const Complex> g) const {
  const std::size_t n = grid_.size();
  if (f.size() != n || g.size() != n) {
    throw InvalidArgument("projected_product: operands do not match grid");
  }
  const std::size_t m = plans_->padded.n;
  const std::size_t half = n / 2;

  // Embed mode k at slot k mod m, with the (-1)^k shift to nodes starting at -l.
  auto embed = [&](std::span<const Complex> src, Plan1d& plan) {
    Complex* buf = plan.data();
    std::fill(buf, buf + m, Complex(0.0));
    for (std::size_t j = 0; j < n; ++j) {
      const int k = grid_.mode(j);
      const std::size_t dst = k >= 0 ? static_cast<std::size_t>(k) : m - static_cast<std::size_t>(-k);
      buf[dst] = src[j] * parity(k);
    }
    fftw_execute(plan.backward);
  };
  embed(f, plans_->padded);
  embed(g, plans_->padded2);

  Complex* a = plans_->padded.data();
  const Complex* b = plans_->padded2.data();
  for (std::size_t j = 0; j < m; ++j) a[j] *= b[j];
  fftw_execute(plans_->padded.forward);

  Coefficients out(n);
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t j = 0; j < n; ++j) {
    const int k = grid_.mode(j);
    if (j == half) continue;  // P_N drops the Nyquist mode
    const std::size_t src = k >= 0 ? static_cast<std::size_t>(k) : m - static_cast<std::size_t>(-k);
    out[j] = a[src] * (parity(k) * inv_m);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Norms and helpers

double nodal_inner(const StatePair& a, const StatePair& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    s += (std::conj(b.zeta[j]) * a.zeta[j]).real() + (std::conj(b.u[j]) * a.u[j]).real();
  }
  return static_cast<double>(a.size()) * s;
}

double nodal_norm(const StatePair& a) { return std::sqrt(nodal_inner(a, a)); }

double l2_norm(const SpectralGrid& grid, std::span<const Complex> c) {
  double s = 0.0;
  for (const auto& v : c) s += std::norm(v);
  return std::sqrt(grid.period() * s);
}

Coefficients translate(const SpectralGrid& grid, std::span<const Complex> c, double shift) {
  return apply_multiplier(grid, c, [shift](double k) { return std::polar(1.0, -k * shift); });
}

StatePair translate(const SpectralGrid& grid, const StatePair& z, double shift) {
  return {translate(grid, z.zeta, shift), translate(grid, z.u, shift)};
}

Coefficients prolong(const SpectralGrid& coarse, const SpectralGrid& fine,
                     std::span<const Complex> c) {
  if (fine.size() < coarse.size() || std::abs(fine.half_length() - coarse.half_length()) > 0.0) {
    throw InvalidArgument("prolong: target grid must be finer with the same half-length");
  }
  Coefficients out(fine.size());
  for (std::size_t j = 0; j < coarse.size(); ++j) {
    if (j == coarse.nyquist_slot()) continue;
    out[fine.slot(coarse.mode(j))] = c[j];
  }
  return out;
}

}  // namespace ilw
