#pragma once

// Periodic Fourier infrastructure on [-l, l].
//
// Conventions used throughout the library:
//
//  * Nodes x_j = -l + j*h, h = 2l/N, j = 0..N-1 (N even, N >= 8).
//  * A coefficient sequence c has length N and is stored in FFT order: slot j
//    holds the integer mode k = j for j < N/2 and k = j - N otherwise, so the
//    slot N/2 holds k = -N/2 (the Nyquist mode). The physical wavenumber of
//    mode k is pi*k/l.
//  * Normalization: f(x_j) = sum_k c_k exp(i*pi*k*x_j/l). Equivalently
//    c_k = (-1)^k / N * sum_j f_j exp(-2*pi*i*j*k/N); the forward transform
//    divides by N, and c_k approximates (1/2l) * integral of f(x) e^{-ikx}.
//  * The Galerkin space S_N is span{e^{i*pi*k*x/l} : |k| <= N/2 - 1}; the
//    truncation P_N zeroes the Nyquist slot. Solver states never carry a
//    Nyquist component.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "ilw/errors.hpp"

namespace ilw {

using Complex = std::complex<double>;
using Coefficients = std::vector<Complex>;
using NodalValues = std::vector<double>;

enum class Regime { ILW, BO };

std::string_view to_string(Regime regime);
/// Accepts "ILW" or "BO" (case-insensitive, "B-O" also accepted).
Regime parse_regime(std::string_view name);

struct ModelParams {
  double gamma = 0.8;  // density ratio rho1/rho2, 0 < gamma < 1
  double alpha = 1.2;  // modelling parameter, alpha > 1
  Regime regime = Regime::ILW;

  /// Throws InvalidArgument unless 0 < gamma < 1 and alpha > 1.
  void validate() const;
};

class SpectralGrid {
 public:
  SpectralGrid(double half_length, std::size_t n_modes);

  double half_length() const { return half_length_; }
  std::size_t size() const { return n_; }
  double spacing() const { return 2.0 * half_length_ / static_cast<double>(n_); }
  double period() const { return 2.0 * half_length_; }

  double node(std::size_t j) const;
  NodalValues nodes() const;

  /// Integer mode stored in slot j (FFT order).
  int mode(std::size_t j) const;
  /// Physical wavenumber pi*k/l of slot j.
  double wavenumber(std::size_t j) const;
  /// Slot of integer mode k, for -N/2 <= k <= N/2 - 1.
  std::size_t slot(int k) const;
  std::size_t nyquist_slot() const { return n_ / 2; }
  /// Largest retained |k| in S_N, i.e. N/2 - 1.
  int max_mode() const { return static_cast<int>(n_ / 2) - 1; }

  bool operator==(const SpectralGrid&) const = default;

 private:
  double half_length_;
  std::size_t n_;
};

/// The pair (zeta_hat, u_hat) of coefficient sequences.
struct StatePair {
  Coefficients zeta;
  Coefficients u;

  static StatePair zeros(std::size_t n);
  std::size_t size() const { return zeta.size(); }

  StatePair& operator+=(const StatePair& other);
  StatePair& operator-=(const StatePair& other);
  StatePair& operator*=(double s);
};

StatePair operator+(StatePair a, const StatePair& b);
StatePair operator-(StatePair a, const StatePair& b);
StatePair operator*(double s, StatePair a);

bool is_finite(std::span<const Complex> c);
bool is_finite(const StatePair& z);

/// Replaces c by its Hermitian part: c_k <- (c_k + conj(c_{-k}))/2, and keeps
/// only the real part of the Nyquist slot.
void make_hermitian(Coefficients& c);
void make_hermitian(StatePair& z);
/// Largest |c_k - conj(c_{-k})| over paired slots.
double hermitian_defect(std::span<const Complex> c);

/// P_N: zero the Nyquist slot.
void truncate(Coefficients& c);
void truncate(StatePair& z);

// Fourier symbols. All are even in k except where noted.

/// g(k) = (alpha/gamma)|k|coth|k| (ILW) or (alpha/gamma)|k| (BO).
double symbol_g(const ModelParams& params, double k);
/// Symbol of T = (1 + g(D))^{-1}.
double symbol_T(const ModelParams& params, double k);
/// Symbol of J = (1 + g(D))^{-1}(1 + (alpha-1)/alpha g(D)), evaluated as the
/// affine function (alpha-1)/alpha + T(k)/alpha.
double symbol_J(const ModelParams& params, double k);

/// Multiplies slot j by symbol(wavenumber(j)).
template <class Symbol>
Coefficients apply_multiplier(const SpectralGrid& grid, std::span<const Complex> c,
                              Symbol&& symbol) {
  if (c.size() != grid.size()) {
    throw InvalidArgument("apply_multiplier: coefficient length does not match grid");
  }
  Coefficients out(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) {
    out[j] = Complex(symbol(grid.wavenumber(j))) * c[j];
  }
  return out;
}

/// Symbol of d/dx.
inline Complex derivative_symbol(double k) { return {0.0, k}; }

/// Transform pair and alias-free products on one grid.
///
/// Holds FFTW plans and scratch buffers; a Transform is not safe for concurrent
/// use. Create one per thread (plan creation itself is serialized internally).
class Transform {
 public:
  explicit Transform(const SpectralGrid& grid);
  ~Transform();
  Transform(Transform&&) noexcept;
  Transform& operator=(Transform&&) noexcept;
  Transform(const Transform&) = delete;
  Transform& operator=(const Transform&) = delete;

  const SpectralGrid& grid() const { return grid_; }
  /// Size of the zero-padded grid used by projected_product (>= 3N/2, even).
  std::size_t padded_size() const;

  Coefficients to_coefficients(std::span<const double> nodal) const;
  Coefficients to_coefficients(std::span<const Complex> nodal) const;
  /// Real parts of the nodal values.
  NodalValues to_nodal(std::span<const Complex> c) const;
  std::vector<Complex> to_nodal_complex(std::span<const Complex> c) const;

  /// P_N of the pointwise product of the trigonometric polynomials with
  /// coefficients f and g, computed on the padded grid (exact up to rounding).
  Coefficients projected_product(std::span<const Complex> f, std::span<const Complex> g) const;

 private:
  struct Plans;
  SpectralGrid grid_;
  std::unique_ptr<Plans> plans_;
};

/// Euclidean inner product of the nodal values of two real states over all 2N
/// components, evaluated in coefficient space: N * Re sum conj(b) a.
double nodal_inner(const StatePair& a, const StatePair& b);
double nodal_norm(const StatePair& a);

/// Continuous L2 norm on [-l, l] of the trigonometric polynomial c (Parseval).
double l2_norm(const SpectralGrid& grid, std::span<const Complex> c);

/// Coefficients of f(x - shift): slot j multiplied by exp(-i*k_j*shift).
Coefficients translate(const SpectralGrid& grid, std::span<const Complex> c, double shift);
StatePair translate(const SpectralGrid& grid, const StatePair& z, double shift);

/// Embeds coefficients from a coarser grid into a finer one with the same
/// half-length (zero fill for the extra modes, Nyquist dropped).
Coefficients prolong(const SpectralGrid& coarse, const SpectralGrid& fine,
                     std::span<const Complex> c);

}  // namespace ilw
