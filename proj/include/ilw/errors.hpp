#pragma once

#include <stdexcept>
#include <string>

namespace ilw {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument or configuration value was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A state or intermediate result contains NaN or Inf.
class NonFiniteState : public Error {
 public:
  using Error::Error;
};

/// det S(k) fell below the singularity floor at some grid wavenumber. The
/// speed lies (numerically) inside the discrete linear spectrum.
class SingularMode : public Error {
 public:
  SingularMode(double wavenumber, double determinant);
  double wavenumber() const { return wavenumber_; }
  double determinant() const { return determinant_; }

 private:
  double wavenumber_;
  double determinant_;
};

/// |<F(Z), Z>| collapsed relative to |Z|^2, so m_nu is undefined.
class DenominatorCollapse : public Error {
 public:
  using Error::Error;
};

/// A time step produced a non-finite state.
class StepFailure : public Error {
 public:
  StepFailure(double time, const std::string& what);
  double time() const { return time_; }

 private:
  double time_;
};

/// The MPE normalization sum of c_i vanished.
class DegenerateSum : public Error {
 public:
  using Error::Error;
};

/// The tail on a decay-fit window sits at or below rounding noise.
class WindowUnderflow : public Error {
 public:
  using Error::Error;
};

}  // namespace ilw
