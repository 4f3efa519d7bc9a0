#pragma once

#include <stdexcept>
#include <string>

namespace cylkms {

/// Evaluation point coincides with (or is numerically indistinguishable from)
/// a kernel singularity.
class SingularityError : public std::domain_error {
public:
  explicit SingularityError(const std::string& what) : std::domain_error(what) {}
};

/// A complex-time argument leaves the strip on which the requested kernel or
/// continuation is analytic, or the continuation path crosses the light-cone
/// support of the smeared pair.
class AnalyticityError : public std::domain_error {
public:
  explicit AnalyticityError(const std::string& what) : std::domain_error(what) {}
};

/// Quadrature failed its internal half-order convergence cross-check.
class QuadratureError : public std::runtime_error {
public:
  explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

/// A sampled series does not decay at the grid ends, so a plain-summation
/// Fourier transform would carry uncontrolled truncation bias.
class TruncationError : public std::runtime_error {
public:
  explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

/// The signal handed to a spectral check is numerically zero.
class EmptySignalError : public std::runtime_error {
public:
  explicit EmptySignalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cylkms
