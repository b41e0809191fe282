#pragma once

#include <stdexcept>
#include <string>

namespace pw {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateSupport : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct InfeasibleMarginals : Error {
  using Error::Error;
};
struct NonConvergence : Error {
  using Error::Error;
};
struct NumericalUnderflow : Error {
  using Error::Error;
};
struct SvdFailure : Error {
  using Error::Error;
};
struct Disconnected : Error {
  using Error::Error;
};
struct EigenMultiplicity : Error {
  using Error::Error;
};
struct DegenerateCovariance : Error {
  using Error::Error;
};
struct TooLarge : Error {
  using Error::Error;
};
struct ZeroWeight : Error {
  using Error::Error;
};
struct EmptyCluster : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct EmptyCloud : Error {
  using Error::Error;
};

}  // namespace pw
