#pragma once

#include <stdexcept>
#include <string>

namespace sgraph {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid user-supplied configuration (bad toggles, parameters, sources).
struct ConfigError : Error {
  using Error::Error;
};

// geometry
struct DegenerateFit : Error {
  using Error::Error;
};
struct PoleSingularity : Error {
  using Error::Error;
};

// graph construction
struct KindMismatch : Error {
  using Error::Error;
};
struct UnknownNode : Error {
  using Error::Error;
};
struct BadInformationMatrix : Error {
  using Error::Error;
};

// residual preconditions
struct NotParallel : Error {
  using Error::Error;
};
struct NotPerpendicular : Error {
  using Error::Error;
};
struct DegenerateGap : Error {
  using Error::Error;
};

// optimizer
struct NoGaugeFixed : Error {
  using Error::Error;
};
struct LinearSolveFailed : Error {
  using Error::Error;
};

// semantics
struct ParseError : Error {
  using Error::Error;
};
struct InvalidTopology : Error {
  using Error::Error;
};
struct UnknownKeyframe : Error {
  using Error::Error;
};

// simulator
struct InvalidScene : Error {
  using Error::Error;
};
struct UnknownTemplate : Error {
  using Error::Error;
};

// evaluation
struct DegenerateAlignment : Error {
  using Error::Error;
};
struct EmptyAssociation : Error {
  using Error::Error;
};

}  // namespace sgraph
