#pragma once

#include <stdexcept>
#include <string>

namespace varx {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

/// Raised by the SPD solver when a pivot falls below 1e-12 times the largest
/// diagonal entry. `pivot()` holds the offending value.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(const std::string& what, double pivot, std::size_t index)
      : Error(what), pivot_(pivot), index_(index) {}
  double pivot() const noexcept { return pivot_; }
  std::size_t index() const noexcept { return index_; }

 private:
  double pivot_;
  std::size_t index_;
};

class NoValidSamples : public Error {
 public:
  using Error::Error;
};

class AllMissingChannel : public Error {
 public:
  AllMissingChannel(const std::string& what, std::size_t channel)
      : Error(what), channel_(channel) {}
  std::size_t channel() const noexcept { return channel_; }

 private:
  std::size_t channel_;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// Simulation blew past the 1e12 magnitude guard.
class Diverged : public Error {
 public:
  Diverged(const std::string& what, std::size_t t) : Error(what), t_(t) {}
  std::size_t time_index() const noexcept { return t_; }

 private:
  std::size_t t_;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double last_estimate)
      : Error(what), last_(last_estimate) {}
  double last_estimate() const noexcept { return last_; }

 private:
  double last_;
};

/// Malformed input file (CSV or JSON). Carries file and line when known.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace varx
