#ifndef GLHARM_ERRORS_HPP
#define GLHARM_ERRORS_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace glharm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite arithmetic (log of a non-positive value, division by zero, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what, std::vector<double> coordinate = {})
      : Error(what), coordinate_(std::move(coordinate)) {}
  const std::vector<double>& coordinate() const { return coordinate_; }

 private:
  std::vector<double> coordinate_;
};

/// Metric that is not symmetric positive definite.
class DegenerateMetricError : public Error {
 public:
  using Error::Error;
};

/// Evaluation inside the declared singular locus of a generalized Lagrange metric.
class SingularLocusError : public Error {
 public:
  using Error::Error;
};

/// A functional hit its excluded set (e.g. <δf,T> = 0) at a mesh node.
class ExcludedSetError : public Error {
 public:
  ExcludedSetError(const std::string& what, std::size_t node, std::vector<double> coordinate)
      : Error(what), node_(node), coordinate_(std::move(coordinate)) {}
  std::size_t node() const { return node_; }
  const std::vector<double>& coordinate() const { return coordinate_; }

 private:
  std::size_t node_;
  std::vector<double> coordinate_;
};

/// An ODE integration failed; carries the time of the failing step.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Invalid scenario configuration. `line()` is 1-based when known.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::optional<int> line = std::nullopt)
      : Error(what), line_(line) {}
  std::optional<int> line() const { return line_; }

 private:
  std::optional<int> line_;
};

std::string format_point(const std::vector<double>& p);

}  // namespace glharm

#endif  // GLHARM_ERRORS_HPP
