#pragma once

#include <stdexcept>
#include <string>

namespace shearstab {

// Linear solve came back singular or non-finite.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, double nu, double k, double lambda)
      : std::runtime_error(what), nu(nu), k(k), lambda(lambda) {}
  double nu, k, lambda;
};

// Time integration produced NaN/Inf.
class BlowupError : public std::runtime_error {
 public:
  BlowupError(const std::string& what, double t, int k = 0)
      : std::runtime_error(what), t(t), k(k) {}
  double t;
  int k;
};

}  // namespace shearstab
