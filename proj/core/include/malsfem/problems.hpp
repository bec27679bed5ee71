#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "malsfem/field.hpp"

namespace malsfem {

/// Data of det(D^2 u) = f in the domain, u = g on the boundary. The exact
/// solution callables are optional (empty when unknown).
struct ProblemData {
  ScalarFn f;
  ScalarFn g;
  VectorFn grad_g;
  ScalarFn exact_u;
  VectorFn exact_grad;
  MatrixFn exact_hessian;

  bool has_exact() const { return static_cast<bool>(exact_u) && static_cast<bool>(exact_grad); }
};

/// Scalar initial guess u0 and its gradient.
struct Initializer {
  ScalarFn u;
  VectorFn grad;
};

struct ExampleDef {
  std::string name;
  std::string description;
  ProblemData data;
  std::map<std::string, Initializer, std::less<>> initializers;
  /// Initializer used when none is requested ("poisson" or a registered name).
  std::string default_init;
};

/// Registered examples: ex1, ex2, ex3, ex4, ex4-r9 and custom (u = (x^2+y^2)/2).
const ExampleDef& example(std::string_view name);
std::vector<std::string> example_names();

/// Largest |det(D^2 u) - f| / max(1, |f|) over `samples` pseudo-random
/// points of the unit square (deterministic sequence).
double example_self_check(const ExampleDef& def, int samples = 200);

}  // namespace malsfem
