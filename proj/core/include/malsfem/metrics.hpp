#pragma once

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "malsfem/field.hpp"
#include "malsfem/lagrange.hpp"
#include "malsfem/mesh.hpp"

namespace malsfem {

/// Quadrature degree used for error norms: 2(m+2), capped at the table maximum.
int error_quad_degree(int m);

/// ||q - q_h||_{L2} for a piecewise field against an exact vector field.
double l2_error(const Mesh& mesh, const PiecewiseField& field, const VectorFn& exact, int quad_degree);
/// ||u - u_h||_{L2} for a Lagrange function against an exact scalar.
double l2_error(const ScalarField& field, const ScalarFn& exact, int quad_degree);

/// Energy norm of q = p - p_h: broken H1 seminorm plus (1/h_e)-weighted
/// interior jumps and boundary tangential traces.
double pnorm_error(const Mesh& mesh, const PiecewiseField& field, const VectorFn& exact_grad,
                   const MatrixFn& exact_hessian, int quad_degree);
/// Same three terms evaluated on p_h alone (exact field zero).
double pnorm(const Mesh& mesh, const PiecewiseField& field, int quad_degree);

/// |||u - u_h|||_u: H1 seminorm plus (1/h)-weighted boundary L2 term.
double unorm_error(const ScalarField& field, const ScalarFn& exact_u, const VectorFn& exact_grad,
                   int quad_degree);

/// order_k = log(e_{k-1}/e_k) / log(h_{k-1}/h_k); with h halved this is
/// log2(e_{k-1}/e_k). Throws for nonpositive errors or mesh sizes.
std::vector<double> convergence_order(const std::vector<std::pair<double, double>>& h_and_error);

/// One (m, mesh) cell of a convergence table. Error fields are empty when
/// the Newton iteration did not converge.
struct ErrorRecord {
  int m = 0;
  int n = 0;
  double h = 0.0;
  std::optional<double> p_energy;
  std::optional<double> p_l2;
  std::optional<double> u_energy;
  std::optional<double> u_l2;
  int iterations = 0;
  bool converged = false;
  int dofs_p = 0;
  int dofs_u = 0;
  double wall_time = 0.0;
};

void write_csv(std::ostream& out, const std::vector<ErrorRecord>& records);
/// Aligned table with order columns, one block per m.
void write_table(std::ostream& out, const std::vector<ErrorRecord>& records);

}  // namespace malsfem
