#include "malsfem/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "malsfem/quadrature.hpp"

namespace malsfem {

int error_quad_degree(int m) { return std::min(kMaxQuadDegree, 2 * (m + 2)); }

double l2_error(const Mesh& mesh, const PiecewiseField& field, const VectorFn& exact, int quad_degree) {
  const QuadRule& rule = quadrature(QuadKind::triangle, quad_degree);
  double sum = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const MappedRule q = map_triangle(rule, mesh.element_vertices(k));
    for (std::size_t i = 0; i < q.points.size(); ++i) {
      const Eigen::Vector2d d = field.value(k, q.points[i]) - (exact ? exact(q.points[i]) : Eigen::Vector2d::Zero());
      sum += q.weights[i] * d.squaredNorm();
    }
  }
  return std::sqrt(sum);
}

double l2_error(const ScalarField& field, const ScalarFn& exact, int quad_degree) {
  const Mesh& mesh = field.space().mesh();
  const QuadRule& rule = quadrature(QuadKind::triangle, quad_degree);
  double sum = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const MappedRule q = map_triangle(rule, mesh.element_vertices(k));
    for (std::size_t i = 0; i < q.points.size(); ++i) {
      const double d = field.value(k, q.points[i]) - (exact ? exact(q.points[i]) : 0.0);
      sum += q.weights[i] * d * d;
    }
  }
  return std::sqrt(sum);
}

double pnorm_error(const Mesh& mesh, const PiecewiseField& field, const VectorFn& exact_grad,
                   const MatrixFn& exact_hessian, int quad_degree) {
  const QuadRule& vol = quadrature(QuadKind::triangle, quad_degree);
  const QuadRule& seg = quadrature(QuadKind::segment, quad_degree);
  double sum = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const MappedRule q = map_triangle(vol, mesh.element_vertices(k));
    for (std::size_t i = 0; i < q.points.size(); ++i) {
      Eigen::Matrix2d d = to_matrix(field.jacobian(k, q.points[i]));
      if (exact_hessian) d -= exact_hessian(q.points[i]);
      sum += q.weights[i] * d.squaredNorm();
    }
  }
  for (int e = 0; e < mesh.num_faces(); ++e) {
    const FaceGeometry geo = mesh.face_trace_geometry(e);
    const MappedRule q = map_segment(seg, geo.a, geo.b);
    for (std::size_t i = 0; i < q.points.size(); ++i) {
      const Point& x = q.points[i];
      if (geo.right >= 0) {
        // the exact field is continuous, so only p_h jumps
        const Eigen::Vector2d jump = field.value(geo.left, x) - field.value(geo.right, x);
        sum += q.weights[i] / geo.length * jump.squaredNorm();
      } else {
        Eigen::Vector2d d = field.value(geo.left, x);
        if (exact_grad) d -= exact_grad(x);
        const double t = cross(d, geo.normal);
        sum += q.weights[i] / geo.length * t * t;
      }
    }
  }
  return std::sqrt(sum);
}

double pnorm(const Mesh& mesh, const PiecewiseField& field, int quad_degree) {
  return pnorm_error(mesh, field, {}, {}, quad_degree);
}

double unorm_error(const ScalarField& field, const ScalarFn& exact_u, const VectorFn& exact_grad,
                   int quad_degree) {
  const Mesh& mesh = field.space().mesh();
  const QuadRule& vol = quadrature(QuadKind::triangle, quad_degree);
  const QuadRule& seg = quadrature(QuadKind::segment, quad_degree);
  double sum = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const MappedRule q = map_triangle(vol, mesh.element_vertices(k));
    for (std::size_t i = 0; i < q.points.size(); ++i) {
      Eigen::Vector2d d = field.gradient(k, q.points[i]);
      if (exact_grad) d -= exact_grad(q.points[i]);
      sum += q.weights[i] * d.squaredNorm();
    }
  }
  const double inv_h = 1.0 / mesh.h();
  for (int e = 0; e < mesh.num_faces(); ++e) {
    const FaceGeometry geo = mesh.face_trace_geometry(e);
    if (geo.right >= 0) continue;
    const MappedRule q = map_segment(seg, geo.a, geo.b);
    for (std::size_t i = 0; i < q.points.size(); ++i) {
      double d = field.value(geo.left, q.points[i]);
      if (exact_u) d -= exact_u(q.points[i]);
      sum += q.weights[i] * inv_h * d * d;
    }
  }
  return std::sqrt(sum);
}

std::vector<double> convergence_order(const std::vector<std::pair<double, double>>& h_and_error) {
  for (const auto& [h, e] : h_and_error) {
    if (!(e > 0.0) || !(h > 0.0)) {
      throw std::invalid_argument("convergence_order: errors and mesh sizes must be positive");
    }
  }
  std::vector<double> orders;
  for (std::size_t k = 1; k < h_and_error.size(); ++k) {
    const auto [h0, e0] = h_and_error[k - 1];
    const auto [h1, e1] = h_and_error[k];
    orders.push_back(std::log(e0 / e1) / std::log(h0 / h1));
  }
  return orders;
}

namespace {

std::string fmt_opt(const std::optional<double>& v) {
  if (!v) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", *v);
  return buf;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<ErrorRecord>& records) {
  out << "m,n,h,p_energy,p_l2,u_energy,u_l2,iterations,converged,dofs_p,dofs_u,wall_time\n";
  for (const auto& r : records) {
    char h[32];
    char wt[32];
    std::snprintf(h, sizeof h, "%.6e", r.h);
    std::snprintf(wt, sizeof wt, "%.3f", r.wall_time);
    out << r.m << ',' << r.n << ',' << h << ',' << fmt_opt(r.p_energy) << ',' << fmt_opt(r.p_l2)
        << ',' << fmt_opt(r.u_energy) << ',' << fmt_opt(r.u_l2) << ',' << r.iterations << ','
        << (r.converged ? "true" : "false") << ',' << r.dofs_p << ',' << r.dofs_u << ',' << wt << '\n';
  }
}

void write_table(std::ostream& out, const std::vector<ErrorRecord>& records) {
  char line[256];
  std::snprintf(line, sizeof line, "%2s %8s | %10s %5s | %10s %5s | %10s %5s | %10s %5s | %5s\n", "m",
                "h", "|||p-ph|||", "order", "L2(p-ph)", "order", "|||u-uh|||", "order", "L2(u-uh)",
                "order", "iter");
  out << line;
  auto cell = [](const std::optional<double>& v) {
    char b[16];
    if (v) {
      std::snprintf(b, sizeof b, "%.3e", *v);
    } else {
      std::snprintf(b, sizeof b, "%s", "inf");
    }
    return std::string(b);
  };
  auto order = [](const ErrorRecord* prev, const ErrorRecord& cur, std::optional<double> ErrorRecord::*field) {
    if (!prev || !(prev->*field) || !(cur.*field) || *(prev->*field) <= 0 || *(cur.*field) <= 0) {
      return std::string("-");
    }
    char b[16];
    std::snprintf(b, sizeof b, "%.2f",
                  std::log(*(prev->*field) / *(cur.*field)) / std::log(prev->h / cur.h));
    return std::string(b);
  };
  const ErrorRecord* prev = nullptr;
  for (const auto& r : records) {
    if (prev && prev->m != r.m) prev = nullptr;
    char h[16];
    if (r.n > 0) {
      std::snprintf(h, sizeof h, "1/%d", r.n);
    } else {
      std::snprintf(h, sizeof h, "%.4f", r.h);
    }
    std::snprintf(line, sizeof line, "%2d %8s | %10s %5s | %10s %5s | %10s %5s | %10s %5s | %5s\n", r.m,
                  h, cell(r.p_energy).c_str(), order(prev, r, &ErrorRecord::p_energy).c_str(),
                  cell(r.p_l2).c_str(), order(prev, r, &ErrorRecord::p_l2).c_str(),
                  cell(r.u_energy).c_str(), order(prev, r, &ErrorRecord::u_energy).c_str(),
                  cell(r.u_l2).c_str(), order(prev, r, &ErrorRecord::u_l2).c_str(),
                  r.converged ? std::to_string(r.iterations).c_str() : "inf");
    out << line;
    prev = &r;
  }
}

}  // namespace malsfem
