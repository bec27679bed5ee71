#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

namespace malsfem {

enum class QuadKind { triangle, segment };

/// Quadrature on the reference triangle {(0,0),(1,0),(0,1)} or on the
/// segment [0,1] (stored with y = 0). Weights sum to the reference measure.
struct QuadRule {
  QuadKind kind = QuadKind::triangle;
  int degree = 0;
  std::vector<Eigen::Vector2d> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

inline constexpr int kMaxQuadDegree = 12;

/// Rule exact for polynomials up to `degree`. Throws for degree outside
/// [0, kMaxQuadDegree].
const QuadRule& quadrature(QuadKind kind, int degree);

/// Gauss-Legendre nodes and weights on [0,1].
void gauss_legendre(int npoints, std::vector<double>& nodes, std::vector<double>& weights);

/// Physical points/weights of a triangle rule mapped onto the given triangle.
struct MappedRule {
  std::vector<Eigen::Vector2d> points;
  std::vector<double> weights;
};
MappedRule map_triangle(const QuadRule& rule, const std::array<Eigen::Vector2d, 3>& tri);
MappedRule map_segment(const QuadRule& rule, const Eigen::Vector2d& a, const Eigen::Vector2d& b);

}  // namespace malsfem
