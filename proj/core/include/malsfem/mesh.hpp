#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace malsfem {

using Point = Eigen::Vector2d;

/// An edge of the triangulation. `right` is -1 on the boundary.
struct Face {
  std::array<int, 2> vertices{};
  int left = -1;
  int right = -1;

  bool boundary() const { return right < 0; }
};

/// Geometric data needed to evaluate traces, jumps and averages on a face.
struct FaceGeometry {
  Point normal;  // unit, points from left to right (outward on the boundary)
  double length = 0.0;
  int left = -1;
  int right = -1;
  Point a;
  Point b;
};

/// Immutable conforming triangulation of a polygonal domain.
///
/// Elements are stored counterclockwise. Local edge i of an element joins
/// its vertices i and (i+1)%3. Every face is owned by the element that first
/// references it (its `left` element), so the stored normal of an interior
/// face is the outward normal of the left element.
class Mesh {
 public:
  /// Unit square split into n x n cells, each cut along the lower-left to
  /// upper-right diagonal.
  static Mesh structured(int n);

  /// Builds the face tables from raw data. Clockwise triangles are reoriented.
  static Mesh from_triangles(std::vector<Point> vertices,
                             std::vector<std::array<int, 3>> elements);

  /// Plain-text format: `nv ne`, nv lines `x y`, ne lines `i j k` (0-based).
  static Mesh read(std::istream& in);
  static Mesh read(const std::filesystem::path& path);
  void write(std::ostream& out) const;

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_elements() const { return static_cast<int>(elements_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_boundary_faces() const { return num_boundary_faces_; }

  const Point& vertex(int v) const { return vertices_.at(v); }
  const std::array<int, 3>& element(int k) const { return elements_.at(k); }
  std::array<Point, 3> element_vertices(int k) const;
  const Face& face(int e) const { return faces_.at(e); }
  /// Face ids of the three local edges of element k.
  const std::array<int, 3>& element_faces(int k) const { return element_faces_.at(k); }
  /// Face-neighbouring elements of k in local-edge order (boundary edges skipped).
  std::vector<int> neighbors(int k) const;

  double area(int k) const { return area_.at(k); }
  /// Element diameter h_K (longest edge).
  double diameter(int k) const { return diameter_.at(k); }
  /// Radius of the inscribed circle.
  double inradius(int k) const;
  const Point& barycenter(int k) const { return barycenter_.at(k); }

  double face_length(int e) const { return face_length_.at(e); }
  const Point& normal(int e) const { return normal_.at(e); }
  /// Unit normal of face e pointing out of element k (k must touch e).
  Point outward_normal(int e, int k) const;
  FaceGeometry face_trace_geometry(int e) const;

  /// Global mesh size h = max h_K.
  double h() const { return h_; }
  /// Shape-regularity constant max h_K / rho_K.
  double shape_regularity() const;

 private:
  void build_topology();

  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> elements_;
  std::vector<Face> faces_;
  std::vector<std::array<int, 3>> element_faces_;
  std::vector<double> area_;
  std::vector<double> diameter_;
  std::vector<Point> barycenter_;
  std::vector<double> face_length_;
  std::vector<Point> normal_;
  int num_boundary_faces_ = 0;
  double h_ = 0.0;
};

/// 2D scalar cross product q x n = q1 n2 - q2 n1.
inline double cross(const Eigen::Vector2d& q, const Eigen::Vector2d& n) {
  return q.x() * n.y() - q.y() * n.x();
}

}  // namespace malsfem
