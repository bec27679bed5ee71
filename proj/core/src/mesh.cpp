#include "malsfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

namespace malsfem {

namespace {

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

}  // namespace

Mesh Mesh::structured(int n) {
  if (n < 1) {
    throw std::invalid_argument("structured mesh needs n >= 1, got " + std::to_string(n));
  }
  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
    }
  }
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::array<int, 3>> elements;
  elements.reserve(static_cast<std::size_t>(2 * n * n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = id(i, j);
      const int v10 = id(i + 1, j);
      const int v11 = id(i + 1, j + 1);
      const int v01 = id(i, j + 1);
      elements.push_back({v00, v10, v11});
      elements.push_back({v00, v11, v01});
    }
  }
  return from_triangles(std::move(vertices), std::move(elements));
}

Mesh Mesh::from_triangles(std::vector<Point> vertices, std::vector<std::array<int, 3>> elements) {
  Mesh mesh;
  mesh.vertices_ = std::move(vertices);
  mesh.elements_ = std::move(elements);
  const int nv = mesh.num_vertices();
  for (std::size_t k = 0; k < mesh.elements_.size(); ++k) {
    auto& tri = mesh.elements_[k];
    for (int v : tri) {
      if (v < 0 || v >= nv) {
        throw std::invalid_argument("element " + std::to_string(k) + " references vertex " +
                                    std::to_string(v) + " out of range");
      }
    }
    const double a = signed_area(mesh.vertices_[tri[0]], mesh.vertices_[tri[1]],
                                 mesh.vertices_[tri[2]]);
    if (a == 0.0) {
      throw std::invalid_argument("element " + std::to_string(k) + " is degenerate");
    }
    if (a < 0.0) std::swap(tri[1], tri[2]);
  }
  mesh.build_topology();
  return mesh;
}

void Mesh::build_topology() {
  const int ne = num_elements();
  element_faces_.assign(static_cast<std::size_t>(ne), {-1, -1, -1});
  faces_.clear();
  std::map<std::pair<int, int>, int> lookup;
  for (int k = 0; k < ne; ++k) {
    const auto& tri = elements_[k];
    for (int i = 0; i < 3; ++i) {
      const int a = tri[i];
      const int b = tri[(i + 1) % 3];
      const auto key = std::minmax(a, b);
      auto it = lookup.find(key);
      if (it == lookup.end()) {
        lookup.emplace(key, static_cast<int>(faces_.size()));
        element_faces_[k][i] = static_cast<int>(faces_.size());
        faces_.push_back(Face{{a, b}, k, -1});
      } else {
        Face& f = faces_[it->second];
        if (f.right >= 0) {
          throw std::invalid_argument("edge shared by more than two elements");
        }
        f.right = k;
        element_faces_[k][i] = it->second;
      }
    }
  }

  area_.resize(static_cast<std::size_t>(ne));
  diameter_.resize(static_cast<std::size_t>(ne));
  barycenter_.resize(static_cast<std::size_t>(ne));
  h_ = 0.0;
  for (int k = 0; k < ne; ++k) {
    const auto p = element_vertices(k);
    area_[k] = signed_area(p[0], p[1], p[2]);
    diameter_[k] = std::max({(p[1] - p[0]).norm(), (p[2] - p[1]).norm(), (p[0] - p[2]).norm()});
    barycenter_[k] = (p[0] + p[1] + p[2]) / 3.0;
    h_ = std::max(h_, diameter_[k]);
  }

  face_length_.resize(faces_.size());
  normal_.resize(faces_.size());
  num_boundary_faces_ = 0;
  for (std::size_t e = 0; e < faces_.size(); ++e) {
    const Point d = vertices_[faces_[e].vertices[1]] - vertices_[faces_[e].vertices[0]];
    face_length_[e] = d.norm();
    // vertices are stored in the left element's counterclockwise order
    normal_[e] = Point(d.y(), -d.x()) / face_length_[e];
    if (faces_[e].boundary()) ++num_boundary_faces_;
  }
}

std::array<Point, 3> Mesh::element_vertices(int k) const {
  const auto& tri = elements_.at(k);
  return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
}

std::vector<int> Mesh::neighbors(int k) const {
  std::vector<int> out;
  for (int e : element_faces_.at(k)) {
    const Face& f = faces_[e];
    if (f.boundary()) continue;
    out.push_back(f.left == k ? f.right : f.left);
  }
  return out;
}

double Mesh::inradius(int k) const {
  const auto p = element_vertices(k);
  const double perimeter = (p[1] - p[0]).norm() + (p[2] - p[1]).norm() + (p[0] - p[2]).norm();
  return 2.0 * area_.at(k) / perimeter;
}

Point Mesh::outward_normal(int e, int k) const {
  const Face& f = faces_.at(e);
  if (f.left == k) return normal_[e];
  if (f.right == k) return -normal_[e];
  throw std::invalid_argument("element " + std::to_string(k) + " does not touch face " +
                              std::to_string(e));
}

FaceGeometry Mesh::face_trace_geometry(int e) const {
  const Face& f = faces_.at(e);
  return FaceGeometry{normal_[e], face_length_[e], f.left, f.right, vertices_[f.vertices[0]],
                      vertices_[f.vertices[1]]};
}

double Mesh::shape_regularity() const {
  double sigma = 0.0;
  for (int k = 0; k < num_elements(); ++k) sigma = std::max(sigma, diameter_[k] / inradius(k));
  return sigma;
}

Mesh Mesh::read(std::istream& in) {
  int nv = 0;
  int ne = 0;
  if (!(in >> nv >> ne) || nv < 3 || ne < 1) {
    throw std::runtime_error("mesh file: bad header, expected `nv ne`");
  }
  std::vector<Point> vertices(static_cast<std::size_t>(nv));
  for (auto& v : vertices) {
    if (!(in >> v.x() >> v.y())) throw std::runtime_error("mesh file: truncated vertex list");
  }
  std::vector<std::array<int, 3>> elements(static_cast<std::size_t>(ne));
  for (auto& t : elements) {
    if (!(in >> t[0] >> t[1] >> t[2])) throw std::runtime_error("mesh file: truncated element list");
  }
  return from_triangles(std::move(vertices), std::move(elements));
}

Mesh Mesh::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file " + path.string());
  return read(in);
}

void Mesh::write(std::ostream& out) const {
  out << num_vertices() << ' ' << num_elements() << '\n';
  out.precision(17);
  for (const auto& v : vertices_) out << v.x() << ' ' << v.y() << '\n';
  for (const auto& t : elements_) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace malsfem
