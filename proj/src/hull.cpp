#include "hlyap/hull.hpp"

#include "hlyap/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <utility>

namespace hlyap::hull {
namespace {

double cloud_scale(const std::vector<Vector>& pts) {
  Vector lo = pts.front();
  Vector hi = pts.front();
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return std::max((hi - lo).norm(), 1e-300);
}

Hull planar_hull(const std::vector<Vector>& input, double eps) {
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(input.size());
  for (const auto& p : input) pts.emplace_back(p(0), p(1));
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
  };
  std::vector<Eigen::Vector2d> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= eps * (h[k - 1] - h[k - 2]).norm()) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= eps * (h[k - 1] - h[k - 2]).norm()) --k;
    h[k++] = pts[i];
  }
  h.resize(k > 0 ? k - 1 : 0);
  if (h.size() < 3) throw Error(ErrorCode::degenerate, "hull has affine dimension < 2");

  Hull out;
  out.vertices.resize(static_cast<Eigen::Index>(h.size()), 2);
  for (std::size_t i = 0; i < h.size(); ++i) out.vertices.row(static_cast<Eigen::Index>(i)) = h[i].transpose();
  const auto m = out.vertices.rows();
  out.normals.resize(m, 2);
  out.offsets.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Vector2d a = out.vertices.row(i).transpose();
    const Eigen::Vector2d e = out.vertices.row((i + 1) % m).transpose() - a;
    const Eigen::Vector2d n = Eigen::Vector2d(e.y(), -e.x()).normalized();
    out.normals.row(i) = n.transpose();
    out.offsets(i) = n.dot(a);
  }
  return out;
}

struct Face {
  std::array<int, 3> v;
  Eigen::Vector3d normal;
  double offset = 0.0;
  bool alive = true;
};

Hull spatial_hull(const std::vector<Vector>& input, double eps) {
  std::vector<Eigen::Vector3d> p;
  p.reserve(input.size());
  for (const auto& q : input) p.emplace_back(q(0), q(1), q(2));
  const int np = static_cast<int>(p.size());

  // Initial simplex from extreme points.
  int i0 = 0;
  for (int i = 1; i < np; ++i) {
    if (p[i].x() < p[i0].x()) i0 = i;
  }
  int i1 = i0;
  double best = 0;
  for (int i = 0; i < np; ++i) {
    const double d = (p[i] - p[i0]).norm();
    if (d > best) best = d, i1 = i;
  }
  if (best <= eps) throw Error(ErrorCode::degenerate, "hull has affine dimension < 3");
  const Eigen::Vector3d axis = (p[i1] - p[i0]).normalized();
  int i2 = i0;
  best = 0;
  for (int i = 0; i < np; ++i) {
    const Eigen::Vector3d r = p[i] - p[i0];
    const double d = (r - r.dot(axis) * axis).norm();
    if (d > best) best = d, i2 = i;
  }
  if (best <= eps) throw Error(ErrorCode::degenerate, "hull has affine dimension < 3");
  const Eigen::Vector3d pn = (p[i1] - p[i0]).cross(p[i2] - p[i0]).normalized();
  int i3 = i0;
  best = 0;
  for (int i = 0; i < np; ++i) {
    const double d = std::abs((p[i] - p[i0]).dot(pn));
    if (d > best) best = d, i3 = i;
  }
  if (best <= eps) throw Error(ErrorCode::degenerate, "hull has affine dimension < 3");
  const Eigen::Vector3d inside = (p[i0] + p[i1] + p[i2] + p[i3]) / 4.0;

  std::vector<Face> faces;
  auto add_face = [&](int a, int b, int c) {
    Face f{{a, b, c}, (p[b] - p[a]).cross(p[c] - p[a]), 0.0, true};
    if (f.normal.dot(inside - p[a]) > 0) {
      std::swap(f.v[1], f.v[2]);
      f.normal = -f.normal;
    }
    f.normal.normalize();
    f.offset = f.normal.dot(p[a]);
    faces.push_back(f);
  };
  add_face(i0, i1, i2);
  add_face(i0, i1, i3);
  add_face(i0, i2, i3);
  add_face(i1, i2, i3);

  for (int i = 0; i < np; ++i) {
    if (i == i0 || i == i1 || i == i2 || i == i3) continue;
    std::map<std::pair<int, int>, int> edges;
    bool visible = false;
    for (auto& f : faces) {
      if (!f.alive || f.normal.dot(p[i]) - f.offset <= eps) continue;
      visible = true;
      f.alive = false;
      for (int e = 0; e < 3; ++e) edges[{f.v[e], f.v[(e + 1) % 3]}] += 1;
    }
    if (!visible) continue;
    for (const auto& [edge, count] : edges) {
      if (edges.count({edge.second, edge.first}) == 0) add_face(edge.first, edge.second, i);
    }
    if (faces.size() > 4 * static_cast<std::size_t>(np) + 64) {
      faces.erase(std::remove_if(faces.begin(), faces.end(), [](const Face& f) { return !f.alive; }), faces.end());
    }
  }

  Hull out;
  std::set<int> used;
  std::vector<std::pair<Eigen::Vector3d, double>> planes;
  for (const auto& f : faces) {
    if (!f.alive) continue;
    for (int v : f.v) used.insert(v);
    const bool dup = std::any_of(planes.begin(), planes.end(), [&](const auto& pl) {
      return (pl.first - f.normal).norm() < 1e-12 && std::abs(pl.second - f.offset) < eps;
    });
    if (!dup) planes.emplace_back(f.normal, f.offset);
  }
  out.vertices.resize(static_cast<Eigen::Index>(used.size()), 3);
  Eigen::Index r = 0;
  for (int v : used) out.vertices.row(r++) = p[v].transpose();
  out.normals.resize(static_cast<Eigen::Index>(planes.size()), 3);
  out.offsets.resize(static_cast<Eigen::Index>(planes.size()));
  for (std::size_t j = 0; j < planes.size(); ++j) {
    out.normals.row(static_cast<Eigen::Index>(j)) = planes[j].first.transpose();
    out.offsets(static_cast<Eigen::Index>(j)) = planes[j].second;
  }
  return out;
}

}  // namespace

Hull convex_hull(const std::vector<Vector>& points, double rel_tol) {
  if (points.empty()) throw Error(ErrorCode::degenerate, "hull of an empty set");
  const auto n = points.front().size();
  for (const auto& p : points) {
    if (p.size() != n || !p.allFinite()) throw Error(ErrorCode::invalid_argument, "hull points must be finite and of equal dimension");
  }
  const double eps = rel_tol * cloud_scale(points);
  if (n == 2) return planar_hull(points, eps);
  if (n == 3) return spatial_hull(points, eps);
  throw Error(ErrorCode::invalid_argument, "hulls are implemented in dimensions 2 and 3");
}

}  // namespace hlyap::hull
