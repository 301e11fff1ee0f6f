#include "hlyap/domain.hpp"

#include "hlyap/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>

namespace hlyap::hilbert {
namespace {

nlohmann::json vector_json(const Vector& v) {
  auto a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

nlohmann::json matrix_json(const Matrix& m) {
  auto a = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vector_json(m.row(r).transpose()));
  return a;
}

Vector vector_from(const nlohmann::json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
  return v;
}

Matrix matrix_from(const nlohmann::json& j, Eigen::Index cols) {
  Matrix m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto& row = j.at(r);
    if (static_cast<Eigen::Index>(row.size()) != cols) throw Error(ErrorCode::malformed_input, "ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), c) = row.at(c).get<double>();
  }
  return m;
}

HalfSpaceShape polygon_edges(const Matrix& v) {
  const auto m = v.rows();
  HalfSpaceShape h{Matrix(m, 2), Vector(m)};
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Vector2d a = v.row(i).transpose();
    const Eigen::Vector2d b = v.row((i + 1) % m).transpose();
    const Eigen::Vector2d e = b - a;
    const double len = e.norm();
    if (!(len > 0)) throw Error(ErrorCode::degenerate, "polygon has repeated vertices");
    const Eigen::Vector2d n(e.y() / len, -e.x() / len);
    h.normals.row(i) = n.transpose();
    h.offsets(i) = n.dot(a);
  }
  return h;
}

bool halfspace_contains(const HalfSpaceShape& h, const Vector& p, double tol) {
  for (Eigen::Index j = 0; j < h.normals.rows(); ++j) {
    if (!(h.normals.row(j).dot(p) - h.offsets(j) < tol)) return false;
  }
  return true;
}

}  // namespace

std::vector<Vector> unit_directions(int n, int count) {
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  if (n == 1) {
    for (int k = 0; k < count; ++k) out.push_back(Vector::Constant(1, k % 2 == 0 ? 1.0 : -1.0));
  } else if (n == 2) {
    for (int k = 0; k < count; ++k) {
      const double a = 2.0 * std::numbers::pi * (k + 0.5) / count;
      out.push_back(Eigen::Vector2d(std::cos(a), std::sin(a)));
    }
  } else if (n == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double r = std::sqrt(1.0 - z * z);
      out.push_back(Eigen::Vector3d(r * std::cos(golden * k), r * std::sin(golden * k), z));
    }
  } else {
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> gauss;
    for (int k = 0; k < count; ++k) {
      Vector v(n);
      for (int i = 0; i < n; ++i) v(i) = gauss(rng);
      out.push_back(v / v.norm());
    }
  }
  return out;
}

ConvexDomain::ConvexDomain(AffineChart chart, Shape shape, Vector base)
    : chart_(std::move(chart)), shape_(std::move(shape)), base_(std::move(base)) {}

ConvexDomain ConvexDomain::ellipsoid(Vector center, Matrix shape, std::optional<AffineChart> chart,
                                     std::optional<Vector> base_point) {
  const auto n = center.size();
  if (n < 1 || shape.rows() != n || shape.cols() != n) {
    throw Error(ErrorCode::invalid_argument, "ellipsoid center/shape size mismatch");
  }
  if ((shape - shape.transpose()).norm() > 1e-12 * shape.norm()) {
    throw Error(ErrorCode::invalid_argument, "ellipsoid shape must be symmetric");
  }
  if (Eigen::LLT<Matrix>(shape).info() != Eigen::Success) {
    throw Error(ErrorCode::invalid_argument, "ellipsoid shape must be positive definite");
  }
  Vector base = base_point.value_or(center);
  ConvexDomain d(chart.value_or(AffineChart::standard(static_cast<int>(n))),
                 EllipsoidShape{std::move(center), std::move(shape)}, std::move(base));
  d.validate();
  return d;
}

ConvexDomain ConvexDomain::halfspaces(Matrix normals, Vector offsets, Vector base_point,
                                      std::optional<AffineChart> chart) {
  const auto n = base_point.size();
  if (normals.cols() != n || normals.rows() != offsets.size() || normals.rows() == 0) {
    throw Error(ErrorCode::invalid_argument, "half-space normals/offsets size mismatch");
  }
  for (Eigen::Index j = 0; j < normals.rows(); ++j) {
    const double len = normals.row(j).norm();
    if (!(len > 0)) throw Error(ErrorCode::invalid_argument, "zero half-space normal");
    normals.row(j) /= len;
    offsets(j) /= len;
  }
  ConvexDomain d(chart.value_or(AffineChart::standard(static_cast<int>(n))),
                 HalfSpaceShape{std::move(normals), std::move(offsets)}, std::move(base_point));
  d.validate();
  return d;
}

ConvexDomain ConvexDomain::polygon(Matrix vertices, std::optional<Vector> base_point,
                                   std::optional<AffineChart> chart) {
  if (vertices.cols() != 2 || vertices.rows() < 3) {
    throw Error(ErrorCode::invalid_argument, "polygon needs at least three planar vertices");
  }
  const auto m = vertices.rows();
  double area2 = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto j = (i + 1) % m;
    area2 += vertices(i, 0) * vertices(j, 1) - vertices(j, 0) * vertices(i, 1);
  }
  if (area2 < 0) vertices = vertices.colwise().reverse().eval();
  const double scale = vertices.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Vector2d a = vertices.row(i).transpose();
    const Eigen::Vector2d b = vertices.row((i + 1) % m).transpose();
    const Eigen::Vector2d c = vertices.row((i + 2) % m).transpose();
    const double cross = (b - a).x() * (c - b).y() - (b - a).y() * (c - b).x();
    if (cross < -1e-12 * scale * scale) throw Error(ErrorCode::invalid_argument, "polygon is not convex");
  }
  Vector base = base_point.value_or(Vector(vertices.colwise().mean().transpose()));
  auto edges = polygon_edges(vertices);
  ConvexDomain d(chart.value_or(AffineChart::standard(2)), PolygonShape{std::move(vertices), std::move(edges)},
                 std::move(base));
  d.validate();
  return d;
}

void ConvexDomain::validate() {
  if (base_.size() != dim()) throw Error(ErrorCode::invalid_argument, "base point dimension mismatch");
  if (!contains(base_)) throw Error(ErrorCode::not_interior, "base point is not interior");
  diameter_ = 0.0;
  const auto pts = sample_boundary(dim() <= 2 ? 64 : 32 * dim());
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) diameter_ = std::max(diameter_, (pts[i] - pts[j]).norm());
}

DomainKind ConvexDomain::kind() const noexcept {
  switch (shape_.index()) {
    case 0: return DomainKind::ellipsoid;
    case 1: return DomainKind::halfspaces;
    default: return DomainKind::polygon;
  }
}

bool ConvexDomain::contains(const Vector& p, double tol) const {
  if (p.size() != dim() || !p.allFinite()) return false;
  if (const auto* e = as_ellipsoid()) {
    const Vector d = p - e->center;
    const double q = d.dot(e->shape * d);
    if (q < 1.0) return true;
    if (tol <= 0) return false;
    const double rq = std::sqrt(q);
    return (rq - 1.0) * d.norm() / rq < tol;
  }
  if (const auto* h = as_halfspaces()) return halfspace_contains(*h, p, tol);
  return halfspace_contains(as_polygon()->edges, p, tol);
}

double ConvexDomain::exit_parameter(const Vector& x, const Vector& v) const {
  const double reach = (diameter_ > 0 ? diameter_ : 1.0) / v.norm();
  double t_in = 0.0;
  double t_out = 1e-3 * reach;
  int marches = 0;
  while (contains(x + t_out * v)) {
    t_in = t_out;
    t_out *= 2.0;
    if (++marches > 80 || (diameter_ > 0 && t_out > 1e6 * reach)) {
      throw Error(ErrorCode::unbounded, "domain is unbounded along a ray");
    }
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (t_in + t_out);
    if (mid <= t_in || mid >= t_out) break;
    if (contains(x + mid * v)) {
      t_in = mid;
    } else {
      t_out = mid;
    }
  }
  return 0.5 * (t_in + t_out);
}

std::pair<double, double> ConvexDomain::ray_parameters(const Vector& x, const Vector& v) const {
  if (v.size() != dim() || !(v.norm() > 0)) throw Error(ErrorCode::invalid_argument, "direction must be nonzero");
  if (!contains(x)) throw Error(ErrorCode::not_interior, "point is not interior");
  if (const auto* e = as_ellipsoid()) {
    // a t^2 + 2 b t - (1 - q) = 0 with one root of each sign.
    const Vector d = x - e->center;
    const Vector av = e->shape * v;
    const double a = v.dot(av);
    const double b = d.dot(av);
    const double slack = 1.0 - d.dot(e->shape * d);
    const double disc = std::sqrt(b * b + a * slack);
    if (b >= 0) {
      return {-(b + disc) / a, slack / (b + disc)};
    }
    return {-slack / (disc - b), (disc - b) / a};
  }
  return {-exit_parameter(x, -v), exit_parameter(x, v)};
}

std::vector<Vector> ConvexDomain::sample_boundary(int count) const {
  std::vector<Vector> out;
  for (const auto& d : unit_directions(dim(), count)) out.push_back(base_ + ray_parameters(base_, d).second * d);
  return out;
}

ConvexDomain ConvexDomain::in_chart(const AffineChart& target) const {
  if (target.dim() != dim()) throw Error(ErrorCode::invalid_argument, "chart dimension mismatch");
  const Vector base_ambient = chart_.lift(base_);
  const double base_w = (target.frame_inverse() * base_ambient)(dim());
  for (const auto& p : sample_boundary(dim() <= 2 ? 64 : 32 * dim())) {
    const double w = (target.frame_inverse() * chart_.lift(p))(dim());
    if (!(w * base_w > 0)) throw Error(ErrorCode::leaves_chart, "domain meets the hyperplane at infinity of the target chart");
  }
  const Vector base = target.to_chart(base_ambient);
  // Homogeneous frame coordinates of the target in terms of ours.
  const Matrix transfer = chart_.frame_inverse() * target.frame();
  const int n = dim();

  if (const auto* e = as_ellipsoid()) {
    Matrix qh(n + 1, n + 1);
    qh.topLeftCorner(n, n) = e->shape;
    qh.topRightCorner(n, 1) = -e->shape * e->center;
    qh.bottomLeftCorner(1, n) = qh.topRightCorner(n, 1).transpose();
    qh(n, n) = e->center.dot(e->shape * e->center) - 1.0;
    Matrix q = transfer.transpose() * qh * transfer;
    q = 0.5 * (q + q.transpose()).eval();
    Matrix a = q.topLeftCorner(n, n);
    if (Eigen::LLT<Matrix>(a).info() != Eigen::Success) {
      q = -q;
      a = -a;
      if (Eigen::LLT<Matrix>(a).info() != Eigen::Success) {
        throw Error(ErrorCode::unbounded, "ellipsoid is not bounded in the target chart");
      }
    }
    const Vector b = q.topRightCorner(n, 1);
    const Vector center = -a.llt().solve(b);
    const double r = b.dot(a.llt().solve(b)) - q(n, n);
    if (!(r > 0)) throw Error(ErrorCode::degenerate, "ellipsoid degenerates in the target chart");
    return ellipsoid(center, a / r, target, base);
  }
  if (const auto* p = as_polygon()) {
    Matrix v(p->vertices.rows(), 2);
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      v.row(i) = target.to_chart(chart_.lift(p->vertices.row(i).transpose())).transpose();
    }
    return polygon(v, base, target);
  }
  const auto* h = as_halfspaces();
  Matrix normals(h->normals.rows(), n);
  Vector offsets(h->normals.rows());
  const double sign = base_w > 0 ? 1.0 : -1.0;
  for (Eigen::Index j = 0; j < normals.rows(); ++j) {
    Vector k(n + 1);
    k.head(n) = h->normals.row(j).transpose();
    k(n) = -h->offsets(j);
    const Vector kt = sign * (transfer.transpose() * k);
    normals.row(j) = kt.head(n).transpose();
    offsets(j) = -kt(n);
  }
  return halfspaces(normals, offsets, base, target);
}

nlohmann::json ConvexDomain::to_json() const {
  nlohmann::json j;
  j["dim"] = dim();
  j["base_point"] = vector_json(base_);
  j["chart"] = {{"basis", matrix_json(chart_.basis())}, {"origin", vector_json(chart_.origin())}};
  if (const auto* e = as_ellipsoid()) {
    j["kind"] = "ellipsoid";
    j["center"] = vector_json(e->center);
    j["matrix"] = matrix_json(e->shape);
  } else if (const auto* h = as_halfspaces()) {
    j["kind"] = "halfspaces";
    j["normals"] = matrix_json(h->normals);
    j["offsets"] = vector_json(h->offsets);
  } else {
    j["kind"] = "polygon";
    j["vertices"] = matrix_json(as_polygon()->vertices);
  }
  return j;
}

ConvexDomain ConvexDomain::from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    std::optional<AffineChart> chart;
    int n = j.contains("dim") ? j.at("dim").get<int>() : -1;
    if (j.contains("chart")) {
      const Vector origin = vector_from(j.at("chart").at("origin"));
      chart = AffineChart(matrix_from(j.at("chart").at("basis"), origin.size() - 1), origin);
      n = chart->dim();
    }
    std::optional<Vector> base;
    if (j.contains("base_point")) base = vector_from(j.at("base_point"));
    if (kind == "ellipsoid") {
      const Vector c = vector_from(j.at("center"));
      return ellipsoid(c, matrix_from(j.at("matrix"), c.size()), chart, base);
    }
    if (kind == "halfspaces") {
      if (!base) throw Error(ErrorCode::malformed_input, "half-space domain needs a base_point");
      return halfspaces(matrix_from(j.at("normals"), base->size()), vector_from(j.at("offsets")), *base, chart);
    }
    if (kind == "polygon") {
      if (n != -1 && n != 2) throw Error(ErrorCode::malformed_input, "polygon domains are planar");
      return polygon(matrix_from(j.at("vertices"), 2), base, chart);
    }
    throw Error(ErrorCode::malformed_input, "unknown domain kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::malformed_input, std::string("malformed domain file: ") + e.what());
  }
}

}  // namespace hlyap::hilbert
