#pragma once

#include "hlyap/projlin.hpp"

#include <json.hpp>

#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace hlyap::hilbert {

using projlin::AffineChart;

/// {c : (c - center)^T shape (c - center) < 1}, shape positive definite.
struct EllipsoidShape {
  Vector center;
  Matrix shape;
};

/// {c : normals.row(j) . c < offsets(j) for all j}; rows are outward normals.
struct HalfSpaceShape {
  Matrix normals;
  Vector offsets;
};

/// Planar convex polygon, vertices as rows in counter-clockwise order.
struct PolygonShape {
  Matrix vertices;
  HalfSpaceShape edges;
};

enum class DomainKind { ellipsoid, halfspaces, polygon };

/// A properly convex body in an affine chart with a declared interior base point.
class ConvexDomain {
 public:
  static ConvexDomain ellipsoid(Vector center, Matrix shape,
                                std::optional<AffineChart> chart = std::nullopt,
                                std::optional<Vector> base_point = std::nullopt);
  static ConvexDomain halfspaces(Matrix normals, Vector offsets, Vector base_point,
                                 std::optional<AffineChart> chart = std::nullopt);
  static ConvexDomain polygon(Matrix vertices, std::optional<Vector> base_point = std::nullopt,
                              std::optional<AffineChart> chart = std::nullopt);

  DomainKind kind() const noexcept;
  int dim() const noexcept { return chart_.dim(); }
  const AffineChart& chart() const noexcept { return chart_; }
  const Vector& base_point() const noexcept { return base_; }
  double diameter() const noexcept { return diameter_; }

  const EllipsoidShape* as_ellipsoid() const { return std::get_if<EllipsoidShape>(&shape_); }
  const HalfSpaceShape* as_halfspaces() const { return std::get_if<HalfSpaceShape>(&shape_); }
  const PolygonShape* as_polygon() const { return std::get_if<PolygonShape>(&shape_); }

  /// Strict interior membership; `tol` > 0 also accepts points within tol of the boundary.
  bool contains(const Vector& p, double tol = 0.0) const;

  /// Parameters (t_minus < 0 < t_plus) where x + t v meets the boundary.
  /// Closed form for ellipsoids, exponential bracketing plus bisection otherwise.
  std::pair<double, double> ray_parameters(const Vector& x, const Vector& v) const;

  /// Boundary points hit by rays from the base point along `count` directions.
  std::vector<Vector> sample_boundary(int count) const;

  /// Same body expressed in another chart. Throws if it is not bounded there.
  ConvexDomain in_chart(const AffineChart& target) const;

  nlohmann::json to_json() const;
  static ConvexDomain from_json(const nlohmann::json& j);

 private:
  using Shape = std::variant<EllipsoidShape, HalfSpaceShape, PolygonShape>;
  ConvexDomain(AffineChart chart, Shape shape, Vector base);
  void validate();
  double exit_parameter(const Vector& x, const Vector& v) const;

  AffineChart chart_;
  Shape shape_;
  Vector base_;
  double diameter_ = 0.0;
};

/// Deterministic, roughly uniform unit vectors in R^n.
std::vector<Vector> unit_directions(int n, int count);

}  // namespace hlyap::hilbert
