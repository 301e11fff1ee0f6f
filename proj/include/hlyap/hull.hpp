#pragma once

// Convex hulls of point clouds in the plane and in 3-space.

#include "hlyap/projlin.hpp"

#include <vector>

namespace hlyap::hull {

struct Hull {
  Matrix vertices;  ///< hull vertices as rows (counter-clockwise in the plane)
  Matrix normals;   ///< unit outward facet normals as rows
  Vector offsets;   ///< normals.row(j) . p <= offsets(j) on the hull
};

/// Hull of points in R^2 or R^3. Points within `rel_tol` times the cloud
/// diameter of the current hull are treated as interior.
/// Throws ErrorCode::degenerate when the affine span has dimension < n.
Hull convex_hull(const std::vector<Vector>& points, double rel_tol = 1e-12);

}  // namespace hlyap::hull
