#pragma once

// Candidate invariant convex domains built from group data: the reference
// ellipsoid, limit-set samples from attracting fixed points, their hulls,
// and reflection groups from Cartan matrices.

#include "hlyap/domain.hpp"
#include "hlyap/group.hpp"

#include <string>
#include <vector>

namespace hlyap::domainbuild {

using hilbert::ConvexDomain;
using projlin::AffineChart;
using projlin::Group;

/// Unit ball in the standard chart.
ConvexDomain ellipsoid_domain(int n);

struct LimitSetSample {
  std::vector<Vector> points;     ///< chart points
  std::vector<Word> source_words; ///< word whose attracting line gave each point
  int max_word_length = 0;
  AffineChart chart;
};

/// Attracting fixed points of the biproximal reduced words of length <= L,
/// merged when closer than `merge_tol`. Throws ErrorCode::no_proximal_elements.
LimitSetSample limit_set_sample(const Group& group, int max_len, double merge_tol = 1e-10);

/// Convex hull of the limit-set sample: a polygon for n = 2, facets otherwise.
ConvexDomain orbit_hull_domain(const LimitSetSample& sample, const Vector& seed);
ConvexDomain orbit_hull_domain(const Group& group, const Vector& seed, int max_len);

/// Max over generators, their inverses and `samples` boundary points p of the
/// radial distance from g.p to the boundary, over the diameter. Infinite when
/// some g.p leaves the chart.
double invariance_defect(const ConvexDomain& domain, const Group& group, int samples = 0);

std::string limit_set_csv(const LimitSetSample& sample, const Group& group);

/// Coxeter data m_ij (m_ii ignored) to the Cartan matrix A = -2 cos(pi/m_ij),
/// A_ii = 2, with edge (i, j) rescaled by A_ij *= mu, A_ji /= mu.
Matrix cartan_matrix(const std::vector<std::vector<int>>& coxeter, double mu, int i = 0, int j = 1);

/// Reflections s_k = I - e_k A.row(k), conjugated by the frame that diagonalizes
/// the undeformed Gram matrix A(mu=1)/2 to diag(1, ..., 1, -1). Odd dimensions
/// are negated into SL. `coxeter` is used only for the frame.
Group reflection_group(const std::vector<std::vector<int>>& coxeter, double mu, const std::string& name);

/// Frame S with G = S^T J S for the Gram matrix G = A(mu=1)/2 and J the
/// diagonal of eigenvalue signs in descending order; J = diag(1, ..., 1, -1)
/// when G has signature (n, 1).
Matrix hyperbolic_frame(const std::vector<std::vector<int>>& coxeter);

}  // namespace hlyap::domainbuild
