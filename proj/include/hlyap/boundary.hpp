#pragma once

// Boundary bending exponents: log-log fits of the boundary graph over its
// tangent hyperplane at a point, compared with the spectral prediction at
// attracting fixed points.
//
// Adapted charts put x^- at the origin and x^+ at L e_1, where L is the chart
// length of the axis in the data chart; the tangent hyperplanes at x^- and
// x^+ are u = 0 and u = L. Near x^+ the boundary is the graph
// u = L - f(h) over the tangential coordinates h. Offsets and windows are
// measured relative to L.

#include "hlyap/domain.hpp"
#include "hlyap/domainbuild.hpp"
#include "hlyap/group.hpp"
#include "hlyap/projlin.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace hlyap::boundary {

using hilbert::ConvexDomain;
using projlin::AffineChart;
using projlin::EigenData;
using projlin::GroupElement;

struct Window {
  double h_min = 1e-5;
  double h_max = 1e-2;
};

struct FitOptions {
  Window window;
  double r2_min = 0.99;
  int min_pairs = 10;
  double min_decades = 1.5;
  double pair_tol = 0.1;        ///< partner of h must lie within pair_tol |h| of -h
  double off_axis_tol = 1e-3;   ///< allowed relative component outside E_i (n >= 3)
  bool allow_one_sided = false; ///< fall back to one-sided data, flagged in the fit
};

struct AdaptedChart {
  AffineChart chart;
  double axis_length = 1.0;
};

/// From ambient x^+, x^-, the covectors of the tangent hyperplanes at them
/// (tau_plus(x^+) = 0, tau_minus(x^-) = 0) and an interior ambient point.
/// The interior point maps to (L/2, *).
AdaptedChart adapted_chart(const Vector& x_plus, const Vector& x_minus, const Vector& tau_plus,
                           const Vector& tau_minus, const Vector& interior, double axis_length);

/// Boundary points of a domain given in chart coordinates; tangents come
/// from the representation (gradient of the quadric or the active facets).
AdaptedChart adapted_chart(const ConvexDomain& domain, const Vector& x_plus, const Vector& x_minus);

/// Tangents estimated by a least-squares hyperplane through the nearest
/// sample points within `radius` (relative to the sample diameter).
/// Throws ErrorCode::tangent_estimation with fewer than `min_neighbors`.
AdaptedChart adapted_chart(const domainbuild::LimitSetSample& sample, const Vector& x_plus, const Vector& x_minus,
                           int min_neighbors = 4, double radius = 0.05);

/// Tangents are the invariant hyperplanes of a biproximal element;
/// `interior` is a chart point of `data_chart` inside the domain.
AdaptedChart adapted_chart(const EigenData& e, const AffineChart& data_chart, const Vector& interior);

/// One boundary point near x^+ in adapted coordinates, divided by L.
struct GraphSample {
  Vector h;        ///< tangential offset
  double f = 0.0;  ///< normal offset, >= 0 on the convex side
};

/// Boundary points (data-chart coordinates) near x^+ whose |h| lies in the
/// window. Throws ErrorCode::insufficient_samples when none do.
std::vector<GraphSample> local_graph_samples(const std::vector<Vector>& points, const AffineChart& data_chart,
                                             const AdaptedChart& adapted, const Window& window);

/// Samples of an analytic boundary along +-direction (tangential, adapted
/// coordinates) at `per_decade` log-spaced offsets across the window.
std::vector<GraphSample> local_graph_samples(const ConvexDomain& domain, const AdaptedChart& adapted,
                                             const Vector& direction, const Window& window, int per_decade = 20);

struct DirectionFit {
  Vector direction;             ///< tangential direction in adapted coordinates
  double alpha = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double alpha_stderr = 0.0;
  int pairs = 0;
  double h_lo = 0.0;            ///< smallest |h| used
  double h_hi = 0.0;            ///< largest |h| used
  bool one_sided = false;
};

/// Least-squares slope of log((f(h) + f(-h))/2) against log|h| over the
/// window, using samples whose tangential offset lies in the span of the
/// columns `directions.middleCols(first, width)` of a basis of the tangent
/// space. Throws ErrorCode::insufficient_samples or window_too_narrow.
DirectionFit alpha_fit(const std::vector<GraphSample>& samples, const Matrix& directions, Eigen::Index first,
                       Eigen::Index width, const FitOptions& options = {});
/// Planar case: a single tangential direction.
DirectionFit alpha_fit(const std::vector<GraphSample>& samples, const FitOptions& options = {});

struct AlphaFitReport {
  std::optional<Word> word;
  Vector point;                          ///< x^+ in the data chart
  Window window;
  std::vector<DirectionFit> fits;        ///< one per interior cluster of g
  std::vector<double> alpha_predicted;   ///< log(l_0/l_n) / log(l_0/l_i) per fit
  std::vector<double> rel_error;         ///< |fitted - predicted| / predicted
  std::vector<std::string> failures;     ///< per direction, empty when the fit passed
  std::vector<std::vector<GraphSample>> samples;  ///< samples used per direction
  bool ok = false;
};

/// Densifies the limit-set sample near x^+(g) with its g^k images, fits every
/// interior eigen-direction of g and joins the spectral prediction.
AlphaFitReport alpha_compare(const domainbuild::LimitSetSample& sample, const GroupElement& g,
                             const FitOptions& options = {}, int max_iterations = 400);

nlohmann::json to_json(const AlphaFitReport& r, const projlin::Group* group = nullptr);
std::string samples_csv(const AlphaFitReport& r);

}  // namespace hlyap::boundary
