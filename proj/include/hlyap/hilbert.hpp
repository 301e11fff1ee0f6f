#pragma once

// Hilbert geometry of a convex domain in an affine chart: distance, Finsler
// norm, the explicit geodesic flow along chords, the time-change function m,
// the cocycle factor f, and the norm of transported vertical vectors.

#include "hlyap/domain.hpp"
#include "hlyap/projlin.hpp"

namespace hlyap::hilbert {

/// A chord through an interior point: x_minus, x, x_plus in this order along `direction`.
struct LineSection {
  Vector x_minus;
  Vector x_plus;
  Vector x;
  Vector direction;  ///< unit chart vector pointing to x_plus

  double to_minus() const { return (x - x_minus).norm(); }
  double to_plus() const { return (x_plus - x).norm(); }
  double length() const { return (x_plus - x_minus).norm(); }
};

LineSection boundary_points(const ConvexDomain& domain, const Vector& x, const Vector& v);

double hilbert_distance(const ConvexDomain& domain, const Vector& a, const Vector& b);

double finsler_norm(const ConvexDomain& domain, const Vector& x, const Vector& v);

/// Point at Hilbert time t from section.x towards x_plus (t < 0 goes towards x_minus).
Vector geodesic_at_time(const LineSection& section, double t);

/// The section moved along its own chord to time t (same endpoints).
LineSection flow_section(const LineSection& section, double t);

/// m(x, [v]) = 2 |x+ - x| |x - x-| / |x+ - x-|.
double m_value(const LineSection& section);
double m_value(const ConvexDomain& domain, const Vector& x, const Vector& v);

/// f((x,[v]), t) = 1/2 |x- - x+| / (|x- - x| e^t + |x - x+| e^-t).
double f_factor(const LineSection& section, double t);

/// N(t) = f(z, t) F(x_t, Z0) with Z0 held constant in the chart.
double transport_norm_along_orbit(const ConvexDomain& domain, const LineSection& section, const Vector& z0,
                                  double t);

/// N(t) = f(z, t) F(g_t x_t, dg_t Z0): the same norm evaluated after moving
/// the end point back by the domain-preserving element g_t.
double transport_norm_along_orbit(const ConvexDomain& domain, const LineSection& section, const Vector& z0,
                                  double t, const projlin::GroupElement& g_t);

struct ChainedTransport {
  int periods = 0;
  double period = 0.0;
  double log_growth = 0.0;  ///< log(N(k T) / N(0))
  double rate() const { return log_growth / (periods * period); }
};

/// Follows the orbit for `periods` steps of length `period`, translating back
/// by g^{-1} after each step (g must move section.x to the point at time
/// `period` and preserve the domain).
ChainedTransport transport_norm_chained(const ConvexDomain& domain, const LineSection& section, const Vector& z0,
                                        const projlin::GroupElement& g, double period, int periods);

/// True when the chords through points offset by +-delta (perpendicular to
/// the section) have their x_plus endpoints collinear with the section's,
/// i.e. the boundary looks flat there.
bool flatness_warning(const ConvexDomain& domain, const LineSection& section, double delta = 1e-4);

}  // namespace hlyap::hilbert
