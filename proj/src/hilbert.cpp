#include "hlyap/hilbert.hpp"

#include "hlyap/error.hpp"

#include <cmath>

namespace hlyap::hilbert {
namespace {

// log(1/2 |x- - x+| / (|x- - x| e^t + |x - x+| e^-t)) without overflow.
double log_f_factor(const LineSection& s, double t) {
  const double la = std::log(s.to_minus()) + t;
  const double lb = std::log(s.to_plus()) - t;
  const double hi = std::max(la, lb);
  const double lse = hi + std::log1p(std::exp(std::min(la, lb) - hi));
  return std::log(0.5 * s.length()) - lse;
}

void require_interior(const ConvexDomain& domain, const Vector& x) {
  if (x.size() != domain.dim()) throw Error(ErrorCode::invalid_argument, "point dimension mismatch");
  if (!domain.contains(x)) throw Error(ErrorCode::not_interior, "point is not interior");
}

void require_section(const LineSection& s) {
  if (!(s.to_minus() > 0) || !(s.to_plus() > 0)) {
    throw Error(ErrorCode::invalid_argument, "invalid line section");
  }
}

Vector orthogonal_unit(const Vector& d) {
  Eigen::Index k = 0;
  d.cwiseAbs().minCoeff(&k);
  Vector w = Vector::Unit(d.size(), k);
  w -= w.dot(d) / d.squaredNorm() * d;
  return w / w.norm();
}

}  // namespace

LineSection boundary_points(const ConvexDomain& domain, const Vector& x, const Vector& v) {
  require_interior(domain, x);
  const auto [tm, tp] = domain.ray_parameters(x, v);
  return LineSection{x + tm * v, x + tp * v, x, v / v.norm()};
}

double hilbert_distance(const ConvexDomain& domain, const Vector& a, const Vector& b) {
  require_interior(domain, a);
  require_interior(domain, b);
  const Vector v = b - a;
  const double s = v.norm();
  if (s == 0.0) return 0.0;
  const auto [tm, tp] = domain.ray_parameters(a, v);
  const double p = -tm * s;  // |a - a-|
  const double q = tp * s;   // |b+ - a|
  // 1/2 log( |b+ - a| / |b+ - b| * |b - a-| / |a - a-| )
  return 0.5 * (std::log1p(s / p) - std::log1p(-s / q));
}

double finsler_norm(const ConvexDomain& domain, const Vector& x, const Vector& v) {
  require_interior(domain, x);
  if (v.norm() == 0.0) return 0.0;
  const auto [tm, tp] = domain.ray_parameters(x, v);
  return 0.5 * (1.0 / tp - 1.0 / tm);
}

Vector geodesic_at_time(const LineSection& section, double t) {
  require_section(section);
  const double a = section.to_minus();
  const double b = section.to_plus();
  double disp = 0.0;
  if (t >= 0) {
    const double e = std::exp(-2.0 * t);
    disp = a * b * (-std::expm1(-2.0 * t)) / (a + b * e);
  } else {
    const double e = std::exp(2.0 * t);
    disp = a * b * std::expm1(2.0 * t) / (a * e + b);
  }
  return section.x + disp * section.direction;
}

LineSection flow_section(const LineSection& section, double t) {
  LineSection out = section;
  out.x = geodesic_at_time(section, t);
  return out;
}

double m_value(const LineSection& section) {
  require_section(section);
  return 2.0 * section.to_plus() * section.to_minus() / section.length();
}

double m_value(const ConvexDomain& domain, const Vector& x, const Vector& v) {
  return m_value(boundary_points(domain, x, v));
}

double f_factor(const LineSection& section, double t) {
  require_section(section);
  return std::exp(log_f_factor(section, t));
}

double transport_norm_along_orbit(const ConvexDomain& domain, const LineSection& section, const Vector& z0,
                                  double t) {
  const Vector xt = geodesic_at_time(section, t);
  return f_factor(section, t) * finsler_norm(domain, xt, z0);
}

double transport_norm_along_orbit(const ConvexDomain& domain, const LineSection& section, const Vector& z0,
                                  double t, const projlin::GroupElement& g_t) {
  const Vector xt = geodesic_at_time(section, t);
  const auto& chart = domain.chart();
  const Vector back = projlin::projective_action(g_t, xt, chart);
  const Vector z = projlin::projective_jacobian(g_t.matrix(), xt, chart) * z0;
  return f_factor(section, t) * finsler_norm(domain, back, z);
}

ChainedTransport transport_norm_chained(const ConvexDomain& domain, const LineSection& section, const Vector& z0,
                                        const projlin::GroupElement& g, double period, int periods) {
  if (periods < 1 || !(period > 0)) throw Error(ErrorCode::invalid_argument, "need a positive period count");
  require_section(section);
  const auto& chart = domain.chart();
  const Matrix ginv = g.inverse_matrix();

  // d(g^-k) at x_{kT} is the chain of d(g^-1) at x_{kT}, ..., x_T.
  Vector z = z0;
  double log_scale = 0.0;
  for (int j = periods; j >= 1; --j) {
    const Vector xj = geodesic_at_time(section, j * period);
    z = projlin::projective_jacobian(ginv, xj, chart) * z;
    const double nz = z.norm();
    log_scale += std::log(nz);
    z /= nz;
  }
  ChainedTransport out;
  out.periods = periods;
  out.period = period;
  out.log_growth = std::log(2.0) + log_f_factor(section, periods * period) + log_scale +
                   std::log(finsler_norm(domain, section.x, z)) - std::log(finsler_norm(domain, section.x, z0));
  return out;
}

bool flatness_warning(const ConvexDomain& domain, const LineSection& section, double delta) {
  const double scale = std::max(1.0, domain.diameter());
  const Vector w = orthogonal_unit(section.direction);
  const Vector p0 = section.x_plus;
  const Vector p1 = boundary_points(domain, section.x + delta * scale * w, section.direction).x_plus;
  const Vector p2 = boundary_points(domain, section.x - delta * scale * w, section.direction).x_plus;
  const Vector chord = p2 - p1;
  const Vector rel = p0 - p1;
  const Vector off = rel - rel.dot(chord) / chord.squaredNorm() * chord;
  return off.norm() <= 1e-12 * scale;
}

}  // namespace hlyap::hilbert
