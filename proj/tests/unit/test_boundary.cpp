#include "helpers.hpp"
#include "hlyap/boundary.hpp"
#include "hlyap/certify.hpp"
#include "hlyap/hilbert.hpp"
#include "hlyap/error.hpp"
#include "hlyap/spectra.hpp"

#include <doctest.h>

using namespace hlyap;
using namespace hlyap::boundary;

namespace {

hilbert::ConvexDomain disc() { return hilbert::ConvexDomain::ellipsoid(Vector::Zero(2), Matrix::Identity(2, 2)); }

// Chart points of g^k applied to the sample, k = 0..iterations.
std::vector<Vector> orbit_points(const domainbuild::LimitSetSample& s, const projlin::GroupElement& g, int iterations) {
  std::vector<Vector> out;
  for (const auto& p : s.points) {
    Vector x = s.chart.lift(p);
    for (int k = 0; k <= iterations; ++k) {
      if (s.chart.in_chart(x)) out.push_back(s.chart.to_chart(x));
      x = g.matrix() * x;
      x.normalize();
    }
  }
  return out;
}

}  // namespace

TEST_CASE("adapted charts") {
  const auto a = adapted_chart(disc(), Vector{{1.0, 0.0}}, Vector{{-1.0, 0.0}});
  CHECK(a.axis_length == doctest::Approx(2.0));
  const auto& c = a.chart;
  const auto std2 = projlin::AffineChart::standard(2);
  for (const Vector& p : {Vector{{0.0, 0.0}}, Vector{{0.3, -0.5}}, Vector{{-1.0, 0.0}}, Vector{{1.0, 0.0}}}) {
    CHECK((c.to_chart(std2.lift(p)) - (p + Vector{{1.0, 0.0}})).norm() < 1e-12);
  }

  // A tilted ellipse: in the adapted chart the tangent lines at the end points are u = 0 and u = L.
  const Matrix rot = test::rotation_xy(0.6).topLeftCorner(2, 2);
  const Matrix shape = rot * Vector{{0.25, 1.0}}.asDiagonal() * rot.transpose();
  const Vector center{{0.2, -0.1}};
  const auto ellipse = hilbert::ConvexDomain::ellipsoid(center, shape);
  const Vector dir = rot.col(0);
  const auto sec = hilbert::boundary_points(ellipse, center, dir);
  const auto ad = adapted_chart(ellipse, sec.x_plus, sec.x_minus);
  const auto image = ellipse.in_chart(ad.chart);
  const auto* e = image.as_ellipsoid();
  REQUIRE(e);
  const double l = ad.axis_length;
  CHECK((ad.chart.to_chart(ellipse.chart().lift(sec.x_minus))).norm() < 1e-12);
  CHECK((ad.chart.to_chart(ellipse.chart().lift(sec.x_plus)) - Vector{{l, 0.0}}).norm() < 1e-12);
  for (const Vector& q : {Vector{{0.0, 0.0}}, Vector{{l, 0.0}}}) {
    const Vector grad = e->shape * (q - e->center);
    CHECK(std::abs(grad(1)) < 1e-10 * grad.norm());
  }

  // Too few limit-set samples near the point.
  domainbuild::LimitSetSample sparse;
  sparse.chart = std2;
  for (int i = 0; i < 8; ++i) sparse.points.push_back(Vector{{std::cos(i * M_PI / 4), std::sin(i * M_PI / 4)}});
  try {
    adapted_chart(sparse, Vector{{1.0, 0.0}}, Vector{{-1.0, 0.0}});
    FAIL("expected tangent estimation failure");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::tangent_estimation);
  }
  // Dense circle data recovers the vertical tangents.
  domainbuild::LimitSetSample dense;
  dense.chart = std2;
  for (int i = 0; i < 2000; ++i) dense.points.push_back(Vector{{std::cos(i * M_PI / 1000), std::sin(i * M_PI / 1000)}});
  const auto est = adapted_chart(dense, Vector{{1.0, 0.0}}, Vector{{-1.0, 0.0}});
  const Vector q = est.chart.to_chart(std2.lift(Vector{{1.0, 0.3}}));
  CHECK(std::abs(q(0) - 2.0) < 1e-6);
  CHECK(std::abs(std::abs(q(1)) - 0.3) < 1e-6);
}

TEST_CASE("graph samples") {
  const auto a = adapted_chart(disc(), Vector{{1.0, 0.0}}, Vector{{-1.0, 0.0}});
  const auto samples = local_graph_samples(disc(), a, Vector{{1.0}}, Window{1e-4, 1e-2}, 10);
  CHECK(samples.size() == 2 * 21);
  for (const auto& s : samples) {
    const double h = 2 * s.h(0);
    CHECK(2 * s.f == doctest::Approx(1 - std::sqrt(1 - h * h)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(local_graph_samples(disc(), a, Vector{{1.0}}, Window{1e-2, 1e-4}), Error);
  CHECK_THROWS_AS(local_graph_samples(std::vector<Vector>{Vector{{0.0, 0.0}}}, projlin::AffineChart::standard(2), a,
                                      Window{1e-4, 1e-2}),
                  Error);

  // Limit points of the Riemannian group lie on the image of the circle.
  const auto group = test::load_group("so21_triangle_334");
  const auto sample = domainbuild::limit_set_sample(group, 8);
  const auto g = group.element(certify::find_loxodromic(group, 8));
  const auto eg = projlin::eigen_split(g);
  const auto ad = adapted_chart(eg, sample.chart, Vector::Zero(2));
  const auto pts = orbit_points(sample, g, 12);
  const auto gs = local_graph_samples(pts, sample.chart, ad, Window{1e-5, 1e-2});
  CHECK(gs.size() > 50);
  const auto circle = disc().in_chart(ad.chart);
  const auto* e = circle.as_ellipsoid();
  REQUIRE(e);
  double worst = 0;
  for (const auto& s : gs) {
    const Vector q{{ad.axis_length * (1 - s.f), ad.axis_length * s.h(0)}};
    worst = std::max(worst, std::abs((q - e->center).dot(e->shape * (q - e->center)) - 1));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("alpha fits on constructed data") {
  const auto a = adapted_chart(disc(), Vector{{1.0, 0.0}}, Vector{{-1.0, 0.0}});
  FitOptions o;
  o.window = {1e-4, 1e-2};
  const auto circle = alpha_fit(local_graph_samples(disc(), a, Vector{{1.0}}, o.window), o);
  CHECK(std::abs(circle.alpha - 2) < 0.01);
  CHECK(circle.r2 >= 0.99);
  CHECK(circle.r2 <= 1.0);
  CHECK_FALSE(circle.one_sided);

  std::vector<GraphSample> power;
  for (int i = 0; i <= 60; ++i) {
    const double h = 1e-4 * std::pow(100.0, i / 60.0);
    power.push_back({Vector{{h}}, std::pow(h, 3.5)});
    power.push_back({Vector{{-h}}, std::pow(h, 3.5)});
  }
  CHECK(std::abs(alpha_fit(power, o).alpha - 3.5) < 0.01);

  FitOptions narrow = o;
  narrow.window = {1e-3, 1e-2};
  try {
    alpha_fit(power, narrow);
    FAIL("expected window too narrow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::window_too_narrow);
    CHECK(std::string(e.what()) == "window too narrow");
  }

  // One-sided data fails unless explicitly allowed, and is then flagged.
  std::vector<GraphSample> right;
  for (const auto& s : power) {
    if (s.h(0) > 0) right.push_back(s);
  }
  CHECK_THROWS_AS(alpha_fit(right, o), Error);
  FitOptions loose = o;
  loose.allow_one_sided = true;
  const auto one = alpha_fit(right, loose);
  CHECK(one.one_sided);
  CHECK(std::abs(one.alpha - 3.5) < 0.01);
}

TEST_CASE("alpha tends to two on analytic boundaries") {
  const Matrix shape = Vector{{0.25, 1.0}}.asDiagonal();
  const auto ellipse = hilbert::ConvexDomain::ellipsoid(Vector::Zero(2), shape);
  const auto a = adapted_chart(ellipse, Vector{{2.0, 0.0}}, Vector{{-2.0, 0.0}});
  FitOptions wide, tight;
  wide.window = {3e-3, 3e-1};
  tight.window = {1e-5, 1e-3};
  const double aw = alpha_fit(local_graph_samples(ellipse, a, Vector{{1.0}}, wide.window), wide).alpha;
  const double at = alpha_fit(local_graph_samples(ellipse, a, Vector{{1.0}}, tight.window), tight).alpha;
  MESSAGE("ellipse alpha " << aw << " -> " << at);
  CHECK(std::abs(at - 2) < std::abs(aw - 2));
  CHECK(std::abs(at - 2) < 1e-3);
}

TEST_CASE("alpha_compare on the shipped groups") {
  const auto so21 = test::load_group("so21_triangle_334");
  const auto sample = domainbuild::limit_set_sample(so21, 8);
  const auto g = so21.element(certify::find_loxodromic(so21, 8));
  const auto r = alpha_compare(sample, g);
  REQUIRE(r.fits.size() == 1);
  CHECK(r.ok);
  CHECK(std::abs(r.alpha_predicted[0] - 2) < 1e-9);
  CHECK(std::abs(r.fits[0].alpha - 2) < 0.04);
  CHECK(r.fits[0].pairs >= 10);

  const auto deformed = test::load_group("deformed_triangle_334");
  const auto ds = domainbuild::limit_set_sample(deformed, 8);
  const auto w = certify::find_loxodromic(deformed, 8);
  const auto dg = deformed.element(w);
  const auto dr = alpha_compare(ds, dg);
  REQUIRE(dr.ok);
  const auto predicted = spectra::boundary_alpha_predicted(spectra::orbit_spectrum(dg));
  CHECK(std::abs(dr.alpha_predicted[0] - predicted[0]) < 1e-12);
  CHECK(dr.rel_error[0] < 0.05);
  CHECK(std::abs(dr.fits[0].alpha - 2) > 3 * dr.fits[0].alpha_stderr);

  // Two different adapted charts at the same point agree.
  const auto e = projlin::eigen_split(dg);
  const auto pts = orbit_points(ds, dg, 40);
  const auto c1 = adapted_chart(e, ds.chart, Vector::Zero(2));
  const auto c2 = adapted_chart(e, ds.chart, Vector{{0.1, -0.15}});
  const double a1 = alpha_fit(local_graph_samples(pts, ds.chart, c1, Window{})).alpha;
  const double a2 = alpha_fit(local_graph_samples(pts, ds.chart, c2, Window{})).alpha;
  MESSAGE("chart change " << a1 << " vs " << a2);
  CHECK(std::abs(a1 - a2) < 0.02 * a1);

  const auto j = to_json(dr, &deformed);
  CHECK(j["fits"].size() == 1);
  const auto csv = samples_csv(dr);
  CHECK(csv.rfind("direction,h,f", 0) == 0);
}

TEST_CASE("alpha_compare errors") {
  const auto so21 = test::load_group("so21_triangle_334");
  domainbuild::LimitSetSample empty;
  CHECK_THROWS_AS(alpha_compare(empty, so21.element({1, 2, 3})), Error);
  const auto sample = domainbuild::limit_set_sample(so21, 4);
  try {
    alpha_compare(sample, test::element(test::rotation_xy(0.4)));
    FAIL("expected not biproximal");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_biproximal);
  }
}
