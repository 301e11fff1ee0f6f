#include "helpers.hpp"
#include "hlyap/error.hpp"

#include <doctest.h>

#include <algorithm>

using namespace hlyap;
using namespace hlyap::projlin;
using hlyap::test::diag_element;

TEST_CASE("normalize_unimodular") {
  CHECK(normalize_unimodular(2.0 * Matrix::Identity(3, 3)).matrix().isApprox(Matrix::Identity(3, 3), 1e-15));
  const Vector d = Vector{{8.0, 2.0, 1.0 / 16}};
  CHECK(normalize_unimodular(Matrix(d.asDiagonal())).matrix().isApprox(Matrix(d.asDiagonal()), 1e-15));

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix m = test::random_matrix(rng, 3);
    m *= std::cbrt(5.0 / std::abs(m.determinant()));
    const auto g = normalize_unimodular(m);
    CHECK(std::abs(g.matrix().determinant() - 1.0) < 1e-9);
    CHECK((g.matrix() * g.inverse_matrix()).isApprox(Matrix::Identity(3, 3), 1e-12));
  }
  Matrix even = Matrix::Identity(4, 4);
  even(0, 0) = -3.0;
  CHECK(std::abs(std::abs(normalize_unimodular(even).matrix().determinant()) - 1.0) < 1e-12);

  Matrix singular = Matrix::Ones(3, 3);
  try {
    normalize_unimodular(singular);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::singular_matrix);
    CHECK(std::string(e.what()) == "singular matrix");
  }
}

TEST_CASE("eigen_split of diagonal, rotation and boost") {
  const auto e = eigen_split(diag_element({8, 2, 1.0 / 16}));
  REQUIRE(e.moduli.size() == 3);
  CHECK(e.moduli[0] == doctest::Approx(8).epsilon(1e-14));
  CHECK(e.moduli[1] == doctest::Approx(2).epsilon(1e-14));
  CHECK(e.moduli[2] == doctest::Approx(0.0625).epsilon(1e-14));
  CHECK(e.clusters.size() == 3);
  CHECK(e.diagonalizable);
  REQUIRE(e.attracting);
  CHECK(std::abs(std::abs((*e.attracting)(0)) - 1.0) < 1e-14);
  CHECK(std::abs((*e.top_left).dot(*e.attracting) - 1.0) < 1e-12);
  CHECK(std::abs((*e.bottom_left).dot(*e.repelling) - 1.0) < 1e-12);

  const auto r = eigen_split(test::element(test::rotation_xy(M_PI / 3)));
  REQUIRE(r.clusters.size() == 1);
  CHECK(r.clusters[0].size == 3);
  CHECK(r.clusters[0].modulus == doctest::Approx(1.0));
  CHECK_FALSE(is_biproximal(r));

  const double s = 1.3;
  const auto b = eigen_split(test::element(test::boost(s)));
  CHECK(b.moduli[0] == doctest::Approx(std::exp(s)).epsilon(1e-12));
  CHECK(b.moduli[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b.moduli[2] == doctest::Approx(std::exp(-s)).epsilon(1e-12));
  CHECK(b.moduli[0] * b.moduli[1] * b.moduli[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(is_loxodromic(b));
}

TEST_CASE("biproximal and loxodromic predicates") {
  CHECK(is_biproximal(diag_element({8, 2, 1.0 / 16})));
  CHECK(is_loxodromic(diag_element({8, 2, 1.0 / 16})));
  CHECK_FALSE(is_loxodromic(diag_element({2, 2, 0.25})));
  CHECK_FALSE(is_biproximal(diag_element({2, 2, 0.25})));

  // Product of two reflections of the (3,3,4) triangle group: eigenvalues by hand.
  const auto group = test::load_group("so21_triangle_334");
  bool found_biproximal = false;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      const Matrix m = group.generator(i).matrix() * group.generator(j).matrix();
      Eigen::EigenSolver<Matrix> es(m);
      std::vector<double> mods;
      for (int k = 0; k < 3; ++k) mods.push_back(std::abs(es.eigenvalues()(k)));
      std::sort(mods.rbegin(), mods.rend());
      const bool direct = mods[0] > mods[1] * (1 + 1e-6) && mods[1] > mods[2] * (1 + 1e-6);
      CHECK(is_biproximal(test::element(m)) == direct);
    }
  }
  // The three-letter product abc is a hyperbolic element of a cocompact group.
  const auto abc = group.element(group.parse_word("abc"));
  found_biproximal = is_biproximal(abc);
  CHECK(found_biproximal);
}

TEST_CASE("eigen_split invariants on random unimodular matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 3 + trial % 3;
    const auto g = normalize_unimodular(test::random_matrix(rng, d));
    const auto e = eigen_split(g);
    double prod = 1.0;
    for (double m : e.moduli) prod *= m;
    CHECK(prod == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::is_sorted(e.moduli.rbegin(), e.moduli.rend()));
    Eigen::Index total = 0;
    for (const auto& c : e.clusters) total += c.basis.cols();
    CHECK(total == d);
    if (is_biproximal(e)) {
      CHECK(total - 2 + 2 == d);
      CHECK((g.matrix() * *e.attracting).normalized().cwiseAbs().isApprox(e.attracting->cwiseAbs(), 1e-8));
    }
    // Moduli of g^-1 are reversed reciprocals.
    const auto inv = eigen_split(g.inverse());
    for (int i = 0; i < d; ++i) {
      CHECK(std::abs(inv.moduli[i] * e.moduli[d - 1 - i] - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("complex pairs form two-dimensional real blocks") {
  Matrix m = Matrix::Zero(4, 4);
  m.topLeftCorner(2, 2) = 3.0 * test::rotation_xy(0.7).topLeftCorner(2, 2);
  m(2, 2) = 1.0 / 1.5;
  m(3, 3) = 1.0 / 6.0;
  const auto e = eigen_split(test::element(m));
  REQUIRE(e.clusters.size() == 3);
  CHECK(e.clusters[0].size == 2);
  CHECK(e.clusters[0].basis.cols() == 2);
  REQUIRE(e.clusters[0].orthogonal_part);
  const Matrix u = *e.clusters[0].orthogonal_part;
  CHECK((u.transpose() * u).isApprox(Matrix::Identity(2, 2), 1e-10));
  CHECK_FALSE(is_biproximal(e));
}

TEST_CASE("non-diagonalizable interior block is flagged") {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 4.0;
  m(1, 1) = m(2, 2) = 1.0;
  m(1, 2) = 1.0;
  m(3, 3) = 0.25;
  const auto e = eigen_split(test::element(m));
  CHECK(is_biproximal(e));
  CHECK_FALSE(e.diagonalizable);
}

TEST_CASE("affine charts") {
  const auto standard = AffineChart::standard(2);
  CHECK(standard.to_chart(Vector{{2.0, 4.0, 2.0}}).isApprox(Vector{{1.0, 2.0}}));
  CHECK_FALSE(standard.in_chart(Vector{{1.0, 0.0, 0.0}}));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix frame = test::random_matrix(rng, 3);
    const AffineChart chart(frame.leftCols(2), frame.col(2));
    const Vector p = Vector::Random(2);
    CHECK((chart.to_chart(chart.lift(p)) - p).norm() < 1e-12 * (1 + p.norm()) * frame.norm() * frame.inverse().norm());
  }
  CHECK_THROWS_AS(AffineChart(Matrix::Identity(3, 2), Vector{{1.0, 0.0, 0.0}}), Error);
}

TEST_CASE("projective action") {
  const auto chart = AffineChart::standard(2);
  const Vector p{{0.3, -0.2}};
  CHECK(projective_action(GroupElement::identity(3), p, chart).isApprox(p, 1e-15));

  // Diagonal action in (u, y) coordinates with v = 1 - u: chart with x- at the origin and x+ at e1.
  const double l0 = 8, l1 = 2, ln = 1.0 / 16;
  Matrix basis(3, 2);
  basis << 1, 0, 0, 1, -1, 0;
  const AffineChart adapted(basis, Vector{{0.0, 0.0, 1.0}});
  const Matrix g = Vector{{l0, l1, ln}}.asDiagonal();
  const double u = 0.3, y = 0.1, v = 1 - u;
  const Vector image = projective_action(g, Vector{{u, y}}, adapted);
  CHECK(image(0) == doctest::Approx(l0 * u / (l0 * u + ln * v)).epsilon(1e-14));
  CHECK(image(1) == doctest::Approx(l1 * y / (l0 * u + ln * v)).epsilon(1e-14));

  const Matrix escape = Matrix{{1, 0, 0}, {0, 1, 0}, {1, 0, 0}};
  try {
    projective_action(escape, Vector{{0.0, 0.0}}, chart);
    FAIL("expected leaves chart");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::leaves_chart);
  }

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = normalize_unimodular(Matrix::Identity(3, 3) + 0.3 * test::random_matrix(rng, 3));
    const auto b = normalize_unimodular(Matrix::Identity(3, 3) + 0.3 * test::random_matrix(rng, 3));
    const Vector q = 0.2 * Vector::Random(2);
    const Vector lhs = projective_action(a, projective_action(b, q, chart), chart);
    const Vector rhs = projective_action(a * b, q, chart);
    if (lhs.norm() < 100) CHECK((lhs - rhs).norm() < 1e-10 * (1 + lhs.norm()));
  }

  // Jacobian against central differences.
  const Matrix m = Matrix::Identity(3, 3) + 0.2 * test::random_matrix(rng, 3);
  const Matrix jac = projective_jacobian(m, p, chart);
  for (int c = 0; c < 2; ++c) {
    const double h = 1e-6;
    const Vector dp = Vector::Unit(2, c) * h;
    const Vector fd = (projective_action(m, p + dp, chart) - projective_action(m, p - dp, chart)) / (2 * h);
    CHECK((fd - jac.col(c)).norm() < 1e-7);
  }
}

TEST_CASE("exterior powers") {
  CHECK(wedge_power(Matrix(Vector{{8.0, 2.0, 1.0 / 16}}.asDiagonal()), 1).isApprox(
      Matrix(Vector{{8.0, 2.0, 1.0 / 16}}.asDiagonal())));
  CHECK(wedge_power(Matrix(Vector{{8.0, 2.0, 1.0 / 16}}.asDiagonal()), 2)
            .isApprox(Matrix(Vector{{16.0, 0.5, 0.125}}.asDiagonal()), 1e-15));
  CHECK(k_subsets(4, 2).size() == 6);
  CHECK(k_subsets(4, 2).front() == std::vector<int>{0, 1});
  CHECK(k_subsets(4, 2).back() == std::vector<int>{2, 3});
  CHECK_THROWS_AS(wedge_power(Matrix::Identity(3, 3), 3), Error);

  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 3 + trial % 3;
    const int k = 1 + trial % (d - 1);
    const Matrix a = test::random_matrix(rng, d);
    const Matrix b = test::random_matrix(rng, d);
    const Matrix lhs = wedge_power(Matrix(a * b), k);
    const Matrix rhs = wedge_power(a, k) * wedge_power(b, k);
    CHECK((lhs - rhs).norm() <= 1e-9 * rhs.norm());
  }
  // Top modulus of the k-th power is the product of the k largest moduli.
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = normalize_unimodular(test::random_matrix(rng, 4));
    const auto e = eigen_split(g);
    for (int k = 1; k < 4; ++k) {
      double expected = 1.0;
      for (int i = 0; i < k; ++i) expected *= e.moduli[i];
      const auto w = eigen_split(GroupElement(wedge_power(g.matrix(), k), wedge_power(g.inverse_matrix(), k)));
      CHECK(w.moduli[0] == doctest::Approx(expected).epsilon(1e-9));
    }
  }
  // Plucker coordinates are the k x k minors.
  const Matrix a = test::random_matrix(rng, 4).leftCols(2);
  const Vector p = plucker(a);
  const auto subsets = k_subsets(4, 2);
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    CHECK(p(static_cast<Eigen::Index>(i)) == doctest::Approx(a(subsets[i], Eigen::all).determinant()).epsilon(1e-12));
  }
}
