#include "helpers.hpp"
#include "hlyap/certify.hpp"
#include "hlyap/error.hpp"
#include "hlyap/io.hpp"

#include <doctest.h>

#include <filesystem>

using namespace hlyap;
using namespace hlyap::certify;

namespace {

Vector cross(const Vector& a, const Vector& b) {
  return Eigen::Vector3d(a(0), a(1), a(2)).cross(Eigen::Vector3d(b(0), b(1), b(2)));
}

// Level-1 and level-2 margins in dimension 3 from triple products.
double margin_3d(const Matrix& z, const Matrix& basis, int k) {
  double worst = INFINITY;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, l = (i + 2) % 3;
    for (int t = 0; t < 3; ++t) {
      const int t1 = (t + 1) % 3, t2 = (t + 2) % 3;
      if (k == 1) {
        const Vector u = z * basis.col(i);
        const Vector n = cross(basis.col(t1), basis.col(t2));
        worst = std::min(worst, std::abs(u.dot(n)) / (u.norm() * n.norm()));
      } else {
        const Vector n = cross(z * basis.col(j), z * basis.col(l));
        const Vector v = basis.col(t);
        worst = std::min(worst, std::abs(n.dot(v)) / (n.norm() * v.norm()));
      }
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("find_loxodromic") {
  const projlin::Group with_diag({Matrix(Vector{{8.0, 2.0, 1.0 / 16}}.asDiagonal()), test::rotation_xy(0.3)}, {"a", "b"});
  CHECK(find_loxodromic(with_diag, 3) == Word{1});

  const auto so21 = test::load_group("so21_triangle_334");
  const Word w = find_loxodromic(so21, 8);
  CHECK(w.size() == 3);
  const auto e = projlin::eigen_split(so21.element(w));
  CHECK(e.moduli[0] > e.moduli[1] * 1.01);
  CHECK(e.moduli[1] > e.moduli[2] * 1.01);
  CHECK(std::abs(e.moduli[1] - 1.0) < 1e-10);

  const projlin::Group elliptic({test::rotation_xy(0.7), test::rotation_xy(1.1)}, {"a", "b"});
  try {
    find_loxodromic(elliptic, 3);
    FAIL("expected exhaustion");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::search_exhausted);
    CHECK(std::string(e.what()).find("0 biproximal words") != std::string::npos);
  }
}

TEST_CASE("transversality margins") {
  const Matrix basis = Matrix::Identity(3, 3);
  for (int k = 1; k <= 2; ++k) CHECK(transversality_margin(Matrix::Identity(3, 3), basis, k) == 0.0);
  const auto theta = projlin::eigen_split(test::diag_element({8, 2, 1.0 / 16}));
  CHECK(transversality_margin(Matrix::Identity(3, 3), theta, 1) == 0.0);

  std::mt19937_64 rng(31);
  const Matrix rot = test::random_rotation(rng, 3);
  const double m1 = transversality_margin(rot, theta, 1);
  CHECK(m1 > 0);
  CHECK(std::abs(m1 - margin_3d(rot, basis, 1)) < 1e-12);
  CHECK(std::abs(transversality_margin(rot, basis, 2) - margin_3d(rot, basis, 2)) < 1e-12);
  CHECK(transversality_margin(7.5 * rot, basis, 1) == doctest::Approx(m1).epsilon(1e-12));
  CHECK(transversality_margin(-0.01 * rot, basis, 2) == doctest::Approx(transversality_margin(rot, basis, 2)).epsilon(1e-12));

  // Non-orthogonal eigenbases against the triple-product oracle.
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix b = test::random_matrix(rng, 3);
    const Matrix z = test::random_matrix(rng, 3);
    for (int k = 1; k <= 2; ++k) CHECK(std::abs(transversality_margin(z, b, k) - margin_3d(z, b, k)) < 1e-10);
  }
  CHECK_THROWS_AS(transversality_margin(rot, basis, 0), Error);
  CHECK_THROWS_AS(transversality_margin(rot, basis, 3), Error);
}

TEST_CASE("margin formulations agree and are dual") {
  std::mt19937_64 rng(37);
  for (int d = 3; d <= 5; ++d) {
    for (int trial = 0; trial < 5; ++trial) {
      const Matrix b = test::random_matrix(rng, d);
      const Matrix z = test::random_matrix(rng, d);
      const Matrix z_dual = z.inverse().transpose();
      const Matrix b_dual = b.inverse().transpose();
      for (int k = 1; k < d; ++k) {
        CHECK(std::abs(transversality_margin(z, b, k) - transversality_margin_wedge(z, b, k)) < 1e-10);
        CHECK(std::abs(transversality_margin(z, b, k) - transversality_margin(z_dual, b_dual, d - k)) < 1e-10);
        for (const auto& s : projlin::k_subsets(d, k)) {
          for (const auto& t : projlin::k_subsets(d, d - k)) {
            std::vector<int> sc, tc;
            for (int i = 0; i < d; ++i) {
              if (!std::binary_search(s.begin(), s.end(), i)) sc.push_back(i);
              if (!std::binary_search(t.begin(), t.end(), i)) tc.push_back(i);
            }
            CHECK(std::abs(pair_margin(z, b, s, t) - pair_margin(z_dual, b_dual, sc, tc)) < 1e-10);
          }
        }
      }
    }
  }
}

TEST_CASE("certificate search and verification") {
  const auto group = test::load_group("deformed_triangle_334");
  const Word theta = find_loxodromic(group, 8);
  const auto cert = ams_search(group, theta, 8, 1e-8);
  CHECK(cert.min_margin > 1e-6);
  CHECK(cert.margins.size() == 2);
  CHECK(verify_certificate(group, cert));

  // Independent recomputation of the margins.
  const auto e = projlin::eigen_split(group.element(cert.theta));
  Matrix basis(3, 3);
  for (int c = 0; c < 3; ++c) basis.col(c) = e.clusters[c].basis.col(0);
  const Matrix z = group.element(cert.z).matrix();
  CHECK(std::abs(cert.margins.at(1) - margin_3d(z, basis, 1)) < 1e-10);
  CHECK(std::abs(cert.margins.at(2) - margin_3d(z, basis, 2)) < 1e-10);

  auto tampered = cert;
  tampered.z = group.canonical(Word{cert.z.front() == 1 ? 2 : 1});
  if (all_margins(group.element(tampered.z).matrix(), basis) != cert.margins) CHECK_FALSE(verify_certificate(group, tampered));
  tampered = cert;
  tampered.margins[1] *= 1.5;
  CHECK_FALSE(verify_certificate(group, tampered));
  tampered = cert;
  tampered.group_hash = "0000000000000000";
  CHECK_FALSE(verify_certificate(group, tampered));
  tampered = cert;
  tampered.z.push_back(tampered.z.back() == 3 ? 2 : 3);
  CHECK_FALSE(verify_certificate(group, tampered));
  tampered = cert;
  tampered.threshold = 1.0;
  CHECK_FALSE(verify_certificate(group, tampered));

  // Round trip through a file.
  const auto path = (std::filesystem::temp_directory_path() / "hlyap_cert_test.json").string();
  io::write_json(path, to_json(cert, group));
  const auto back = certificate_from_json(io::read_json(path), group);
  CHECK(back.margins == cert.margins);
  CHECK(back.theta == cert.theta);
  CHECK(back.z == cert.z);
  CHECK(verify_certificate(group, back));
  std::filesystem::remove(path);

  // Deterministic.
  CHECK(to_json(ams_search(group, theta, 8, 1e-8), group) == to_json(cert, group));

  try {
    ams_search(group, theta, 0, 1e-8);
    FAIL("expected exhaustion");
  } catch (const SearchExhausted& e) {
    CHECK(e.code() == ErrorCode::search_exhausted);
    CHECK(e.stats().words_examined == 0);
  }
  try {
    ams_search(group, theta, 2, 2.0);
    FAIL("expected exhaustion");
  } catch (const SearchExhausted& e) {
    REQUIRE(e.best());
    CHECK(e.best_margin() > 0);
  }
  CHECK_THROWS_AS(certificate_from_json(nlohmann::json::parse(R"({"theta": "abc"})"), group), Error);
}

TEST_CASE("certificates in dimension four") {
  const auto group = test::load_group("deformed_tetra_3334");
  const Word theta = find_loxodromic(group, 8);
  const auto cert = ams_search(group, theta, 6, 1e-8);
  CHECK(cert.margins.size() == 3);
  CHECK(cert.min_margin > 1e-8);
  CHECK(verify_certificate(group, cert));
}
