#include "helpers.hpp"
#include "hlyap/error.hpp"

#include <doctest.h>

#include <set>

using namespace hlyap;
using namespace hlyap::projlin;

namespace {

Group free_group() {
  Matrix a = test::boost(0.9);
  Matrix b = test::rotation_xy(1.1) * test::boost(1.4) * test::rotation_xy(-1.1);
  return Group({a, b}, {"a", "b"}, "free");
}

}  // namespace

TEST_CASE("reduced word enumeration counts") {
  std::size_t count = 0;
  free_group().for_each_reduced(4, [&](const GroupElement&) { ++count; });
  CHECK(count == 4 + 12 + 36 + 108);

  const auto triangle = test::load_group("so21_triangle_334");
  CHECK(triangle.letters().size() == 3);
  CHECK(triangle.reduced_elements(8).size() == 765);
  const auto tetra = test::load_group("so31_tetra_3334");
  CHECK(tetra.reduced_elements(5).size() == 4 + 12 + 36 + 108 + 324);

  std::set<Word> seen;
  std::size_t last_len = 0;
  triangle.for_each_reduced(6, [&](const GroupElement& g) {
    const Word& w = *g.word();
    CHECK(w.size() >= last_len);
    last_len = w.size();
    CHECK(triangle.canonical(w) == w);
    CHECK(seen.insert(w).second);
  });

  std::size_t visited = 0;
  CHECK_FALSE(triangle.for_each_reduced_while(8, [&](const GroupElement&) { return ++visited < 5; }));
  CHECK(visited == 5);
}

TEST_CASE("word products multiply left to right") {
  const auto g = free_group();
  const Word w = g.parse_word("abA");
  CHECK(w == Word{1, 2, -1});
  const Matrix expected = g.generator(0).matrix() * g.generator(1).matrix() * g.generator(0).inverse_matrix();
  CHECK(g.element(w).matrix().isApprox(expected, 1e-12));
  CHECK(g.element(w).inverse_matrix().isApprox(expected.inverse(), 1e-12));
  CHECK(g.canonical({1, 2, -2, -1, 2}) == Word{2});
  CHECK(g.format_word({1, -2}) == "aB");
  CHECK(g.parse_word("a^-1b") == Word{-1, 2});
  try {
    g.parse_word("axb");
    FAIL("expected malformed input");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::malformed_input);
  }
}

TEST_CASE("involutions are self-inverse letters") {
  const auto triangle = test::load_group("so21_triangle_334");
  for (int i = 0; i < triangle.rank(); ++i) {
    CHECK(triangle.is_involution(i));
    const Matrix sq = triangle.generator(i).matrix() * triangle.generator(i).matrix();
    CHECK(sq.isApprox(Matrix::Identity(3, 3), 1e-12));
  }
  CHECK(triangle.canonical({1, 1}).empty());
  CHECK(triangle.canonical({-2}) == Word{2});
}

TEST_CASE("group JSON round trip and hash") {
  const auto g = free_group();
  const auto back = Group::from_json(g.to_json());
  CHECK(back.hash() == g.hash());
  CHECK(back.labels() == g.labels());

  // Flat row-major generators are accepted too.
  nlohmann::json flat = g.to_json();
  for (auto& gen : flat["generators"]) {
    nlohmann::json row;
    for (const auto& r : gen)
      for (const auto& x : r) row.push_back(x);
    gen = row;
  }
  CHECK(Group::from_json(flat).hash() == g.hash());

  const auto other = Group({test::boost(0.9)}, {"a"});
  CHECK(other.hash() != g.hash());

  for (const char* bad : {R"({"dim": 3})", R"({"dim": 3, "generators": [[1, 2]]})",
                          R"({"dim": 2, "generators": [[[1, 0], [0, 0]]]})", R"([1, 2, 3])"}) {
    try {
      Group::from_json(nlohmann::json::parse(bad));
      FAIL("expected malformed input for " << bad);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::malformed_input);
    }
  }
  try {
    Group::load("/nonexistent/group.json");
    FAIL("expected malformed input");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::malformed_input);
  }
}

TEST_CASE("shipped groups preserve or break the Lorentzian form") {
  for (const char* name : {"so21_triangle_334", "so31_tetra_3334"}) {
    const auto g = test::load_group(name);
    Matrix j = Matrix::Identity(g.dim(), g.dim());
    j(g.dim() - 1, g.dim() - 1) = -1.0;
    for (int i = 0; i < g.rank(); ++i) {
      const Matrix& m = g.generator(i).matrix();
      CHECK((m.transpose() * j * m - j).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(std::abs(std::abs(m.determinant()) - 1.0) < 1e-12);
    }
  }
  for (const char* name : {"deformed_triangle_334", "deformed_tetra_3334"}) {
    const auto g = test::load_group(name);
    Matrix j = Matrix::Identity(g.dim(), g.dim());
    j(g.dim() - 1, g.dim() - 1) = -1.0;
    double worst = 0.0;
    for (int i = 0; i < g.rank(); ++i) {
      const Matrix& m = g.generator(i).matrix();
      worst = std::max(worst, (m.transpose() * j * m - j).cwiseAbs().maxCoeff());
    }
    CHECK(worst > 0.1);
  }
}
