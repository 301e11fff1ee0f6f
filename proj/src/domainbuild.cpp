#include "hlyap/domainbuild.hpp"

#include "hlyap/error.hpp"
#include "hlyap/hull.hpp"
#include "hlyap/io.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace hlyap::domainbuild {

ConvexDomain ellipsoid_domain(int n) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "dimension must be >= 1");
  return ConvexDomain::ellipsoid(Vector::Zero(n), Matrix::Identity(n, n));
}

LimitSetSample limit_set_sample(const Group& group, int max_len, double merge_tol) {
  if (max_len < 1) throw Error(ErrorCode::invalid_argument, "max word length must be >= 1");
  LimitSetSample out;
  out.max_word_length = max_len;
  out.chart = group.chart();
  std::vector<Vector> raw;
  std::vector<Word> words;
  group.for_each_reduced(max_len, [&](const projlin::GroupElement& g) {
    const auto e = projlin::eigen_split(g);
    if (!projlin::is_biproximal(e) || !out.chart.in_chart(*e.attracting)) return;
    raw.push_back(out.chart.to_chart(*e.attracting));
    words.push_back(*g.word());
  });
  if (raw.empty()) {
    throw Error(ErrorCode::no_proximal_elements, "no proximal elements up to length " + std::to_string(max_len));
  }
  // Sort along the first coordinate so merging only scans a narrow band.
  std::vector<std::size_t> order(raw.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return raw[a](0) < raw[b](0); });
  std::vector<bool> taken(raw.size(), false);
  std::vector<std::size_t> keep;
  for (std::size_t a = 0; a < order.size(); ++a) {
    if (taken[order[a]]) continue;
    keep.push_back(order[a]);
    for (std::size_t b = a + 1; b < order.size() && raw[order[b]](0) - raw[order[a]](0) <= merge_tol; ++b) {
      if ((raw[order[b]] - raw[order[a]]).norm() <= merge_tol) taken[order[b]] = true;
    }
  }
  // Report in enumeration order.
  std::sort(keep.begin(), keep.end());
  for (auto k : keep) {
    out.points.push_back(raw[k]);
    out.source_words.push_back(words[k]);
  }
  return out;
}

ConvexDomain orbit_hull_domain(const LimitSetSample& sample, const Vector& seed) {
  const auto h = hull::convex_hull(sample.points);
  const int n = static_cast<int>(seed.size());
  if (n == 2) return ConvexDomain::polygon(h.vertices, seed, sample.chart);
  return ConvexDomain::halfspaces(h.normals, h.offsets, seed, sample.chart);
}

ConvexDomain orbit_hull_domain(const Group& group, const Vector& seed, int max_len) {
  return orbit_hull_domain(limit_set_sample(group, max_len), seed);
}

double invariance_defect(const ConvexDomain& domain, const Group& group, int samples) {
  if (samples <= 0) samples = domain.dim() <= 2 ? 256 : 128 * domain.dim();
  const auto& chart = domain.chart();
  const Vector& base = domain.base_point();
  const auto boundary = domain.sample_boundary(samples);
  double worst = 0.0;
  for (int i = 0; i < group.rank(); ++i) {
    const auto& g = group.generator(i);
    for (const auto& h : {g, g.inverse()}) {
      for (const auto& p : boundary) {
        const Vector lifted = h.matrix() * chart.lift(p);
        if (!chart.in_chart(lifted)) return std::numeric_limits<double>::infinity();
        const Vector q = chart.to_chart(lifted);
        const Vector d = q - base;
        if (!(d.norm() > 0)) return std::numeric_limits<double>::infinity();
        const double t = domain.ray_parameters(base, d).second;
        worst = std::max(worst, std::abs(1.0 - t) * d.norm());
      }
    }
  }
  return worst / domain.diameter();
}

std::string limit_set_csv(const LimitSetSample& sample, const Group& group) {
  std::vector<std::string> header{"word"};
  const auto n = sample.points.empty() ? 0 : sample.points.front().size();
  for (Eigen::Index i = 0; i < n; ++i) header.push_back("x" + std::to_string(i));
  io::CsvWriter csv(header);
  for (std::size_t k = 0; k < sample.points.size(); ++k) {
    std::vector<std::string> row{group.format_word(sample.source_words[k])};
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(io::format_double(sample.points[k](i)));
    csv.row(row);
  }
  return csv.str();
}

Matrix cartan_matrix(const std::vector<std::vector<int>>& coxeter, double mu, int i, int j) {
  const auto n = static_cast<Eigen::Index>(coxeter.size());
  if (n < 2 || !(mu > 0)) throw Error(ErrorCode::invalid_argument, "need >= 2 generators and mu > 0");
  Matrix a = 2.0 * Matrix::Identity(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    if (static_cast<Eigen::Index>(coxeter[r].size()) != n) throw Error(ErrorCode::invalid_argument, "Coxeter matrix must be square");
    for (Eigen::Index c = 0; c < n; ++c) {
      if (r == c) continue;
      const int m = coxeter[r][c];
      if (m < 2 || coxeter[c][r] != m) throw Error(ErrorCode::invalid_argument, "Coxeter entries must be symmetric and >= 2");
      a(r, c) = -2.0 * std::cos(std::numbers::pi / m);
    }
  }
  if (i == j || i < 0 || j < 0 || i >= n || j >= n || coxeter[i][j] == 2) {
    throw Error(ErrorCode::invalid_argument, "deformed edge must join two distinct non-commuting generators");
  }
  a(i, j) *= mu;
  a(j, i) /= mu;
  return a;
}

Matrix hyperbolic_frame(const std::vector<std::vector<int>>& coxeter) {
  const Matrix gram = 0.5 * cartan_matrix(coxeter, 1.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  const auto n = gram.rows();
  Matrix s(n, n);
  // Eigen sorts ascending; the frame lists eigenvalues descending.
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = n - 1 - k;
    const double w = es.eigenvalues()(src);
    if (std::abs(w) < 1e-12) throw Error(ErrorCode::degenerate, "Gram matrix is singular");
    s.row(k) = std::sqrt(std::abs(w)) * es.eigenvectors().col(src).transpose();
  }
  return s;
}

Group reflection_group(const std::vector<std::vector<int>>& coxeter, double mu, const std::string& name) {
  const Matrix a = cartan_matrix(coxeter, mu);
  const Matrix s = hyperbolic_frame(coxeter);
  const Matrix s_inv = s.inverse();
  const auto n = a.rows();
  std::vector<Matrix> gens;
  for (Eigen::Index k = 0; k < n; ++k) {
    Matrix r = Matrix::Identity(n, n);
    r.row(k) -= a.row(k);
    Matrix h = s * r * s_inv;
    if (n % 2 == 1) h = -h;
    gens.push_back(h);
  }
  return Group(gens, {}, name);
}

}  // namespace hlyap::domainbuild
