#include "hlyap/projlin.hpp"

#include "hlyap/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hlyap {

Word inverse_word(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (int& x : out) x = -x;
  return out;
}

namespace projlin {
namespace {

Word concat_free(const Word& a, const Word& b) {
  Word out = a;
  for (int x : b) {
    if (!out.empty() && out.back() == -x) {
      out.pop_back();
    } else {
      out.push_back(x);
    }
  }
  return out;
}

// Reciprocal condition estimate of a square matrix through its singular values.
double condition_number(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

double condition_number(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

// Indices of `values` sorted by descending modulus; conjugate pairs are kept
// adjacent with the positive imaginary part first.
std::vector<int> descending_order(const Eigen::VectorXcd& values) {
  std::vector<int> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double ma = std::abs(values(a));
    const double mb = std::abs(values(b));
    if (ma != mb) return ma > mb;
    return values(a).imag() > values(b).imag();
  });
  return idx;
}

Vector real_unit(const Eigen::VectorXcd& v) {
  // Rotate the complex phase so the largest entry is real before dropping
  // the imaginary part.
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  const std::complex<double> phase = std::abs(v(k)) > 0 ? v(k) / std::abs(v(k)) : 1.0;
  Vector r = (v / phase).real();
  return r / r.norm();
}

Vector top_eigenvector(const Matrix& m) {
  Eigen::EigenSolver<Matrix> es(m, true);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::numerical, "eigen decomposition did not converge");
  }
  const auto order = descending_order(es.eigenvalues());
  return real_unit(es.eigenvectors().col(order.front()));
}

bool is_real(std::complex<double> z, double tol) {
  return std::abs(z.imag()) <= tol * std::abs(z);
}

// Real basis of the span of the given complex eigenvectors (one column per
// real eigenvalue, a (Re, Im) pair per conjugate pair). Returns false when
// the members do not close up under conjugation.
bool real_basis(const Eigen::VectorXcd& values, const Eigen::MatrixXcd& vectors,
                const std::vector<int>& members, double tol, Matrix& out) {
  std::vector<Vector> cols;
  for (int j : members) {
    const auto z = values(j);
    if (is_real(z, tol)) {
      cols.push_back(real_unit(vectors.col(j)));
    } else if (z.imag() > 0) {
      const Eigen::VectorXcd v = vectors.col(j) / vectors.col(j).norm();
      cols.push_back(v.real());
      cols.push_back(v.imag());
    }
  }
  if (cols.size() != members.size()) return false;
  out.resize(vectors.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = cols[c];
  return true;
}

std::optional<Matrix> orthogonal_part(const Matrix& block, double modulus) {
  if (modulus <= 0) return std::nullopt;
  Matrix u = block / modulus;
  const double defect = (u.transpose() * u - Matrix::Identity(u.rows(), u.cols())).norm();
  if (defect > 1e-6) return std::nullopt;
  return u;
}

}  // namespace

// ---------------------------------------------------------------------------
// GroupElement

GroupElement::GroupElement(Matrix matrix, Matrix inverse, std::optional<Word> word)
    : matrix_(std::move(matrix)), inverse_(std::move(inverse)), word_(std::move(word)) {}

GroupElement GroupElement::identity(int dim) {
  return GroupElement(Matrix::Identity(dim, dim), Matrix::Identity(dim, dim), Word{});
}

int GroupElement::det_sign() const { return matrix_.determinant() < 0 ? -1 : 1; }

GroupElement GroupElement::inverse() const {
  std::optional<Word> w;
  if (word_) w = inverse_word(*word_);
  return GroupElement(inverse_, matrix_, std::move(w));
}

GroupElement GroupElement::pow(int k) const {
  if (k < 0) return inverse().pow(-k);
  GroupElement result = identity(dim());
  if (!word_) result.word_.reset();
  GroupElement base = *this;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

GroupElement GroupElement::with_word(Word w) const {
  return GroupElement(matrix_, inverse_, std::move(w));
}

GroupElement operator*(const GroupElement& a, const GroupElement& b) {
  std::optional<Word> w;
  if (a.word_ && b.word_) w = concat_free(*a.word_, *b.word_);
  return GroupElement(a.matrix_ * b.matrix_, b.inverse_ * a.inverse_, std::move(w));
}

GroupElement normalize_unimodular(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::invalid_argument, "expected a non-empty square matrix");
  }
  if (!m.allFinite()) throw Error(ErrorCode::invalid_argument, "matrix has non-finite entries");
  const auto d = static_cast<double>(m.rows());
  const double det = m.determinant();
  double hadamard = 1.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) hadamard *= m.col(j).norm();
  if (!(std::abs(det) > 1e-14 * hadamard)) throw Error(ErrorCode::singular_matrix, "singular matrix");

  // Already unimodular input is kept bit-for-bit so normalization is idempotent.
  Matrix n = std::abs(std::abs(det) - 1.0) <= 1e-14 ? m : Matrix(m / std::pow(std::abs(det), 1.0 / d));
  if (det < 0 && (m.rows() % 2 == 1)) n = -n;
  Matrix inv = n.fullPivLu().inverse();
  return GroupElement(std::move(n), std::move(inv));
}

// ---------------------------------------------------------------------------
// AffineChart

AffineChart::AffineChart(Matrix basis, Vector origin)
    : basis_(std::move(basis)), origin_(std::move(origin)) {
  const auto d = origin_.size();
  if (basis_.rows() != d || basis_.cols() != d - 1) {
    throw Error(ErrorCode::invalid_argument, "chart basis must be (n+1) x n");
  }
  frame_.resize(d, d);
  frame_.leftCols(d - 1) = basis_;
  frame_.col(d - 1) = origin_;
  Eigen::FullPivLU<Matrix> lu(frame_);
  if (!lu.isInvertible() || condition_number(frame_) > 1e12) {
    throw Error(ErrorCode::singular_matrix, "chart frame is not invertible");
  }
  frame_inv_ = lu.inverse();
}

AffineChart AffineChart::standard(int n) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "chart dimension must be >= 1");
  Matrix basis = Matrix::Identity(n + 1, n);
  Vector origin = Vector::Unit(n + 1, n);
  return AffineChart(std::move(basis), std::move(origin));
}

bool AffineChart::in_chart(const Vector& ambient) const {
  const Vector h = frame_inv_ * ambient;
  return std::abs(h(dim())) > 1e-14 * h.norm();
}

Vector AffineChart::to_chart(const Vector& ambient) const {
  const Vector h = frame_inv_ * ambient;
  const double w = h(dim());
  if (!(std::abs(w) > 1e-14 * h.norm())) throw Error(ErrorCode::leaves_chart, "leaves chart");
  return h.head(dim()) / w;
}

Vector AffineChart::lift(const Vector& point) const { return origin_ + basis_ * point; }

Vector AffineChart::tangent_to_chart(const Vector& ambient_point, const Vector& ambient_vector) const {
  const Vector hx = frame_inv_ * ambient_point;
  const Vector hw = frame_inv_ * ambient_vector;
  const double wx = hx(dim());
  if (!(std::abs(wx) > 1e-14 * hx.norm())) throw Error(ErrorCode::leaves_chart, "leaves chart");
  return (hw.head(dim()) * wx - hx.head(dim()) * hw(dim())) / (wx * wx);
}

Vector AffineChart::hyperplane_covector(const Vector& normal, const Vector& point) const {
  Vector k(dim() + 1);
  k.head(dim()) = normal;
  k(dim()) = -normal.dot(point);
  return frame_inv_.transpose() * k;
}

Vector projective_action(const Matrix& g, const Vector& point, const AffineChart& chart) {
  return chart.to_chart(g * chart.lift(point));
}

Vector projective_action(const GroupElement& g, const Vector& point, const AffineChart& chart) {
  return projective_action(g.matrix(), point, chart);
}

Matrix projective_jacobian(const Matrix& g, const Vector& point, const AffineChart& chart) {
  const int n = chart.dim();
  const Matrix h = chart.frame_inverse() * g * chart.frame();
  Vector p(n + 1);
  p.head(n) = point;
  p(n) = 1.0;
  const Vector hp = h * p;
  const double w = hp(n);
  if (!(std::abs(w) > 1e-14 * hp.norm())) throw Error(ErrorCode::leaves_chart, "leaves chart");
  return (h.topLeftCorner(n, n) * w - hp.head(n) * h.row(n).head(n)) / (w * w);
}

// ---------------------------------------------------------------------------
// Eigen splitting

std::size_t EigenData::cluster_of(std::size_t modulus_index) const {
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (modulus_index >= clusters[c].first && modulus_index < clusters[c].first + clusters[c].size) return c;
  }
  throw Error(ErrorCode::invalid_argument, "modulus index out of range");
}

EigenData eigen_split(const GroupElement& g, double tol) {
  if (!(tol > 0)) throw Error(ErrorCode::invalid_argument, "cluster tolerance must be positive");
  const int d = g.dim();
  EigenData out;
  out.dim = d;
  out.tolerance = tol;

  Eigen::EigenSolver<Matrix> es(g.matrix(), true);
  Eigen::EigenSolver<Matrix> esi(g.inverse_matrix(), false);
  if (es.info() != Eigen::Success || esi.info() != Eigen::Success) {
    throw Error(ErrorCode::numerical, "eigen decomposition did not converge");
  }
  const Eigen::VectorXcd vals = es.eigenvalues();
  const Eigen::VectorXcd ivals = esi.eigenvalues();
  const auto order = descending_order(vals);
  const auto iorder = descending_order(ivals);

  // Moduli >= 1 come from g, the others from g^{-1}: both are then computed
  // as dominant-side eigenvalues and keep full relative accuracy.
  out.moduli.resize(d);
  out.eigenvalues.resize(d);
  for (int i = 0; i < d; ++i) {
    const auto z = vals(order[i]);
    if (std::abs(z) >= 1.0) {
      out.eigenvalues[i] = z;
    } else {
      out.eigenvalues[i] = 1.0 / ivals(iorder[d - 1 - i]);
    }
    out.moduli[i] = std::abs(out.eigenvalues[i]);
  }

  for (int i = 0; i < d; ++i) {
    if (i == 0 || out.moduli[i - 1] - out.moduli[i] > tol * out.moduli[i - 1]) {
      out.clusters.push_back(ModulusCluster{static_cast<std::size_t>(i), 0, 0.0, true, {}, {}, {}});
    }
    auto& c = out.clusters.back();
    ++c.size;
    c.real = c.real && is_real(out.eigenvalues[i], tol);
  }
  for (auto& c : out.clusters) {
    double s = 0;
    for (std::size_t i = c.first; i < c.first + c.size; ++i) s += std::log(out.moduli[i]);
    c.modulus = std::exp(s / static_cast<double>(c.size));
  }

  if (is_biproximal(out)) {
    const Vector xp = real_unit(es.eigenvectors().col(order.front()));
    const Vector xm = top_eigenvector(g.inverse_matrix());
    Vector top_left = top_eigenvector(g.matrix().transpose());
    Vector bottom_left = top_eigenvector(g.inverse_matrix().transpose());
    top_left /= top_left.dot(xp);
    bottom_left /= bottom_left.dot(xm);
    out.attracting = xp;
    out.repelling = xm;
    out.top_left = top_left;
    out.bottom_left = bottom_left;

    auto& top = out.clusters.front();
    top.basis = xp;
    top.block = Matrix::Constant(1, 1, out.eigenvalues.front().real());
    top.orthogonal_part = orthogonal_part(top.block, top.modulus);
    auto& bottom = out.clusters.back();
    bottom.basis = xm;
    bottom.block = Matrix::Constant(1, 1, out.eigenvalues.back().real());
    bottom.orthogonal_part = orthogonal_part(bottom.block, bottom.modulus);

    out.diagonalizable = true;
    if (d > 2) {
      Matrix constraints(2, d);
      constraints.row(0) = top_left.transpose();
      constraints.row(1) = bottom_left.transpose();
      Eigen::JacobiSVD<Matrix> svd(constraints, Eigen::ComputeFullV);
      const Matrix k = svd.matrixV().rightCols(d - 2);
      out.middle = k;

      // g restricted to the invariant middle subspace.
      const Matrix c = k.transpose() * g.matrix() * k;
      Eigen::EigenSolver<Matrix> ces(c, true);
      if (ces.info() != Eigen::Success) throw Error(ErrorCode::numerical, "eigen decomposition did not converge");
      const Eigen::VectorXcd cvals = ces.eigenvalues();
      const auto corder = descending_order(cvals);

      Matrix pc(d - 2, d - 2);
      std::vector<std::pair<Eigen::Index, Eigen::Index>> spans;
      Eigen::Index col = 0;
      bool ok = true;
      for (std::size_t ci = 1; ci + 1 < out.clusters.size(); ++ci) {
        const auto& cl = out.clusters[ci];
        std::vector<int> members;
        for (std::size_t i = cl.first; i < cl.first + cl.size; ++i) members.push_back(corder[i - 1]);
        Matrix basis;
        if (!real_basis(cvals, ces.eigenvectors(), members, tol, basis)) {
          ok = false;
          break;
        }
        pc.middleCols(col, basis.cols()) = basis;
        spans.emplace_back(col, basis.cols());
        col += basis.cols();
      }
      if (ok && condition_number(pc) < 1e8) {
        const Matrix conj = pc.fullPivLu().solve(c * pc);
        for (std::size_t ci = 1; ci + 1 < out.clusters.size(); ++ci) {
          auto& cl = out.clusters[ci];
          const auto [start, width] = spans[ci - 1];
          cl.basis = k * pc.middleCols(start, width);
          cl.block = conj.block(start, start, width, width);
          cl.orthogonal_part = orthogonal_part(cl.block, cl.modulus);
        }
      } else {
        out.diagonalizable = false;
        // Only the spans are meaningful without an eigenbasis.
        for (std::size_t ci = 1; ci + 1 < out.clusters.size(); ++ci) {
          auto& cl = out.clusters[ci];
          cl.basis.resize(0, 0);
          cl.block.resize(0, 0);
        }
      }
    }
    return out;
  }

  // Generic case: bases straight from the eigenvectors of g.
  out.diagonalizable = condition_number(Eigen::MatrixXcd(es.eigenvectors())) < 1e8;
  for (auto& cl : out.clusters) {
    std::vector<int> members;
    for (std::size_t i = cl.first; i < cl.first + cl.size; ++i) members.push_back(order[i]);
    Matrix basis;
    if (out.diagonalizable && real_basis(vals, es.eigenvectors(), members, tol, basis)) {
      cl.basis = basis;
      cl.block = basis.colPivHouseholderQr().solve(g.matrix() * basis);
      cl.orthogonal_part = orthogonal_part(cl.block, cl.modulus);
    }
  }
  return out;
}

bool is_biproximal(const EigenData& e) {
  if (e.clusters.size() < 2) return false;
  const auto& top = e.clusters.front();
  const auto& bottom = e.clusters.back();
  return top.size == 1 && top.real && bottom.size == 1 && bottom.real;
}

bool is_biproximal(const GroupElement& g, double tol) { return is_biproximal(eigen_split(g, tol)); }

bool is_loxodromic(const EigenData& e) {
  return static_cast<int>(e.clusters.size()) == e.dim;
}

bool is_loxodromic(const GroupElement& g, double tol) { return is_loxodromic(eigen_split(g, tol)); }

// ---------------------------------------------------------------------------
// Exterior powers

std::vector<std::vector<int>> k_subsets(int m, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > m) return out;
  std::vector<int> s(k);
  std::iota(s.begin(), s.end(), 0);
  while (true) {
    out.push_back(s);
    int i = k - 1;
    while (i >= 0 && s[i] == m - k + i) --i;
    if (i < 0) break;
    ++s[i];
    for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
  }
  return out;
}

Matrix wedge_power(const Matrix& g, int k) {
  const int d = static_cast<int>(g.rows());
  if (g.cols() != d) throw Error(ErrorCode::invalid_argument, "wedge_power needs a square matrix");
  if (k < 1 || k > d - 1) throw Error(ErrorCode::invalid_argument, "exterior power degree out of range");
  const auto subsets = k_subsets(d, k);
  const auto m = static_cast<Eigen::Index>(subsets.size());
  Matrix out(m, m);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) {
      out(r, c) = Matrix(g(subsets[r], subsets[c])).determinant();
    }
  }
  return out;
}

Matrix wedge_power(const GroupElement& g, int k) { return wedge_power(g.matrix(), k); }

Vector plucker(const Matrix& a) {
  const int d = static_cast<int>(a.rows());
  const int k = static_cast<int>(a.cols());
  const auto subsets = k_subsets(d, k);
  Vector out(static_cast<Eigen::Index>(subsets.size()));
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = Matrix(a(subsets[i], Eigen::all)).determinant();
  }
  return out;
}

}  // namespace projlin
}  // namespace hlyap
