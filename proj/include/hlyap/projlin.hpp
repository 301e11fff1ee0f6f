#pragma once

// Projective linear algebra on R^{n+1}: unimodular representatives, eigen
// splitting by modulus, affine charts of P(R^{n+1}) and exterior powers.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

namespace hlyap {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Signed 1-based generator indices: +i is generator i, -i its inverse.
using Word = std::vector<int>;

Word inverse_word(const Word& w);

namespace projlin {

inline constexpr double kDefaultClusterTolerance = 1e-8;

/// A representative of an element of SL^{±}(n+1, R). The inverse is carried
/// alongside the matrix so that products of long words keep their small
/// singular directions accurate.
class GroupElement {
 public:
  GroupElement() = default;

  /// Trusted constructor: `matrix * inverse == I` and |det| == 1 are assumed.
  GroupElement(Matrix matrix, Matrix inverse, std::optional<Word> word = std::nullopt);

  static GroupElement identity(int dim);

  const Matrix& matrix() const noexcept { return matrix_; }
  const Matrix& inverse_matrix() const noexcept { return inverse_; }
  const std::optional<Word>& word() const noexcept { return word_; }
  int dim() const noexcept { return static_cast<int>(matrix_.rows()); }
  int det_sign() const;

  GroupElement inverse() const;
  GroupElement pow(int k) const;
  GroupElement with_word(Word w) const;

  friend GroupElement operator*(const GroupElement& a, const GroupElement& b);

 private:
  Matrix matrix_;
  Matrix inverse_;
  std::optional<Word> word_;
};

/// Rescales M to |det| = 1; in odd dimension the sign is flipped so det = +1.
/// Throws ErrorCode::singular_matrix when det(M) vanishes.
GroupElement normalize_unimodular(const Matrix& m);

/// An affine chart of P(R^{n+1}) given by a frame [B | o]: a point X with
/// homogeneous frame coordinates (c, w) has chart coordinates c / w. The
/// hyperplane at infinity is w = 0 and the chart's Euclidean structure is
/// the coordinate one.
class AffineChart {
 public:
  AffineChart() = default;
  /// `basis` is (n+1) x n, `origin` has n+1 entries; the frame must be invertible.
  AffineChart(Matrix basis, Vector origin);

  static AffineChart standard(int n);

  int dim() const noexcept { return static_cast<int>(basis_.cols()); }
  const Matrix& basis() const noexcept { return basis_; }
  const Vector& origin() const noexcept { return origin_; }
  const Matrix& frame() const noexcept { return frame_; }
  const Matrix& frame_inverse() const noexcept { return frame_inv_; }
  /// Covector whose zero set is the hyperplane at infinity (normalized to 1 at the origin).
  Vector covector() const { return frame_inv_.row(dim()).transpose(); }

  bool in_chart(const Vector& ambient) const;
  Vector to_chart(const Vector& ambient) const;
  Vector lift(const Vector& point) const;
  /// Chart image of an ambient tangent vector W at the projective point X.
  Vector tangent_to_chart(const Vector& ambient_point, const Vector& ambient_vector) const;
  /// Ambient covector of the chart hyperplane {c : normal . (c - point) = 0}.
  Vector hyperplane_covector(const Vector& normal, const Vector& point) const;

 private:
  Matrix basis_;
  Vector origin_;
  Matrix frame_;
  Matrix frame_inv_;
};

Vector projective_action(const GroupElement& g, const Vector& point, const AffineChart& chart);
Vector projective_action(const Matrix& g, const Vector& point, const AffineChart& chart);
/// Jacobian of the chart map p -> g.p at `point`.
Matrix projective_jacobian(const Matrix& g, const Vector& point, const AffineChart& chart);

struct ModulusCluster {
  std::size_t first = 0;   ///< index of the first modulus in the cluster
  std::size_t size = 0;    ///< multiplicity
  double modulus = 0.0;    ///< geometric mean of the member moduli
  bool real = false;       ///< all members have real eigenvalues
  Matrix basis;            ///< ambient real basis of the invariant subspace (columns)
  Matrix block;            ///< action of g in `basis` coordinates
  std::optional<Matrix> orthogonal_part;  ///< block / modulus when it is orthogonal
};

struct EigenData {
  int dim = 0;
  std::vector<double> moduli;  ///< descending, with multiplicity
  std::vector<std::complex<double>> eigenvalues;  ///< ordered like `moduli`
  std::vector<ModulusCluster> clusters;
  double tolerance = kDefaultClusterTolerance;
  bool diagonalizable = false;

  // Filled when the extreme clusters are real singletons.
  std::optional<Vector> attracting;  ///< x^+ (unit ambient vector)
  std::optional<Vector> repelling;   ///< x^- (unit ambient vector)
  std::optional<Vector> top_left;    ///< left eigenvector of lambda_0, top_left(x^+) = 1
  std::optional<Vector> bottom_left; ///< left eigenvector of lambda_n, bottom_left(x^-) = 1
  std::optional<Matrix> middle;      ///< orthonormal basis of the sum of the interior E_i

  std::size_t cluster_of(std::size_t modulus_index) const;
};

EigenData eigen_split(const GroupElement& g, double tol = kDefaultClusterTolerance);

bool is_biproximal(const EigenData& e);
bool is_biproximal(const GroupElement& g, double tol = kDefaultClusterTolerance);
bool is_loxodromic(const EigenData& e);
bool is_loxodromic(const GroupElement& g, double tol = kDefaultClusterTolerance);

/// Lexicographically ordered k-subsets of {0, ..., m-1}.
std::vector<std::vector<int>> k_subsets(int m, int k);

/// Matrix of the induced map on the k-th exterior power in the lexicographic
/// elementary-wedge basis. Requires 1 <= k <= rows - 1.
Matrix wedge_power(const Matrix& g, int k);
Matrix wedge_power(const GroupElement& g, int k);

/// Plucker coordinates (lexicographic) of the span of the columns of `a`.
Vector plucker(const Matrix& a);

}  // namespace projlin
}  // namespace hlyap
