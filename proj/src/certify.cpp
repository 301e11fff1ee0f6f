#include "hlyap/certify.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hlyap::certify {
namespace {

Matrix orthonormal_columns(const Matrix& a) {
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

std::vector<int> complement(const std::vector<int>& s, int d) {
  std::vector<int> out;
  for (int i = 0; i < d; ++i) {
    if (!std::binary_search(s.begin(), s.end(), i)) out.push_back(i);
  }
  return out;
}

// Sign of the permutation listing s and then its complement.
double shuffle_sign(const std::vector<int>& s) {
  long inversions = 0;
  for (std::size_t j = 0; j < s.size(); ++j) inversions += s[j] - static_cast<long>(j);
  return inversions % 2 == 0 ? 1.0 : -1.0;
}

void check_pair(const Matrix& z, const Matrix& basis, const std::vector<int>& s, const std::vector<int>& t) {
  const auto d = basis.rows();
  if (z.rows() != d || z.cols() != d || basis.cols() != d) throw Error(ErrorCode::invalid_argument, "size mismatch");
  if (s.empty() || t.empty() || static_cast<Eigen::Index>(s.size() + t.size()) != d) {
    throw Error(ErrorCode::invalid_argument, "subspaces must have complementary dimensions");
  }
}

void check_level(const Matrix& basis, int k) {
  if (k < 1 || k > basis.rows() - 1) throw Error(ErrorCode::invalid_argument, "exterior power degree out of range");
}

nlohmann::json word_json(const Word& w, const Group& group) {
  return {{"label", group.format_word(w)}, {"letters", w}};
}

Word word_from(const nlohmann::json& j, const Group& group) {
  if (j.is_string()) return group.parse_word(j.get<std::string>());
  if (j.is_object() && j.contains("letters")) return j.at("letters").get<Word>();
  if (j.is_object() && j.contains("label")) return group.parse_word(j.at("label").get<std::string>());
  throw Error(ErrorCode::malformed_input, "certificate word must be a label or {letters}");
}

}  // namespace

Word find_loxodromic(const Group& group, int max_len, double tol) {
  std::optional<Word> found;
  std::size_t biproximal_only = 0;
  group.for_each_reduced_while(max_len, [&](const projlin::GroupElement& g) {
    const auto e = projlin::eigen_split(g, tol);
    if (projlin::is_loxodromic(e)) {
      found = *g.word();
      return false;
    }
    if (projlin::is_biproximal(e)) ++biproximal_only;
    return true;
  });
  if (!found) {
    throw Error(ErrorCode::search_exhausted, "no loxodromic word up to length " + std::to_string(max_len) + " (" +
                                                 std::to_string(biproximal_only) +
                                                 " biproximal words were not loxodromic)");
  }
  return *found;
}

Matrix eigenbasis(const EigenData& e) {
  if (!projlin::is_loxodromic(e)) throw Error(ErrorCode::invalid_argument, "theta is not loxodromic");
  Matrix out(e.dim, e.dim);
  for (std::size_t c = 0; c < e.clusters.size(); ++c) {
    const auto& b = e.clusters[c].basis;
    if (b.cols() != 1) throw Error(ErrorCode::not_diagonalizable, "eigenbasis unavailable");
    out.col(static_cast<Eigen::Index>(c)) = b.col(0) / b.col(0).norm();
  }
  return out;
}

double pair_margin(const Matrix& z, const Matrix& basis, const std::vector<int>& s, const std::vector<int>& t) {
  check_pair(z, basis, s, t);
  const auto d = basis.rows();
  const auto k = static_cast<Eigen::Index>(s.size());
  Matrix m(d, d);
  m.leftCols(k) = orthonormal_columns(z * basis(Eigen::all, s));
  m.rightCols(d - k) = orthonormal_columns(basis(Eigen::all, t));
  return std::abs(m.determinant());
}

double pair_margin_wedge(const Matrix& z, const Matrix& basis, const std::vector<int>& s, const std::vector<int>& t) {
  check_pair(z, basis, s, t);
  const int d = static_cast<int>(basis.rows());
  const int k = static_cast<int>(s.size());
  const Vector f = projlin::wedge_power(z, k) * projlin::plucker(basis(Eigen::all, s));
  const Vector g = projlin::plucker(basis(Eigen::all, t));
  const auto rows = projlin::k_subsets(d, k);
  const auto cols = projlin::k_subsets(d, d - k);
  // Laplace expansion of det[A B] along the first k columns.
  double pairing = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto c = complement(rows[i], d);
    const auto j = static_cast<Eigen::Index>(std::lower_bound(cols.begin(), cols.end(), c) - cols.begin());
    pairing += shuffle_sign(rows[i]) * f(static_cast<Eigen::Index>(i)) * g(j);
  }
  return std::abs(pairing) / (f.norm() * g.norm());
}

double transversality_margin(const Matrix& z, const Matrix& basis, int k) {
  check_level(basis, k);
  const int d = static_cast<int>(basis.rows());
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& s : projlin::k_subsets(d, k)) {
    for (const auto& t : projlin::k_subsets(d, d - k)) worst = std::min(worst, pair_margin(z, basis, s, t));
  }
  return worst;
}

double transversality_margin(const Matrix& z, const EigenData& theta, int k) {
  return transversality_margin(z, eigenbasis(theta), k);
}

double transversality_margin_wedge(const Matrix& z, const Matrix& basis, int k) {
  check_level(basis, k);
  const int d = static_cast<int>(basis.rows());
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& s : projlin::k_subsets(d, k)) {
    for (const auto& t : projlin::k_subsets(d, d - k)) worst = std::min(worst, pair_margin_wedge(z, basis, s, t));
  }
  return worst;
}

std::map<int, double> all_margins(const Matrix& z, const Matrix& basis) {
  std::map<int, double> out;
  for (int k = 1; k < basis.rows(); ++k) out[k] = transversality_margin(z, basis, k);
  return out;
}

TypicalityCertificate ams_search(const Group& group, const Word& theta, int max_len, double threshold) {
  const auto theta_el = group.element(theta);
  const auto basis = eigenbasis(projlin::eigen_split(theta_el));
  TypicalityCertificate cert;
  cert.theta = *theta_el.word();
  cert.threshold = threshold;
  cert.group_hash = group.hash();

  std::optional<Word> best;
  double best_margin = -1.0;
  bool found = false;
  group.for_each_reduced_while(max_len, [&](const projlin::GroupElement& z) {
    ++cert.stats.words_examined;
    cert.stats.max_length_reached = static_cast<int>(z.word()->size());
    auto margins = all_margins(z.matrix(), basis);
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& [k, m] : margins) lo = std::min(lo, m);
    if (lo > best_margin) {
      best_margin = lo;
      best = *z.word();
    }
    if (lo >= threshold) {
      cert.z = *z.word();
      cert.margins = std::move(margins);
      cert.min_margin = lo;
      found = true;
      return false;
    }
    return true;
  });
  if (!found) {
    std::string what = "no connecting word up to length " + std::to_string(max_len) + " reaches margin threshold";
    if (best) what += "; best " + group.format_word(*best) + " with margin " + std::to_string(best_margin);
    throw SearchExhausted(what, best, best_margin, cert.stats);
  }
  return cert;
}

bool verify_certificate(const Group& group, const TypicalityCertificate& cert, double match_tol) {
  if (cert.group_hash != group.hash()) return false;
  const auto theta = group.element(cert.theta);
  const auto e = projlin::eigen_split(theta);
  if (!projlin::is_loxodromic(e)) return false;
  const auto z = group.element(cert.z);
  const auto margins = all_margins(z.matrix(), eigenbasis(e));
  if (margins.size() != cert.margins.size()) return false;
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& [k, m] : margins) {
    const auto it = cert.margins.find(k);
    if (it == cert.margins.end() || std::abs(it->second - m) > match_tol) return false;
    lo = std::min(lo, m);
  }
  return lo >= cert.threshold && std::abs(lo - cert.min_margin) <= match_tol;
}

nlohmann::json to_json(const TypicalityCertificate& c, const Group& group) {
  nlohmann::json margins = nlohmann::json::object();
  for (const auto& [k, m] : c.margins) margins[std::to_string(k)] = m;
  return {{"theta", word_json(c.theta, group)},
          {"z", word_json(c.z, group)},
          {"margins", margins},
          {"min_margin", c.min_margin},
          {"threshold", c.threshold},
          {"group_hash", c.group_hash},
          {"search", {{"words_examined", c.stats.words_examined}, {"max_length_reached", c.stats.max_length_reached}}}};
}

TypicalityCertificate certificate_from_json(const nlohmann::json& j, const Group& group) {
  try {
    TypicalityCertificate c;
    c.theta = word_from(j.at("theta"), group);
    c.z = word_from(j.at("z"), group);
    for (const auto& [k, m] : j.at("margins").items()) c.margins[std::stoi(k)] = m.get<double>();
    c.min_margin = j.at("min_margin").get<double>();
    c.threshold = j.at("threshold").get<double>();
    c.group_hash = j.at("group_hash").get<std::string>();
    if (j.contains("search")) {
      c.stats.words_examined = j["search"].value("words_examined", std::size_t{0});
      c.stats.max_length_reached = j["search"].value("max_length_reached", 0);
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::malformed_input, std::string("malformed certificate: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::malformed_input, "malformed certificate margin key");
  }
}

}  // namespace hlyap::certify
