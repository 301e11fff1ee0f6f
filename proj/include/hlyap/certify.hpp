#pragma once

// Typicality certificates: a loxodromic word theta and a connecting word z
// that moves every theta-invariant coordinate subspace off every
// complementary one, in all exterior powers at once.

#include "hlyap/error.hpp"
#include "hlyap/group.hpp"
#include "hlyap/projlin.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hlyap::certify {

using projlin::EigenData;
using projlin::Group;

inline constexpr double kDefaultThreshold = 1e-8;

struct SearchStats {
  std::size_t words_examined = 0;
  int max_length_reached = 0;
};

struct TypicalityCertificate {
  Word theta;
  Word z;
  std::map<int, double> margins;  ///< k -> min margin over pairs at level k
  double min_margin = 0.0;
  double threshold = kDefaultThreshold;
  std::string group_hash;
  SearchStats stats;
};

/// Raised by ams_search when no word up to the length bound passes.
class SearchExhausted : public Error {
 public:
  SearchExhausted(const std::string& what, std::optional<Word> best, double best_margin, SearchStats stats)
      : Error(ErrorCode::search_exhausted, what), best_(std::move(best)), best_margin_(best_margin), stats_(stats) {}
  const std::optional<Word>& best() const noexcept { return best_; }
  double best_margin() const noexcept { return best_margin_; }
  const SearchStats& stats() const noexcept { return stats_; }

 private:
  std::optional<Word> best_;
  double best_margin_;
  SearchStats stats_;
};

/// Shortest loxodromic reduced word in enumeration order. Throws
/// ErrorCode::search_exhausted, reporting how many biproximal words were
/// not loxodromic.
Word find_loxodromic(const Group& group, int max_len, double tol = projlin::kDefaultClusterTolerance);

/// Eigenlines of a loxodromic element as columns, descending modulus.
/// Throws ErrorCode::not_diagonalizable when the eigenbasis is not available.
Matrix eigenbasis(const EigenData& e);

/// |det[z F_S, G_T]| / (vol(z F_S) vol(G_T)), the product of the sines of the
/// principal angles between z F_S and G_T (columns of `basis` indexed by S, T).
double pair_margin(const Matrix& z, const Matrix& basis, const std::vector<int>& s, const std::vector<int>& t);

/// Same quantity through Plucker coordinates: wedge_power(z, k) applied to
/// the Plucker vector of F_S and paired with that of G_T.
double pair_margin_wedge(const Matrix& z, const Matrix& basis, const std::vector<int>& s, const std::vector<int>& t);

/// Minimum of pair_margin over all k-subsets S and (d-k)-subsets T of the
/// basis, 1 <= k <= d-1.
double transversality_margin(const Matrix& z, const Matrix& basis, int k);
double transversality_margin(const Matrix& z, const EigenData& theta, int k);
double transversality_margin_wedge(const Matrix& z, const Matrix& basis, int k);

/// Margins for every k of a candidate z.
std::map<int, double> all_margins(const Matrix& z, const Matrix& basis);

/// First reduced z (breadth-first) whose margins all reach `threshold`.
/// Throws SearchExhausted with the best candidate seen.
TypicalityCertificate ams_search(const Group& group, const Word& theta, int max_len,
                                 double threshold = kDefaultThreshold);

/// Replays theta and z: theta must be loxodromic, every margin must match the
/// stored value and reach the threshold, and the group hash must agree.
/// Throws for words that do not use the group's generators.
bool verify_certificate(const Group& group, const TypicalityCertificate& cert, double match_tol = 1e-12);

nlohmann::json to_json(const TypicalityCertificate& c, const Group& group);
TypicalityCertificate certificate_from_json(const nlohmann::json& j, const Group& group);

}  // namespace hlyap::certify
