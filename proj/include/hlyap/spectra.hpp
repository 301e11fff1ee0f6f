#pragma once

// Exact quantities of the closed orbit of a biproximal element: Hilbert
// length, parallel / flow / cocycle exponents, predicted boundary exponents
// and the closed-form parallel transport over one period.

#include "hlyap/domain.hpp"
#include "hlyap/group.hpp"
#include "hlyap/projlin.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hlyap::spectra {

using projlin::EigenData;
using projlin::GroupElement;

/// Default separation below which two parallel exponents count as equal.
inline constexpr double kDefaultGapTolerance = 1e-6;

/// One parallel exponent, attached to the modulus index i (1 <= i <= n-1, in
/// the descending-modulus convention) and to its invariant subspace E_i.
struct ParallelExponent {
  double eta = 0.0;        ///< -1 + 2 log(l_0/l_i) / log(l_0/l_n)
  double eta_alt = 0.0;    ///< 1 + 2 log(l_n/l_i) / log(l_0/l_n)
  std::size_t modulus_index = 0;
  std::size_t cluster = 0; ///< index into EigenData::clusters
};

struct OrbitSpectrum {
  std::optional<Word> word;
  double length = 0.0;              ///< Hilbert length T
  std::vector<double> moduli;       ///< descending
  std::vector<double> eta;          ///< ascending, with multiplicity
  std::vector<std::size_t> eta_index;  ///< descending-modulus index of each eta
  std::vector<double> chi_u;        ///< 1 + eta, descending
  std::vector<double> chi_s;        ///< -1 + eta, in the order of chi_u
  std::vector<double> ell;          ///< log(modulus) / T, ascending
  std::vector<double> alpha;        ///< 2 / chi_u, ascending
  bool simple = false;              ///< eta pairwise separated by the gap tolerance
  bool loxodromic = false;
  bool diagonalizable = false;
};

/// 1/2 log(l_0 / l_n). Throws ErrorCode::not_biproximal ("no closed geodesic").
double hilbert_length(const EigenData& e);
double hilbert_length(const GroupElement& g, double tol = projlin::kDefaultClusterTolerance);

std::vector<ParallelExponent> parallel_exponents(const EigenData& e);
std::vector<ParallelExponent> parallel_exponents(const GroupElement& g, double tol = projlin::kDefaultClusterTolerance);

/// log(mu_i) / T with mu the moduli in ascending order.
std::vector<double> cocycle_exponents_periodic(const EigenData& e);
std::vector<double> cocycle_exponents_periodic(const GroupElement& g, double tol = projlin::kDefaultClusterTolerance);

/// eta_i = -1 + 2 (l_0 - l_i) / (l_0 - l_n) with l sorted from largest to
/// smallest (the input order is irrelevant); returns eta ascending.
/// Throws ErrorCode::degenerate when all l coincide.
std::vector<double> link_parallel_from_cocycle(std::vector<double> ell);

struct FlowExponents {
  std::vector<double> unstable;  ///< 1 + eta, descending
  std::vector<double> stable;    ///< -1 + eta, same order
};
FlowExponents flow_exponents(const OrbitSpectrum& s);

/// 2 / chi_u = log(l_0/l_n) / log(l_0/l_i), ascending.
std::vector<double> boundary_alpha_predicted(const OrbitSpectrum& s);

OrbitSpectrum orbit_spectrum(const GroupElement& g, double tol = projlin::kDefaultClusterTolerance,
                             double gap_tol = kDefaultGapTolerance);
OrbitSpectrum orbit_spectrum(const EigenData& e, std::optional<Word> word, double gap_tol = kDefaultGapTolerance);

/// Transport over one period on the sum of the interior E_i: block i is
/// sqrt(l_0 l_n) B_i^{-1} where B_i = l_i U_i is g on E_i.
struct TransportMap {
  Matrix basis;                   ///< ambient columns spanning the sum of the E_i
  Matrix map;                     ///< block diagonal, in `basis` coordinates
  std::vector<double> block_scale;  ///< sqrt(l_0 l_n) / l_i per interior cluster
  std::vector<Matrix> orthogonal_blocks;  ///< U_i^{-1} where available
  std::vector<std::size_t> clusters;      ///< EigenData cluster of each block
  double length = 0.0;
};

/// Throws ErrorCode::not_diagonalizable ("exact transport undefined; use
/// numeric transport") and ErrorCode::not_biproximal.
TransportMap transport_matrix_closed_form(const EigenData& e);
TransportMap transport_matrix_closed_form(const GroupElement& g, double tol = projlin::kDefaultClusterTolerance);

/// Chart adapted to the axis of g: x^- at the origin, x^+ at e_1, the interior
/// E_i along the remaining axes (orthonormal basis), so the tangent
/// hyperplanes g fixes at x^+ and x^- are u = 1 and u = 0. The sign of
/// x^+ and x^- is chosen so that `interior` (ambient) has u, v > 0.
projlin::AffineChart axis_chart(const EigenData& e, const Vector& interior);

struct TransportComparison {
  double max_rel_error = 0.0;     ///< worst of both numeric forms
  double max_rel_error_constant = 0.0;    ///< f F(x_T, Z) against exact
  double max_rel_error_translated = 0.0;  ///< f F(g^-1 x_T, dg^-1 Z) against exact
  int samples = 0;
};

/// Compares, for `samples` random Z in the sum of the E_i at the axis point
/// (1/2, 0) of the adapted chart, the numerically transported norm after one
/// period with 1/2 F(x, tau Z) for the closed-form transport tau.
/// Throws ErrorCode::not_interior ("axis outside domain").
TransportComparison numeric_vs_exact_transport(const hilbert::ConvexDomain& domain, const GroupElement& g, int samples,
                                               std::uint64_t seed = 1);

struct SimplicityReport {
  std::size_t words = 0;
  std::size_t biproximal = 0;
  std::size_t loxodromic = 0;
  std::size_t simple = 0;
  std::size_t loxodromic_simple = 0;
  double simple_fraction = 0.0;
  double loxodromic_simple_fraction = 0.0;
  std::optional<double> min_gap;   ///< undefined with a single exponent per word
  double min_abs_eta = 0.0;
  double max_abs_eta = 0.0;
  std::vector<double> histogram_edges;
  std::vector<std::size_t> histogram;
  std::vector<OrbitSpectrum> spectra;
};

/// Throws ErrorCode::no_proximal_elements when no word is biproximal.
SimplicityReport simplicity_report(const projlin::Group& group, int max_len,
                                   double tol = projlin::kDefaultClusterTolerance,
                                   double gap_tol = kDefaultGapTolerance, int bins = 20);

nlohmann::json to_json(const OrbitSpectrum& s, const projlin::Group* group = nullptr);
nlohmann::json summary_json(const SimplicityReport& r);
std::string spectrum_csv(const std::vector<OrbitSpectrum>& spectra, const projlin::Group& group);
std::string histogram_csv(const SimplicityReport& r);

}  // namespace hlyap::spectra
