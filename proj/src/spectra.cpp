#include "hlyap/spectra.hpp"

#include "hlyap/error.hpp"
#include "hlyap/hilbert.hpp"
#include "hlyap/io.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hlyap::spectra {
namespace {

void require_biproximal(const EigenData& e) {
  if (!projlin::is_biproximal(e)) throw Error(ErrorCode::not_biproximal, "no closed geodesic: element is not biproximal");
}

}  // namespace

double hilbert_length(const EigenData& e) {
  require_biproximal(e);
  return 0.5 * std::log(e.moduli.front() / e.moduli.back());
}

double hilbert_length(const GroupElement& g, double tol) { return hilbert_length(projlin::eigen_split(g, tol)); }

std::vector<ParallelExponent> parallel_exponents(const EigenData& e) {
  require_biproximal(e);
  const std::size_t n = e.moduli.size() - 1;
  const double l0 = e.moduli.front();
  const double ln = e.moduli.back();
  const double span = std::log(l0 / ln);
  std::vector<ParallelExponent> out;
  // Decreasing modulus gives increasing eta, so index order is ascending order.
  for (std::size_t i = 1; i < n; ++i) {
    const double li = e.moduli[i];
    out.push_back(ParallelExponent{-1.0 + 2.0 * std::log(l0 / li) / span, 1.0 + 2.0 * std::log(ln / li) / span, i,
                                   e.cluster_of(i)});
  }
  return out;
}

std::vector<ParallelExponent> parallel_exponents(const GroupElement& g, double tol) {
  return parallel_exponents(projlin::eigen_split(g, tol));
}

std::vector<double> cocycle_exponents_periodic(const EigenData& e) {
  const double t = hilbert_length(e);
  std::vector<double> out;
  for (auto it = e.moduli.rbegin(); it != e.moduli.rend(); ++it) out.push_back(std::log(*it) / t);
  return out;
}

std::vector<double> cocycle_exponents_periodic(const GroupElement& g, double tol) {
  return cocycle_exponents_periodic(projlin::eigen_split(g, tol));
}

std::vector<double> link_parallel_from_cocycle(std::vector<double> ell) {
  if (ell.size() < 2) throw Error(ErrorCode::invalid_argument, "need at least two cocycle exponents");
  std::sort(ell.begin(), ell.end(), std::greater<>());
  const double top = ell.front();
  const double bottom = ell.back();
  if (!(top > bottom)) throw Error(ErrorCode::degenerate, "degenerate cocycle spectrum: l_0 = l_n");
  std::vector<double> eta;
  for (std::size_t i = 1; i + 1 < ell.size(); ++i) eta.push_back(-1.0 + 2.0 * (top - ell[i]) / (top - bottom));
  return eta;
}

FlowExponents flow_exponents(const OrbitSpectrum& s) {
  FlowExponents f;
  for (auto it = s.eta.rbegin(); it != s.eta.rend(); ++it) {
    f.unstable.push_back(1.0 + *it);
    f.stable.push_back(-1.0 + *it);
  }
  return f;
}

std::vector<double> boundary_alpha_predicted(const OrbitSpectrum& s) {
  std::vector<double> a;
  for (double chi : flow_exponents(s).unstable) {
    if (!(chi > 0)) throw Error(ErrorCode::degenerate, "vanishing unstable exponent");
    a.push_back(2.0 / chi);
  }
  return a;
}

OrbitSpectrum orbit_spectrum(const GroupElement& g, double tol, double gap_tol) {
  return orbit_spectrum(projlin::eigen_split(g, tol), g.word(), gap_tol);
}

OrbitSpectrum orbit_spectrum(const EigenData& e, std::optional<Word> word, double gap_tol) {
  OrbitSpectrum s;
  s.word = std::move(word);
  s.length = hilbert_length(e);
  s.moduli = e.moduli;
  for (const auto& p : parallel_exponents(e)) {
    s.eta.push_back(p.eta);
    s.eta_index.push_back(p.modulus_index);
  }
  s.ell = cocycle_exponents_periodic(e);
  const auto f = flow_exponents(s);
  s.chi_u = f.unstable;
  s.chi_s = f.stable;
  s.alpha = boundary_alpha_predicted(s);
  s.simple = true;
  for (std::size_t i = 1; i < s.eta.size(); ++i) s.simple = s.simple && s.eta[i] - s.eta[i - 1] > gap_tol;
  s.loxodromic = projlin::is_loxodromic(e);
  s.diagonalizable = e.diagonalizable;
  return s;
}

TransportMap transport_matrix_closed_form(const EigenData& e) {
  require_biproximal(e);
  if (!e.diagonalizable) {
    throw Error(ErrorCode::not_diagonalizable, "exact transport undefined; use numeric transport");
  }
  TransportMap t;
  t.length = hilbert_length(e);
  const double root = std::sqrt(e.moduli.front() * e.moduli.back());
  const int width = e.dim - 2;
  t.basis.resize(e.dim, width);
  t.map = Matrix::Zero(width, width);
  Eigen::Index col = 0;
  for (std::size_t ci = 1; ci + 1 < e.clusters.size(); ++ci) {
    const auto& c = e.clusters[ci];
    const auto w = c.basis.cols();
    t.basis.middleCols(col, w) = c.basis;
    t.map.block(col, col, w, w) = root * c.block.inverse();
    t.block_scale.push_back(root / c.modulus);
    t.orthogonal_blocks.push_back(c.orthogonal_part ? Matrix(c.orthogonal_part->transpose()) : Matrix());
    t.clusters.push_back(ci);
    col += w;
  }
  return t;
}

TransportMap transport_matrix_closed_form(const GroupElement& g, double tol) {
  return transport_matrix_closed_form(projlin::eigen_split(g, tol));
}

projlin::AffineChart axis_chart(const EigenData& e, const Vector& interior) {
  require_biproximal(e);
  const int d = e.dim;
  const double u = e.top_left->dot(interior);
  const double v = e.bottom_left->dot(interior);
  if (u == 0.0 || v == 0.0) throw Error(ErrorCode::degenerate, "point lies on an invariant hyperplane");
  const Vector xp = u * *e.attracting;
  const Vector xm = v * *e.repelling;
  Matrix basis(d, d - 1);
  basis.col(0) = xp - xm;
  if (d > 2) basis.rightCols(d - 2) = *e.middle;
  return projlin::AffineChart(basis, xm);
}

TransportComparison numeric_vs_exact_transport(const hilbert::ConvexDomain& domain, const GroupElement& g, int samples,
                                               std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorCode::invalid_argument, "need at least one sample");
  const auto e = projlin::eigen_split(g);
  const auto tau = transport_matrix_closed_form(e);
  const auto chart = axis_chart(e, domain.chart().lift(domain.base_point()));
  const auto adapted = domain.in_chart(chart);
  const int n = adapted.dim();

  Vector x = Vector::Zero(n);
  x(0) = 0.5;
  if (!adapted.contains(x)) throw Error(ErrorCode::not_interior, "axis outside domain");
  const auto section = hilbert::boundary_points(adapted, x, Vector::Unit(n, 0));
  const double period = tau.length;
  const auto back = g.inverse();

  // Coordinates of the middle directions with respect to the transport basis.
  const Matrix& k = *e.middle;
  const Matrix to_basis = tau.basis.fullPivLu().solve(k);
  const Matrix tau_k = k.transpose() * tau.basis * tau.map * to_basis;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  TransportComparison out;
  out.samples = samples;
  for (int s = 0; s < samples; ++s) {
    Vector zy(n - 1);
    for (Eigen::Index i = 0; i < zy.size(); ++i) zy(i) = normal(rng);
    zy.normalize();
    Vector z = Vector::Zero(n);
    z.tail(n - 1) = zy;
    Vector tz = Vector::Zero(n);
    tz.tail(n - 1) = tau_k * zy;

    const double exact = 0.5 * hilbert::finsler_norm(adapted, x, tz);
    const double constant = hilbert::transport_norm_along_orbit(adapted, section, z, period);
    const double translated = hilbert::transport_norm_along_orbit(adapted, section, z, period, back);
    out.max_rel_error_constant = std::max(out.max_rel_error_constant, std::abs(constant - exact) / exact);
    out.max_rel_error_translated = std::max(out.max_rel_error_translated, std::abs(translated - exact) / exact);
  }
  out.max_rel_error = std::max(out.max_rel_error_constant, out.max_rel_error_translated);
  return out;
}

SimplicityReport simplicity_report(const projlin::Group& group, int max_len, double tol, double gap_tol, int bins) {
  if (bins < 1) throw Error(ErrorCode::invalid_argument, "need at least one histogram bin");
  SimplicityReport r;
  r.min_abs_eta = std::numeric_limits<double>::infinity();
  group.for_each_reduced(max_len, [&](const GroupElement& g) {
    ++r.words;
    const auto e = projlin::eigen_split(g, tol);
    if (!projlin::is_biproximal(e)) return;
    auto s = orbit_spectrum(e, g.word(), gap_tol);
    ++r.biproximal;
    if (s.simple) ++r.simple;
    if (s.loxodromic) {
      ++r.loxodromic;
      if (s.simple) ++r.loxodromic_simple;
    }
    for (std::size_t i = 1; i < s.eta.size(); ++i) {
      const double gap = std::max(0.0, s.eta[i] - s.eta[i - 1]);
      r.min_gap = r.min_gap ? std::min(*r.min_gap, gap) : gap;
    }
    for (double eta : s.eta) {
      r.min_abs_eta = std::min(r.min_abs_eta, std::abs(eta));
      r.max_abs_eta = std::max(r.max_abs_eta, std::abs(eta));
    }
    r.spectra.push_back(std::move(s));
  });
  if (r.biproximal == 0) {
    throw Error(ErrorCode::no_proximal_elements, "no proximal elements up to length " + std::to_string(max_len));
  }
  r.simple_fraction = static_cast<double>(r.simple) / static_cast<double>(r.biproximal);
  r.loxodromic_simple_fraction =
      r.loxodromic ? static_cast<double>(r.loxodromic_simple) / static_cast<double>(r.loxodromic) : 0.0;
  if (!std::isfinite(r.min_abs_eta)) r.min_abs_eta = 0.0;

  r.histogram.assign(static_cast<std::size_t>(bins), 0);
  for (int b = 0; b <= bins; ++b) r.histogram_edges.push_back(-1.0 + 2.0 * b / bins);
  for (const auto& s : r.spectra) {
    for (double eta : s.eta) {
      const int b = std::clamp(static_cast<int>(std::floor((eta + 1.0) * 0.5 * bins)), 0, bins - 1);
      ++r.histogram[static_cast<std::size_t>(b)];
    }
  }
  return r;
}

nlohmann::json to_json(const OrbitSpectrum& s, const projlin::Group* group) {
  nlohmann::json j;
  if (s.word) {
    j["word"] = group ? nlohmann::json(group->format_word(*s.word)) : nlohmann::json(*s.word);
  }
  j["length"] = s.length;
  j["moduli"] = s.moduli;
  j["eta"] = s.eta;
  j["eta_index"] = s.eta_index;
  j["chi_u"] = s.chi_u;
  j["chi_s"] = s.chi_s;
  j["ell"] = s.ell;
  j["alpha"] = s.alpha;
  j["simple"] = s.simple;
  j["loxodromic"] = s.loxodromic;
  j["diagonalizable"] = s.diagonalizable;
  return j;
}

nlohmann::json summary_json(const SimplicityReport& r) {
  nlohmann::json j;
  j["words"] = r.words;
  j["biproximal"] = r.biproximal;
  j["loxodromic"] = r.loxodromic;
  j["simple"] = r.simple;
  j["loxodromic_simple"] = r.loxodromic_simple;
  j["simple_fraction"] = r.simple_fraction;
  j["loxodromic_simple_fraction"] = r.loxodromic_simple_fraction;
  j["min_gap"] = r.min_gap ? nlohmann::json(*r.min_gap) : nlohmann::json(nullptr);
  j["min_abs_eta"] = r.min_abs_eta;
  j["max_abs_eta"] = r.max_abs_eta;
  j["riemannian_signature"] = r.max_abs_eta <= kDefaultGapTolerance;
  j["histogram_edges"] = r.histogram_edges;
  j["histogram"] = r.histogram;
  return j;
}

std::string spectrum_csv(const std::vector<OrbitSpectrum>& spectra, const projlin::Group& group) {
  io::CsvWriter csv({"word", "T", "lambda", "eta", "chi_u", "chi_s", "alpha", "simple"});
  for (const auto& s : spectra) {
    csv.row({s.word ? group.format_word(*s.word) : "", io::format_double(s.length), io::join(s.moduli),
             io::join(s.eta), io::join(s.chi_u), io::join(s.chi_s), io::join(s.alpha), s.simple ? "1" : "0"});
  }
  return csv.str();
}

std::string histogram_csv(const SimplicityReport& r) {
  io::CsvWriter csv({"eta_lo", "eta_hi", "count"});
  for (std::size_t b = 0; b < r.histogram.size(); ++b) {
    csv.row({io::format_double(r.histogram_edges[b]), io::format_double(r.histogram_edges[b + 1]),
             std::to_string(r.histogram[b])});
  }
  return csv.str();
}

}  // namespace hlyap::spectra
