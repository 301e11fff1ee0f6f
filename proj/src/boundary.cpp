#include "hlyap/boundary.hpp"

#include "hlyap/error.hpp"
#include "hlyap/io.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hlyap::boundary {
namespace {

Matrix null_space(const Matrix& rows) {
  Eigen::JacobiSVD<Matrix> svd(rows, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(rows.cols() - rows.rows());
}

Vector smallest_singular_vector(const Matrix& rows) {
  Eigen::JacobiSVD<Matrix> svd(rows, Eigen::ComputeFullV);
  return svd.matrixV().col(svd.matrixV().cols() - 1);
}

Vector tangent_normal(const ConvexDomain& domain, const Vector& x) {
  if (const auto* e = domain.as_ellipsoid()) return e->shape * (x - e->center);
  const auto* h = domain.as_halfspaces() ? domain.as_halfspaces() : &domain.as_polygon()->edges;
  const double tol = 1e-9 * std::max(1.0, domain.diameter());
  Vector sum = Vector::Zero(x.size());
  int active = 0;
  for (Eigen::Index j = 0; j < h->normals.rows(); ++j) {
    if (std::abs(h->normals.row(j).dot(x) - h->offsets(j)) <= tol) {
      sum += h->normals.row(j).transpose();
      ++active;
    }
  }
  if (active == 0) throw Error(ErrorCode::tangent_estimation, "point is not on the boundary");
  return sum;
}

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_stderr = 0.0;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  Line l;
  l.slope = sxy / sxx;
  l.intercept = my - l.slope * mx;
  const double ssr = std::max(0.0, syy - l.slope * sxy);
  l.r2 = syy > 0 ? 1.0 - ssr / syy : 1.0;
  l.slope_stderr = n > 2 ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
  return l;
}

}  // namespace

AdaptedChart adapted_chart(const Vector& x_plus, const Vector& x_minus, const Vector& tau_plus,
                           const Vector& tau_minus, const Vector& interior, double axis_length) {
  if (!(axis_length > 0)) throw Error(ErrorCode::invalid_argument, "axis length must be positive");
  const double tp = tau_minus.dot(x_plus);
  const double tm = tau_plus.dot(x_minus);
  if (tp == 0.0 || tm == 0.0) throw Error(ErrorCode::degenerate, "tangent hyperplane contains the opposite endpoint");
  const double a = tau_minus.dot(interior) / tp;
  const double b = tau_plus.dot(interior) / tm;
  if (!(a * b > 0)) throw Error(ErrorCode::not_interior, "interior point is not between the tangent hyperplanes");
  const Vector xp = a * x_plus;
  const Vector xm = b * x_minus;
  const auto d = x_plus.size();
  Matrix constraints(2, d);
  constraints.row(0) = tau_plus.transpose();
  constraints.row(1) = tau_minus.transpose();
  Matrix basis(d, d - 1);
  basis.col(0) = 2.0 * (xp - xm) / axis_length;
  if (d > 2) basis.rightCols(d - 2) = null_space(constraints);
  return {AffineChart(basis, 2.0 * xm), axis_length};
}

AdaptedChart adapted_chart(const ConvexDomain& domain, const Vector& x_plus, const Vector& x_minus) {
  const auto& chart = domain.chart();
  const Vector tp = chart.hyperplane_covector(tangent_normal(domain, x_plus), x_plus);
  const Vector tm = chart.hyperplane_covector(tangent_normal(domain, x_minus), x_minus);
  return adapted_chart(chart.lift(x_plus), chart.lift(x_minus), tp, tm, chart.lift(domain.base_point()),
                       (x_plus - x_minus).norm());
}

AdaptedChart adapted_chart(const domainbuild::LimitSetSample& sample, const Vector& x_plus, const Vector& x_minus,
                           int min_neighbors, double radius) {
  if (sample.points.empty()) throw Error(ErrorCode::tangent_estimation, "empty limit-set sample");
  Vector lo = sample.points.front();
  Vector hi = lo;
  Vector centroid = Vector::Zero(lo.size());
  for (const auto& p : sample.points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
    centroid += p;
  }
  centroid /= static_cast<double>(sample.points.size());
  const double reach = radius * (hi - lo).norm();
  auto covector = [&](const Vector& x) {
    std::vector<Vector> near;
    for (const auto& p : sample.points) {
      const double d = (p - x).norm();
      if (d > 1e-14 * (1.0 + x.norm()) && d <= reach) near.push_back(p - x);
    }
    if (static_cast<int>(near.size()) < min_neighbors) {
      throw Error(ErrorCode::tangent_estimation, "only " + std::to_string(near.size()) +
                                                     " boundary samples near the point, need " +
                                                     std::to_string(min_neighbors));
    }
    Matrix rows(static_cast<Eigen::Index>(near.size()), x.size());
    for (std::size_t i = 0; i < near.size(); ++i) rows.row(static_cast<Eigen::Index>(i)) = near[i].transpose();
    return sample.chart.hyperplane_covector(smallest_singular_vector(rows), x);
  };
  const auto& chart = sample.chart;
  return adapted_chart(chart.lift(x_plus), chart.lift(x_minus), covector(x_plus), covector(x_minus),
                       chart.lift(centroid), (x_plus - x_minus).norm());
}

AdaptedChart adapted_chart(const EigenData& e, const AffineChart& data_chart, const Vector& interior) {
  if (!projlin::is_biproximal(e)) throw Error(ErrorCode::not_biproximal, "element is not biproximal");
  const Vector& xp = *e.attracting;
  const Vector& xm = *e.repelling;
  if (!data_chart.in_chart(xp) || !data_chart.in_chart(xm)) {
    throw Error(ErrorCode::leaves_chart, "fixed points are not in the data chart");
  }
  const double length = (data_chart.to_chart(xp) - data_chart.to_chart(xm)).norm();
  return adapted_chart(xp, xm, *e.bottom_left, *e.top_left, data_chart.lift(interior), length);
}

std::vector<GraphSample> local_graph_samples(const std::vector<Vector>& points, const AffineChart& data_chart,
                                             const AdaptedChart& adapted, const Window& window) {
  std::vector<GraphSample> out;
  const double l = adapted.axis_length;
  for (const auto& p : points) {
    const Vector lifted = data_chart.lift(p);
    if (!adapted.chart.in_chart(lifted)) continue;
    const Vector q = adapted.chart.to_chart(lifted);
    GraphSample s{q.tail(q.size() - 1) / l, (l - q(0)) / l};
    const double r = s.h.norm();
    if (s.f < 0.5 && r >= window.h_min && r <= window.h_max) out.push_back(std::move(s));
  }
  if (out.empty()) throw Error(ErrorCode::insufficient_samples, "no boundary samples in the window");
  return out;
}

std::vector<GraphSample> local_graph_samples(const ConvexDomain& domain, const AdaptedChart& adapted,
                                             const Vector& direction, const Window& window, int per_decade) {
  if (!(window.h_min > 0) || !(window.h_max > window.h_min)) throw Error(ErrorCode::invalid_argument, "invalid window");
  const auto local = domain.in_chart(adapted.chart);
  const double l = adapted.axis_length;
  const Vector dir = direction / direction.norm();
  const int steps = std::max(2, static_cast<int>(std::ceil(per_decade * std::log10(window.h_max / window.h_min))));
  std::vector<GraphSample> out;
  for (int i = 0; i <= steps; ++i) {
    const double s = window.h_min * std::pow(window.h_max / window.h_min, static_cast<double>(i) / steps);
    for (double sign : {1.0, -1.0}) {
      Vector start(local.dim());
      start(0) = 0.5 * l;
      start.tail(local.dim() - 1) = sign * s * l * dir;
      if (!local.contains(start)) continue;
      const double u = start(0) + local.ray_parameters(start, Vector::Unit(local.dim(), 0)).second;
      out.push_back(GraphSample{sign * s * dir, (l - u) / l});
    }
  }
  if (out.empty()) throw Error(ErrorCode::insufficient_samples, "no boundary samples in the window");
  return out;
}

DirectionFit alpha_fit(const std::vector<GraphSample>& samples, const Matrix& directions, Eigen::Index first,
                       Eigen::Index width, const FitOptions& options) {
  const auto& w = options.window;
  if (!(w.h_min > 0) || !(w.h_max > w.h_min)) throw Error(ErrorCode::invalid_argument, "invalid window");
  if (first < 0 || width < 1 || first + width > directions.cols()) {
    throw Error(ErrorCode::invalid_argument, "direction block out of range");
  }
  const auto solver = directions.fullPivLu();

  // Samples whose offset lies in the chosen block, ordered by |h|.
  struct Item {
    Vector h;
    Vector c;
    double r;
    double f;
  };
  std::vector<Item> items;
  for (const auto& s : samples) {
    const double r = s.h.norm();
    if (!(r > 0) || !(s.f > 0) || r < w.h_min / (1.0 + options.pair_tol) || r > w.h_max * (1.0 + options.pair_tol)) {
      continue;
    }
    const Vector c = solver.solve(s.h);
    const Vector in_block = directions.middleCols(first, width) * c.segment(first, width);
    if ((s.h - in_block).norm() > options.off_axis_tol * r) continue;
    items.push_back(Item{s.h, c.segment(first, width), r, s.f});
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.r < b.r; });

  std::vector<double> xs, ys;
  double h_lo = 0, h_hi = 0;
  auto take = [&](double r, double value) {
    if (xs.empty()) h_lo = h_hi = r;
    h_lo = std::min(h_lo, r);
    h_hi = std::max(h_hi, r);
    xs.push_back(std::log(r));
    ys.push_back(std::log(value));
  };
  for (const auto& p : items) {
    if (p.r < w.h_min || p.r > w.h_max) continue;
    // Each pair once: p on the positive side of the block's first coordinate.
    const bool positive = p.c(0) > 0 || (p.c(0) == 0 && width > 1 && p.c(1) > 0);
    if (!positive) continue;
    const double tol = options.pair_tol * p.r;
    auto lo = std::lower_bound(items.begin(), items.end(), p.r - tol, [](const Item& a, double v) { return a.r < v; });
    const Item* best = nullptr;
    double best_d = tol;
    for (auto it = lo; it != items.end() && it->r <= p.r + tol; ++it) {
      const double d = (it->h + p.h).norm();
      if (d <= best_d) {
        best_d = d;
        best = &*it;
      }
    }
    if (best) take(p.r, 0.5 * (p.f + best->f));
  }

  DirectionFit fit;
  fit.direction = directions.middleCols(first, width).col(0).normalized();
  if (static_cast<int>(xs.size()) < options.min_pairs && options.allow_one_sided) {
    xs.clear();
    ys.clear();
    for (const auto& p : items) {
      if (p.r >= w.h_min && p.r <= w.h_max) take(p.r, p.f);
    }
    fit.one_sided = true;
  }
  if (static_cast<int>(xs.size()) < options.min_pairs) {
    throw Error(ErrorCode::insufficient_samples, "only " + std::to_string(xs.size()) + " symmetric pairs in the window, need " +
                                                     std::to_string(options.min_pairs));
  }
  if (std::log10(h_hi / h_lo) < options.min_decades) throw Error(ErrorCode::window_too_narrow, "window too narrow");
  const auto line = least_squares(xs, ys);
  fit.alpha = line.slope;
  fit.intercept = line.intercept;
  fit.r2 = line.r2;
  fit.alpha_stderr = line.slope_stderr;
  fit.pairs = static_cast<int>(xs.size());
  fit.h_lo = h_lo;
  fit.h_hi = h_hi;
  return fit;
}

DirectionFit alpha_fit(const std::vector<GraphSample>& samples, const FitOptions& options) {
  return alpha_fit(samples, Matrix::Identity(1, 1), 0, 1, options);
}

AlphaFitReport alpha_compare(const domainbuild::LimitSetSample& sample, const GroupElement& g,
                             const FitOptions& options, int max_iterations) {
  if (sample.points.empty()) throw Error(ErrorCode::insufficient_samples, "empty limit-set sample");
  const auto e = projlin::eigen_split(g);
  if (!projlin::is_biproximal(e)) throw Error(ErrorCode::not_biproximal, "element is not biproximal");
  if (!e.diagonalizable) throw Error(ErrorCode::not_diagonalizable, "eigen-directions unavailable");
  Vector centroid = Vector::Zero(sample.points.front().size());
  for (const auto& p : sample.points) centroid += p;
  centroid /= static_cast<double>(sample.points.size());
  const auto adapted = adapted_chart(e, sample.chart, centroid);
  const int n = adapted.chart.dim();
  const double l = adapted.axis_length;

  AlphaFitReport report;
  report.word = g.word();
  report.point = sample.chart.to_chart(*e.attracting);
  report.window = options.window;

  // g is diagonal in the adapted frame: X+ and X- scale by the extreme
  // eigenvalues and the tangential block by K^T g K.
  const Matrix k = adapted.chart.basis().rightCols(n - 1);
  const Matrix c = k.transpose() * g.matrix() * k;
  const double top = e.eigenvalues.front().real();
  const double bottom = e.eigenvalues.back().real();
  std::vector<GraphSample> dense;
  for (const auto& p : sample.points) {
    const Vector q = adapted.chart.frame_inverse() * sample.chart.lift(p);
    double a = 2.0 * q(0) / l;
    double b = 2.0 * q(n) - a;
    Vector y = q.segment(1, n - 1);
    for (int it = 0; it <= max_iterations; ++it) {
      const double s = a + b;
      if (a * b >= 0 && s != 0.0) {
        GraphSample gs{2.0 * y / (s * l), b / s};
        const double r = gs.h.norm();
        if (gs.f < 0.5 && r >= options.window.h_min / 2 && r <= 2 * options.window.h_max) dense.push_back(gs);
        if (r < options.window.h_min / 2 || gs.f == 0.0) break;
      }
      a *= top;
      b *= bottom;
      y = c * y;
      const double scale = std::max({std::abs(a), std::abs(b), y.norm()});
      a /= scale;
      b /= scale;
      y /= scale;
    }
  }

  // Tangential basis made of the interior eigenspaces.
  Matrix directions(n - 1, n - 1);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> blocks;
  std::vector<double> moduli;
  Eigen::Index col = 0;
  for (std::size_t ci = 1; ci + 1 < e.clusters.size(); ++ci) {
    const auto& cl = e.clusters[ci];
    directions.middleCols(col, cl.basis.cols()) = k.transpose() * cl.basis;
    blocks.emplace_back(col, cl.basis.cols());
    moduli.push_back(cl.modulus);
    col += cl.basis.cols();
  }

  report.ok = true;
  const double span = std::log(e.moduli.front() / e.moduli.back());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const double predicted = span / std::log(e.moduli.front() / moduli[i]);
    report.alpha_predicted.push_back(predicted);
    DirectionFit fit;
    std::string failure;
    try {
      fit = alpha_fit(dense, directions, blocks[i].first, blocks[i].second, options);
      if (fit.r2 < options.r2_min) failure = "fit quality r2 below threshold";
    } catch (const Error& err) {
      failure = err.what();
      fit.direction = directions.col(blocks[i].first).normalized();
    }
    report.rel_error.push_back(failure.empty() ? std::abs(fit.alpha - predicted) / predicted : std::nan(""));
    report.ok = report.ok && failure.empty();
    report.failures.push_back(failure);
    report.fits.push_back(fit);
    std::vector<GraphSample> used;
    for (const auto& s : dense) {
      const Vector coords = directions.fullPivLu().solve(s.h);
      const Vector in_block = directions.middleCols(blocks[i].first, blocks[i].second) *
                              coords.segment(blocks[i].first, blocks[i].second);
      if ((s.h - in_block).norm() <= options.off_axis_tol * s.h.norm()) used.push_back(s);
    }
    report.samples.push_back(std::move(used));
  }
  return report;
}

nlohmann::json to_json(const AlphaFitReport& r, const projlin::Group* group) {
  nlohmann::json j;
  if (r.word) j["word"] = group ? nlohmann::json(group->format_word(*r.word)) : nlohmann::json(*r.word);
  j["point"] = io::to_json(r.point);
  j["window"] = {{"h_min", r.window.h_min}, {"h_max", r.window.h_max}};
  auto fits = nlohmann::json::array();
  for (std::size_t i = 0; i < r.fits.size(); ++i) {
    const auto& f = r.fits[i];
    nlohmann::json fj{{"direction", io::to_json(f.direction)},
                      {"alpha_predicted", r.alpha_predicted[i]},
                      {"failure", r.failures[i]}};
    if (r.failures[i].empty() || f.pairs > 0) {
      fj["alpha_fitted"] = f.alpha;
      fj["alpha_stderr"] = f.alpha_stderr;
      fj["r2"] = f.r2;
      fj["pairs"] = f.pairs;
      fj["h_range"] = {f.h_lo, f.h_hi};
      fj["one_sided"] = f.one_sided;
    }
    if (r.failures[i].empty()) fj["rel_error"] = r.rel_error[i];
    fits.push_back(fj);
  }
  j["fits"] = fits;
  j["ok"] = r.ok;
  return j;
}

std::string samples_csv(const AlphaFitReport& r) {
  io::CsvWriter csv({"direction", "h", "f"});
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    const Vector& d = r.fits[i].direction;
    for (const auto& s : r.samples[i]) {
      const double signed_h = s.h.dot(d) >= 0 ? s.h.norm() : -s.h.norm();
      csv.row({std::to_string(i), io::format_double(signed_h), io::format_double(s.f)});
    }
  }
  return csv.str();
}

}  // namespace hlyap::boundary
