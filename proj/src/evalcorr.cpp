// Copyright 2026 The lapvqa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lapvqa/evalcorr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace lapvqa {

Eigen::VectorXd LogisticFit::operator()(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = logistic5(beta, x(i));
  return out;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double median_of(Eigen::VectorXd v) {
  std::sort(v.data(), v.data() + v.size());
  const Eigen::Index n = v.size();
  return n % 2 == 1 ? v(n / 2) : 0.5 * (v(n / 2 - 1) + v(n / 2));
}

double stddev_of(const Eigen::VectorXd& v) {
  return std::sqrt((v.array() - v.mean()).square().sum() / static_cast<double>(v.size()));
}

/// 1 / (1 + exp(z)) without overflow.
double inv_logistic(double z) {
  if (z > 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

void predict(const Beta& b, const Eigen::VectorXd& x, Eigen::VectorXd& f, Eigen::MatrixXd* jac) {
  f.resize(x.size());
  if (jac) jac->resize(x.size(), 5);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double dx = x(i) - b(2);
    const double l = inv_logistic(b(1) * dx);
    f(i) = b(0) * (0.5 - l) + b(3) * x(i) + b(4);
    if (jac) {
      const double s = l * (1.0 - l);  // -dl/dz
      (*jac)(i, 0) = 0.5 - l;
      (*jac)(i, 1) = b(0) * s * dx;
      (*jac)(i, 2) = -b(0) * s * b(1);
      (*jac)(i, 3) = x(i);
      (*jac)(i, 4) = 1.0;
    }
  }
}

double sse_at(const Beta& b, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  Eigen::VectorXd f;
  predict(b, x, f, nullptr);
  const double s = (y - f).squaredNorm();
  return std::isfinite(s) ? s : std::numeric_limits<double>::infinity();
}

LogisticFit levenberg_marquardt(Beta beta, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                const FitOptions& opt) {
  LogisticFit fit;
  double sse = sse_at(beta, x, y);
  double lambda = 1e-3;
  Eigen::VectorXd f;
  Eigen::MatrixXd jac;
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    if (sse == 0.0) {
      fit.converged = true;
      break;
    }
    predict(beta, x, f, &jac);
    const Eigen::VectorXd r = y - f;
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;
    const double diag_floor = 1e-12 * std::max(1.0, jtj.diagonal().maxCoeff());
    bool accepted = false;
    while (lambda < 1e16) {
      Eigen::MatrixXd a = jtj;
      for (int k = 0; k < 5; ++k) a(k, k) += lambda * std::max(jtj(k, k), diag_floor);
      const Beta step = a.ldlt().solve(jtr);
      const Beta candidate = beta + step;
      const double candidate_sse = step.allFinite() ? sse_at(candidate, x, y) : std::numeric_limits<double>::infinity();
      if (candidate_sse < sse) {
        const double rel = (sse - candidate_sse) / sse;
        beta = candidate;
        sse = candidate_sse;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (rel < opt.relative_tolerance) fit.converged = true;
        break;
      }
      lambda *= 4.0;
    }
    if (!accepted) {
      // No descent direction left at machine precision: a stationary point.
      fit.converged = true;
      break;
    }
    if (fit.converged) break;
  }
  fit.beta = beta;
  fit.iterations = it;
  fit.rmse = std::sqrt(sse / static_cast<double>(x.size()));
  return fit;
}

}  // namespace

Beta initial_beta(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  Beta b;
  b << y.maxCoeff() - y.minCoeff(), 1.0 / stddev_of(x), median_of(x), 0.0, y.mean();
  return b;
}

LogisticFit fit_logistic(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const FitOptions& options) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_logistic: x and y differ in length");
  if (x.size() < 6) throw DegenerateInput("fit_logistic needs at least 6 points");
  if (!x.allFinite() || !y.allFinite()) throw DegenerateInput("fit_logistic: non-finite input");
  if (x.maxCoeff() == x.minCoeff()) throw DegenerateInput("fit_logistic: x is constant");

  LogisticFit best = levenberg_marquardt(initial_beta(x, y), x, y, options);

  // Second start on the least-squares line (b1 = 0), so the result never fits
  // worse than a straight line.
  const double xm = x.mean(), ym = y.mean();
  const double slope = ((x.array() - xm) * (y.array() - ym)).sum() / (x.array() - xm).square().sum();
  Beta linear;
  linear << 0.0, 1.0 / stddev_of(x), median_of(x), slope, ym - slope * xm;
  const LogisticFit alt = levenberg_marquardt(linear, x, y, options);
  if (alt.rmse < best.rmse) best = alt;
  return best;
}

double plcc(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw std::invalid_argument("plcc: inputs differ in length");
  if (x.size() < 3) throw DegenerateInput("plcc needs at least 3 points");
  const Eigen::ArrayXd dx = x.array() - x.mean();
  const Eigen::ArrayXd dy = y.array() - y.mean();
  const double sxx = dx.square().sum(), syy = dy.square().sum();
  if (!(sxx > 0.0) || !(syy > 0.0)) throw DegenerateInput("plcc: constant input");
  return std::clamp((dx * dy).sum() / std::sqrt(sxx * syy), -1.0, 1.0);
}

Eigen::VectorXd midranks(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return v(a) < v(b); });
  Eigen::VectorXd ranks(n);
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i;
    while (j + 1 < n && v(order[static_cast<std::size_t>(j + 1)]) == v(order[static_cast<std::size_t>(i)])) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (Eigen::Index k = i; k <= j; ++k) ranks(order[static_cast<std::size_t>(k)]) = r;
    i = j + 1;
  }
  return ranks;
}

double srocc(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw std::invalid_argument("srocc: inputs differ in length");
  return plcc(midranks(x), midranks(y));
}

std::string_view to_string(Subset s) {
  switch (s) {
    case Subset::Noise: return "Noise";
    case Subset::DefocusBlur: return "DefocusBlur";
    case Subset::MotionBlur: return "MotionBlur";
    case Subset::UnevenIllumination: return "UnevenIllumination";
    case Subset::Smoke: return "Smoke";
    case Subset::Overall: return "Overall";
  }
  return "?";
}

std::string_view column_title(Subset s) {
  switch (s) {
    case Subset::Noise: return "Noise";
    case Subset::DefocusBlur: return "Defocus Blur";
    case Subset::MotionBlur: return "Motion Blur";
    case Subset::UnevenIllumination: return "Uneven illumination";
    case Subset::Smoke: return "Smoke";
    case Subset::Overall: return "Overall";
  }
  return "?";
}

std::optional<Subset> parse_subset(std::string_view s) {
  for (Subset x : kAllSubsets) {
    if (to_string(x) == s) return x;
  }
  return std::nullopt;
}

const CorrelationRow* CorrelationReport::find(Metric metric, Subset subset) const {
  for (const auto& r : rows) {
    if (r.metric == metric && r.subset == subset) return &r;
  }
  return nullptr;
}

namespace {

std::string fmt4(double v) {
  if (!std::isfinite(v)) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string fmt_full(double v) {
  if (!std::isfinite(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Subset subset_of(DistortionKind k) { return static_cast<Subset>(static_cast<int>(k)); }

}  // namespace

std::string CorrelationReport::to_csv() const {
  std::ostringstream os;
  os << "cohort,metric,subset,plcc,srocc,n_points,beta1,beta2,beta3,beta4,beta5,converged\n";
  for (const auto& r : rows) {
    os << to_string(cohort) << ',' << to_string(r.metric) << ',' << to_string(r.subset) << ',' << fmt_full(r.plcc)
       << ',' << fmt_full(r.srocc) << ',' << r.n_points;
    for (int k = 0; k < 5; ++k) os << ',' << fmt_full(r.fit.beta(k));
    os << ',' << (r.fit.converged ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string CorrelationReport::to_markdown() const {
  std::ostringstream os;
  const auto table = [&](const char* title, double CorrelationRow::*field) {
    os << "### " << title << " (" << to_string(cohort) << " scores, best two values in bold per column)\n\n";
    os << "| Metric |";
    for (Subset s : kAllSubsets) os << ' ' << column_title(s) << " |";
    os << "\n|---|";
    for (std::size_t i = 0; i < kAllSubsets.size(); ++i) os << "---|";
    os << '\n';
    std::map<Subset, std::vector<double>> top;
    for (Subset s : kAllSubsets) {
      std::vector<double> vals;
      for (const auto& r : rows) {
        if (r.subset == s && std::isfinite(r.*field)) vals.push_back(r.*field);
      }
      std::sort(vals.rbegin(), vals.rend());
      if (vals.size() > 2) vals.resize(2);
      top[s] = vals;
    }
    for (Metric m : kAllMetrics) {
      os << "| " << to_string(m) << " |";
      for (Subset s : kAllSubsets) {
        const CorrelationRow* r = find(m, s);
        const double v = r ? r->*field : kNaN;
        const auto& t = top[s];
        const bool bold = std::isfinite(v) && std::find(t.begin(), t.end(), v) != t.end();
        os << ' ' << (bold ? "**" : "") << fmt4(v) << (bold ? "**" : "") << " |";
      }
      os << '\n';
    }
    os << '\n';
  };
  table("PLCC", &CorrelationRow::plcc);
  table("SROCC", &CorrelationRow::srocc);
  return os.str();
}

CorrelationReport build_report(const ScoreTable& scores, const MosTable& mos, const Manifest& manifest,
                               Cohort cohort) {
  std::map<std::string, const ManifestEntry*> by_id;
  for (const auto& e : manifest) by_id[e.id] = &e;
  std::map<std::string, double> mos_by_id;
  for (const auto& e : mos.entries) {
    if (e.cohort == cohort) mos_by_id[e.video_id] = e.mos;
  }

  std::vector<std::string> missing;
  struct Point {
    DistortionKind kind;
    double mos;
    const std::map<Metric, double>* scores;
  };
  std::vector<Point> points;
  for (const auto& [id, per_metric] : scores) {
    const auto m = by_id.find(id);
    const auto s = mos_by_id.find(id);
    if (m == by_id.end()) missing.push_back(id + " (no manifest entry)");
    if (s == mos_by_id.end()) missing.push_back(id + " (no " + std::string(to_string(cohort)) + " MOS)");
    if (m != by_id.end() && s != mos_by_id.end()) points.push_back({m->second->spec.kind, s->second, &per_metric});
  }
  if (!missing.empty()) {
    std::string msg = "cannot join scores with MOS/manifest:";
    for (const auto& id : missing) msg += " " + id;
    throw JoinError(msg);
  }

  CorrelationReport report;
  report.cohort = cohort;
  for (Metric metric : kAllMetrics) {
    for (Subset subset : kAllSubsets) {
      std::vector<double> xs, ys;
      for (const auto& p : points) {
        if (subset != Subset::Overall && subset_of(p.kind) != subset) continue;
        const auto it = p.scores->find(metric);
        if (it == p.scores->end() || !std::isfinite(it->second)) continue;
        xs.push_back(it->second);
        ys.push_back(p.mos);
      }
      CorrelationRow row;
      row.metric = metric;
      row.subset = subset;
      row.n_points = static_cast<int>(xs.size());
      row.plcc = kNaN;
      row.srocc = kNaN;
      const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
      const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
      try {
        row.srocc = srocc(x, y);
      } catch (const DegenerateInput&) {
      }
      try {
        row.fit = fit_logistic(x, y);
        row.plcc = plcc(row.fit(x), y);
      } catch (const DegenerateInput&) {
      }
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace lapvqa
