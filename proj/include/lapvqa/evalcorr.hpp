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

#ifndef LAPVQA_EVALCORR_HPP
#define LAPVQA_EVALCORR_HPP

#include "lapvqa/metrics.hpp"
#include "lapvqa/subjective.hpp"
#include "lapvqa/synth.hpp"

#include <Eigen/Dense>

#include <array>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lapvqa {

using Beta = Eigen::Matrix<double, 5, 1>;

/// b1 * (0.5 - 1 / (1 + exp(b2 * (x - b3)))) + b4 * x + b5
template <typename Scalar>
Scalar logistic5(const Eigen::Matrix<Scalar, 5, 1>& b, Scalar x) {
  using std::exp;
  return b(0) * (Scalar(0.5) - Scalar(1) / (Scalar(1) + exp(b(1) * (x - b(2))))) + b(3) * x + b(4);
}

struct LogisticFit {
  Beta beta = Beta::Zero();
  bool converged = false;
  double rmse = 0.0;
  int iterations = 0;

  double operator()(double x) const { return logistic5(beta, x); }
  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;
};

struct FitOptions {
  int max_iterations = 1000;
  double relative_tolerance = 1e-10;
};

class DegenerateInput : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Damped Gauss-Newton (Levenberg-Marquardt) least squares. Steps are only
/// accepted when they lower the residual.
LogisticFit fit_logistic(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const FitOptions& options = {});

/// The documented starting point: b3 = median(x), b1 = range(y), b2 = 1/std(x), b4 = 0, b5 = mean(y).
Beta initial_beta(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

double plcc(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Average (mid) ranks, 1-based.
Eigen::VectorXd midranks(const Eigen::VectorXd& v);

double srocc(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Per-distortion columns plus Overall.
enum class Subset { Noise, DefocusBlur, MotionBlur, UnevenIllumination, Smoke, Overall };

inline constexpr std::array<Subset, 6> kAllSubsets = {Subset::Noise, Subset::DefocusBlur,
                                                      Subset::MotionBlur, Subset::UnevenIllumination,
                                                      Subset::Smoke, Subset::Overall};

std::string_view to_string(Subset s);
std::string_view column_title(Subset s);
std::optional<Subset> parse_subset(std::string_view s);

struct CorrelationRow {
  Metric metric = Metric::PSNR;
  Subset subset = Subset::Overall;
  double plcc = 0.0;
  double srocc = 0.0;
  int n_points = 0;
  LogisticFit fit;
};

struct CorrelationReport {
  Cohort cohort = Cohort::NonExpert;
  std::vector<CorrelationRow> rows;

  const CorrelationRow* find(Metric metric, Subset subset) const;
  std::string to_csv() const;
  /// PLCC and SROCC tables, best two values per column in bold.
  std::string to_markdown() const;
};

/// video id -> metric -> video score
using ScoreTable = std::map<std::string, std::map<Metric, double>>;

class JoinError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// One logistic fit per (metric, subset); Overall is its own fit over all points.
/// PSNR of identical clips is excluded (infinite score). Throws JoinError when a
/// scored video lacks a MOS or manifest entry.
CorrelationReport build_report(const ScoreTable& scores, const MosTable& mos, const Manifest& manifest,
                               Cohort cohort);

}  // namespace lapvqa

#endif  // LAPVQA_EVALCORR_HPP
