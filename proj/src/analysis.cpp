#include "deed/analysis.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "deed/error.hpp"
#include "deed/random.hpp"

namespace deed::analysis {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

VectorXd spd_solve(const MatrixXd& a, const VectorXd& b) {
  Eigen::LLT<MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw ParameterError("scatter matrix is not positive definite");
  return llt.solve(b);
}

}  // namespace

LdaProjection lda_project(const FeatureSet& set) {
  const AssembledData data = assemble_vectors(set, FeatureMode::kHs);
  return lda_project(data.x, data.y);
}

LdaProjection lda_project(const Matrix& x, const Labels& y) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (y.size() != n) throw ParameterError("X and y lengths differ");
  const auto n_pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  const auto n_neg = static_cast<std::size_t>(std::count(y.begin(), y.end(), -1));
  if (n_pos + n_neg != n) throw ParameterError("labels must be +1 or -1");
  if (n_pos < 2 || n_neg < 2) throw ParameterError("LDA needs at least two records of each class");

  VectorXd mean_pos = VectorXd::Zero(static_cast<Eigen::Index>(d));
  VectorXd mean_neg = VectorXd::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Map<const VectorXd> row(x.row(i).data(), static_cast<Eigen::Index>(d));
    (y[i] > 0 ? mean_pos : mean_neg) += row;
  }
  mean_pos /= static_cast<double>(n_pos);
  mean_neg /= static_cast<double>(n_neg);

  // Rows centred on their class mean; S_W = Z^T Z.
  MatrixXd centred(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Map<const VectorXd> row(x.row(i).data(), static_cast<Eigen::Index>(d));
    centred.row(static_cast<Eigen::Index>(i)) = (row - (y[i] > 0 ? mean_pos : mean_neg)).transpose();
  }
  const double trace = centred.squaredNorm();
  const double ridge = trace > 0.0 ? 1e-6 * trace / static_cast<double>(d) : 1e-6;
  const VectorXd gap = mean_pos - mean_neg;

  VectorXd direction;
  if (d <= n) {
    MatrixXd scatter = centred.transpose() * centred;
    scatter.diagonal().array() += ridge;
    direction = spd_solve(scatter, gap);
  } else {
    // Woodbury: (ridge I + Z^T Z)^-1 v = (v - Z^T (ridge I + Z Z^T)^-1 Z v) / ridge.
    MatrixXd gram = centred * centred.transpose();
    gram.diagonal().array() += ridge;
    direction = (gap - centred.transpose() * spd_solve(gram, centred * gap)) / ridge;
  }

  LdaProjection out;
  out.ridge = ridge;
  const double norm = direction.norm();
  if (norm > 0.0 && std::isfinite(norm)) {
    direction /= norm;
  } else {
    // Coincident class means: no preferred direction, fall back to the first axis.
    direction = VectorXd::Unit(static_cast<Eigen::Index>(d), 0);
  }

  out.projected.resize(n);
  auto project = [&] {
    double sum_pos = 0.0;
    double sum_neg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::Map<const VectorXd> row(x.row(i).data(), static_cast<Eigen::Index>(d));
      out.projected[i] = direction.dot(row);
      (y[i] > 0 ? sum_pos : sum_neg) += out.projected[i];
    }
    out.edited_mean = sum_pos / static_cast<double>(n_pos);
    out.unedited_mean = sum_neg / static_cast<double>(n_neg);
  };
  project();
  if (out.edited_mean < out.unedited_mean) {
    direction = -direction;
    project();
  }

  double within = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = y[i] > 0 ? out.edited_mean : out.unedited_mean;
    within += (out.projected[i] - m) * (out.projected[i] - m);
  }
  out.pooled_std = std::sqrt(within / static_cast<double>(n - 2));
  if (!(out.pooled_std > 0.0)) throw ParameterError("projected classes have zero within-class spread");
  out.separation = std::abs(out.edited_mean - out.unedited_mean) / out.pooled_std;
  out.direction.assign(direction.data(), direction.data() + direction.size());
  return out;
}

double mean_top10(const FeatureRecord& record) {
  if (record.pd.size() < 10) throw ParameterError("mean_top10 needs pd_k >= 10");
  double sum = 0.0;
  for (std::size_t i = 0; i < 10; ++i) sum += record.pd[i];
  return sum / 10.0;
}

double scott_bandwidth(std::span<const double> samples) {
  const auto n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= n;
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  const double std = std::sqrt(var / (n - 1.0));
  return std * std::pow(n, -0.2);
}

double kde_density_at(std::span<const double> samples, double bandwidth, double x) {
  constexpr double kInvSqrt2Pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
  double total = 0.0;
  for (double s : samples) {
    const double u = (x - s) / bandwidth;
    total += kInvSqrt2Pi * std::exp(-0.5 * u * u);
  }
  return total / (static_cast<double>(samples.size()) * bandwidth);
}

DensityCurve kde(std::span<const double> samples) {
  if (samples.size() < 2) throw ParameterError("KDE needs at least two samples");
  for (double s : samples) {
    if (!std::isfinite(s)) throw ParameterError("KDE samples must be finite");
  }
  const double h = scott_bandwidth(samples);
  if (!(h > 0.0)) throw ParameterError("KDE samples have zero variance");

  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it - 3.0 * h;
  const double hi = *hi_it + 3.0 * h;
  DensityCurve curve;
  curve.bandwidth = h;
  curve.n = samples.size();
  curve.grid.resize(kKdeGridPoints);
  curve.density.resize(kKdeGridPoints);
  const double spacing = (hi - lo) / static_cast<double>(kKdeGridPoints - 1);
  for (std::size_t i = 0; i < kKdeGridPoints; ++i) {
    curve.grid[i] = i + 1 == kKdeGridPoints ? hi : lo + spacing * static_cast<double>(i);
    curve.density[i] = kde_density_at(samples, h, curve.grid[i]);
  }
  return curve;
}

double trapezoid_integral(const DensityCurve& curve) {
  double total = 0.0;
  for (std::size_t i = 1; i < curve.grid.size(); ++i) {
    total += 0.5 * (curve.density[i] + curve.density[i - 1]) * (curve.grid[i] - curve.grid[i - 1]);
  }
  return total;
}

ClassCurves mean_top10_kde(const FeatureSet& set) {
  std::vector<double> unedited;
  std::vector<double> edited;
  for (const auto& r : set.records) (r.label == Label::kEdited ? edited : unedited).push_back(mean_top10(r));
  return {kde(unedited), kde(edited)};
}

void emit_lda_csv(const FeatureSet& set, const LdaProjection& projection, std::uint64_t seed,
                  const std::filesystem::path& path) {
  if (projection.projected.size() != set.records.size()) {
    throw ParameterError("projection does not match the feature set");
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  Rng rng(seed);
  out << "fact_id,label,z,jitter\n";
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    const auto& r = set.records[i];
    out << r.fact_id << ',' << static_cast<int>(r.label) << ',' << fmt(projection.projected[i]) << ','
        << fmt(rng.uniform()) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void emit_kde_csv(const ClassCurves& curves, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "class,grid,density\n";
  auto dump = [&](const char* name, const DensityCurve& c) {
    for (std::size_t i = 0; i < c.grid.size(); ++i) out << name << ',' << fmt(c.grid[i]) << ',' << fmt(c.density[i]) << '\n';
  };
  dump("unedited", curves.unedited);
  dump("edited", curves.edited);
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace deed::analysis
