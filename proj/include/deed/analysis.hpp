#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "deed/feature_store.hpp"

namespace deed::analysis {

/// Two-class Fisher discriminant projection of the hidden states.
struct LdaProjection {
  /// Unit vector, oriented so the edited mean lies to the right.
  std::vector<double> direction;
  /// direction . hs_i for every record, in record order.
  std::vector<double> projected;
  double unedited_mean = 0.0;
  double edited_mean = 0.0;
  double pooled_std = 0.0;
  /// |edited_mean - unedited_mean| / pooled_std.
  double separation = 0.0;
  double ridge = 0.0;
};

/// Fisher direction (S_W + ridge I)^-1 (mu_edited - mu_unedited) with
/// ridge = 1e-6 * trace(S_W) / hs_dim (1e-6 when the trace is zero). When
/// hs_dim exceeds the record count the solve runs in the n x n dual form.
/// Needs at least two records per class.
LdaProjection lda_project(const FeatureSet& set);

/// Same as lda_project on raw rows; labels are +1/-1.
LdaProjection lda_project(const Matrix& x, const Labels& y);

/// Mean of the 10 largest pd entries. Needs pd_k >= 10.
double mean_top10(const FeatureRecord& record);

inline constexpr std::size_t kKdeGridPoints = 512;

struct DensityCurve {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
  std::size_t n = 0;
};

/// Scott's rule: sample std (n-1 denominator) times n^(-1/5).
double scott_bandwidth(std::span<const double> samples);

/// Gaussian-kernel density at one point.
double kde_density_at(std::span<const double> samples, double bandwidth, double x);

/// Gaussian KDE on 512 equispaced points over [min - 3h, max + 3h].
DensityCurve kde(std::span<const double> samples);

/// Trapezoidal integral of the curve over its grid.
double trapezoid_integral(const DensityCurve& curve);

struct ClassCurves {
  DensityCurve unedited;
  DensityCurve edited;
};

/// KDE of mean_top10 for each class of the set.
ClassCurves mean_top10_kde(const FeatureSet& set);

/// CSV "fact_id,label,z,jitter"; jitter is uniform [0,1) from `seed`.
void emit_lda_csv(const FeatureSet& set, const LdaProjection& projection, std::uint64_t seed,
                  const std::filesystem::path& path);

/// CSV "class,grid,density" with 512 rows per class.
void emit_kde_csv(const ClassCurves& curves, const std::filesystem::path& path);

}  // namespace deed::analysis
