#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "deed/feature_store.hpp"
#include "deed/manifest.hpp"

namespace deed::synthetic {

/// Parameters of a planted edit effect.
///
/// Hidden states: unedited ~ N(mu0, sigma^2 I), edited ~ N(mu0 + delta*sigma*u, sigma^2 I)
/// for a seed-determined unit direction u.
/// Top-1 probability: logit-normal centred on the class peak with the given spread.
struct EditEffectProfile {
  std::string name;
  double hs_separation = 0.0;  // delta, in units of hs_noise
  double hs_noise = 1.0;       // sigma
  double pd_unedited_peak = 0.3;
  double pd_edited_peak = 0.3;
  double pd_peak_spread = 0.5;
  std::uint64_t seed = 0;

  bool operator==(const EditEffectProfile&) const = default;
};

/// Throws ParameterError on out-of-range fields.
void validate(const EditEffectProfile& profile);

/// delta=3, edited peak 0.8: easy to detect, like locate-and-edit methods.
EditEffectProfile le_like(std::uint64_t seed = 0);
/// delta=0.5, edited peak 0.4: subtle, like meta-learning editors.
EditEffectProfile ml_like(std::uint64_t seed = 0);
/// delta=0, equal peaks: both classes share one law (the unedited-model control).
EditEffectProfile none(std::uint64_t seed = 0);

/// Looks up "le-like", "ml-like" or "none".
EditEffectProfile preset(std::string_view name, std::uint64_t seed);

EditEffectProfile profile_from_json(std::string_view text);
std::string profile_to_json(const EditEffectProfile& profile);
EditEffectProfile read_profile(const std::filesystem::path& path);

/// Fraction of the non-top-1 mass that lands inside the top-k slots; the rest
/// is taken to live in the vocabulary tail beyond k.
inline constexpr double kResidualMassInTopK = 0.9;
/// Decay ratio of the residual probability profile before normalisation.
inline constexpr double kResidualDecay = 0.7;

/// Balanced set of 2*n_per_class records, edited and unedited interleaved,
/// fact_ids 0..2n-1. Deterministic in (profile, n_per_class, hs_dim, pd_k).
FeatureSet generate(const EditEffectProfile& profile, std::size_t n_per_class, std::uint32_t hs_dim,
                    std::uint32_t pd_k);

/// The unit direction along which `generate` shifts edited hidden states.
std::vector<double> planted_direction(const EditEffectProfile& profile, std::uint32_t hs_dim);

/// Simulates features taken from a fine-tuned sibling model: hidden states are
/// rotated by `rotation_angle` in a seed-determined plane and receive Gaussian
/// noise; pd values are perturbed multiplicatively, clipped, renormalised if
/// needed and re-sorted. Labels and fact ids are preserved.
FeatureSet generate_domain_shifted(const FeatureSet& base, double rotation_angle, double noise,
                                   std::uint64_t seed);

/// Builds a plausible fact manifest for a synthetic set. Objects are drawn
/// from a pool of `object_pool` city names so that same-object pairs exist.
Manifest generate_manifest(const FeatureSet& set, std::size_t object_pool, std::uint64_t seed);

}  // namespace deed::synthetic
