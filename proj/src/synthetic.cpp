#include "deed/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "deed/error.hpp"
#include "deed/random.hpp"
#include "json.hpp"

namespace deed::synthetic {

namespace {

using Json = nlohmann::json;

double logit(double p) { return std::log(p / (1.0 - p)); }
double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::vector<double> random_unit_vector(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (auto& x : v) {
      x = rng.normal();
      norm += x * x;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

std::vector<float> sample_pd(Rng& rng, double peak, double spread, std::uint32_t k) {
  std::vector<double> probs(k);
  const double top = std::clamp(sigmoid(logit(peak) + spread * rng.normal()), 1e-6, 1.0 - 1e-6);
  probs[0] = top;
  if (k > 1) {
    double total = 0.0;
    double decay = 1.0;
    for (std::uint32_t j = 1; j < k; ++j) {
      decay *= kResidualDecay;
      probs[j] = decay * (0.5 + 0.5 * rng.uniform_open_zero());
      total += probs[j];
    }
    const double residual = (1.0 - top) * kResidualMassInTopK;
    for (std::uint32_t j = 1; j < k; ++j) probs[j] *= residual / total;
  }
  std::vector<float> pd(probs.begin(), probs.end());
  std::sort(pd.begin(), pd.end(), std::greater<>());
  return pd;
}

}  // namespace

void validate(const EditEffectProfile& p) {
  auto in_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!(p.hs_separation >= 0.0) || !std::isfinite(p.hs_separation)) {
    throw ParameterError("hs_separation must be a non-negative number");
  }
  if (!(p.hs_noise > 0.0) || !std::isfinite(p.hs_noise)) throw ParameterError("hs_noise must be positive");
  if (!in_unit(p.pd_unedited_peak) || !in_unit(p.pd_edited_peak)) {
    throw ParameterError("pd peaks must lie in (0,1)");
  }
  if (!(p.pd_peak_spread > 0.0) || !std::isfinite(p.pd_peak_spread)) {
    throw ParameterError("pd_peak_spread must be positive");
  }
}

EditEffectProfile le_like(std::uint64_t seed) { return {"LE-like", 3.0, 1.0, 0.3, 0.8, 0.5, seed}; }
EditEffectProfile ml_like(std::uint64_t seed) { return {"ML-like", 0.5, 1.0, 0.3, 0.4, 0.5, seed}; }
EditEffectProfile none(std::uint64_t seed) { return {"NONE", 0.0, 1.0, 0.3, 0.3, 0.5, seed}; }

EditEffectProfile preset(std::string_view name, std::uint64_t seed) {
  std::string lower;
  for (char c : name) lower.push_back(c == '_' ? '-' : static_cast<char>(std::tolower(c)));
  if (lower == "le-like") return le_like(seed);
  if (lower == "ml-like") return ml_like(seed);
  if (lower == "none") return none(seed);
  throw ParameterError("unknown preset '" + std::string(name) + "' (expected le-like, ml-like, none)");
}

EditEffectProfile profile_from_json(std::string_view text) {
  try {
    const Json doc = Json::parse(text);
    EditEffectProfile p;
    p.name = doc.value("name", std::string("custom"));
    p.hs_separation = doc.at("hs_separation").get<double>();
    p.hs_noise = doc.at("hs_noise").get<double>();
    p.pd_unedited_peak = doc.at("pd_unedited_peak").get<double>();
    p.pd_edited_peak = doc.at("pd_edited_peak").get<double>();
    p.pd_peak_spread = doc.at("pd_peak_spread").get<double>();
    p.seed = doc.value("seed", std::uint64_t{0});
    validate(p);
    return p;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("bad profile document: ") + e.what());
  }
}

std::string profile_to_json(const EditEffectProfile& p) {
  return Json{{"name", p.name},
              {"hs_separation", p.hs_separation},
              {"hs_noise", p.hs_noise},
              {"pd_unedited_peak", p.pd_unedited_peak},
              {"pd_edited_peak", p.pd_edited_peak},
              {"pd_peak_spread", p.pd_peak_spread},
              {"seed", p.seed}}
      .dump(2);
}

EditEffectProfile read_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return profile_from_json(buffer.str());
}

std::vector<double> planted_direction(const EditEffectProfile& profile, std::uint32_t hs_dim) {
  // Replays the start of generate()'s stream: base mean first, then the direction.
  Rng rng(profile.seed);
  for (std::uint32_t j = 0; j < hs_dim; ++j) rng.normal();
  return random_unit_vector(rng, hs_dim);
}

FeatureSet generate(const EditEffectProfile& profile, std::size_t n_per_class, std::uint32_t hs_dim,
                    std::uint32_t pd_k) {
  validate(profile);
  if (n_per_class == 0) throw ParameterError("n_per_class must be at least 1");
  if (hs_dim == 0 || pd_k == 0) throw ParameterError("hs_dim and pd_k must be positive");
  if (2 * n_per_class > UINT32_MAX) throw ParameterError("too many records for 32-bit fact ids");

  Rng rng(profile.seed);
  std::vector<double> base_mean(hs_dim);
  for (auto& m : base_mean) m = rng.normal();
  const std::vector<double> direction = random_unit_vector(rng, hs_dim);
  const double sigma = profile.hs_noise;
  const double shift = profile.hs_separation * sigma;

  FeatureSet set;
  set.header.model_id = "synthetic";
  set.header.editor = "SYNTH-" + profile.name;
  set.header.dataset = "synthetic";
  set.header.layer_index = -1;
  set.header.hs_dim = hs_dim;
  set.header.pd_k = pd_k;
  set.records.reserve(2 * n_per_class);

  for (std::size_t i = 0; i < 2 * n_per_class; ++i) {
    FeatureRecord record;
    record.fact_id = static_cast<std::uint32_t>(i);
    record.label = (i % 2 == 1) ? Label::kEdited : Label::kUnedited;
    const bool edited = record.label == Label::kEdited;
    record.hs.resize(hs_dim);
    for (std::uint32_t j = 0; j < hs_dim; ++j) {
      double v = base_mean[j] + sigma * rng.normal();
      if (edited) v += shift * direction[j];
      record.hs[j] = static_cast<float>(v);
    }
    record.pd = sample_pd(rng, edited ? profile.pd_edited_peak : profile.pd_unedited_peak,
                          profile.pd_peak_spread, pd_k);
    set.records.push_back(std::move(record));
  }
  set.header.record_count = set.records.size();
  return set;
}

FeatureSet generate_domain_shifted(const FeatureSet& base, double rotation_angle, double noise,
                                   std::uint64_t seed) {
  if (base.records.empty()) throw ParameterError("domain shift needs a non-empty base set");
  if (!(noise >= 0.0) || !std::isfinite(rotation_angle)) {
    throw ParameterError("noise must be non-negative and the angle finite");
  }
  const std::size_t dim = base.header.hs_dim;
  Rng rng(seed);

  // Orthonormal pair spanning the rotation plane (Gram-Schmidt).
  const std::vector<double> a = random_unit_vector(rng, dim);
  std::vector<double> b(dim, 0.0);
  if (dim >= 2) {
    double norm = 0.0;
    do {
      b = random_unit_vector(rng, dim);
      double dot = 0.0;
      for (std::size_t j = 0; j < dim; ++j) dot += a[j] * b[j];
      norm = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        b[j] -= dot * a[j];
        norm += b[j] * b[j];
      }
      norm = std::sqrt(norm);
    } while (norm < 1e-8);
    for (auto& x : b) x /= norm;
  }
  const bool rotate = rotation_angle != 0.0 && dim >= 2;
  const double c = std::cos(rotation_angle);
  const double s = std::sin(rotation_angle);

  FeatureSet out = base;
  out.header.model_id = base.header.model_id + "-shifted";
  std::vector<double> x(dim);
  for (auto& record : out.records) {
    for (std::size_t j = 0; j < dim; ++j) x[j] = record.hs[j];
    if (rotate) {
      double xa = 0.0;
      double xb = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        xa += x[j] * a[j];
        xb += x[j] * b[j];
      }
      const double ra = c * xa - s * xb;
      const double rb = s * xa + c * xb;
      for (std::size_t j = 0; j < dim; ++j) x[j] += (ra - xa) * a[j] + (rb - xb) * b[j];
    }
    for (std::size_t j = 0; j < dim; ++j) {
      const double z = rng.normal();
      if (noise > 0.0) x[j] += noise * z;
      record.hs[j] = static_cast<float>(x[j]);
    }

    double sum = 0.0;
    std::vector<double> pd(record.pd.size());
    for (std::size_t j = 0; j < pd.size(); ++j) {
      const double z = rng.normal();
      pd[j] = std::clamp(record.pd[j] * (noise > 0.0 ? std::exp(noise * z) : 1.0), 0.0, 1.0);
      sum += pd[j];
    }
    if (sum > 1.0) {
      // Leave headroom for float rounding so the stored sum stays <= 1 + 1e-6.
      for (auto& p : pd) p *= (1.0 - 1e-7) / sum;
    }
    for (std::size_t j = 0; j < pd.size(); ++j) record.pd[j] = static_cast<float>(pd[j]);
    std::sort(record.pd.begin(), record.pd.end(), std::greater<>());
  }
  return out;
}

Manifest generate_manifest(const FeatureSet& set, std::size_t object_pool, std::uint64_t seed) {
  static constexpr std::array<const char*, 24> kCities = {
      "Berlin", "Paris",  "Rome",    "Madrid", "Vienna", "Prague", "Warsaw",    "Lisbon",
      "Oslo",   "Dublin", "Athens",  "Cairo",  "Tokyo",  "Seoul",  "Toronto",   "Chicago",
      "Sydney", "Lima",   "Nairobi", "Delhi",  "Moscow", "London", "Amsterdam", "Helsinki"};
  static constexpr std::array<const char*, 4> kRelations = {"is located in", "was born in", "is headquartered in",
                                                            "died in"};
  if (object_pool < 2) throw ParameterError("object pool needs at least two objects");
  object_pool = std::min(object_pool, kCities.size());

  Rng rng(seed);
  Manifest manifest;
  for (const auto& record : set.records) {
    FactRecord fact;
    fact.fact_id = record.fact_id;
    fact.subject = "Entity " + std::to_string(record.fact_id);
    fact.relation = kRelations[rng.below(kRelations.size())];
    const auto original = rng.below(object_pool);
    fact.original_object = kCities[original];
    fact.label = record.label;
    if (record.label == Label::kEdited) {
      const auto shift = 1 + rng.below(object_pool - 1);
      fact.new_object = kCities[(original + shift) % object_pool];
    }
    fact.edit_prompt = fact.subject + " " + fact.relation;
    fact.paraphrase_prompt = "Where? " + fact.subject + " " + fact.relation;
    manifest.emplace(fact.fact_id, std::move(fact));
  }
  return manifest;
}

}  // namespace deed::synthetic
