#include "stancelab/policy.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "json_util.hpp"
#include "stancelab/errors.hpp"
#include "stancelab/rng.hpp"
#include "stancelab/schema.hpp"

namespace stancelab {

using detail::Json;

double Completion::logprob() const {
  double s = 0.0;
  for (double lp : token_logprobs) s += lp;
  return s;
}

namespace {

// Reasoning bodies per stance; the varying word counts keep the length
// reward from collapsing to a constant within a sampling group.
const char* kBodies[3][3] = {
    {"On balance the benefits clearly outweigh the drawbacks here.",
     "This direction strengthens fairness and long term stability for most people.",
     "Supporting it matches my core priorities."},
    {"The costs and risks are simply too high.",
     "This proposal creates more problems than it solves for ordinary citizens.",
     "Opposing it protects both freedom and accountability."},
    {"Strong arguments exist on both sides and the evidence is mixed.",
     "Without clearer details I cannot commit either way.",
     "The tradeoffs balance out almost evenly here."},
};
constexpr int kBodyVariants = 3;
const double kLogVariant = -std::log(3.0);

int count_words(const std::string& text) {
  int n = 0;
  bool in = false;
  for (unsigned char c : text) {
    const bool sp = std::isspace(c) != 0;
    if (!sp && !in) ++n;
    in = !sp;
  }
  return n;
}

std::int64_t word_id(const std::string& w) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : w) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return static_cast<std::int64_t>(h & 0x7FFFFFFFFFFFFFFFULL);
}

std::vector<std::string> whitespace_split(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isspace(c) != 0) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(static_cast<char>(c));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<double> softmax_at(const std::vector<double>& z, double temperature) {
  std::vector<double> p(z.size());
  double zmax = z[0];
  for (double v : z) zmax = std::max(zmax, v);
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp((z[i] - zmax) / temperature);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

double log_softmax_at(const std::vector<double>& z, double temperature, std::size_t idx) {
  double zmax = z[0];
  for (double v : z) zmax = std::max(zmax, v);
  double total = 0.0;
  for (double v : z) total += std::exp((v - zmax) / temperature);
  return (z[idx] - zmax) / temperature - std::log(total);
}

void check_sampling_args(int n, double temperature) {
  if (n < 1) throw ConfigError("sample: n must be at least 1");
  if (!(temperature > 0.0)) throw ConfigError("sample: temperature must be positive");
}

// The toy's whole sequence mass sits on the first token; the remaining
// tokens carry zero so the sum equals the sequence log-probability.
Completion make_completion(Stance stance, int variant, double stance_logprob) {
  Completion c;
  c.text = render(kBodies[static_cast<int>(stance)][variant], stance);
  for (const auto& w : whitespace_split(c.text)) c.token_ids.push_back(word_id(w));
  c.token_logprobs.assign(c.token_ids.size(), 0.0);
  c.token_logprobs[0] = stance_logprob + kLogVariant;
  return c;
}

std::size_t stance_index(const LabelSpace& space, Stance s) {
  const auto& v = space.stances();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == s) return i;
  }
  throw ConfigError("stance outside policy label space");
}

struct Surrogate {
  double value = 0.0;       // clipped surrogate, before the KL penalty
  double ratio = 0.0;
  bool clipped = false;     // the clip branch was the active one
  double weight = 0.0;      // d surrogate / d logprob_current
};

Surrogate clipped_surrogate(double lp_cur, double lp_sampled, double advantage,
                            double clip_range) {
  Surrogate s;
  const double arg = std::clamp(lp_cur - lp_sampled, -60.0, 60.0);
  s.ratio = std::exp(arg);
  const double clipped_ratio = std::clamp(s.ratio, 1.0 - clip_range, 1.0 + clip_range);
  const double raw = s.ratio * advantage;
  const double clip = clipped_ratio * advantage;
  if (raw <= clip) {
    s.value = raw;
    s.weight = s.ratio * advantage;  // d(ratio*A)/dlp = ratio*A
    s.clipped = false;
  } else {
    s.value = clip;
    s.weight = 0.0;
    s.clipped = true;
  }
  return s;
}

double exact_kl(const std::vector<double>& p_ref, const std::vector<double>& p_cur) {
  double kl = 0.0;
  for (std::size_t i = 0; i < p_ref.size(); ++i) {
    if (p_ref[i] > 0.0) kl += p_ref[i] * (std::log(p_ref[i]) - std::log(p_cur[i]));
  }
  return kl;
}

Json logits_to_json(const std::map<std::string, std::vector<double>>& m) {
  Json j = Json::object();
  for (const auto& [k, v] : m) j[k] = v;
  return j;
}

std::map<std::string, std::vector<double>> logits_from_json(const Json& j) {
  std::map<std::string, std::vector<double>> m;
  for (const auto& [k, v] : j.items()) m[k] = v.get<std::vector<double>>();
  return m;
}

}  // namespace

Stance greedy_stance(Policy& policy, const PromptSpec& prompt) {
  const auto completions = policy.sample(prompt, 1, kGreedyTemperature, 0);
  const ParseResult parsed = parse(completions.front().text, prompt.space);
  if (!parsed.stance) throw TrainingError("greedy sample produced no stance");
  return *parsed.stance;
}

// ---------------------------------------------------------------------------
// ToyTabularPolicy

struct ToyTabularPolicy::Impl {
  LabelSpace space;
  std::map<std::string, std::vector<double>> logits;
  std::map<std::string, std::vector<double>> ref_logits;

  explicit Impl(LabelSpace s) : space(std::move(s)) {}

  std::vector<double>& row(const std::string& qid) {
    auto it = logits.find(qid);
    if (it == logits.end()) {
      it = logits.emplace(qid, std::vector<double>(space.size(), 0.0)).first;
    }
    return it->second;
  }

  std::vector<double> ref_row(const std::string& qid) const {
    auto it = ref_logits.find(qid);
    if (it != ref_logits.end()) return it->second;
    return std::vector<double>(space.size(), 0.0);
  }
};

ToyTabularPolicy::ToyTabularPolicy(LabelSpace space)
    : impl_(std::make_unique<Impl>(std::move(space))) {}
ToyTabularPolicy::~ToyTabularPolicy() = default;

std::vector<Completion> ToyTabularPolicy::sample(const PromptSpec& prompt, int n,
                                                 double temperature, std::uint64_t seed) {
  check_sampling_args(n, temperature);
  const std::vector<double>& z = impl_->row(prompt.question_id);
  const std::vector<double> p = softmax_at(z, temperature);
  Rng rng(Rng::derive(seed, "sample:" + prompt.question_id));
  std::vector<Completion> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::size_t idx = rng.categorical(p);
    const int variant = static_cast<int>(rng.next_below(kBodyVariants));
    const double lp = log_softmax_at(z, temperature, idx);
    out.push_back(make_completion(impl_->space.stances()[idx], variant, lp));
  }
  return out;
}

double ToyTabularPolicy::logprob(const PromptSpec& prompt, const Completion& completion,
                                 double temperature, bool reference) {
  if (!(temperature > 0.0)) throw ConfigError("logprob: temperature must be positive");
  const ParseResult parsed = parse(completion.text, impl_->space);
  if (!parsed.stance) return -1e9;  // not in the toy's support
  const std::vector<double> z =
      reference ? impl_->ref_row(prompt.question_id) : impl_->row(prompt.question_id);
  return log_softmax_at(z, temperature, stance_index(impl_->space, *parsed.stance)) +
         kLogVariant;
}

double ToyTabularPolicy::sft_update(const std::vector<SftExample>& batch, double lr) {
  if (batch.empty()) throw ConfigError("sft_update: empty batch");
  std::map<std::string, std::vector<double>> grads;
  double loss = 0.0;
  for (const auto& ex : batch) {
    const ParseResult parsed = parse(ex.target, impl_->space);
    if (!parsed.stance) {
      throw DataError("sft_update: target for '" + ex.prompt.question_id +
                      "' does not parse to a stance");
    }
    const std::size_t s = stance_index(impl_->space, *parsed.stance);
    const std::vector<double>& z = impl_->row(ex.prompt.question_id);
    const std::vector<double> p = softmax_at(z, 1.0);
    loss += -log_softmax_at(z, 1.0, s);
    auto& g = grads[ex.prompt.question_id];
    g.resize(impl_->space.size(), 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) {
      g[k] += (p[k] - (k == s ? 1.0 : 0.0)) / static_cast<double>(batch.size());
    }
  }
  double norm_sq = 0.0;
  for (const auto& [_, g] : grads) {
    for (double v : g) norm_sq += v * v;
  }
  const double norm = std::sqrt(norm_sq);
  const double scale = norm > 1.0 ? 1.0 / norm : 1.0;  // max grad norm 1.0
  for (const auto& [qid, g] : grads) {
    auto& z = impl_->row(qid);
    for (std::size_t k = 0; k < z.size(); ++k) z[k] -= lr * scale * g[k];
  }
  return loss / static_cast<double>(batch.size());
}

RlMetrics ToyTabularPolicy::rl_update(const std::vector<RlExample>& batch,
                                      const RlUpdateConfig& config) {
  if (batch.empty()) throw ConfigError("rl_update: empty batch");
  if (!(config.temperature > 0.0)) throw ConfigError("rl_update: temperature must be positive");
  const double T = config.temperature;
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  std::map<std::string, std::vector<double>> grads;  // ascent direction
  RlMetrics m;
  for (const auto& ex : batch) {
    const ParseResult parsed = parse(ex.completion.text, impl_->space);
    if (!parsed.stance) throw DataError("rl_update: completion does not parse to a stance");
    const std::size_t s = stance_index(impl_->space, *parsed.stance);
    const std::vector<double>& z = impl_->row(ex.prompt.question_id);
    const std::vector<double> p = softmax_at(z, T);
    const double lp_cur = log_softmax_at(z, T, s) + kLogVariant;

    const Surrogate sur =
        clipped_surrogate(lp_cur, ex.completion.logprob(), ex.advantage, config.clip_range);
    m.loss -= sur.value * inv_n;
    m.mean_ratio += sur.ratio * inv_n;
    if (sur.clipped) m.clip_fraction += inv_n;

    auto& g = grads[ex.prompt.question_id];
    g.resize(impl_->space.size(), 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double dlp = ((k == s ? 1.0 : 0.0) - p[k]) / T;
      g[k] += sur.weight * dlp * inv_n;
    }
    if (config.kl_coefficient != 0.0) {
      const std::vector<double> p_ref = softmax_at(impl_->ref_row(ex.prompt.question_id), T);
      const double kl = exact_kl(p_ref, p);
      m.kl += kl * inv_n;
      m.loss += config.kl_coefficient * kl * inv_n;
      for (std::size_t k = 0; k < p.size(); ++k) {
        g[k] += config.kl_coefficient * (p_ref[k] - p[k]) / T * inv_n;
      }
    }
  }
  if (!std::isfinite(m.loss)) throw TrainingError("rl_update: non-finite loss");

  double norm_sq = 0.0;
  for (const auto& [_, g] : grads) {
    for (double v : g) norm_sq += v * v;
  }
  const double norm = std::sqrt(norm_sq);
  double scale = 1.0;
  if (config.max_grad_norm > 0.0 && norm > config.max_grad_norm) {
    scale = config.max_grad_norm / norm;
  }
  for (const auto& [qid, g] : grads) {
    auto& z = impl_->row(qid);
    for (std::size_t k = 0; k < z.size(); ++k) z[k] += config.lr * scale * g[k];
  }
  return m;
}

void ToyTabularPolicy::snapshot_reference() { impl_->ref_logits = impl_->logits; }

int ToyTabularPolicy::count_tokens(const std::string& text) const {
  return count_words(text);
}

std::string ToyTabularPolicy::checkpoint_json() const {
  Json j;
  j["type"] = "toy_tabular";
  Json labels = Json::array();
  for (Stance s : impl_->space.stances()) labels.push_back(stance_label(s));
  j["labels"] = labels;
  j["logits"] = logits_to_json(impl_->logits);
  return j.dump();
}

void ToyTabularPolicy::load_checkpoint_json(const std::string& text) {
  const Json j = detail::parse_json(text, "checkpoint");
  if (j.value("type", "") != "toy_tabular") throw DataError("checkpoint: wrong policy type");
  impl_->logits = logits_from_json(detail::require(j, "logits", "checkpoint"));
  impl_->ref_logits = impl_->logits;
}

std::vector<double> ToyTabularPolicy::logits(const std::string& question_id) const {
  auto it = impl_->logits.find(question_id);
  if (it != impl_->logits.end()) return it->second;
  return std::vector<double>(impl_->space.size(), 0.0);
}

void ToyTabularPolicy::set_logits(const std::string& question_id,
                                  const std::vector<double>& logits) {
  if (logits.size() != impl_->space.size()) {
    throw ConfigError("set_logits: size mismatch with label space");
  }
  impl_->logits[question_id] = logits;
}

// ---------------------------------------------------------------------------
// ToyFeaturizedPolicy

struct ToyFeaturizedPolicy::Impl {
  LabelSpace space;
  std::vector<double> bias;
  std::map<std::string, std::vector<double>> weights;
  std::vector<double> ref_bias;
  std::map<std::string, std::vector<double>> ref_weights;

  explicit Impl(LabelSpace s)
      : space(std::move(s)), bias(space.size(), 0.0), ref_bias(space.size(), 0.0) {}

  static std::vector<std::string> featurize(const std::string& text) {
    std::vector<std::string> toks;
    std::string cur;
    for (unsigned char c : text) {
      if (std::isalnum(c) != 0) {
        cur.push_back(static_cast<char>(std::tolower(c)));
      } else if (!cur.empty()) {
        toks.push_back(std::move(cur));
        cur.clear();
      }
    }
    if (!cur.empty()) toks.push_back(std::move(cur));
    return toks;
  }

  std::vector<double> logits_of(const PromptSpec& prompt, bool reference) const {
    const auto& b = reference ? ref_bias : bias;
    const auto& w = reference ? ref_weights : weights;
    std::vector<double> z = b;
    const auto toks = featurize(prompt.question);
    if (toks.empty()) return z;
    const double inv = 1.0 / static_cast<double>(toks.size());
    for (const auto& t : toks) {
      auto it = w.find(t);
      if (it == w.end()) continue;
      for (std::size_t k = 0; k < z.size(); ++k) z[k] += it->second[k] * inv;
    }
    return z;
  }

  // Accumulated gradient over one batch, then applied in a single step.
  struct GradSink {
    std::vector<double> bias;
    std::map<std::string, std::vector<double>> weights;
  };

  void accumulate(GradSink& sink, const PromptSpec& prompt,
                  const std::vector<double>& dz) {
    if (sink.bias.empty()) sink.bias.assign(space.size(), 0.0);
    for (std::size_t k = 0; k < dz.size(); ++k) sink.bias[k] += dz[k];
    const auto toks = featurize(prompt.question);
    if (toks.empty()) return;
    const double inv = 1.0 / static_cast<double>(toks.size());
    for (const auto& t : toks) {
      auto& g = sink.weights[t];
      g.resize(space.size(), 0.0);
      for (std::size_t k = 0; k < dz.size(); ++k) g[k] += dz[k] * inv;
    }
  }

  void apply(const GradSink& sink, double step, double max_norm) {
    double norm_sq = 0.0;
    for (double v : sink.bias) norm_sq += v * v;
    for (const auto& [_, g] : sink.weights) {
      for (double v : g) norm_sq += v * v;
    }
    const double norm = std::sqrt(norm_sq);
    double scale = 1.0;
    if (max_norm > 0.0 && norm > max_norm) scale = max_norm / norm;
    for (std::size_t k = 0; k < bias.size(); ++k) bias[k] += step * scale * sink.bias[k];
    for (const auto& [t, g] : sink.weights) {
      auto& w = weights[t];
      w.resize(space.size(), 0.0);
      for (std::size_t k = 0; k < w.size(); ++k) w[k] += step * scale * g[k];
    }
  }
};

ToyFeaturizedPolicy::ToyFeaturizedPolicy(LabelSpace space)
    : impl_(std::make_unique<Impl>(std::move(space))) {}
ToyFeaturizedPolicy::~ToyFeaturizedPolicy() = default;

std::vector<Completion> ToyFeaturizedPolicy::sample(const PromptSpec& prompt, int n,
                                                    double temperature,
                                                    std::uint64_t seed) {
  check_sampling_args(n, temperature);
  const std::vector<double> z = impl_->logits_of(prompt, false);
  const std::vector<double> p = softmax_at(z, temperature);
  Rng rng(Rng::derive(seed, "sample:" + prompt.question_id));
  std::vector<Completion> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::size_t idx = rng.categorical(p);
    const int variant = static_cast<int>(rng.next_below(kBodyVariants));
    const double lp = log_softmax_at(z, temperature, idx);
    out.push_back(make_completion(impl_->space.stances()[idx], variant, lp));
  }
  return out;
}

double ToyFeaturizedPolicy::logprob(const PromptSpec& prompt, const Completion& completion,
                                    double temperature, bool reference) {
  if (!(temperature > 0.0)) throw ConfigError("logprob: temperature must be positive");
  const ParseResult parsed = parse(completion.text, impl_->space);
  if (!parsed.stance) return -1e9;
  const std::vector<double> z = impl_->logits_of(prompt, reference);
  return log_softmax_at(z, temperature, stance_index(impl_->space, *parsed.stance)) +
         kLogVariant;
}

double ToyFeaturizedPolicy::sft_update(const std::vector<SftExample>& batch, double lr) {
  if (batch.empty()) throw ConfigError("sft_update: empty batch");
  Impl::GradSink sink;
  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (const auto& ex : batch) {
    const ParseResult parsed = parse(ex.target, impl_->space);
    if (!parsed.stance) {
      throw DataError("sft_update: target for '" + ex.prompt.question_id +
                      "' does not parse to a stance");
    }
    const std::size_t s = stance_index(impl_->space, *parsed.stance);
    const std::vector<double> z = impl_->logits_of(ex.prompt, false);
    const std::vector<double> p = softmax_at(z, 1.0);
    loss += -log_softmax_at(z, 1.0, s) * inv_n;
    std::vector<double> dz(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
      dz[k] = -(p[k] - (k == s ? 1.0 : 0.0)) * inv_n;  // descent on CE
    }
    impl_->accumulate(sink, ex.prompt, dz);
  }
  impl_->apply(sink, lr, 1.0);
  return loss;
}

RlMetrics ToyFeaturizedPolicy::rl_update(const std::vector<RlExample>& batch,
                                         const RlUpdateConfig& config) {
  if (batch.empty()) throw ConfigError("rl_update: empty batch");
  if (!(config.temperature > 0.0)) throw ConfigError("rl_update: temperature must be positive");
  const double T = config.temperature;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  Impl::GradSink sink;
  RlMetrics m;
  for (const auto& ex : batch) {
    const ParseResult parsed = parse(ex.completion.text, impl_->space);
    if (!parsed.stance) throw DataError("rl_update: completion does not parse to a stance");
    const std::size_t s = stance_index(impl_->space, *parsed.stance);
    const std::vector<double> z = impl_->logits_of(ex.prompt, false);
    const std::vector<double> p = softmax_at(z, T);
    const double lp_cur = log_softmax_at(z, T, s) + kLogVariant;
    const Surrogate sur =
        clipped_surrogate(lp_cur, ex.completion.logprob(), ex.advantage, config.clip_range);
    m.loss -= sur.value * inv_n;
    m.mean_ratio += sur.ratio * inv_n;
    if (sur.clipped) m.clip_fraction += inv_n;

    std::vector<double> dz(p.size(), 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) {
      dz[k] = sur.weight * ((k == s ? 1.0 : 0.0) - p[k]) / T * inv_n;
    }
    if (config.kl_coefficient != 0.0) {
      const std::vector<double> p_ref = softmax_at(impl_->logits_of(ex.prompt, true), T);
      const double kl = exact_kl(p_ref, p);
      m.kl += kl * inv_n;
      m.loss += config.kl_coefficient * kl * inv_n;
      for (std::size_t k = 0; k < p.size(); ++k) {
        dz[k] += config.kl_coefficient * (p_ref[k] - p[k]) / T * inv_n;
      }
    }
    impl_->accumulate(sink, ex.prompt, dz);
  }
  if (!std::isfinite(m.loss)) throw TrainingError("rl_update: non-finite loss");
  impl_->apply(sink, config.lr, config.max_grad_norm);
  return m;
}

void ToyFeaturizedPolicy::snapshot_reference() {
  impl_->ref_bias = impl_->bias;
  impl_->ref_weights = impl_->weights;
}

int ToyFeaturizedPolicy::count_tokens(const std::string& text) const {
  return count_words(text);
}

std::string ToyFeaturizedPolicy::checkpoint_json() const {
  Json j;
  j["type"] = "toy_featurized";
  Json labels = Json::array();
  for (Stance s : impl_->space.stances()) labels.push_back(stance_label(s));
  j["labels"] = labels;
  j["bias"] = impl_->bias;
  j["weights"] = logits_to_json(impl_->weights);
  return j.dump();
}

void ToyFeaturizedPolicy::load_checkpoint_json(const std::string& text) {
  const Json j = detail::parse_json(text, "checkpoint");
  if (j.value("type", "") != "toy_featurized") throw DataError("checkpoint: wrong policy type");
  impl_->bias = detail::require(j, "bias", "checkpoint").get<std::vector<double>>();
  impl_->weights = logits_from_json(detail::require(j, "weights", "checkpoint"));
  impl_->ref_bias = impl_->bias;
  impl_->ref_weights = impl_->weights;
}

std::vector<double> ToyFeaturizedPolicy::stance_logits(const PromptSpec& prompt) const {
  return impl_->logits_of(prompt, false);
}

void ToyFeaturizedPolicy::set_token_weight(const std::string& token,
                                           const std::vector<double>& w) {
  if (w.size() != impl_->space.size()) {
    throw ConfigError("set_token_weight: size mismatch with label space");
  }
  impl_->weights[token] = w;
}

std::unique_ptr<Policy> make_policy(const std::string& backend, const LabelSpace& space) {
  if (backend == "toy_tabular") return std::make_unique<ToyTabularPolicy>(space);
  if (backend == "toy_featurized") return std::make_unique<ToyFeaturizedPolicy>(space);
  throw ConfigError("unknown policy backend '" + backend + "'");
}

std::unique_ptr<Policy> policy_from_checkpoint(const std::string& text) {
  const Json j = detail::parse_json(text, "checkpoint");
  const std::string type = j.value("type", "");
  std::vector<Stance> stances;
  for (const auto& v : detail::require(j, "labels", "checkpoint")) {
    auto s = stance_from_label(v.get<std::string>());
    if (!s) throw DataError("checkpoint: bad label");
    stances.push_back(*s);
  }
  const LabelSpace space =
      stances.size() == 2 ? LabelSpace::binary() : LabelSpace::ternary();
  std::unique_ptr<Policy> p = make_policy(type, space);
  p->load_checkpoint_json(text);
  return p;
}

}  // namespace stancelab
