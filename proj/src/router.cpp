#include "dmind/router.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <random>

#include "json.hpp"

#include "dmind/digest.hpp"
#include "dmind/errors.hpp"

namespace dmind {

using nlohmann::json;

void validate_featurizer(const FeaturizerConfig& config) {
  if (config.ngram_min < 1 || config.ngram_min > config.ngram_max) {
    throw ConfigError("featurizer n-gram range invalid");
  }
  if (config.hash_dimension < 2 ||
      !std::has_single_bit(static_cast<unsigned>(config.hash_dimension))) {
    throw ConfigError("hash_dimension must be a power of two >= 2");
  }
}

namespace {

std::string preprocess(std::string_view text, const FeaturizerConfig& config) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  std::string out{text.substr(begin, end - begin)};
  if (config.lowercase) {
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
      return static_cast<char>(std::tolower(c));
    });
  }
  return out;
}

}  // namespace

SparseVector featurize(std::string_view text, const FeaturizerConfig& config) {
  validate_featurizer(config);
  const std::string prepared = preprocess(text, config);
  const auto mask = static_cast<std::uint64_t>(config.hash_dimension - 1);

  std::vector<std::pair<std::uint32_t, double>> raw;
  for (int n = config.ngram_min; n <= config.ngram_max; ++n) {
    if (prepared.size() < static_cast<std::size_t>(n)) break;
    for (std::size_t i = 0; i + n <= prepared.size(); ++i) {
      const std::uint64_t h =
          fnv1a64(std::string_view{prepared}.substr(i, static_cast<std::size_t>(n)));
      const auto index = static_cast<std::uint32_t>(h & mask);
      const double sign = ((h >> 32) & 1) ? 1.0 : -1.0;
      raw.emplace_back(index, sign);
    }
  }
  std::sort(raw.begin(), raw.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  SparseVector vec;
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < raw.size();) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < raw.size() && raw[j].first == raw[i].first) {
      sum += raw[j].second;
      ++j;
    }
    if (sum != 0.0) {
      vec.entries.emplace_back(raw[i].first, sum);
      norm_sq += sum * sum;
    }
    i = j;
  }
  if (norm_sq > 0.0) {
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& [index, value] : vec.entries) value *= inv;
  }
  return vec;
}

namespace {

std::array<double, 3> class_probabilities(const RouterModel& model,
                                          const SparseVector& features) {
  const std::size_t dim = static_cast<std::size_t>(model.featurizer.hash_dimension);
  std::array<double, 3> logits = model.bias;
  for (std::size_t c = 0; c < 3; ++c) {
    const double* row = model.weights.data() + c * dim;
    double dot = 0.0;
    for (const auto& [index, value] : features.entries) dot += row[index] * value;
    logits[c] += dot;
  }
  const double peak = std::max({logits[0], logits[1], logits[2]});
  std::array<double, 3> probs{};
  double total = 0.0;
  for (std::size_t c = 0; c < 3; ++c) {
    probs[c] = std::exp(logits[c] - peak);
    total += probs[c];
  }
  for (double& p : probs) p /= total;
  return probs;
}

void require_model_shape(const RouterModel& model) {
  validate_featurizer(model.featurizer);
  if (model.weights.size() !=
      3 * static_cast<std::size_t>(model.featurizer.hash_dimension)) {
    throw InputError("router model weight matrix has the wrong shape");
  }
}

double full_loss(const RouterModel& model, std::span<const SparseVector> features,
                 std::span<const std::size_t> labels, double l2_lambda) {
  double loss = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto probs = class_probabilities(model, features[i]);
    loss += -std::log(std::max(probs[labels[i]], 1e-300));
  }
  loss /= static_cast<double>(features.size());
  if (l2_lambda > 0.0) {
    double sq = 0.0;
    for (double w : model.weights) sq += w * w;
    loss += 0.5 * l2_lambda * sq;
  }
  return loss;
}

}  // namespace

LossGrad loss_and_grad(const RouterModel& model, std::span<const LabeledText> batch,
                       double l2_lambda) {
  require_model_shape(model);
  if (batch.empty()) throw InputError("loss_and_grad requires a non-empty batch");

  const std::size_t dim = static_cast<std::size_t>(model.featurizer.hash_dimension);
  LossGrad out;
  out.grad_weights.assign(model.weights.size(), 0.0);

  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  for (const LabeledText& example : batch) {
    const SparseVector features = featurize(example.text, model.featurizer);
    const auto probs = class_probabilities(model, features);
    const std::size_t truth = mode_index(example.label);
    out.loss += -std::log(std::max(probs[truth], 1e-300)) * inv_batch;
    for (std::size_t c = 0; c < 3; ++c) {
      const double delta = (probs[c] - (c == truth ? 1.0 : 0.0)) * inv_batch;
      double* row = out.grad_weights.data() + c * dim;
      for (const auto& [index, value] : features.entries) {
        row[index] += delta * value;
      }
      out.grad_bias[c] += delta;
    }
  }

  if (l2_lambda > 0.0) {
    double sq = 0.0;
    for (std::size_t i = 0; i < model.weights.size(); ++i) {
      sq += model.weights[i] * model.weights[i];
      out.grad_weights[i] += l2_lambda * model.weights[i];
    }
    out.loss += 0.5 * l2_lambda * sq;
  }
  return out;
}

std::vector<LabeledText> to_labeled_texts(std::span<const TMCExample> dataset) {
  std::vector<LabeledText> out;
  out.reserve(dataset.size());
  for (const TMCExample& example : dataset) {
    out.push_back({example.question_text, example.label});
  }
  return out;
}

RouterModel train(std::span<const LabeledText> dataset, const TrainConfig& tcfg,
                  const FeaturizerConfig& fcfg, std::string source_digest,
                  std::vector<double>* epoch_losses) {
  validate_featurizer(fcfg);
  if (tcfg.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (tcfg.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(tcfg.learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (tcfg.l2_lambda < 0.0) throw ConfigError("l2_lambda must be >= 0");
  if (dataset.empty()) throw InputError("training dataset must not be empty");

  const std::size_t n = dataset.size();
  const std::size_t dim = static_cast<std::size_t>(fcfg.hash_dimension);

  std::vector<SparseVector> features;
  std::vector<std::size_t> labels;
  features.reserve(n);
  labels.reserve(n);
  for (const LabeledText& example : dataset) {
    features.push_back(featurize(example.text, fcfg));
    labels.push_back(mode_index(example.label));
  }

  RouterModel model;
  model.featurizer = fcfg;
  model.weights.assign(3 * dim, 0.0);  // zero init: convex objective
  model.bias = {0.0, 0.0, 0.0};

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(tcfg.seed);

  if (epoch_losses) epoch_losses->clear();

  for (int epoch = 0; epoch < tcfg.epochs; ++epoch) {
    if (tcfg.shuffle) {
      // Hand-rolled Fisher-Yates: deterministic across standard libraries.
      for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(order[i - 1], order[j]);
      }
    }

    for (std::size_t start = 0; start < n; start += tcfg.batch_size) {
      const std::size_t stop = std::min(n, start + tcfg.batch_size);
      const double inv_batch = 1.0 / static_cast<double>(stop - start);

      // Probabilities first (pre-update weights), then the decayed step.
      std::vector<std::array<double, 3>> deltas(stop - start);
      for (std::size_t b = start; b < stop; ++b) {
        const std::size_t i = order[b];
        const auto probs = class_probabilities(model, features[i]);
        for (std::size_t c = 0; c < 3; ++c) {
          deltas[b - start][c] =
              (probs[c] - (c == labels[i] ? 1.0 : 0.0)) * inv_batch;
        }
      }
      if (tcfg.l2_lambda > 0.0) {
        const double decay = 1.0 - tcfg.learning_rate * tcfg.l2_lambda;
        for (double& w : model.weights) w *= decay;
      }
      for (std::size_t b = start; b < stop; ++b) {
        const std::size_t i = order[b];
        for (std::size_t c = 0; c < 3; ++c) {
          const double step = tcfg.learning_rate * deltas[b - start][c];
          double* row = model.weights.data() + c * dim;
          for (const auto& [index, value] : features[i].entries) {
            row[index] -= step * value;
          }
          model.bias[c] -= step;
        }
      }
    }

    if (epoch_losses) {
      epoch_losses->push_back(full_loss(model, features, labels, tcfg.l2_lambda));
    }
  }

  model.meta.seed = tcfg.seed;
  model.meta.epochs = tcfg.epochs;
  model.meta.learning_rate = tcfg.learning_rate;
  model.meta.l2_lambda = tcfg.l2_lambda;
  model.meta.examples = static_cast<int>(n);
  model.meta.source_digest = std::move(source_digest);
  model.meta.final_loss = full_loss(model, features, labels, tcfg.l2_lambda);
  return model;
}

Prediction predict(const RouterModel& model, std::string_view text) {
  require_model_shape(model);
  const SparseVector features = featurize(text, model.featurizer);
  Prediction prediction;
  prediction.probabilities = class_probabilities(model, features);
  ThinkingMode best = ThinkingMode::Fast;
  for (ThinkingMode mode : {ThinkingMode::Normal, ThinkingMode::Slow}) {
    if (prediction.probabilities[mode_index(mode)] >
        prediction.probabilities[mode_index(best)]) {
      best = mode;
    }
  }
  prediction.mode = best;
  return prediction;
}

// ---------------------------------------------------------------------------
// Serialization: "DMRT" magic, version, JSON header, raw doubles, checksum.

namespace {

constexpr char kMagic[4] = {'D', 'M', 'R', 'T'};

void append_u32(std::string& out, std::uint32_t value) {
  char buf[4];
  std::memcpy(buf, &value, 4);
  out.append(buf, 4);
}

void append_u64(std::string& out, std::uint64_t value) {
  char buf[8];
  std::memcpy(buf, &value, 8);
  out.append(buf, 8);
}

void append_doubles(std::string& out, const double* values, std::size_t count) {
  out.append(reinterpret_cast<const char*>(values), count * sizeof(double));
}

}  // namespace

void save_router_model(const RouterModel& model, const std::filesystem::path& path) {
  require_model_shape(model);
  const json header{
      {"featurizer",
       json{{"ngram_min", model.featurizer.ngram_min},
            {"ngram_max", model.featurizer.ngram_max},
            {"hash_dimension", model.featurizer.hash_dimension},
            {"lowercase", model.featurizer.lowercase}}},
      {"class_order", json::array({"fast", "normal", "slow"})},
      {"meta",
       json{{"seed", model.meta.seed},
            {"epochs", model.meta.epochs},
            {"learning_rate", model.meta.learning_rate},
            {"l2_lambda", model.meta.l2_lambda},
            {"final_loss", model.meta.final_loss},
            {"examples", model.meta.examples},
            {"source_digest", model.meta.source_digest}}}};
  const std::string header_bytes = header.dump();

  std::string out;
  out.append(kMagic, 4);
  append_u32(out, kRouterModelVersion);
  append_u32(out, static_cast<std::uint32_t>(header_bytes.size()));
  out += header_bytes;
  append_doubles(out, model.weights.data(), model.weights.size());
  append_doubles(out, model.bias.data(), model.bias.size());
  append_u64(out, fnv1a64(out));
  write_file(path, out);
}

RouterModel load_router_model(const std::filesystem::path& path) {
  const std::string raw = read_file(path);
  if (raw.size() < 24 || std::memcmp(raw.data(), kMagic, 4) != 0) {
    throw ContractError("router model file " + path.string() +
                        " is not a recognized model container");
  }
  std::uint32_t version = 0;
  std::memcpy(&version, raw.data() + 4, 4);
  if (version != kRouterModelVersion) {
    throw ContractError("router model file " + path.string() + " has version " +
                        std::to_string(version) + ", expected " +
                        std::to_string(kRouterModelVersion));
  }
  std::uint32_t header_size = 0;
  std::memcpy(&header_size, raw.data() + 8, 4);
  const std::size_t header_end = 12 + static_cast<std::size_t>(header_size);
  if (raw.size() < header_end + 8) {
    throw ContractError("router model file " + path.string() + " is truncated");
  }

  json header;
  try {
    header = json::parse(raw.substr(12, header_size));
  } catch (const json::exception& e) {
    throw ContractError("router model file " + path.string() +
                        " has a corrupt header: " + e.what());
  }

  RouterModel model;
  const json& f = header.at("featurizer");
  model.featurizer.ngram_min = f.at("ngram_min").get<int>();
  model.featurizer.ngram_max = f.at("ngram_max").get<int>();
  model.featurizer.hash_dimension = f.at("hash_dimension").get<int>();
  model.featurizer.lowercase = f.at("lowercase").get<bool>();
  validate_featurizer(model.featurizer);

  const auto class_order = header.at("class_order").get<std::vector<std::string>>();
  if (class_order != std::vector<std::string>{"fast", "normal", "slow"}) {
    throw ContractError("router model file " + path.string() +
                        " has an unsupported class order");
  }

  const std::size_t dim = static_cast<std::size_t>(model.featurizer.hash_dimension);
  const std::size_t expected =
      header_end + 3 * dim * sizeof(double) + 3 * sizeof(double) + 8;
  if (raw.size() != expected) {
    throw ContractError("router model file " + path.string() +
                        " is truncated or padded");
  }

  std::uint64_t stored_checksum = 0;
  std::memcpy(&stored_checksum, raw.data() + raw.size() - 8, 8);
  if (fnv1a64(std::string_view{raw}.substr(0, raw.size() - 8)) != stored_checksum) {
    throw ContractError("router model file " + path.string() +
                        " failed its checksum");
  }

  model.weights.resize(3 * dim);
  std::memcpy(model.weights.data(), raw.data() + header_end,
              3 * dim * sizeof(double));
  std::memcpy(model.bias.data(), raw.data() + header_end + 3 * dim * sizeof(double),
              3 * sizeof(double));

  const json& m = header.at("meta");
  model.meta.seed = m.value("seed", std::uint64_t{0});
  model.meta.epochs = m.value("epochs", 0);
  model.meta.learning_rate = m.value("learning_rate", 0.0);
  model.meta.l2_lambda = m.value("l2_lambda", 0.0);
  model.meta.final_loss = m.value("final_loss", 0.0);
  model.meta.examples = m.value("examples", 0);
  model.meta.source_digest = m.value("source_digest", std::string{});
  return model;
}

}  // namespace dmind
