#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dmind/mode.hpp"
#include "dmind/tmc.hpp"

namespace dmind {

inline constexpr std::uint32_t kRouterModelVersion = 1;

// Hashed character n-gram featurizer settings.
struct FeaturizerConfig {
  int ngram_min = 3;
  int ngram_max = 5;
  int hash_dimension = 1 << 18;  // power of two
  bool lowercase = true;

  bool operator==(const FeaturizerConfig&) const = default;
};

// ConfigError when out of range (ngram_min > ngram_max, non-power-of-two dim).
void validate_featurizer(const FeaturizerConfig& config);

// Sorted (index, value) pairs; L2-normalized; empty text -> no entries.
struct SparseVector {
  std::vector<std::pair<std::uint32_t, double>> entries;
};

// Signed hashing of character n-grams, then L2 normalization. Deterministic
// across platforms (FNV-1a). Input is trimmed, and lowercased when configured.
SparseVector featurize(std::string_view text, const FeaturizerConfig& config);

struct TrainingMeta {
  std::uint64_t seed = 0;
  int epochs = 0;
  double learning_rate = 0.0;
  double l2_lambda = 0.0;
  double final_loss = 0.0;
  int examples = 0;
  std::string source_digest;
};

// 3-class linear classifier over hashed features; class order is fixed as
// Fast, Normal, Slow and serialized with the model.
struct RouterModel {
  FeaturizerConfig featurizer;
  std::vector<double> weights;  // [3 x hash_dimension], class-major
  std::array<double, 3> bias{};
  TrainingMeta meta;
};

struct LabeledText {
  std::string text;
  ThinkingMode label = ThinkingMode::Fast;
};

struct TrainConfig {
  int epochs = 50;
  int batch_size = 32;
  double learning_rate = 0.1;
  double l2_lambda = 1e-4;
  std::uint64_t seed = 1;
  bool shuffle = true;
};

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad_weights;  // same shape as model.weights
  std::array<double, 3> grad_bias{};
};

// Mean negative log softmax probability of the true class over the batch,
// plus l2_lambda/2 * ||weights||^2 (bias unpenalized), with the exact
// analytic gradient. Empty batch -> InputError.
LossGrad loss_and_grad(const RouterModel& model, std::span<const LabeledText> batch,
                       double l2_lambda);

// Mini-batch gradient descent from zero initialization; deterministic given
// (dataset, configs). epoch_losses, when given, receives the full-dataset
// regularized loss after each epoch.
RouterModel train(std::span<const LabeledText> dataset, const TrainConfig& tcfg,
                  const FeaturizerConfig& fcfg, std::string source_digest = {},
                  std::vector<double>* epoch_losses = nullptr);

std::vector<LabeledText> to_labeled_texts(std::span<const TMCExample> dataset);

struct Prediction {
  ThinkingMode mode = ThinkingMode::Fast;
  std::array<double, 3> probabilities{};
};

// softmax(W x + b); argmax with ties broken toward the cheaper mode.
Prediction predict(const RouterModel& model, std::string_view text);

// Versioned binary container; load(save(m)) reproduces bit-identical
// predictions. Corrupt or truncated files -> ContractError.
void save_router_model(const RouterModel& model, const std::filesystem::path& path);
RouterModel load_router_model(const std::filesystem::path& path);

}  // namespace dmind
