#pragma once

// Bilinear pairwise interaction classifier at desk scale.
//
// Each drug is a bag of d-dimensional feature vectors (one fixed pseudo-
// random embedding row per set fingerprint bit). The interaction score is
//   sigmoid( sum_i sum_j a_i · M · b_j ) = sigmoid( agg(a) · M · agg(b) ),
// the exact algebraic collapse of the double sum onto the bags' vector sums.
// Training minimizes binary cross-entropy with plain gradient descent and
// early stopping on validation loss. An externally supplied constant
// generation-loss term is carried through the log as joint_loss.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddikit/fp/fingerprint.hpp"

namespace ddikit::bilinear {

struct FeatureBag {
  std::vector<std::vector<double>> vectors;  // each of dimension d
  std::vector<double> aggregate;             // element-wise sum of vectors
};

struct InteractionMatrix {
  int d = 16;
  std::vector<double> values;  // row-major, d*d

  InteractionMatrix() = default;
  explicit InteractionMatrix(int dim) : d(dim), values(static_cast<std::size_t>(dim) * dim, 0.0) {}
  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * d + j]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * d + j]; }
};

struct Example {
  FeatureBag a;
  FeatureBag b;
  int label = 0;  // 0 or 1
};

using TrainBatch = std::vector<Example>;

enum class BilinearErrorKind { DimensionMismatch, NonFiniteLoss, Io };

struct BilinearError : std::runtime_error {
  BilinearErrorKind kind;
  int epoch = -1;  // set for NonFiniteLoss
  BilinearError(BilinearErrorKind k, const std::string& msg, int at_epoch = -1)
      : std::runtime_error(msg), kind(k), epoch(at_epoch) {}
};

// Fixed 166 x d embedding table, entries ~ Uniform[-1/sqrt(d), 1/sqrt(d)],
// a pure function of (d, seed).
std::vector<std::vector<double>> make_embedding_table(int d, std::uint64_t seed);

// One embedding row per set bit; an empty fingerprint yields a single zero
// vector so the bag is never empty.
FeatureBag featurize(const fp::Fingerprint& fingerprint,
                     const std::vector<std::vector<double>>& table);
FeatureBag featurize(const fp::Fingerprint& fingerprint, int d, std::uint64_t seed);

// Overflow-safe logistic sigmoid.
double sigmoid(double x);

// Collapsed bilinear score: sigmoid(agg(a) · M · agg(b)).
double score(const InteractionMatrix& m, const FeatureBag& a, const FeatureBag& b);

// Reference form evaluating the full double sum over bag vectors; used to
// validate the collapse identity.
double score_double_sum(const InteractionMatrix& m, const FeatureBag& a,
                        const FeatureBag& b);

struct LossGrad {
  double loss = 0.0;
  InteractionMatrix grad;
};

// Mean binary cross-entropy with probabilities clamped to
// [1e-12, 1 - 1e-12], and its exact gradient
//   (1/N) sum (p - l) * outer(agg(a), agg(b)).
LossGrad loss_and_grad(const InteractionMatrix& m, const TrainBatch& batch);

struct TrainConfig {
  int d = 16;
  double lr = 0.05;
  int epochs = 50;
  int batch_size = 0;  // <= 0 or >= N: full batch
  std::uint64_t seed = 42;
  int patience = 3;       // early stop after this many epochs without val-loss improvement
  double gen_loss = 0.0;  // external constant generation-loss stream
};

struct LogEntry {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;
  double joint_loss = 0.0;  // gen_loss + train_loss
};

struct TrainResult {
  InteractionMatrix matrix;  // best-validation snapshot
  std::vector<LogEntry> log;
  int best_epoch = 0;
};

// Plain gradient descent from M = 0. Deterministic under (config, data).
// Throws BilinearError(NonFiniteLoss) with the offending epoch if the loss
// or gradient becomes non-finite.
TrainResult train(const TrainBatch& train_set, const TrainBatch& val_set,
                  const TrainConfig& config);

// 1 iff score >= threshold (boundary decides positive).
int predict_label(const InteractionMatrix& m, const FeatureBag& a, const FeatureBag& b,
                  double threshold = 0.5);

// Checkpoint: text header (d, seed, fingerprint version) + row-major values.
void save_checkpoint(const std::string& path, const InteractionMatrix& m,
                     std::uint64_t seed);
InteractionMatrix load_checkpoint(const std::string& path);

// Training log as JSONL {epoch, train_loss, val_loss, val_acc, joint_loss}.
void save_log(const std::string& path, const std::vector<LogEntry>& log,
              const std::string& config_hash, std::uint64_t seed);

}  // namespace ddikit::bilinear
