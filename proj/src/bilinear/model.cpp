#include "ddikit/bilinear/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "ddikit/common/jsonl.hpp"
#include "ddikit/common/rng.hpp"
#include "ddikit/version.hpp"

namespace ddikit::bilinear {

namespace {

constexpr double kProbClamp = 1e-12;

void check_dim(const InteractionMatrix& m, const FeatureBag& a, const FeatureBag& b) {
  const std::size_t d = static_cast<std::size_t>(m.d);
  if (m.values.size() != d * d || a.aggregate.size() != d || b.aggregate.size() != d) {
    throw BilinearError(BilinearErrorKind::DimensionMismatch,
                        "feature/matrix dimensions disagree (d=" + std::to_string(m.d) +
                            ", |agg a|=" + std::to_string(a.aggregate.size()) +
                            ", |agg b|=" + std::to_string(b.aggregate.size()) + ")");
  }
}

double bilinear_form(const InteractionMatrix& m, const std::vector<double>& u,
                     const std::vector<double>& v) {
  double total = 0.0;
  for (int i = 0; i < m.d; ++i) {
    if (u[static_cast<std::size_t>(i)] == 0.0) continue;
    double row = 0.0;
    for (int j = 0; j < m.d; ++j) row += m.at(i, j) * v[static_cast<std::size_t>(j)];
    total += u[static_cast<std::size_t>(i)] * row;
  }
  return total;
}

}  // namespace

std::vector<std::vector<double>> make_embedding_table(int d, std::uint64_t seed) {
  if (d < 2) throw std::invalid_argument("embedding dimension must be >= 2");
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<std::vector<double>> table(fp::Fingerprint::kBits);
  for (auto& row : table) {
    row.resize(static_cast<std::size_t>(d));
    for (auto& x : row) x = rng.uniform(-bound, bound);
  }
  return table;
}

FeatureBag featurize(const fp::Fingerprint& fingerprint,
                     const std::vector<std::vector<double>>& table) {
  if (table.size() != fp::Fingerprint::kBits || table.empty()) {
    throw std::invalid_argument("embedding table must have one row per fingerprint bit");
  }
  const std::size_t d = table.front().size();
  FeatureBag bag;
  for (int bit = 0; bit < fp::Fingerprint::kBits; ++bit) {
    if (fingerprint.test(bit)) bag.vectors.push_back(table[static_cast<std::size_t>(bit)]);
  }
  if (bag.vectors.empty()) bag.vectors.emplace_back(d, 0.0);
  bag.aggregate.assign(d, 0.0);
  for (const auto& v : bag.vectors) {
    for (std::size_t i = 0; i < d; ++i) bag.aggregate[i] += v[i];
  }
  return bag;
}

FeatureBag featurize(const fp::Fingerprint& fingerprint, int d, std::uint64_t seed) {
  return featurize(fingerprint, make_embedding_table(d, seed));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double score(const InteractionMatrix& m, const FeatureBag& a, const FeatureBag& b) {
  check_dim(m, a, b);
  return sigmoid(bilinear_form(m, a.aggregate, b.aggregate));
}

double score_double_sum(const InteractionMatrix& m, const FeatureBag& a,
                        const FeatureBag& b) {
  check_dim(m, a, b);
  double total = 0.0;
  for (const auto& u : a.vectors) {
    for (const auto& v : b.vectors) total += bilinear_form(m, u, v);
  }
  return sigmoid(total);
}

LossGrad loss_and_grad(const InteractionMatrix& m, const TrainBatch& batch) {
  if (batch.empty()) throw std::invalid_argument("loss_and_grad: empty batch");
  LossGrad out;
  out.grad = InteractionMatrix(m.d);
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (const auto& ex : batch) {
    check_dim(m, ex.a, ex.b);
    const double p_raw = sigmoid(bilinear_form(m, ex.a.aggregate, ex.b.aggregate));
    const double p = std::clamp(p_raw, kProbClamp, 1.0 - kProbClamp);
    const double l = static_cast<double>(ex.label);
    out.loss += -(l * std::log(p) + (1.0 - l) * std::log(1.0 - p)) * inv_n;
    const double coeff = (p_raw - l) * inv_n;
    for (int i = 0; i < m.d; ++i) {
      const double ai = ex.a.aggregate[static_cast<std::size_t>(i)];
      if (ai == 0.0) continue;
      for (int j = 0; j < m.d; ++j) {
        out.grad.at(i, j) += coeff * ai * ex.b.aggregate[static_cast<std::size_t>(j)];
      }
    }
  }
  return out;
}

int predict_label(const InteractionMatrix& m, const FeatureBag& a, const FeatureBag& b,
                  double threshold) {
  return score(m, a, b) >= threshold ? 1 : 0;
}

namespace {

double batch_loss(const InteractionMatrix& m, const TrainBatch& batch) {
  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (const auto& ex : batch) {
    const double p = std::clamp(score(m, ex.a, ex.b), kProbClamp, 1.0 - kProbClamp);
    const double l = static_cast<double>(ex.label);
    loss += -(l * std::log(p) + (1.0 - l) * std::log(1.0 - p)) * inv_n;
  }
  return loss;
}

double batch_accuracy(const InteractionMatrix& m, const TrainBatch& batch) {
  if (batch.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& ex : batch) {
    if (predict_label(m, ex.a, ex.b) == ex.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(batch.size());
}

}  // namespace

TrainResult train(const TrainBatch& train_set, const TrainBatch& val_set,
                  const TrainConfig& config) {
  if (train_set.empty() || val_set.empty()) {
    throw std::invalid_argument("train: train and validation sets must be non-empty");
  }
  TrainResult result;
  InteractionMatrix m(config.d);
  result.matrix = m;

  Rng rng(config.seed);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  double best_val = std::numeric_limits<double>::infinity();
  int stale = 0;
  const std::size_t batch_size =
      (config.batch_size <= 0 ||
       static_cast<std::size_t>(config.batch_size) >= train_set.size())
          ? train_set.size()
          : static_cast<std::size_t>(config.batch_size);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    if (batch_size < train_set.size()) rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t end = std::min(order.size(), start + batch_size);
      TrainBatch batch;
      batch.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) batch.push_back(train_set[order[i]]);
      LossGrad lg = loss_and_grad(m, batch);
      if (!std::isfinite(lg.loss)) {
        throw BilinearError(BilinearErrorKind::NonFiniteLoss,
                            "training diverged at epoch " + std::to_string(epoch), epoch);
      }
      for (std::size_t i = 0; i < m.values.size(); ++i) {
        m.values[i] -= config.lr * lg.grad.values[i];
        if (!std::isfinite(m.values[i])) {
          throw BilinearError(BilinearErrorKind::NonFiniteLoss,
                              "training diverged at epoch " + std::to_string(epoch), epoch);
        }
      }
    }

    LogEntry entry;
    entry.epoch = epoch;
    entry.train_loss = batch_loss(m, train_set);
    entry.val_loss = batch_loss(m, val_set);
    entry.val_acc = batch_accuracy(m, val_set);
    entry.joint_loss = config.gen_loss + entry.train_loss;
    if (!std::isfinite(entry.train_loss) || !std::isfinite(entry.val_loss)) {
      throw BilinearError(BilinearErrorKind::NonFiniteLoss,
                          "training diverged at epoch " + std::to_string(epoch), epoch);
    }
    result.log.push_back(entry);

    if (entry.val_loss < best_val) {
      best_val = entry.val_loss;
      result.matrix = m;
      result.best_epoch = epoch;
      stale = 0;
    } else {
      ++stale;
      if (stale >= config.patience) break;
    }
  }
  return result;
}

void save_checkpoint(const std::string& path, const InteractionMatrix& m,
                     std::uint64_t seed) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw BilinearError(BilinearErrorKind::Io, "cannot open for writing: " + path);
  out << "ddikit-bilinear-checkpoint v1\n";
  out << "d " << m.d << "\n";
  out << "seed " << seed << "\n";
  out << "fingerprint " << kFingerprintVersion << "\n";
  char buf[64];
  for (int i = 0; i < m.d; ++i) {
    for (int j = 0; j < m.d; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m.at(i, j));
      out << buf << (j + 1 == m.d ? '\n' : ' ');
    }
  }
  out.close();
  if (out.fail()) throw BilinearError(BilinearErrorKind::Io, "write failed: " + path);
}

InteractionMatrix load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BilinearError(BilinearErrorKind::Io, "cannot open for reading: " + path);
  std::string magic;
  std::getline(in, magic);
  if (magic != "ddikit-bilinear-checkpoint v1") {
    throw BilinearError(BilinearErrorKind::Io, path + ": not a checkpoint file");
  }
  std::string key, fingerprint_version;
  int d = 0;
  std::uint64_t seed = 0;
  in >> key >> d;
  if (key != "d" || d < 2) throw BilinearError(BilinearErrorKind::Io, path + ": bad header");
  in >> key >> seed;
  if (key != "seed") throw BilinearError(BilinearErrorKind::Io, path + ": bad header");
  in >> key >> fingerprint_version;
  if (key != "fingerprint") throw BilinearError(BilinearErrorKind::Io, path + ": bad header");
  InteractionMatrix m(d);
  for (auto& x : m.values) {
    if (!(in >> x)) throw BilinearError(BilinearErrorKind::Io, path + ": truncated values");
  }
  return m;
}

void save_log(const std::string& path, const std::vector<LogEntry>& log,
              const std::string& config_hash, std::uint64_t seed) {
  jsonl::Writer w(path);
  jsonl::json extra;
  extra["config_hash"] = config_hash;
  extra["seed"] = seed;
  w.write(jsonl::header_record("train_log", extra));
  for (const auto& e : log) {
    jsonl::json row;
    row["epoch"] = e.epoch;
    row["train_loss"] = e.train_loss;
    row["val_loss"] = e.val_loss;
    row["val_acc"] = e.val_acc;
    row["joint_loss"] = e.joint_loss;
    w.write(row);
  }
  w.close();
}

}  // namespace ddikit::bilinear
