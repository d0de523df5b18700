#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "l2b/features.hpp"

/// Attention-pooled value network V(joint state).
///
/// Per pedestrian row x_i:
///   e_i = embedding(x_i)                      ReLU MLP, 13 -> 150 -> 100
///   h_i = pairwise(e_i)                       100 -> 100 -> 50
///   s_i = attention([e_i, mean_j e_j])        200 -> 100 -> 100 -> 1
/// Pooled crowd feature c = sum_i softmax(s)_i h_i, and
///   V = value([self features, c])            56 -> 150 -> 100 -> 100 -> 1
///
/// Rows of each sample are put in canonical (lexicographic) order before
/// evaluation, so the output is bit-identical under any row permutation.
namespace l2b::nn {

struct NetConfig {
  std::vector<int> embedding{150, 100};
  std::vector<int> pairwise{100, 50};
  std::vector<int> attention{100, 100};
  std::vector<int> value{150, 100, 100};

  bool operator==(const NetConfig&) const = default;
};

struct TensorInfo {
  std::string name;
  int rows = 0;
  int cols = 0;
  Eigen::Index offset = 0;

  Eigen::Index size() const { return static_cast<Eigen::Index>(rows) * cols; }
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;

/// All weights live in one flat vector; layer tensors are views into it.
/// Weights are stored (out x in), column-major. Adam moments share the layout.
class NetParams {
 public:
  NetParams() : NetParams(NetConfig{}) {}
  explicit NetParams(NetConfig config);

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  static NetParams initialize(const NetConfig& config, std::uint64_t seed);

  const NetConfig& config() const { return config_; }
  const std::vector<TensorInfo>& tensors() const { return tensors_; }
  Eigen::Index size() const { return values_.size(); }

  Eigen::VectorXd& values() { return values_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& adam_m() { return adam_m_; }
  const Eigen::VectorXd& adam_m() const { return adam_m_; }
  Eigen::VectorXd& adam_v() { return adam_v_; }
  const Eigen::VectorXd& adam_v() const { return adam_v_; }
  std::uint64_t adam_step() const { return adam_step_; }
  void set_adam_step(std::uint64_t step) { adam_step_ = step; }

  int num_layers() const { return static_cast<int>(tensors_.size() / 2); }
  Eigen::Map<const Eigen::MatrixXd> weight(int layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(int layer) const;
  Eigen::Map<Eigen::MatrixXd> weight(int layer);
  Eigen::Map<Eigen::VectorXd> bias(int layer);

  /// Layer index ranges per block.
  int embedding_begin() const { return 0; }
  int pairwise_begin() const { return static_cast<int>(config_.embedding.size()); }
  int attention_begin() const { return pairwise_begin() + static_cast<int>(config_.pairwise.size()); }
  int value_begin() const { return attention_begin() + static_cast<int>(config_.attention.size()) + 1; }

 private:
  NetConfig config_;
  std::vector<TensorInfo> tensors_;
  Eigen::VectorXd values_;
  Eigen::VectorXd adam_m_;
  Eigen::VectorXd adam_v_;
  std::uint64_t adam_step_ = 0;
};

/// Stacked rows of several samples.
class FeatureBatch {
 public:
  void add(std::span<const FeatureRow> rows);

  Eigen::Index num_samples() const { return static_cast<Eigen::Index>(offsets_.size()); }
  Eigen::Index num_rows() const { return static_cast<Eigen::Index>(rows_.size()); }
  Eigen::Index offset(Eigen::Index sample) const { return offsets_[sample]; }
  Eigen::Index count(Eigen::Index sample) const { return counts_[sample]; }
  Eigen::MatrixXd matrix() const;

 private:
  std::vector<FeatureRow> rows_;
  std::vector<Eigen::Index> offsets_;
  std::vector<Eigen::Index> counts_;
};

/// Activations cached by forward() for backward().
struct ForwardTape {
  std::vector<Eigen::Index> offsets;
  std::vector<Eigen::Index> counts;
  Eigen::Index param_size = 0;
  std::uint64_t param_fingerprint = 0;

  Eigen::MatrixXd input;                   // R x 13
  std::vector<Eigen::MatrixXd> embedding;  // post-activation per layer, R x *
  Eigen::MatrixXd pooled;                  // B x E (mean embedding)
  std::vector<Eigen::MatrixXd> attention;  // hidden post-activations, R x *
  Eigen::VectorXd scores;                  // R
  std::vector<Eigen::MatrixXd> pairwise;   // post-activation per layer, last is linear
  Eigen::VectorXd weights;                 // R, softmax within sample
  Eigen::MatrixXd joint;                   // B x (6 + P)
  std::vector<Eigen::MatrixXd> value;      // hidden post-activations, B x *
  Eigen::VectorXd output;                  // B
};

/// Values for every sample in the batch. Throws std::invalid_argument on an
/// empty sample or non-finite input.
Eigen::VectorXd forward(const NetParams& params, const FeatureBatch& batch,
                        ForwardTape* tape = nullptr);

double forward(const NetParams& params, std::span<const FeatureRow> rows,
               ForwardTape* tape = nullptr);

/// Gradient of sum_b upstream[b] * V_b with respect to every parameter, in
/// the flat layout of NetParams::values(). Throws std::invalid_argument if
/// the tape was not produced by these parameters.
Eigen::VectorXd backward(const NetParams& params, const ForwardTape& tape,
                         const Eigen::VectorXd& upstream);

Eigen::VectorXd backward(const NetParams& params, const ForwardTape& tape, double upstream);

/// One Adam step (beta1 0.9, beta2 0.999, eps 1e-8) with bias correction.
/// Increments the step counter held by `params`.
void adam_update(NetParams& params, const Eigen::VectorXd& gradient, double learn_rate);

/// Cheap content hash of the parameter values.
std::uint64_t fingerprint(const NetParams& params);

}  // namespace l2b::nn
