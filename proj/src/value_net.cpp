#include "l2b/value_net.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "l2b/rng.hpp"

namespace l2b::nn {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct LayerShape {
  std::string name;
  int in = 0;
  int out = 0;
};

std::vector<LayerShape> layer_shapes(const NetConfig& c) {
  if (c.embedding.empty() || c.pairwise.empty() || c.attention.empty() || c.value.empty()) {
    throw std::invalid_argument("NetConfig: every block needs at least one hidden layer");
  }
  std::vector<LayerShape> shapes;
  auto block = [&](const std::string& name, int in, const std::vector<int>& widths,
                   bool scalar_head) {
    int prev = in;
    int k = 0;
    for (const int w : widths) {
      shapes.push_back({name + "." + std::to_string(k++), prev, w});
      prev = w;
    }
    if (scalar_head) shapes.push_back({name + "." + std::to_string(k), prev, 1});
    return prev;
  };
  const int e = block("embedding", kFeatureDim, c.embedding, false);
  const int p = block("pairwise", e, c.pairwise, false);
  block("attention", 2 * e, c.attention, true);
  block("value", kSelfDim + p, c.value, true);
  return shapes;
}

MatrixXd affine(const MatrixXd& x, const NetParams& p, int layer) {
  MatrixXd y = x * p.weight(layer).transpose();
  y.rowwise() += p.bias(layer).transpose();
  return y;
}

void relu_inplace(MatrixXd& m) { m = m.cwiseMax(0.0); }

// d <- (d * W) masked by the ReLU that produced `activation`.
MatrixXd relu_back(const MatrixXd& d, const Eigen::Map<const MatrixXd>& w,
                   const MatrixXd& activation) {
  MatrixXd out = d * w;
  out.array() *= (activation.array() > 0.0).cast<double>();
  return out;
}

struct GradView {
  VectorXd& g;
  const NetParams& p;

  Eigen::Map<MatrixXd> w(int layer) {
    const TensorInfo& t = p.tensors()[2 * layer];
    return {g.data() + t.offset, t.rows, t.cols};
  }
  Eigen::Map<VectorXd> b(int layer) {
    const TensorInfo& t = p.tensors()[2 * layer + 1];
    return {g.data() + t.offset, t.rows};
  }
  void accumulate(int layer, const MatrixXd& d, const MatrixXd& input) {
    w(layer).noalias() += d.transpose() * input;
    b(layer) += d.colwise().sum().transpose();
  }
};

}  // namespace

NetParams::NetParams(NetConfig config) : config_(std::move(config)) {
  Index offset = 0;
  for (const LayerShape& s : layer_shapes(config_)) {
    tensors_.push_back({s.name + ".weight", s.out, s.in, offset});
    offset += tensors_.back().size();
    tensors_.push_back({s.name + ".bias", s.out, 1, offset});
    offset += tensors_.back().size();
  }
  values_ = VectorXd::Zero(offset);
  adam_m_ = VectorXd::Zero(offset);
  adam_v_ = VectorXd::Zero(offset);
}

NetParams NetParams::initialize(const NetConfig& config, std::uint64_t seed) {
  NetParams p(config);
  Rng rng(seed);
  for (int layer = 0; layer < p.num_layers(); ++layer) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(p.tensors_[2 * layer].cols));
    for (int k = 0; k < 2; ++k) {
      const TensorInfo& t = p.tensors_[2 * layer + k];
      for (Index i = 0; i < t.size(); ++i) p.values_[t.offset + i] = rng.uniform(-bound, bound);
    }
  }
  return p;
}

Eigen::Map<const MatrixXd> NetParams::weight(int layer) const {
  const TensorInfo& t = tensors_[2 * layer];
  return {values_.data() + t.offset, t.rows, t.cols};
}

Eigen::Map<const VectorXd> NetParams::bias(int layer) const {
  const TensorInfo& t = tensors_[2 * layer + 1];
  return {values_.data() + t.offset, t.rows};
}

Eigen::Map<MatrixXd> NetParams::weight(int layer) {
  const TensorInfo& t = tensors_[2 * layer];
  return {values_.data() + t.offset, t.rows, t.cols};
}

Eigen::Map<VectorXd> NetParams::bias(int layer) {
  const TensorInfo& t = tensors_[2 * layer + 1];
  return {values_.data() + t.offset, t.rows};
}

void FeatureBatch::add(std::span<const FeatureRow> rows) {
  if (rows.empty()) throw std::invalid_argument("FeatureBatch: sample has no rows");
  for (const FeatureRow& r : rows) {
    for (const double v : r) {
      if (!std::isfinite(v)) throw std::invalid_argument("FeatureBatch: non-finite feature");
    }
  }
  offsets_.push_back(static_cast<Index>(rows_.size()));
  counts_.push_back(static_cast<Index>(rows.size()));
  const auto begin = rows_.insert(rows_.end(), rows.begin(), rows.end());
  std::sort(begin, rows_.end());
}

MatrixXd FeatureBatch::matrix() const {
  MatrixXd m(num_rows(), kFeatureDim);
  for (Index i = 0; i < num_rows(); ++i) {
    for (int j = 0; j < kFeatureDim; ++j) m(i, j) = rows_[i][j];
  }
  return m;
}

std::uint64_t fingerprint(const NetParams& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ static_cast<std::uint64_t>(params.size());
  for (Index i = 0; i < params.size(); ++i) {
    h = (h ^ std::bit_cast<std::uint64_t>(params.values()[i])) * 0x100000001b3ULL;
  }
  return h;
}

VectorXd forward(const NetParams& p, const FeatureBatch& batch, ForwardTape* tape) {
  const Index num_samples = batch.num_samples();
  if (num_samples == 0) throw std::invalid_argument("forward: empty batch");

  ForwardTape local;
  ForwardTape& t = tape != nullptr ? *tape : local;
  t = ForwardTape{};
  t.offsets.resize(num_samples);
  t.counts.resize(num_samples);
  for (Index s = 0; s < num_samples; ++s) {
    t.offsets[s] = batch.offset(s);
    t.counts[s] = batch.count(s);
  }
  t.input = batch.matrix();
  if (tape != nullptr) {
    t.param_size = p.size();
    t.param_fingerprint = fingerprint(p);
  }

  const int att0 = p.attention_begin();
  const int pair0 = p.pairwise_begin();
  const int val0 = p.value_begin();

  // Per-row embedding, ReLU on every layer.
  const MatrixXd* h = &t.input;
  for (int l = p.embedding_begin(); l < pair0; ++l) {
    MatrixXd a = affine(*h, p, l);
    relu_inplace(a);
    t.embedding.push_back(std::move(a));
    h = &t.embedding.back();
  }
  const MatrixXd& emb = t.embedding.back();
  const Index emb_dim = emb.cols();

  t.pooled.resize(num_samples, emb_dim);
  for (Index s = 0; s < num_samples; ++s) {
    t.pooled.row(s) =
        emb.middleRows(t.offsets[s], t.counts[s]).colwise().sum() / static_cast<double>(t.counts[s]);
  }

  // Attention scores; the first layer sees [e_i, mean e].
  {
    const auto w0 = p.weight(att0);
    MatrixXd a = emb * w0.leftCols(emb_dim).transpose();
    const MatrixXd pooled_term = t.pooled * w0.rightCols(emb_dim).transpose();
    for (Index s = 0; s < num_samples; ++s) {
      a.middleRows(t.offsets[s], t.counts[s]).rowwise() += pooled_term.row(s);
    }
    a.rowwise() += p.bias(att0).transpose();
    relu_inplace(a);
    t.attention.push_back(std::move(a));
    for (int l = att0 + 1; l < val0 - 1; ++l) {
      MatrixXd next = affine(t.attention.back(), p, l);
      relu_inplace(next);
      t.attention.push_back(std::move(next));
    }
    t.scores = affine(t.attention.back(), p, val0 - 1).col(0);
  }

  // Pairwise features, linear last layer.
  h = &emb;
  for (int l = pair0; l < att0; ++l) {
    MatrixXd a = affine(*h, p, l);
    if (l + 1 < att0) relu_inplace(a);
    t.pairwise.push_back(std::move(a));
    h = &t.pairwise.back();
  }
  const MatrixXd& pair = t.pairwise.back();
  const Index pair_dim = pair.cols();

  // Softmax within each sample, then the weighted crowd feature.
  t.weights.resize(t.input.rows());
  t.joint.resize(num_samples, kSelfDim + pair_dim);
  for (Index s = 0; s < num_samples; ++s) {
    const Index off = t.offsets[s];
    const Index n = t.counts[s];
    const double max_score = t.scores.segment(off, n).maxCoeff();
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      t.weights[off + i] = std::exp(t.scores[off + i] - max_score);
      total += t.weights[off + i];
    }
    t.weights.segment(off, n) /= total;

    t.joint.block(s, 0, 1, kSelfDim) = t.input.block(off, 0, 1, kSelfDim);
    Eigen::RowVectorXd crowd = Eigen::RowVectorXd::Zero(pair_dim);
    for (Index i = 0; i < n; ++i) crowd += t.weights[off + i] * pair.row(off + i);
    t.joint.block(s, kSelfDim, 1, pair_dim) = crowd;
  }

  // Value head.
  h = &t.joint;
  const int last = p.num_layers() - 1;
  for (int l = val0; l < last; ++l) {
    MatrixXd a = affine(*h, p, l);
    relu_inplace(a);
    t.value.push_back(std::move(a));
    h = &t.value.back();
  }
  t.output = affine(*h, p, last).col(0);
  return t.output;
}

double forward(const NetParams& params, std::span<const FeatureRow> rows, ForwardTape* tape) {
  FeatureBatch batch;
  batch.add(rows);
  return forward(params, batch, tape)[0];
}

VectorXd backward(const NetParams& p, const ForwardTape& t, const VectorXd& upstream) {
  if (t.param_size != p.size() || t.param_fingerprint != fingerprint(p)) {
    throw std::invalid_argument("backward: tape was recorded with different parameters");
  }
  const Index num_samples = static_cast<Index>(t.offsets.size());
  if (upstream.size() != num_samples) {
    throw std::invalid_argument("backward: upstream size does not match batch");
  }

  VectorXd grad = VectorXd::Zero(p.size());
  GradView g{grad, p};

  const int att0 = p.attention_begin();
  const int pair0 = p.pairwise_begin();
  const int val0 = p.value_begin();
  const int last = p.num_layers() - 1;

  // Value head.
  MatrixXd d = upstream;
  for (int l = last; l >= val0; --l) {
    const MatrixXd& input = l == val0 ? t.joint : t.value[l - val0 - 1];
    g.accumulate(l, d, input);
    if (l > val0) {
      d = relu_back(d, p.weight(l), input);
    } else {
      d = d * p.weight(l);
    }
  }
  const Index pair_dim = t.pairwise.back().cols();
  const MatrixXd d_crowd = d.rightCols(pair_dim);

  // Softmax pooling.
  const MatrixXd& pair = t.pairwise.back();
  MatrixXd d_pair(pair.rows(), pair_dim);
  VectorXd d_scores(pair.rows());
  for (Index s = 0; s < num_samples; ++s) {
    const Index off = t.offsets[s];
    const Index n = t.counts[s];
    double weighted = 0.0;
    for (Index i = 0; i < n; ++i) {
      d_pair.row(off + i) = t.weights[off + i] * d_crowd.row(s);
      d_scores[off + i] = pair.row(off + i).dot(d_crowd.row(s));
      weighted += t.weights[off + i] * d_scores[off + i];
    }
    for (Index i = 0; i < n; ++i) {
      d_scores[off + i] = t.weights[off + i] * (d_scores[off + i] - weighted);
    }
  }

  const MatrixXd& emb = t.embedding.back();
  const Index emb_dim = emb.cols();

  // Pairwise block.
  d = d_pair;
  for (int l = att0 - 1; l >= pair0; --l) {
    const MatrixXd& input = l == pair0 ? emb : t.pairwise[l - pair0 - 1];
    g.accumulate(l, d, input);
    if (l > pair0) {
      d = relu_back(d, p.weight(l), input);
    } else {
      d = d * p.weight(l);
    }
  }
  MatrixXd d_emb = d;

  // Attention block.
  d = d_scores;
  for (int l = val0 - 1; l > att0; --l) {
    const MatrixXd& input = t.attention[l - att0 - 1];
    g.accumulate(l, d, input);
    d = relu_back(d, p.weight(l), input);
  }
  {
    // First attention layer input is [e_i, pooled(sample(i))].
    const auto w0 = p.weight(att0);
    MatrixXd d_sum(num_samples, d.cols());
    for (Index s = 0; s < num_samples; ++s) {
      d_sum.row(s) = d.middleRows(t.offsets[s], t.counts[s]).colwise().sum();
    }
    g.w(att0).leftCols(emb_dim).noalias() += d.transpose() * emb;
    g.w(att0).rightCols(emb_dim).noalias() += d_sum.transpose() * t.pooled;
    g.b(att0) += d.colwise().sum().transpose();

    d_emb.noalias() += d * w0.leftCols(emb_dim);
    const MatrixXd d_pooled = d_sum * w0.rightCols(emb_dim);
    for (Index s = 0; s < num_samples; ++s) {
      d_emb.middleRows(t.offsets[s], t.counts[s]).rowwise() +=
          d_pooled.row(s) / static_cast<double>(t.counts[s]);
    }
  }

  // Embedding block, ReLU on the last layer too.
  d = d_emb;
  d.array() *= (emb.array() > 0.0).cast<double>();
  for (int l = pair0 - 1; l >= p.embedding_begin(); --l) {
    const MatrixXd& input = l == p.embedding_begin() ? t.input : t.embedding[l - 1];
    g.accumulate(l, d, input);
    if (l > p.embedding_begin()) d = relu_back(d, p.weight(l), input);
  }
  return grad;
}

VectorXd backward(const NetParams& params, const ForwardTape& tape, double upstream) {
  return backward(params, tape, VectorXd::Constant(static_cast<Index>(tape.offsets.size()), upstream));
}

void adam_update(NetParams& params, const VectorXd& gradient, double learn_rate) {
  if (gradient.size() != params.size()) {
    throw std::invalid_argument("adam_update: gradient size does not match parameters");
  }
  const std::uint64_t step = params.adam_step() + 1;
  params.set_adam_step(step);
  params.adam_m() = kAdamBeta1 * params.adam_m() + (1.0 - kAdamBeta1) * gradient;
  params.adam_v() = kAdamBeta2 * params.adam_v() + (1.0 - kAdamBeta2) * gradient.cwiseAbs2();
  const double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(step));
  params.values().array() -= learn_rate * (params.adam_m().array() / c1) /
                             ((params.adam_v().array() / c2).sqrt() + kAdamEpsilon);
}

}  // namespace l2b::nn
