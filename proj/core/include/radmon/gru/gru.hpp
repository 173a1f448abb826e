#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "radmon/errors.hpp"
#include "radmon/rng.hpp"

namespace radmon::gru {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

inline constexpr double kNormEps = 1e-12;   // per-window max normalization
inline constexpr double kProbClamp = 1e-12; // cross-entropy floor

// One stacked-GRU layer. The recurrent weights multiply the previous hidden
// state, the input weights multiply the lower layer's output (or the window
// row for layer 0).
template <typename T>
struct GruLayerParamsT {
  Mat<T> W_rh, W_rx;
  Vec<T> b_r;
  Mat<T> W_zh, W_zx;
  Vec<T> b_z;
  Mat<T> W_hh, W_hx;
  Vec<T> b_h;

  int hidden() const { return static_cast<int>(W_rh.rows()); }
  int input() const { return static_cast<int>(W_rx.cols()); }
};

template <typename T>
struct GruModelT {
  std::vector<GruLayerParamsT<T>> layers;
  std::vector<Mat<T>> fc_w;  // last layer is linear, earlier ones rectified
  std::vector<Vec<T>> fc_b;
  std::vector<std::string> class_names;
  int input_dim = 0;
  int time_steps = 0;
  uint64_t init_seed = 0;

  int num_classes() const { return static_cast<int>(fc_b.back().size()); }
};

using GruModel = GruModelT<float>;

// Gradient and Adam-moment containers share the parameter shapes.
template <typename T>
struct GruGradsT {
  std::vector<GruLayerParamsT<T>> layers;
  std::vector<Mat<T>> fc_w;
  std::vector<Vec<T>> fc_b;
};

template <typename T>
struct AdamStateT {
  GruGradsT<T> m, v;
  int64_t step = 0;
};

struct TrainConfig {
  double learning_rate = 0.01;
  int batch_size = 512;
  int epochs = 200;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  uint64_t seed = 0;
  double clip_norm = 0;     // 0 disables clipping
  int plateau_epochs = 20;  // early exit when validation loss stalls this long
};

namespace detail {

template <typename T>
Vec<T> sigmoid(const Vec<T>& x) {
  return x.unaryExpr([](T v) { return T(1) / (T(1) + std::exp(-v)); });
}

template <typename T>
Mat<T> sigmoid_m(const Mat<T>& x) {
  return x.unaryExpr([](T v) { return T(1) / (T(1) + std::exp(-v)); });
}

}  // namespace detail

template <typename T>
struct CellCacheT {
  Vec<T> x, h_prev, o_r, o_z, h_tilde;
};

// Eqs. of the cell: reset gate, candidate from the gated hidden state, update
// gate, then a convex mix that keeps every coordinate inside [-1, 1].
template <typename T>
std::pair<Vec<T>, CellCacheT<T>> gru_cell_forward(const Vec<T>& x, const Vec<T>& h_prev,
                                                  const GruLayerParamsT<T>& p) {
  if (x.size() != p.W_rx.cols() || h_prev.size() != p.W_rh.cols())
    raise(Err::ShapeMismatch, "cell input dims do not match layer parameters");
  CellCacheT<T> c;
  c.x = x;
  c.h_prev = h_prev;
  c.o_r = detail::sigmoid<T>(p.W_rh * h_prev + p.W_rx * x + p.b_r);
  c.h_tilde = (p.W_hh * c.o_r.cwiseProduct(h_prev) + p.W_hx * x + p.b_h)
                  .unaryExpr([](T v) { return std::tanh(v); });
  c.o_z = detail::sigmoid<T>(p.W_zh * h_prev + p.W_zx * x + p.b_z);
  Vec<T> h_new =
      c.o_z.cwiseProduct(h_prev) + (Vec<T>::Ones(h_prev.size()) - c.o_z).cwiseProduct(c.h_tilde);
  return {std::move(h_new), std::move(c)};
}

// Batched step cache: columns are batch samples.
template <typename T>
struct StepCacheT {
  Mat<T> x, h_prev, o_r, o_z, h_tilde, h_new;
};

template <typename T>
struct ForwardCacheT {
  std::vector<std::vector<StepCacheT<T>>> steps;  // [time][layer]
  std::vector<Mat<T>> fc_in;                      // input to fc layer i
  std::vector<Mat<T>> fc_pre;                     // pre-activation of fc layer i
  Mat<T> probs;                                   // classes x batch
};

template <typename T>
void cell_forward_batch(const Mat<T>& x, const Mat<T>& h_prev, const GruLayerParamsT<T>& p,
                        StepCacheT<T>& c) {
  c.x = x;
  c.h_prev = h_prev;
  Mat<T> a_r = (p.W_rh * h_prev + p.W_rx * x).colwise() + p.b_r;
  c.o_r = detail::sigmoid_m<T>(a_r);
  Mat<T> a_h = (p.W_hh * c.o_r.cwiseProduct(h_prev) + p.W_hx * x).colwise() + p.b_h;
  c.h_tilde = a_h.unaryExpr([](T v) { return std::tanh(v); });
  Mat<T> a_z = (p.W_zh * h_prev + p.W_zx * x).colwise() + p.b_z;
  c.o_z = detail::sigmoid_m<T>(a_z);
  c.h_new = c.o_z.cwiseProduct(h_prev) +
            (Mat<T>::Ones(h_prev.rows(), h_prev.cols()) - c.o_z).cwiseProduct(c.h_tilde);
}

// Whole-window forward over a batch. `windows` is (time_steps*input_dim) x B,
// one flattened window per column, already normalized.
template <typename T>
ForwardCacheT<T> forward_batch(const GruModelT<T>& model, const Mat<T>& windows) {
  const int steps = model.time_steps;
  const int dim = model.input_dim;
  const int batch = static_cast<int>(windows.cols());
  if (windows.rows() != static_cast<Eigen::Index>(steps) * dim)
    raise(Err::ShapeMismatch, "window size does not match model (time_steps * input_dim)");

  ForwardCacheT<T> cache;
  cache.steps.resize(steps);
  const int num_layers = static_cast<int>(model.layers.size());
  if (num_layers == 0 || model.fc_w.empty()) raise(Err::BadConfig, "model has no layers");
  if (model.layers[0].input() != dim)
    raise(Err::ShapeMismatch, "layer 0 input dim does not match model input_dim");
  for (int l = 1; l < num_layers; ++l)
    if (model.layers[l].input() != model.layers[l - 1].hidden())
      raise(Err::ShapeMismatch, "layer stack dims are inconsistent");
  std::vector<Mat<T>> h(num_layers);
  for (int l = 0; l < num_layers; ++l)
    h[l] = Mat<T>::Zero(model.layers[l].hidden(), batch);

  for (int t = 0; t < steps; ++t) {
    cache.steps[t].resize(num_layers);
    Mat<T> x = windows.middleRows(static_cast<Eigen::Index>(t) * dim, dim);
    for (int l = 0; l < num_layers; ++l) {
      cell_forward_batch<T>(x, h[l], model.layers[l], cache.steps[t][l]);
      h[l] = cache.steps[t][l].h_new;
      x = h[l];
    }
  }

  // FC head on the final step's top hidden state
  Mat<T> act = h[num_layers - 1];
  const int fc_count = static_cast<int>(model.fc_w.size());
  for (int i = 0; i < fc_count; ++i) {
    cache.fc_in.push_back(act);
    Mat<T> pre = (model.fc_w[i] * act).colwise() + model.fc_b[i];
    cache.fc_pre.push_back(pre);
    if (i + 1 < fc_count)
      act = pre.cwiseMax(T(0));
    else
      act = pre;
  }

  // softmax per column, max-shifted for stability
  cache.probs = act;
  for (int b = 0; b < batch; ++b) {
    auto col = cache.probs.col(b);
    const T mx = col.maxCoeff();
    col = (col.array() - mx).exp();
    col /= col.sum();
  }
  return cache;
}

// Normalizes one flattened window by its own max magnitude plus epsilon.
template <typename T>
Vec<T> normalize_window(const float* values, size_t count) {
  Vec<T> out(count);
  float mx = 0.f;
  for (size_t i = 0; i < count; ++i) mx = std::max(mx, std::abs(values[i]));
  const T scale = T(1) / (T(mx) + T(kNormEps));
  for (size_t i = 0; i < count; ++i) out[static_cast<Eigen::Index>(i)] = T(values[i]) * scale;
  return out;
}

template <typename T>
ForwardCacheT<T> forward(const GruModelT<T>& model, const float* window_values, size_t count) {
  if (count != static_cast<size_t>(model.time_steps) * model.input_dim)
    raise(Err::ShapeMismatch, "window has " + std::to_string(count) + " values, model expects " +
                                  std::to_string(size_t(model.time_steps) * model.input_dim));
  const Vec<T> x = normalize_window<T>(window_values, count);
  return forward_batch<T>(model, x);
}

template <typename T>
T cross_entropy(const Vec<T>& probs, int label) {
  if (label < 0 || label >= probs.size())
    raise(Err::BadLabel, "label " + std::to_string(label) + " outside [0, " +
                             std::to_string(probs.size()) + ")");
  const T p = std::max(probs[label], T(kProbClamp));
  return -std::log(p);
}

template <typename T>
GruGradsT<T> zero_grads(const GruModelT<T>& model) {
  GruGradsT<T> g;
  for (const auto& l : model.layers) {
    GruLayerParamsT<T> z;
    z.W_rh = Mat<T>::Zero(l.W_rh.rows(), l.W_rh.cols());
    z.W_rx = Mat<T>::Zero(l.W_rx.rows(), l.W_rx.cols());
    z.b_r = Vec<T>::Zero(l.b_r.size());
    z.W_zh = Mat<T>::Zero(l.W_zh.rows(), l.W_zh.cols());
    z.W_zx = Mat<T>::Zero(l.W_zx.rows(), l.W_zx.cols());
    z.b_z = Vec<T>::Zero(l.b_z.size());
    z.W_hh = Mat<T>::Zero(l.W_hh.rows(), l.W_hh.cols());
    z.W_hx = Mat<T>::Zero(l.W_hx.rows(), l.W_hx.cols());
    z.b_h = Vec<T>::Zero(l.b_h.size());
    g.layers.push_back(std::move(z));
  }
  for (const auto& w : model.fc_w) g.fc_w.push_back(Mat<T>::Zero(w.rows(), w.cols()));
  for (const auto& b : model.fc_b) g.fc_b.push_back(Vec<T>::Zero(b.size()));
  return g;
}

// Reverse-mode gradients of mean cross-entropy over the batch, accumulated
// into `grads` (so micro-batches can share one container). `labels` has one
// entry per batch column; `scale` multiplies the contribution (use
// 1/total_batch for mean-loss training).
template <typename T>
void backward_batch(const GruModelT<T>& model, const ForwardCacheT<T>& cache,
                    const std::vector<int>& labels, T scale, GruGradsT<T>& grads) {
  const int batch = static_cast<int>(cache.probs.cols());
  const int num_layers = static_cast<int>(model.layers.size());
  const int fc_count = static_cast<int>(model.fc_w.size());

  // softmax + CE: dpre = probs - onehot
  Mat<T> dpre = cache.probs;
  for (int b = 0; b < batch; ++b) {
    const int y = labels[b];
    if (y < 0 || y >= dpre.rows()) raise(Err::BadLabel, "label out of range in batch");
    dpre(y, b) -= T(1);
  }
  dpre *= scale;

  Mat<T> dact;
  for (int i = fc_count - 1; i >= 0; --i) {
    if (i < fc_count - 1) {
      // rectifier derivative on the stored pre-activation
      dpre = dact.cwiseProduct(
          cache.fc_pre[i].unaryExpr([](T v) { return v > T(0) ? T(1) : T(0); }));
    }
    grads.fc_w[i] += dpre * cache.fc_in[i].transpose();
    grads.fc_b[i] += dpre.rowwise().sum();
    dact = model.fc_w[i].transpose() * dpre;
  }

  // BPTT: dH_rec[l] carries the recurrent gradient into step t's h of layer l
  std::vector<Mat<T>> dH_rec(num_layers);
  for (int l = 0; l < num_layers; ++l)
    dH_rec[l] = Mat<T>::Zero(model.layers[l].hidden(), batch);

  const int steps = model.time_steps;
  for (int t = steps - 1; t >= 0; --t) {
    Mat<T> dh_above = (t == steps - 1)
                          ? dact
                          : Mat<T>::Zero(model.layers[num_layers - 1].hidden(), batch);
    for (int l = num_layers - 1; l >= 0; --l) {
      const StepCacheT<T>& c = cache.steps[t][l];
      const GruLayerParamsT<T>& p = model.layers[l];
      GruLayerParamsT<T>& g = grads.layers[l];

      Mat<T> dh = dH_rec[l] + dh_above;

      Mat<T> d_oz = dh.cwiseProduct(c.h_prev - c.h_tilde);
      Mat<T> da_z = d_oz.cwiseProduct(c.o_z.cwiseProduct(Mat<T>::Ones(c.o_z.rows(), batch) - c.o_z));
      Mat<T> d_ht = dh.cwiseProduct(Mat<T>::Ones(c.o_z.rows(), batch) - c.o_z);
      Mat<T> da_h = d_ht.cwiseProduct(Mat<T>::Ones(c.h_tilde.rows(), batch) -
                                      c.h_tilde.cwiseProduct(c.h_tilde));
      Mat<T> d_rh = p.W_hh.transpose() * da_h;
      Mat<T> d_or = d_rh.cwiseProduct(c.h_prev);
      Mat<T> da_r = d_or.cwiseProduct(c.o_r.cwiseProduct(Mat<T>::Ones(c.o_r.rows(), batch) - c.o_r));

      const Mat<T> rh = c.o_r.cwiseProduct(c.h_prev);
      g.W_rh += da_r * c.h_prev.transpose();
      g.W_rx += da_r * c.x.transpose();
      g.b_r += da_r.rowwise().sum();
      g.W_zh += da_z * c.h_prev.transpose();
      g.W_zx += da_z * c.x.transpose();
      g.b_z += da_z.rowwise().sum();
      g.W_hh += da_h * rh.transpose();
      g.W_hx += da_h * c.x.transpose();
      g.b_h += da_h.rowwise().sum();

      dH_rec[l] = dh.cwiseProduct(c.o_z) + p.W_zh.transpose() * da_z +
                  d_rh.cwiseProduct(c.o_r) + p.W_rh.transpose() * da_r;
      dh_above = p.W_rx.transpose() * da_r + p.W_zx.transpose() * da_z +
                 p.W_hx.transpose() * da_h;
    }
  }
}

// Single-example convenience matching the operation list.
template <typename T>
GruGradsT<T> backward(const GruModelT<T>& model, const ForwardCacheT<T>& cache, int label) {
  GruGradsT<T> g = zero_grads(model);
  backward_batch<T>(model, cache, {label}, T(1), g);
  return g;
}

namespace detail {

template <typename T, typename M>
void adam_tensor(M& p, const M& g, M& m, M& v, const TrainConfig& cfg, double bc1, double bc2) {
  m = T(cfg.beta1) * m + T(1 - cfg.beta1) * g;
  v = (T(cfg.beta2) * v.array() + T(1 - cfg.beta2) * g.array().square()).matrix();
  const T lr = T(cfg.learning_rate);
  p.array() -= lr * (m.array() / T(bc1)) /
               ((v.array() / T(bc2)).sqrt() + T(cfg.eps));
}

template <typename T, typename F>
void for_each_tensor(GruModelT<T>& model, GruGradsT<T>& g, AdamStateT<T>& s, F&& f) {
  for (size_t l = 0; l < model.layers.size(); ++l) {
    auto& p = model.layers[l];
    auto& gl = g.layers[l];
    auto& ml = s.m.layers[l];
    auto& vl = s.v.layers[l];
    f(p.W_rh, gl.W_rh, ml.W_rh, vl.W_rh);
    f(p.W_rx, gl.W_rx, ml.W_rx, vl.W_rx);
    f(p.b_r, gl.b_r, ml.b_r, vl.b_r);
    f(p.W_zh, gl.W_zh, ml.W_zh, vl.W_zh);
    f(p.W_zx, gl.W_zx, ml.W_zx, vl.W_zx);
    f(p.b_z, gl.b_z, ml.b_z, vl.b_z);
    f(p.W_hh, gl.W_hh, ml.W_hh, vl.W_hh);
    f(p.W_hx, gl.W_hx, ml.W_hx, vl.W_hx);
    f(p.b_h, gl.b_h, ml.b_h, vl.b_h);
  }
  for (size_t i = 0; i < model.fc_w.size(); ++i) {
    f(model.fc_w[i], g.fc_w[i], s.m.fc_w[i], s.v.fc_w[i]);
    f(model.fc_b[i], g.fc_b[i], s.m.fc_b[i], s.v.fc_b[i]);
  }
}

}  // namespace detail

template <typename T>
AdamStateT<T> make_adam_state(const GruModelT<T>& model) {
  AdamStateT<T> s;
  s.m = zero_grads(model);
  s.v = zero_grads(model);
  return s;
}

template <typename T>
void adam_step(GruModelT<T>& model, GruGradsT<T>& grads, AdamStateT<T>& state,
               const TrainConfig& cfg) {
  if (cfg.clip_norm > 0) {
    double sq = 0;
    detail::for_each_tensor<T>(model, grads, state,
                               [&](auto&, auto& g, auto&, auto&) { sq += g.squaredNorm(); });
    const double norm = std::sqrt(sq);
    if (norm > cfg.clip_norm) {
      const T k = T(cfg.clip_norm / norm);
      detail::for_each_tensor<T>(model, grads, state,
                                 [&](auto&, auto& g, auto&, auto&) { g *= k; });
    }
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, double(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, double(state.step));
  detail::for_each_tensor<T>(model, grads, state, [&](auto& p, auto& g, auto& m, auto& v) {
    detail::adam_tensor<T>(p, g, m, v, cfg, bc1, bc2);
  });
}

GruModel make_model(int input_dim, int time_steps, const std::vector<int>& gru_hidden,
                    const std::vector<int>& fc_hidden, const std::vector<std::string>& classes,
                    uint64_t seed);

struct Prediction {
  int class_index = 0;
  double confidence = 0;
};

Prediction predict(const GruModel& model, const float* window_values, size_t count);

struct Example {
  std::vector<float> x;  // flattened window, time-major
  int label = 0;
};
using Dataset = std::vector<Example>;

struct TrainMetrics {
  std::vector<double> train_loss, train_accuracy, val_loss, val_accuracy;
  int best_epoch = -1;
  int epochs_run = 0;
};

TrainMetrics train(GruModel& model, const Dataset& train_set, const Dataset& val_set,
                   const TrainConfig& cfg);

void save_model(const GruModel& model, const std::string& path);
GruModel load_model(const std::string& path);

}  // namespace radmon::gru
