#include "radmon/gru/gru.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "internal/binfile.hpp"

namespace radmon::gru {

namespace {

constexpr int kMicroBatch = 32;  // bounds activation-cache memory during training

void init_matrix(Mat<float>& w, int rows, int cols, Rng& g) {
  w.resize(rows, cols);
  const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
  std::uniform_real_distribution<double> u(-bound, bound);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) w(r, c) = static_cast<float>(u(g));
}

}  // namespace

GruModel make_model(int input_dim, int time_steps, const std::vector<int>& gru_hidden,
                    const std::vector<int>& fc_hidden, const std::vector<std::string>& classes,
                    uint64_t seed) {
  if (input_dim < 1 || time_steps < 1 || gru_hidden.empty() || classes.size() < 2)
    raise(Err::BadConfig, "model needs positive dims, >=1 GRU layer and >=2 classes");
  GruModel m;
  m.input_dim = input_dim;
  m.time_steps = time_steps;
  m.class_names = classes;
  m.init_seed = seed;

  Rng g(derive_seed(seed, 0x6121));
  int d = input_dim;
  for (int h : gru_hidden) {
    GruLayerParamsT<float> l;
    init_matrix(l.W_rh, h, h, g);
    init_matrix(l.W_rx, h, d, g);
    l.b_r = Vec<float>::Zero(h);
    init_matrix(l.W_zh, h, h, g);
    init_matrix(l.W_zx, h, d, g);
    l.b_z = Vec<float>::Zero(h);
    init_matrix(l.W_hh, h, h, g);
    init_matrix(l.W_hx, h, d, g);
    l.b_h = Vec<float>::Zero(h);
    m.layers.push_back(std::move(l));
    d = h;
  }
  std::vector<int> fc_dims = fc_hidden;
  fc_dims.push_back(static_cast<int>(classes.size()));
  for (int out : fc_dims) {
    Mat<float> w;
    init_matrix(w, out, d, g);
    m.fc_w.push_back(std::move(w));
    m.fc_b.push_back(Vec<float>::Zero(out));
    d = out;
  }
  return m;
}

Prediction predict(const GruModel& model, const float* window_values, size_t count) {
  const auto cache = forward<float>(model, window_values, count);
  Prediction p;
  p.class_index = 0;
  float best = cache.probs(0, 0);
  for (int i = 1; i < cache.probs.rows(); ++i) {
    if (cache.probs(i, 0) > best) {  // strict: ties stay on the lower index
      best = cache.probs(i, 0);
      p.class_index = i;
    }
  }
  p.confidence = best;
  return p;
}

namespace {

// Forward a set of examples in fixed order, returning (mean loss, accuracy).
std::pair<double, double> evaluate(const GruModel& model, const Dataset& set,
                                   const std::vector<size_t>& idx) {
  double loss = 0;
  size_t correct = 0;
  const size_t n = idx.size();
  const size_t dim = static_cast<size_t>(model.time_steps) * model.input_dim;
  for (size_t pos = 0; pos < n; pos += kMicroBatch) {
    const int b = static_cast<int>(std::min<size_t>(kMicroBatch, n - pos));
    Mat<float> x(dim, b);
    for (int j = 0; j < b; ++j)
      x.col(j) = normalize_window<float>(set[idx[pos + j]].x.data(), dim);
    const auto cache = forward_batch<float>(model, x);
    for (int j = 0; j < b; ++j) {
      const int y = set[idx[pos + j]].label;
      loss += cross_entropy<float>(cache.probs.col(j), y);
      int arg = 0;
      for (int i = 1; i < cache.probs.rows(); ++i)
        if (cache.probs(i, j) > cache.probs(arg, j)) arg = i;
      correct += (arg == y);
    }
  }
  return {loss / std::max<size_t>(1, n), double(correct) / std::max<size_t>(1, n)};
}

}  // namespace

TrainMetrics train(GruModel& model, const Dataset& train_set, const Dataset& val_set,
                   const TrainConfig& cfg) {
  if (train_set.empty()) raise(Err::EmptyDataset, "no training examples");
  const int classes = model.num_classes();
  std::vector<int> seen(classes, 0);
  for (const auto& e : train_set) {
    if (e.label < 0 || e.label >= classes) raise(Err::BadLabel, "label outside model classes");
    seen[e.label] = 1;
  }
  for (int c = 0; c < classes; ++c)
    if (!seen[c])
      raise(Err::ClassMissing, "class " + std::to_string(c) + " absent from training set");

  const size_t dim = static_cast<size_t>(model.time_steps) * model.input_dim;
  for (const auto& e : train_set)
    if (e.x.size() != dim) raise(Err::ShapeMismatch, "training window size mismatch");

  TrainMetrics metrics;
  AdamStateT<float> state = make_adam_state(model);
  std::vector<size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::vector<size_t> val_idx(val_set.size());
  std::iota(val_idx.begin(), val_idx.end(), size_t{0});

  GruModel best_model = model;
  double best_metric = std::numeric_limits<double>::infinity();
  int stale = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(cfg.seed, 0xE40C, static_cast<uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double epoch_loss = 0;
    size_t epoch_correct = 0;
    for (size_t pos = 0; pos < order.size(); pos += cfg.batch_size) {
      const size_t batch_n = std::min<size_t>(cfg.batch_size, order.size() - pos);
      GruGradsT<float> grads = zero_grads(model);
      const float scale = 1.0f / static_cast<float>(batch_n);
      for (size_t mb = 0; mb < batch_n; mb += kMicroBatch) {
        const int b = static_cast<int>(std::min<size_t>(kMicroBatch, batch_n - mb));
        Mat<float> x(dim, b);
        std::vector<int> labels(b);
        for (int j = 0; j < b; ++j) {
          const auto& e = train_set[order[pos + mb + j]];
          x.col(j) = normalize_window<float>(e.x.data(), dim);
          labels[j] = e.label;
        }
        const auto cache = forward_batch<float>(model, x);
        backward_batch<float>(model, cache, labels, scale, grads);
        for (int j = 0; j < b; ++j) {
          epoch_loss += cross_entropy<float>(cache.probs.col(j), labels[j]);
          int arg = 0;
          for (int i = 1; i < cache.probs.rows(); ++i)
            if (cache.probs(i, j) > cache.probs(arg, j)) arg = i;
          epoch_correct += (arg == labels[j]);
        }
      }
      adam_step<float>(model, grads, state, cfg);
    }

    metrics.train_loss.push_back(epoch_loss / train_set.size());
    metrics.train_accuracy.push_back(double(epoch_correct) / train_set.size());

    double plateau_metric = metrics.train_loss.back();
    if (!val_set.empty()) {
      const auto [vl, va] = evaluate(model, val_set, val_idx);
      metrics.val_loss.push_back(vl);
      metrics.val_accuracy.push_back(va);
      plateau_metric = vl;
    }
    metrics.epochs_run = epoch + 1;

    if (plateau_metric < best_metric - 1e-9) {
      best_metric = plateau_metric;
      best_model = model;
      metrics.best_epoch = epoch;
      stale = 0;
    } else if (++stale >= cfg.plateau_epochs) {
      break;
    }
  }
  model = best_model;
  return metrics;
}

namespace {

void append_matrix_rowmajor(io::ChunkWriter& w, const Mat<float>& m, std::vector<float>& buf) {
  buf.clear();
  buf.reserve(static_cast<size_t>(m.rows()) * m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) buf.push_back(m(r, c));
  w.append(buf.data(), buf.size());
}

void append_vector(io::ChunkWriter& w, const Vec<float>& v, std::vector<float>& buf) {
  buf.assign(v.data(), v.data() + v.size());
  w.append(buf.data(), buf.size());
}

void read_matrix_rowmajor(io::ChunkReader& r, Mat<float>& m, int rows, int cols,
                          std::vector<float>& buf) {
  buf.resize(static_cast<size_t>(rows) * cols);
  r.read(buf.data(), buf.size());
  m.resize(rows, cols);
  size_t k = 0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = buf[k++];
}

void read_vector(io::ChunkReader& r, Vec<float>& v, int n, std::vector<float>& buf) {
  buf.resize(n);
  r.read(buf.data(), buf.size());
  v.resize(n);
  std::copy(buf.begin(), buf.end(), v.data());
}

}  // namespace

void save_model(const GruModel& model, const std::string& path) {
  io::json header;
  header["format_version"] = io::kFormatVersion;
  io::json layer_dims = io::json::array();
  for (const auto& l : model.layers) layer_dims.push_back({{"h", l.hidden()}, {"d", l.input()}});
  header["layer_dims"] = layer_dims;
  io::json fc_dims = io::json::array();
  for (const auto& w : model.fc_w)
    fc_dims.push_back({{"out", static_cast<int>(w.rows())}, {"in", static_cast<int>(w.cols())}});
  header["fc_dims"] = fc_dims;
  header["class_names"] = model.class_names;
  header["input_dim"] = model.input_dim;
  header["time_steps"] = model.time_steps;
  header["normalization"] = "max_plus_1e-12";
  header["seed"] = model.init_seed;

  io::ChunkWriter w(path, "GRUM", header);
  std::vector<float> buf;
  for (const auto& l : model.layers) {
    append_matrix_rowmajor(w, l.W_rh, buf);
    append_matrix_rowmajor(w, l.W_rx, buf);
    append_vector(w, l.b_r, buf);
    append_matrix_rowmajor(w, l.W_zh, buf);
    append_matrix_rowmajor(w, l.W_zx, buf);
    append_vector(w, l.b_z, buf);
    append_matrix_rowmajor(w, l.W_hh, buf);
    append_matrix_rowmajor(w, l.W_hx, buf);
    append_vector(w, l.b_h, buf);
  }
  for (size_t i = 0; i < model.fc_w.size(); ++i) {
    append_matrix_rowmajor(w, model.fc_w[i], buf);
    append_vector(w, model.fc_b[i], buf);
  }
  w.close();
}

GruModel load_model(const std::string& path) {
  io::ChunkReader r(path, "GRUM");
  const io::json& h = r.header();
  io::check_format_version(h, path);

  GruModel m;
  m.input_dim = io::header_get<int>(h, "input_dim", path);
  m.time_steps = io::header_get<int>(h, "time_steps", path);
  m.class_names = io::header_get<std::vector<std::string>>(h, "class_names", path);
  m.init_seed = io::header_get<uint64_t>(h, "seed", path);
  if (io::header_get<std::string>(h, "normalization", path) != "max_plus_1e-12")
    raise(Err::BadFile, path + ": unknown normalization scheme");

  uint64_t expect = 0;
  std::vector<std::pair<int, int>> ldims, fdims;
  for (const auto& jl : h.at("layer_dims")) {
    const int hh = jl.at("h").get<int>();
    const int dd = jl.at("d").get<int>();
    ldims.push_back({hh, dd});
    expect += 3ull * (uint64_t(hh) * hh + uint64_t(hh) * dd + hh);
  }
  for (const auto& jf : h.at("fc_dims")) {
    const int out = jf.at("out").get<int>();
    const int in = jf.at("in").get<int>();
    fdims.push_back({out, in});
    expect += uint64_t(out) * in + out;
  }
  if (r.remaining() != expect)
    raise(Err::LengthMismatch, path + ": parameter blob does not match declared dims");

  std::vector<float> buf;
  for (auto [hh, dd] : ldims) {
    GruLayerParamsT<float> l;
    read_matrix_rowmajor(r, l.W_rh, hh, hh, buf);
    read_matrix_rowmajor(r, l.W_rx, hh, dd, buf);
    read_vector(r, l.b_r, hh, buf);
    read_matrix_rowmajor(r, l.W_zh, hh, hh, buf);
    read_matrix_rowmajor(r, l.W_zx, hh, dd, buf);
    read_vector(r, l.b_z, hh, buf);
    read_matrix_rowmajor(r, l.W_hh, hh, hh, buf);
    read_matrix_rowmajor(r, l.W_hx, hh, dd, buf);
    read_vector(r, l.b_h, hh, buf);
    m.layers.push_back(std::move(l));
  }
  for (auto [out, in] : fdims) {
    Mat<float> w;
    read_matrix_rowmajor(r, w, out, in, buf);
    Vec<float> b;
    read_vector(r, b, out, buf);
    m.fc_w.push_back(std::move(w));
    m.fc_b.push_back(std::move(b));
  }
  return m;
}

}  // namespace radmon::gru
