#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "radmon/errors.hpp"
#include "radmon/gru/gru.hpp"

using namespace radmon::gru;
using radmon::Err;
using radmon::Error;

namespace {

// Two-class toy sequences: each class parks its energy on its own bin, so a
// perfect classifier exists.
Example toy_example(int label, int time_steps, int input_dim, std::mt19937_64& g) {
  std::uniform_real_distribution<float> noise(0.f, 0.2f);
  Example e;
  e.label = label;
  e.x.assign(size_t(time_steps) * input_dim, 0.f);
  const int hot = label == 0 ? 1 : input_dim - 2;
  for (int t = 0; t < time_steps; ++t) {
    for (int i = 0; i < input_dim; ++i) e.x[size_t(t) * input_dim + i] = noise(g);
    e.x[size_t(t) * input_dim + hot] += 1.0f;
  }
  return e;
}

Dataset toy_set(int per_class, int time_steps, int input_dim, uint64_t seed) {
  std::mt19937_64 g(seed);
  Dataset set;
  for (int i = 0; i < per_class; ++i) {
    set.push_back(toy_example(0, time_steps, input_dim, g));
    set.push_back(toy_example(1, time_steps, input_dim, g));
  }
  return set;
}

template <typename M>
bool bits_equal(const M& a, const M& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(typename M::Scalar) * a.size()) == 0;
}

bool models_identical(const GruModel& a, const GruModel& b) {
  if (a.layers.size() != b.layers.size() || a.fc_w.size() != b.fc_w.size()) return false;
  for (size_t l = 0; l < a.layers.size(); ++l) {
    if (!bits_equal(a.layers[l].W_rh, b.layers[l].W_rh)) return false;
    if (!bits_equal(a.layers[l].W_rx, b.layers[l].W_rx)) return false;
    if (!bits_equal(a.layers[l].b_r, b.layers[l].b_r)) return false;
    if (!bits_equal(a.layers[l].W_zh, b.layers[l].W_zh)) return false;
    if (!bits_equal(a.layers[l].W_zx, b.layers[l].W_zx)) return false;
    if (!bits_equal(a.layers[l].b_z, b.layers[l].b_z)) return false;
    if (!bits_equal(a.layers[l].W_hh, b.layers[l].W_hh)) return false;
    if (!bits_equal(a.layers[l].W_hx, b.layers[l].W_hx)) return false;
    if (!bits_equal(a.layers[l].b_h, b.layers[l].b_h)) return false;
  }
  for (size_t i = 0; i < a.fc_w.size(); ++i) {
    if (!bits_equal(a.fc_w[i], b.fc_w[i])) return false;
    if (!bits_equal(a.fc_b[i], b.fc_b[i])) return false;
  }
  return true;
}

const std::vector<std::string> kTwoClasses = {"a", "b"};

}  // namespace

TEST_SUITE("gru_train") {

TEST_CASE("separable toy set reaches 99% train accuracy within 20 epochs") {
  const int steps = 6, dim = 8;
  GruModel m = make_model(dim, steps, {12}, {}, kTwoClasses, 5);
  Dataset train_set = toy_set(20, steps, dim, 101);
  Dataset val_set = toy_set(5, steps, dim, 202);

  TrainConfig cfg;
  cfg.batch_size = 8;
  cfg.epochs = 20;
  cfg.seed = 3;
  const auto metrics = train(m, train_set, val_set, cfg);

  REQUIRE(metrics.epochs_run >= 1);
  CHECK(metrics.train_accuracy.back() >= 0.99);
  CHECK(metrics.val_accuracy.back() >= 0.99);
  CHECK(metrics.train_loss.size() == size_t(metrics.epochs_run));
  CHECK(metrics.val_loss.size() == size_t(metrics.epochs_run));

  // trained model actually separates fresh draws
  std::mt19937_64 g(77);
  for (int i = 0; i < 10; ++i) {
    const Example e = toy_example(i % 2, steps, dim, g);
    CHECK(predict(m, e.x.data(), e.x.size()).class_index == e.label);
  }
}

TEST_CASE("overfitting the minimal dataset drives the loss down monotonically") {
  // smallest dataset satisfying the one-example-per-class precondition
  const int steps = 4, dim = 6;
  GruModel m = make_model(dim, steps, {8}, {}, kTwoClasses, 6);
  std::mt19937_64 g(55);
  Dataset train_set = {toy_example(0, steps, dim, g), toy_example(1, steps, dim, g)};

  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.seed = 4;
  const auto metrics = train(m, train_set, {}, cfg);

  REQUIRE(metrics.train_loss.size() == 10);
  for (size_t e = 1; e < metrics.train_loss.size(); ++e)
    CHECK(metrics.train_loss[e] < metrics.train_loss[e - 1]);
}

TEST_CASE("fixed seed trains to bit-identical parameters") {
  const int steps = 5, dim = 7;
  Dataset train_set = toy_set(6, steps, dim, 303);
  Dataset val_set = toy_set(2, steps, dim, 404);
  TrainConfig cfg;
  cfg.batch_size = 4;
  cfg.epochs = 6;
  cfg.seed = 99;

  GruModel a = make_model(dim, steps, {9}, {6}, kTwoClasses, 11);
  GruModel b = make_model(dim, steps, {9}, {6}, kTwoClasses, 11);
  const auto ma = train(a, train_set, val_set, cfg);
  const auto mb = train(b, train_set, val_set, cfg);

  CHECK(models_identical(a, b));
  CHECK(ma.train_loss == mb.train_loss);
  CHECK(ma.val_loss == mb.val_loss);
  CHECK(ma.best_epoch == mb.best_epoch);
}

TEST_CASE("validation plateau stops training early and restores the best epoch") {
  const int steps = 4, dim = 6;
  GruModel m = make_model(dim, steps, {8}, {}, kTwoClasses, 8);
  Dataset train_set = toy_set(4, steps, dim, 505);

  // validation examples carry deliberately swapped labels, so fitting the
  // training set makes validation loss climb after the first few epochs
  std::mt19937_64 g(66);
  Dataset val_set;
  for (int i = 0; i < 4; ++i) {
    Example e = toy_example(i % 2, steps, dim, g);
    e.label = 1 - e.label;
    val_set.push_back(std::move(e));
  }

  TrainConfig cfg;
  cfg.batch_size = 8;
  cfg.epochs = 200;
  cfg.plateau_epochs = 5;
  cfg.seed = 12;
  const auto metrics = train(m, train_set, val_set, cfg);

  CHECK(metrics.epochs_run < cfg.epochs);
  CHECK(metrics.epochs_run == metrics.best_epoch + 1 + cfg.plateau_epochs);
  double best = metrics.val_loss[0];
  for (double v : metrics.val_loss) best = std::min(best, v);
  CHECK(metrics.val_loss[size_t(metrics.best_epoch)] == best);
}

TEST_CASE("empty dataset is rejected") {
  GruModel m = make_model(6, 4, {8}, {}, kTwoClasses, 8);
  CHECK_THROWS_WITH_AS(train(m, {}, {}, TrainConfig{}), doctest::Contains("EmptyDataset"), Error);
}

TEST_CASE("a class with no training examples is rejected") {
  const int steps = 4, dim = 6;
  GruModel m = make_model(dim, steps, {8}, {}, kTwoClasses, 8);
  std::mt19937_64 g(9);
  Dataset train_set = {toy_example(0, steps, dim, g), toy_example(0, steps, dim, g)};
  CHECK_THROWS_WITH_AS(train(m, train_set, {}, TrainConfig{}), doctest::Contains("ClassMissing"),
                       Error);
}

}  // TEST_SUITE
