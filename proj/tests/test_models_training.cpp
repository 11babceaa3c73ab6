#include "doctest.h"
#include "support.hpp"

#include "wavescope/checkpoint.hpp"
#include "wavescope/model.hpp"
#include "wavescope/training.hpp"

#include "json.hpp"

using namespace wavescope;
using testing::random_vector;

namespace {

ModelConfig small_raw(Index length = 1024, Index classes = 2) {
  ModelConfig c;
  c.arch = Pipeline::raw;
  c.f1 = 8;
  c.nb_f = 4;
  c.input_length = length;
  c.hidden = 16;
  c.n_classes = classes;
  c.seed = 7;
  return c;
}

ModelConfig small_mfcc() {
  ModelConfig c;
  c.arch = Pipeline::mfcc;
  c.n_mfcc = 16;
  c.n_frames = 20;
  c.vgg_channels = 2;
  c.hidden = 8;
  c.n_classes = 10;
  c.seed = 3;
  return c;
}

// Raw stack parameter count written out layer by layer.
Index raw_parameter_oracle(Index L, Index f1, Index nb_f, Index stride, Index hidden, Index classes) {
  Index count = nb_f * f1 + nb_f;
  Index len = ((L - f1) / stride + 1) / 8;
  count += 2 * nb_f * nb_f * 5 + 2 * nb_f;
  len = (len - 4) / 4;
  count += 2 * nb_f * 2 * nb_f * 5 + 2 * nb_f;
  len = (len - 4) / 4;
  count += 2 * nb_f * len * hidden + hidden;
  count += hidden * classes + classes;
  return count;
}

// Two classes split by the sign of a DC offset.
std::vector<Sample> separable_set(Index n_per_class, Index length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Sample> out;
  for (Index i = 0; i < n_per_class; ++i)
    for (Index label : {0, 1}) {
      const double offset = label == 0 ? -0.5 : 0.5;
      Eigen::VectorXd x = 0.2 * testing::gaussian_vector(length, rng);
      x.array() += offset;
      out.push_back({Tensor::from_vector(x), label});
    }
  return out;
}

double max_param_diff(Model& a, Model& b) {
  auto pa = a.parameters(), pb = b.parameters();
  double d = 0.0;
  for (size_t i = 0; i < pa.size(); ++i) d = std::max(d, (*pa[i] - *pb[i]).cwiseAbs().maxCoeff());
  return d;
}

}  // namespace

TEST_CASE("build_raw_model: full-size first layer") {
  ModelConfig cfg;
  cfg.input_length = 32000;
  const Model m = build_raw_model(cfg);
  CHECK(m.layer(0).output_shape(m.input_shape()) == Shape{32, (32000 - 72) / 2 + 1});
  CHECK(m.output_shape() == Shape{10});
  CHECK(m.parameter_count() == raw_parameter_oracle(32000, 72, 32, 2, 128, 10));
  CHECK(build_raw_model(cfg).parameter_count() == m.parameter_count());

  const Eigen::VectorXd p = predict(m, Tensor({1, 32000}));
  CHECK(p.size() == 10);
  CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
  CHECK(p.maxCoeff() < 0.5);
}

TEST_CASE("build_raw_model: too-short input is a contract error") {
  CHECK_THROWS_AS(build_raw_model(small_raw(200)), ContractError);
}

TEST_CASE("build_mfcc_model: shapes and end-to-end gradient") {
  const Model m = build_mfcc_model(small_mfcc());
  CHECK(m.input_shape() == Shape{1, 16, 20});
  std::mt19937_64 rng(51);
  Tensor x({1, 16, 20}, random_vector(16 * 20, rng));
  const Eigen::VectorXd p = predict(m, x);
  CHECK(p.size() == 10);
  CHECK(std::abs(p.sum() - 1.0) <= 1e-12);

  auto grads = m.zero_grads();
  const Index label = 4;
  m.loss_and_grad(x, label, grads);
  Model probe = m;
  const double h = 1e-5;
  double worst = 0.0;
  for (Index li = 0; li < probe.layer_count(); ++li) {
    auto lp = probe.layer(li).params();
    for (size_t k = 0; k < lp.size(); ++k) {
      Eigen::VectorXd& v = *lp[k];
      for (Index i = 0; i < v.size(); i += 1 + v.size() / 25) {
        const double keep = v[i];
        auto g0 = probe.zero_grads();
        v[i] = keep + h;
        const double lp_ = probe.loss_and_grad(x, label, g0);
        v[i] = keep - h;
        const double lm_ = probe.loss_and_grad(x, label, g0);
        v[i] = keep;
        const double num = (lp_ - lm_) / (2.0 * h);
        const double ana = grads[static_cast<size_t>(li)][k][i];
        const double scale = std::max(std::abs(num), std::abs(ana));
        if (scale > 1e-6) worst = std::max(worst, std::abs(num - ana) / scale);
      }
    }
  }
  CHECK(worst <= 1e-3);
}

TEST_CASE("predict: batch equals per item, argmax ties go low") {
  const Model m = build_raw_model(small_raw());
  std::mt19937_64 rng(52);
  std::vector<Tensor> batch;
  for (int i = 0; i < 5; ++i) batch.push_back(Tensor::from_vector(random_vector(1024, rng)));
  const auto out = predict(m, batch);
  for (size_t i = 0; i < batch.size(); ++i) CHECK(out[i] == predict(m, batch[i]));
  CHECK(argmax(Eigen::Vector4d(0.1, 0.4, 0.4, 0.1)) == 1);
  CHECK(argmax(Eigen::Vector3d(0.2, 0.2, 0.2)) == 0);
}

TEST_CASE("train: separable toy set reaches accuracy 1.0") {
  const auto data = separable_set(16, 1024, 53);
  Model m = build_raw_model(small_raw());
  TrainConfig tc;
  tc.lr = 0.003;
  tc.batch_size = 8;
  tc.seed = 1;
  const TrainHistory h = train(m, data, tc);
  CHECK(h.epochs.size() <= 30);
  CHECK(accuracy(m, data) == 1.0);
}

TEST_CASE("train: determinism, lr = 0 invariance, stop reasons") {
  const auto data = separable_set(6, 1024, 54);
  TrainConfig tc;
  tc.max_epochs = 5;
  tc.batch_size = 4;
  tc.seed = 99;

  Model a = build_raw_model(small_raw()), b = build_raw_model(small_raw());
  const TrainHistory ha = train(a, data, tc);
  const TrainHistory hb = train(b, data, tc);
  CHECK(ha == hb);
  CHECK(max_param_diff(a, b) == 0.0);
  CHECK(ha.stop == StopReason::max_epochs);
  CHECK(ha.epochs.size() == 5);

  Model frozen = build_raw_model(small_raw()), init = build_raw_model(small_raw());
  TrainConfig zero = tc;
  zero.lr = 0.0;
  zero.max_epochs = 30;
  const TrainHistory hz = train(frozen, data, zero);
  CHECK(max_param_diff(frozen, init) == 0.0);
  CHECK(hz.stop == StopReason::patience);
  CHECK(hz.epochs.size() == 1 + static_cast<size_t>(zero.patience));
  for (const auto& e : hz.epochs) CHECK(e.lr == 0.0);

  std::vector<Sample> poisoned = data;
  poisoned[0].input.values[3] = std::numeric_limits<double>::quiet_NaN();
  Model n = build_raw_model(small_raw());
  const TrainHistory hn = train(n, poisoned, tc);
  CHECK(hn.stop == StopReason::nan);
  CHECK(!hn.diagnostic.empty());

  CHECK_THROWS_AS(train(n, std::span<const Sample>(), tc), ContractError);
  std::vector<Sample> bad_label = data;
  bad_label[0].label = 5;
  CHECK_THROWS_AS(train(n, bad_label, tc), ContractError);
}

TEST_CASE("train: history lr follows the schedule") {
  const auto data = separable_set(2, 1024, 55);
  Model m = build_raw_model(small_raw());
  TrainConfig tc;
  tc.max_epochs = 7;
  tc.patience = 100;
  const TrainHistory h = train(m, data, tc);
  REQUIRE(h.epochs.size() == 7);
  for (const auto& e : h.epochs) CHECK(e.lr == lr_at_epoch(tc.schedule(), e.epoch));
}

TEST_CASE("checkpoint round trip") {
  testing::TempDir dir("ckpt");
  const auto data = separable_set(3, 1024, 56);
  Model m = build_raw_model(small_raw());
  TrainConfig tc;
  tc.max_epochs = 2;
  const TrainHistory h = train(m, data, tc);
  save_checkpoint(dir / "model.bin", m, tc, h);

  const Checkpoint c = load_checkpoint(dir / "model.bin");
  CHECK(c.history == h);
  CHECK(c.train.max_epochs == 2);
  for (const auto& s : data) CHECK(predict(c.model, s.input) == predict(m, s.input));

  const FilterBank bank = load_filter_bank(dir / "model.bin");
  const FilterBank ref = m.filter_bank();
  CHECK(bank.weights == ref.weights);
  CHECK(bank.bias == ref.bias);
  CHECK(bank.stride == 2);
  CHECK(bank.sample_rate == 8000);

  const Model mm = build_mfcc_model(small_mfcc());
  const Checkpoint cm = checkpoint_from_string(checkpoint_to_string(mm, tc, {}));
  std::mt19937_64 rng(57);
  const Tensor x({1, 16, 20}, random_vector(320, rng));
  CHECK(predict(cm.model, x) == predict(mm, x));

  auto doc = nlohmann::json::parse(checkpoint_to_string(m, tc, h));
  doc["version"] = 9;
  CHECK_THROWS_AS(checkpoint_from_string(doc.dump()), UnsupportedError);
  CHECK_THROWS_AS(checkpoint_from_string("{not json"), FormatError);
  CHECK_THROWS_AS(checkpoint_from_string("{\"format\":\"other\"}"), FormatError);
  CHECK_THROWS_AS(load_checkpoint(dir / "missing.bin"), FormatError);
}
