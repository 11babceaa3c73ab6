#include "wavescope/checkpoint.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace wavescope {

using nlohmann::json;

namespace {

json to_json(const ModelConfig& c) {
  return {{"arch", to_string(c.arch)},
          {"f1", c.f1},
          {"nb_f", c.nb_f},
          {"stride", c.stride},
          {"input_length", c.input_length},
          {"n_mfcc", c.n_mfcc},
          {"n_frames", c.n_frames},
          {"hidden", c.hidden},
          {"n_classes", c.n_classes},
          {"vgg_channels", c.vgg_channels},
          {"sample_rate", c.sample_rate},
          {"seed", c.seed}};
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig c;
  c.arch = pipeline_from_string(j.at("arch").get<std::string>());
  c.f1 = j.at("f1").get<Index>();
  c.nb_f = j.at("nb_f").get<Index>();
  c.stride = j.at("stride").get<Index>();
  c.input_length = j.at("input_length").get<Index>();
  c.n_mfcc = j.at("n_mfcc").get<Index>();
  c.n_frames = j.at("n_frames").get<Index>();
  c.hidden = j.at("hidden").get<Index>();
  c.n_classes = j.at("n_classes").get<Index>();
  c.vgg_channels = j.at("vgg_channels").get<Index>();
  c.sample_rate = j.at("sample_rate").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

json to_json(const TrainConfig& c) {
  return {{"lr", c.lr},
          {"decay", c.decay},
          {"epochs_per_decay", c.epochs_per_decay},
          {"max_epochs", c.max_epochs},
          {"patience", c.patience},
          {"min_delta", c.min_delta},
          {"batch_size", c.batch_size},
          {"seed", c.seed}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  c.lr = j.at("lr").get<double>();
  c.decay = j.at("decay").get<double>();
  c.epochs_per_decay = j.at("epochs_per_decay").get<int>();
  c.max_epochs = j.at("max_epochs").get<int>();
  c.patience = j.at("patience").get<int>();
  c.min_delta = j.at("min_delta").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

json to_json(const TrainHistory& h) {
  json epochs = json::array();
  for (const auto& e : h.epochs)
    epochs.push_back({{"epoch", e.epoch}, {"loss", e.loss}, {"accuracy", e.accuracy}, {"lr", e.lr}});
  return {{"stop", to_string(h.stop)}, {"diagnostic", h.diagnostic}, {"epochs", epochs}};
}

TrainHistory history_from_json(const json& j) {
  TrainHistory h;
  h.stop = stop_reason_from_string(j.at("stop").get<std::string>());
  h.diagnostic = j.value("diagnostic", "");
  for (const auto& e : j.at("epochs"))
    h.epochs.push_back({e.at("epoch").get<int>(), e.at("loss").get<double>(), e.at("accuracy").get<double>(),
                        e.at("lr").get<double>()});
  return h;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void read_into(const json& arr, Eigen::VectorXd& dst, const std::string& what) {
  const auto vals = arr.get<std::vector<double>>();
  if (static_cast<Index>(vals.size()) != dst.size())
    throw FormatError("checkpoint: " + what + " has " + std::to_string(vals.size()) + " values, expected " +
                      std::to_string(dst.size()));
  dst = Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Index>(vals.size()));
}

json layer_to_json(const Layer& l) {
  json j = {{"kind", l.kind()}};
  if (const auto* c = dynamic_cast<const Conv1d*>(&l)) {
    j["shape"] = {c->filters(), c->in_channels(), c->kernel()};
    j["stride"] = c->stride();
  } else if (const auto* c2 = dynamic_cast<const Conv2d*>(&l)) {
    j["shape"] = {c2->filters(), c2->in_channels(), c2->kernel_h(), c2->kernel_w()};
  } else if (const auto* d = dynamic_cast<const Dense*>(&l)) {
    j["shape"] = {d->outputs(), d->inputs()};
  } else if (const auto* p = dynamic_cast<const MaxPool1d*>(&l)) {
    j["size"] = p->size();
  } else if (const auto* p2 = dynamic_cast<const MaxPool2d*>(&l)) {
    j["size"] = p2->size();
  }
  const auto ps = l.params();
  if (ps.size() == 2) {
    j["weights"] = to_std(*ps[0]);
    j["bias"] = to_std(*ps[1]);
  }
  return j;
}

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("checkpoint: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
}

void check_header(const json& j) {
  if (!j.is_object() || j.value("format", "") != "wavescope-checkpoint")
    throw FormatError("checkpoint: not a wavescope checkpoint");
  const int version = j.value("version", 0);
  if (version != kCheckpointVersion)
    throw UnsupportedError("checkpoint: unsupported version " + std::to_string(version));
}

Checkpoint checkpoint_from_json(const json& j) {
  check_header(j);
  try {
    Checkpoint ck;
    ck.model = build_model(model_config_from_json(j.at("model")));
    ck.train = train_config_from_json(j.at("train"));
    ck.history = history_from_json(j.at("history"));
    const auto& layers = j.at("layers");
    if (static_cast<Index>(layers.size()) != ck.model.layer_count())
      throw FormatError("checkpoint: layer count does not match model config");
    for (Index i = 0; i < ck.model.layer_count(); ++i) {
      const auto& lj = layers[static_cast<size_t>(i)];
      Layer& l = ck.model.layer(i);
      if (lj.at("kind").get<std::string>() != l.kind())
        throw FormatError("checkpoint: layer " + std::to_string(i) + " kind mismatch");
      auto ps = l.params();
      if (ps.size() == 2) {
        read_into(lj.at("weights"), *ps[0], "layer " + std::to_string(i) + " weights");
        read_into(lj.at("bias"), *ps[1], "layer " + std::to_string(i) + " bias");
      }
    }
    return ck;
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
}

}  // namespace

std::string checkpoint_to_string(const Model& model, const TrainConfig& train, const TrainHistory& history) {
  json layers = json::array();
  for (Index i = 0; i < model.layer_count(); ++i) layers.push_back(layer_to_json(model.layer(i)));
  json j = {{"format", "wavescope-checkpoint"},
            {"version", kCheckpointVersion},
            {"model", to_json(model.config())},
            {"train", to_json(train)},
            {"history", to_json(history)},
            {"layers", layers}};
  return j.dump();
}

Checkpoint checkpoint_from_string(const std::string& text) {
  try {
    return checkpoint_from_json(json::parse(text));
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Model& model, const TrainConfig& train,
                     const TrainHistory& history) {
  std::ofstream out(path);
  if (!out) throw FormatError("checkpoint: cannot write " + path.string());
  out << checkpoint_to_string(model, train, history);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return checkpoint_from_json(parse_file(path)); }

FilterBank load_filter_bank(const std::filesystem::path& path) {
  const json j = parse_file(path);
  check_header(j);
  try {
    for (const auto& lj : j.at("layers")) {
      if (lj.at("kind").get<std::string>() != "conv1d") continue;
      const auto shape = lj.at("shape").get<std::vector<Index>>();
      if (shape.size() != 3 || shape[1] != 1)
        throw FormatError("checkpoint: first conv1d layer is not single-channel");
      FilterBank bank;
      bank.weights.resize(shape[0], shape[2]);
      bank.bias.resize(shape[0]);
      bank.stride = lj.at("stride").get<Index>();
      bank.sample_rate = j.at("model").at("sample_rate").get<int>();
      Eigen::VectorXd flat(shape[0] * shape[2]);
      read_into(lj.at("weights"), flat, "filter bank weights");
      read_into(lj.at("bias"), bank.bias, "filter bank bias");
      bank.weights = Eigen::Map<const RowMatrixXd>(flat.data(), shape[0], shape[2]);
      return bank;
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
  throw FormatError("checkpoint: no conv1d layer");
}

}  // namespace wavescope
