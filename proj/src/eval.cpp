#include "wavescope/eval.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace wavescope {

std::vector<Example> load_examples(const DatasetIndex& index, int sample_rate, double seconds) {
  std::vector<Example> out;
  out.reserve(index.entries.size());
  for (const auto& e : index.entries) {
    Example ex;
    ex.wave = clip_or_pad(resample(read_wav(e.path), sample_rate), seconds);
    ex.label = e.class_id;
    ex.fold = e.fold;
    ex.name = e.path.filename().string();
    out.push_back(std::move(ex));
  }
  return out;
}

Tensor prepare_input(const Waveform& w, Pipeline pipeline, const MfccConfig& mfcc_cfg) {
  if (pipeline == Pipeline::raw) return Tensor::from_vector(w.samples);
  const FeatureMatrix f = mfcc(w, mfcc_cfg);
  return Tensor({1, f.values.rows(), f.values.cols()}, Eigen::Map<const Eigen::VectorXd>(f.values.data(), f.values.size()));
}

namespace {

std::vector<Waveform> model_inputs(const Waveform& w, const PipelineOptions& opt) {
  if (opt.vote_clips) return split_clips(w, opt.clip_seconds);
  return {w};
}

}  // namespace

ModelConfig with_input_shape(ModelConfig cfg, const Waveform& sample, const PipelineOptions& opt) {
  const Waveform first = model_inputs(sample, opt).front();
  const Tensor t = prepare_input(first, cfg.arch, opt.mfcc);
  cfg.sample_rate = sample.sample_rate;
  if (cfg.arch == Pipeline::raw) {
    cfg.input_length = t.dim(1);
  } else {
    cfg.n_mfcc = t.dim(1);
    cfg.n_frames = t.dim(2);
  }
  return cfg;
}

Index majority_vote(std::span<const Index> clip_predictions) {
  require(!clip_predictions.empty(), "majority_vote: no predictions");
  std::map<Index, int> counts;
  for (Index c : clip_predictions) ++counts[c];
  Index best = counts.begin()->first;
  int best_count = 0;
  for (const auto& [cls, n] : counts)  // ascending class id
    if (n > best_count) {
      best = cls;
      best_count = n;
    }
  return best;
}

Index classify(const Model& model, const Waveform& w, Pipeline pipeline, const PipelineOptions& opt) {
  std::vector<Index> votes;
  for (const auto& clip : model_inputs(w, opt)) votes.push_back(argmax(predict(model, prepare_input(clip, pipeline, opt.mfcc))));
  return opt.vote_clips ? majority_vote(votes) : votes.front();
}

std::vector<Sample> make_samples(std::span<const Example> examples, Pipeline pipeline, const PipelineOptions& opt) {
  std::vector<Sample> out;
  for (const auto& ex : examples)
    for (const auto& clip : model_inputs(ex.wave, opt)) out.push_back({prepare_input(clip, pipeline, opt.mfcc), ex.label});
  return out;
}

double EvalReport::mean_accuracy() const {
  if (folds.empty()) return 0.0;
  double s = 0.0;
  for (const auto& f : folds) s += f.accuracy;
  return s / static_cast<double>(folds.size());
}

EvalReport kfold_evaluate(std::span<const Example> dataset, const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                          const PipelineOptions& opt, const EpochCallback& on_epoch, const FoldCallback& on_fold) {
  require(!dataset.empty(), "kfold_evaluate: empty dataset");
  std::set<int> folds;
  for (const auto& ex : dataset) folds.insert(ex.fold);
  require(folds.size() >= 2, "kfold_evaluate: need at least two folds");

  const ModelConfig cfg = with_input_shape(model_cfg, dataset.front().wave, opt);
  EvalReport report;
  report.pipeline = to_string(cfg.arch);
  report.f1 = cfg.arch == Pipeline::raw ? cfg.f1 : 0;
  report.nb_f = cfg.arch == Pipeline::raw ? cfg.nb_f : 0;
  report.n_mfcc = cfg.arch == Pipeline::mfcc ? cfg.n_mfcc : 0;
  report.freq_khz = cfg.sample_rate / 1000.0;

  for (int k : folds) {
    std::vector<Example> train_set, test_set;
    for (const auto& ex : dataset) (ex.fold == k ? test_set : train_set).push_back(ex);
    if (test_set.empty()) {
      std::cerr << "kfold_evaluate: fold " << k << " has no test files, skipped\n";
      continue;
    }
    std::set<std::string> train_names;
    for (const auto& ex : train_set) train_names.insert(ex.name);
    for (const auto& ex : test_set)
      require(!train_names.count(ex.name), "kfold_evaluate: test file " + ex.name + " leaked into training set");

    Model model = build_model(cfg);
    TrainConfig tc = train_cfg;
    tc.seed = train_cfg.seed + static_cast<std::uint64_t>(k);
    const auto samples = make_samples(train_set, cfg.arch, opt);

    FoldResult fr;
    fr.fold = k;
    fr.history = train(model, samples, tc, on_epoch);
    if (on_fold) on_fold(k, model, tc, fr.history);
    size_t correct = 0;
    for (const auto& ex : test_set) {
      const Index pred = classify(model, ex.wave, cfg.arch, opt);
      fr.files.push_back(ex.name);
      fr.labels.push_back(ex.label);
      fr.predicted.push_back(pred);
      if (pred == ex.label) ++correct;
    }
    fr.accuracy = static_cast<double>(correct) / static_cast<double>(test_set.size());
    report.folds.push_back(std::move(fr));
  }
  return report;
}

// ---------------------------------------------------------------------------

namespace {

std::string fmt_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fmt_count(Index v) { return v > 0 ? std::to_string(v) : std::string(); }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& s) {
  if (s.empty()) return 0.0;
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw FormatError("report: bad number '" + s + "'");
  return v;
}

Index parse_index(const std::string& s) { return s.empty() ? 0 : static_cast<Index>(parse_double(s)); }

}  // namespace

std::string report_to_csv(const EvalReport& report) {
  std::ostringstream os;
  os << kReportHeader << '\n';
  if (report.folds.empty()) return os.str();
  os << report.pipeline << ',' << fmt_count(report.f1) << ',' << fmt_count(report.nb_f) << ','
     << fmt_count(report.n_mfcc) << ',' << fmt_double(report.freq_khz) << ','
     << fmt_double(100.0 * report.mean_accuracy()) << '\n';
  os << "\nfold,acc,n_test\n";
  for (const auto& f : report.folds) os << f.fold << ',' << fmt_double(f.accuracy) << ',' << f.files.size() << '\n';
  os << "# reference,svm_rbf,70\n";
  os << "# reference,piczak_cnn,73.7\n";
  return os.str();
}

void write_report(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("report: cannot write " + path.string());
  out << report_to_csv(report);
}

ParsedReport parse_report(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != kReportHeader) throw FormatError("report: bad header");
  ParsedReport r;
  bool in_folds = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (line == "fold,acc,n_test") {
      in_folds = true;
      continue;
    }
    const auto c = split(line);
    if (!in_folds) {
      if (c.size() != 6) throw FormatError("report: summary row needs 6 columns");
      r.pipeline = c[0];
      r.f1 = parse_index(c[1]);
      r.nb_f = parse_index(c[2]);
      r.n_mfcc = parse_index(c[3]);
      r.freq_khz = parse_double(c[4]);
      r.acc_percent = parse_double(c[5]);
      r.has_summary = true;
    } else {
      if (c.size() != 3) throw FormatError("report: fold row needs 3 columns");
      r.fold_accuracy.emplace_back(static_cast<int>(parse_index(c[0])), parse_double(c[1]));
      r.fold_sizes.push_back(parse_index(c[2]));
    }
  }
  return r;
}

}  // namespace wavescope
