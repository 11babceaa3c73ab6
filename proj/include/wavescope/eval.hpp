#pragma once

#include "wavescope/features.hpp"
#include "wavescope/model.hpp"
#include "wavescope/signal_io.hpp"
#include "wavescope/training.hpp"

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace wavescope {

/// A decoded dataset file, already resampled and clipped/padded.
struct Example {
  Waveform wave;
  Index label = 0;
  int fold = 0;
  std::string name;
};

/// read_wav -> resample(sr) -> clip_or_pad(seconds) for every manifest entry.
std::vector<Example> load_examples(const DatasetIndex& index, int sample_rate, double seconds);

struct PipelineOptions {
  MfccConfig mfcc;             // used by the mfcc pipeline
  bool vote_clips = false;     // split files into clips, vote per file
  double clip_seconds = 1.0;
};

/// Model input for one waveform: [1 x L] samples, or [1 x n_mfcc x frames].
Tensor prepare_input(const Waveform& w, Pipeline pipeline, const MfccConfig& mfcc);

/// Fills input_length / n_mfcc / n_frames / sample_rate from a sample input.
ModelConfig with_input_shape(ModelConfig cfg, const Waveform& sample, const PipelineOptions& opt);

/// Most frequent class; ties go to the lowest class id.
Index majority_vote(std::span<const Index> clip_predictions);

struct FoldResult {
  int fold = 0;
  std::vector<std::string> files;
  std::vector<Index> labels;
  std::vector<Index> predicted;
  double accuracy = 0.0;
  TrainHistory history;
};

struct EvalReport {
  std::string pipeline = "raw";
  Index f1 = 0;
  Index nb_f = 0;
  Index n_mfcc = 0;
  double freq_khz = 0.0;
  std::vector<FoldResult> folds;

  double mean_accuracy() const;
};

/// Predicted class for one file: whole-input argmax, or a vote over clips.
Index classify(const Model& model, const Waveform& w, Pipeline pipeline, const PipelineOptions& opt);

/// Builds the (input, label) training samples for a set of examples.
std::vector<Sample> make_samples(std::span<const Example> examples, Pipeline pipeline, const PipelineOptions& opt);

/// Called once per fold with the trained model, e.g. to save a checkpoint.
using FoldCallback = std::function<void(int fold, const Model&, const TrainConfig&, const TrainHistory&)>;

/// Trains on every fold but k and tests on fold k, for each fold present.
/// Fold models are seeded from model.seed, training from train.seed + fold.
EvalReport kfold_evaluate(std::span<const Example> dataset, const ModelConfig& model, const TrainConfig& train,
                          const PipelineOptions& opt, const EpochCallback& on_epoch = {},
                          const FoldCallback& on_fold = {});

/// CSV: header "pipeline,f1,nb_f,n_mfcc,freq_khz,acc", one summary row
/// (acc in percent), then a blank line and a "fold,acc,n_test" section, then
/// "# reference" lines. An empty report writes only the header.
void write_report(const EvalReport& report, const std::filesystem::path& path);
std::string report_to_csv(const EvalReport& report);

struct ParsedReport {
  std::string pipeline;
  Index f1 = 0, nb_f = 0, n_mfcc = 0;
  double freq_khz = 0.0;
  double acc_percent = 0.0;
  std::vector<std::pair<int, double>> fold_accuracy;
  std::vector<Index> fold_sizes;
  bool has_summary = false;
};
ParsedReport parse_report(const std::string& csv);

inline constexpr const char* kReportHeader = "pipeline,f1,nb_f,n_mfcc,freq_khz,acc";

}  // namespace wavescope
