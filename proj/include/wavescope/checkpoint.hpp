#pragma once

#include "wavescope/filterbank.hpp"
#include "wavescope/model.hpp"
#include "wavescope/training.hpp"

#include <filesystem>
#include <string>

namespace wavescope {

// Checkpoint container (JSON text, any file extension):
//
//   {
//     "format":  "wavescope-checkpoint",
//     "version": 1,
//     "model":   { "arch": "raw"|"mfcc", "f1", "nb_f", "stride", "input_length",
//                  "n_mfcc", "n_frames", "hidden", "n_classes", "vgg_channels",
//                  "sample_rate", "seed" },
//     "train":   { "lr", "decay", "epochs_per_decay", "max_epochs", "patience",
//                  "min_delta", "batch_size", "seed" },
//     "history": { "stop": "max_epochs"|"patience"|"nan", "diagnostic",
//                  "epochs": [ { "epoch", "loss", "accuracy", "lr" } ] },
//     "layers":  [ { "kind": "conv1d", "shape": [filters, in_channels, kernel],
//                    "stride": s, "weights": [...], "bias": [...] },
//                  { "kind": "conv2d", "shape": [filters, in_channels, kh, kw], ... },
//                  { "kind": "dense",  "shape": [outputs, inputs], ... },
//                  { "kind": "relu" }, { "kind": "maxpool1d", "size": k }, ... ]
//   }
//
// Weights are row-major over "shape". The first conv1d entry of a raw model
// is the filter bank; load_filter_bank() reads only that entry.

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  Model model;
  TrainConfig train;
  TrainHistory history;
};

void save_checkpoint(const std::filesystem::path& path, const Model& model, const TrainConfig& train,
                     const TrainHistory& history);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string checkpoint_to_string(const Model& model, const TrainConfig& train, const TrainHistory& history);
Checkpoint checkpoint_from_string(const std::string& text);

FilterBank load_filter_bank(const std::filesystem::path& path);

}  // namespace wavescope
