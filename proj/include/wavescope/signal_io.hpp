#pragma once

#include "wavescope/common.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace wavescope {

/// Mono audio signal. Samples are nominally in [-1, 1].
struct Waveform {
  Eigen::VectorXd samples;
  int sample_rate = 0;

  Waveform() = default;
  Waveform(Eigen::VectorXd s, int sr);

  Index size() const { return samples.size(); }
  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

/// Throws ContractError unless sr > 0, length >= 1 and all samples finite.
void validate(const Waveform& w);

enum class WavEncoding { pcm16, float32 };

/// Reads RIFF/WAVE PCM16 or IEEE float32; channels are averaged to mono.
Waveform read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const Waveform& w,
               WavEncoding enc = WavEncoding::pcm16);

/// Parses an in-memory RIFF image. Used by read_wav; exposed for tests.
Waveform parse_wav(const std::vector<unsigned char>& bytes);

// Windowed-sinc resampler parameters. The low-pass cutoff is a fraction of
// the lower of the two Nyquist rates.
struct ResampleOptions {
  int taps = 64;
  double cutoff = 0.45;
};

Waveform resample(const Waveform& w, int target_sr, const ResampleOptions& opt = {});

/// Truncates at the end or pads trailing zeros to exactly seconds * sr samples.
Waveform clip_or_pad(const Waveform& w, double seconds);

/// Non-overlapping contiguous clips. The duration must be a whole multiple of
/// clip_seconds (in samples).
std::vector<Waveform> split_clips(const Waveform& w, double clip_seconds);

struct DatasetEntry {
  std::filesystem::path path;
  int fold = 0;
  int class_id = 0;
  std::string class_name;
};

struct DatasetIndex {
  std::vector<DatasetEntry> entries;  // sorted by (fold, filename)

  std::map<int, std::vector<DatasetEntry>> by_fold() const;
  std::vector<int> folds() const;
  bool empty() const { return entries.empty(); }
};

/// Loads an UrbanSound8K-style metadata CSV (columns slice_file_name, fold,
/// classID, class; extra columns ignored). Files are looked up as
/// audio_root/fold<k>/<name>, then audio_root/<name>.
DatasetIndex load_manifest(const std::filesystem::path& csv_path,
                           const std::filesystem::path& audio_root,
                           bool require_files = true);

DatasetIndex parse_manifest(std::istream& csv, const std::filesystem::path& audio_root,
                            bool require_files);

}  // namespace wavescope
