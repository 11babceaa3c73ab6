#include "wavescope/signal_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

namespace wavescope {

namespace fs = std::filesystem;

Waveform::Waveform(Eigen::VectorXd s, int sr) : samples(std::move(s)), sample_rate(sr) {}

void validate(const Waveform& w) {
  require(w.sample_rate > 0, "waveform: sample_rate must be positive");
  require(w.samples.size() >= 1, "waveform: empty");
  require(w.samples.allFinite(), "waveform: non-finite sample");
}

// ---------------------------------------------------------------------------
// WAV

namespace {

uint32_t le32(const unsigned char* p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}
uint16_t le16(const unsigned char* p) { return uint16_t(p[0] | p[1] << 8); }

void put32(std::ostream& os, uint32_t v) {
  const char b[4] = {char(v), char(v >> 8), char(v >> 16), char(v >> 24)};
  os.write(b, 4);
}
void put16(std::ostream& os, uint16_t v) {
  const char b[2] = {char(v), char(v >> 8)};
  os.write(b, 2);
}

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

}  // namespace

Waveform parse_wav(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw FormatError("wav: missing RIFF/WAVE header");

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  size_t data_len = 0;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const uint32_t len = le32(chunk + 4);
    const size_t body = pos + 8;
    if (body + len > bytes.size()) {
      // Truncated trailing data chunk: keep what is there.
      if (std::memcmp(chunk, "data", 4) == 0) {
        data = bytes.data() + body;
        data_len = bytes.size() - body;
        break;
      }
      throw FormatError("wav: chunk runs past end of file");
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (len < 16) throw FormatError("wav: fmt chunk too short");
      format = le16(chunk + 8);
      channels = le16(chunk + 10);
      rate = le32(chunk + 12);
      bits = le16(chunk + 22);
      if (format == kFormatExtensible) {
        if (len < 40) throw FormatError("wav: extensible fmt chunk too short");
        format = le16(chunk + 8 + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_len = len;
    }
    pos = body + len + (len & 1u);
  }

  if (!have_fmt) throw FormatError("wav: no fmt chunk");
  if (!data) throw FormatError("wav: no data chunk");
  if (channels == 0 || rate == 0) throw FormatError("wav: zero channels or sample rate");

  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool f32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !f32)
    throw UnsupportedError("wav: only PCM16 and float32 are supported (format " +
                           std::to_string(format) + ", " + std::to_string(bits) + " bits)");

  const size_t bytes_per_sample = bits / 8;
  const size_t frame_bytes = bytes_per_sample * channels;
  const size_t frames = data_len / frame_bytes;
  if (frames == 0) throw FormatError("wav: no sample frames");

  Eigen::VectorXd mono(static_cast<Index>(frames));
  for (size_t f = 0; f < frames; ++f) {
    const unsigned char* p = data + f * frame_bytes;
    double acc = 0.0;
    for (uint16_t c = 0; c < channels; ++c, p += bytes_per_sample) {
      if (pcm16) {
        acc += static_cast<int16_t>(le16(p)) / 32768.0;
      } else {
        const uint32_t u = le32(p);
        float v;
        std::memcpy(&v, &u, 4);
        acc += v;
      }
    }
    mono[static_cast<Index>(f)] = acc / channels;
  }
  if (!mono.allFinite()) throw FormatError("wav: non-finite sample values");
  return Waveform(std::move(mono), static_cast<int>(rate));
}

Waveform read_wav(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("wav: cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return parse_wav(bytes);
}

void write_wav(const fs::path& path, const Waveform& w, WavEncoding enc) {
  validate(w);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("wav: cannot write " + path.string());

  const uint16_t bits = enc == WavEncoding::pcm16 ? 16 : 32;
  const uint16_t format = enc == WavEncoding::pcm16 ? kFormatPcm : kFormatFloat;
  const uint32_t block = bits / 8;
  const uint32_t data_len = static_cast<uint32_t>(w.size()) * block;

  out.write("RIFF", 4);
  put32(out, 36 + data_len);
  out.write("WAVEfmt ", 8);
  put32(out, 16);
  put16(out, format);
  put16(out, 1);
  put32(out, static_cast<uint32_t>(w.sample_rate));
  put32(out, static_cast<uint32_t>(w.sample_rate) * block);
  put16(out, static_cast<uint16_t>(block));
  put16(out, bits);
  out.write("data", 4);
  put32(out, data_len);

  for (Index i = 0; i < w.size(); ++i) {
    if (enc == WavEncoding::pcm16) {
      const double v = std::clamp(std::round(w.samples[i] * 32768.0), -32768.0, 32767.0);
      put16(out, static_cast<uint16_t>(static_cast<int16_t>(v)));
    } else {
      const float v = static_cast<float>(w.samples[i]);
      uint32_t u;
      std::memcpy(&u, &v, 4);
      put32(out, u);
    }
  }
}

// ---------------------------------------------------------------------------
// Resampling

namespace {

// Hann-windowed sinc over [-1, 1] (in units of the kernel half width),
// tabulated and read back with linear interpolation.
class SincTable {
public:
  SincTable(double half_width, double cutoff_cycles, int resolution)
      : half_width_(half_width), gain_(2.0 * cutoff_cycles), table_(resolution + 2) {
    for (int i = 0; i <= resolution + 1; ++i) {
      const double z = std::min(1.0, static_cast<double>(i) / resolution);
      const double d = z * half_width;
      const double arg = 2.0 * cutoff_cycles * d;
      const double sinc = arg == 0.0 ? 1.0 : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
      const double hann = 0.5 * (1.0 + std::cos(std::numbers::pi * z));
      table_[i] = sinc * hann;
    }
  }

  double operator()(double d) const {
    const double z = std::abs(d) / half_width_;
    if (z >= 1.0) return 0.0;
    const double x = z * (table_.size() - 2);
    const auto i = static_cast<size_t>(x);
    const double frac = x - static_cast<double>(i);
    return gain_ * (table_[i] + frac * (table_[i + 1] - table_[i]));
  }

  double half_width() const { return half_width_; }

private:
  double half_width_;
  double gain_;
  std::vector<double> table_;
};

}  // namespace

Waveform resample(const Waveform& w, int target_sr, const ResampleOptions& opt) {
  require(target_sr > 0, "resample: target_sr must be positive");
  validate(w);
  if (target_sr == w.sample_rate) return w;

  const double ratio = static_cast<double>(target_sr) / w.sample_rate;
  const Index out_len = std::max<Index>(1, static_cast<Index>(std::llround(w.size() * ratio)));

  // Kernel geometry in input-sample units: the cutoff sits at a fraction of
  // the lower Nyquist rate, and the support spans `taps` periods of the
  // lower sample rate.
  const double scale = std::min(1.0, ratio);
  const double cutoff_cycles = opt.cutoff * scale;
  const double half_width = 0.5 * opt.taps / scale;
  const SincTable kernel(half_width, cutoff_cycles, 4096);

  Eigen::VectorXd out(out_len);
  const Index n_in = w.size();
  for (Index n = 0; n < out_len; ++n) {
    const double pos = n / ratio;
    const Index lo = std::max<Index>(0, static_cast<Index>(std::ceil(pos - half_width)));
    const Index hi = std::min<Index>(n_in - 1, static_cast<Index>(std::floor(pos + half_width)));
    double acc = 0.0;
    for (Index k = lo; k <= hi; ++k) acc += w.samples[k] * kernel(pos - static_cast<double>(k));
    out[n] = acc;
  }
  return Waveform(std::move(out), target_sr);
}

Waveform clip_or_pad(const Waveform& w, double seconds) {
  require(seconds > 0.0, "clip_or_pad: seconds must be positive");
  const auto target = static_cast<Index>(std::llround(seconds * w.sample_rate));
  require(target >= 1, "clip_or_pad: target length is zero samples");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(target);
  const Index keep = std::min(target, w.size());
  out.head(keep) = w.samples.head(keep);
  return Waveform(std::move(out), w.sample_rate);
}

std::vector<Waveform> split_clips(const Waveform& w, double clip_seconds) {
  require(clip_seconds > 0.0, "split_clips: clip_seconds must be positive");
  const auto clip = static_cast<Index>(std::llround(clip_seconds * w.sample_rate));
  require(clip >= 1 && w.size() % clip == 0,
          "split_clips: duration is not a whole multiple of the clip length");
  std::vector<Waveform> clips;
  clips.reserve(static_cast<size_t>(w.size() / clip));
  for (Index start = 0; start < w.size(); start += clip)
    clips.emplace_back(w.samples.segment(start, clip), w.sample_rate);
  return clips;
}

// ---------------------------------------------------------------------------
// Manifest

std::map<int, std::vector<DatasetEntry>> DatasetIndex::by_fold() const {
  std::map<int, std::vector<DatasetEntry>> groups;
  for (const auto& e : entries) groups[e.fold].push_back(e);
  return groups;
}

std::vector<int> DatasetIndex::folds() const {
  std::vector<int> out;
  for (const auto& e : entries)
    if (out.empty() || out.back() != e.fold) out.push_back(e.fold);
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FormatError("manifest: bad integer in column " + what + ": '" + s + "'");
  }
}

}  // namespace

DatasetIndex parse_manifest(std::istream& csv, const fs::path& audio_root, bool require_files) {
  std::string line;
  if (!std::getline(csv, line)) throw FormatError("manifest: missing header row");
  const auto header = split_csv_line(line);
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw FormatError("manifest: missing column " + name);
    return static_cast<size_t>(it - header.begin());
  };
  const size_t c_name = column("slice_file_name");
  const size_t c_fold = column("fold");
  const size_t c_class = column("classID");
  const size_t c_label = column("class");
  const size_t needed = std::max({c_name, c_fold, c_class, c_label}) + 1;

  DatasetIndex index;
  size_t row = 1;
  while (std::getline(csv, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() < needed)
      throw FormatError("manifest: row " + std::to_string(row) + " has too few columns");

    DatasetEntry e;
    e.fold = parse_int(cells[c_fold], "fold");
    e.class_id = parse_int(cells[c_class], "classID");
    e.class_name = cells[c_label];
    if (e.fold < 1 || e.fold > 10)
      throw ValidationError("manifest: fold " + std::to_string(e.fold) + " outside 1..10");
    if (e.class_id < 0 || e.class_id > 9)
      throw ValidationError("manifest: classID " + std::to_string(e.class_id) + " outside 0..9");

    const fs::path in_fold = audio_root / ("fold" + std::to_string(e.fold)) / cells[c_name];
    const fs::path flat = audio_root / cells[c_name];
    e.path = fs::exists(in_fold) ? in_fold : flat;
    if (require_files && !fs::exists(e.path))
      throw ValidationError("manifest: audio file not found: " + cells[c_name]);
    index.entries.push_back(std::move(e));
  }

  std::sort(index.entries.begin(), index.entries.end(), [](const auto& a, const auto& b) {
    if (a.fold != b.fold) return a.fold < b.fold;
    return a.path.filename() < b.path.filename();
  });
  return index;
}

DatasetIndex load_manifest(const fs::path& csv_path, const fs::path& audio_root,
                           bool require_files) {
  std::ifstream in(csv_path);
  if (!in) throw FormatError("manifest: cannot open " + csv_path.string());
  return parse_manifest(in, audio_root, require_files);
}

}  // namespace wavescope
