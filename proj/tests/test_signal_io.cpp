#include "doctest.h"
#include "support.hpp"

#include "wavescope/signal_io.hpp"
#include "wavescope/stats.hpp"

#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace wavescope;
using testing::TempDir;

namespace {

void put_u16(std::vector<unsigned char>& b, unsigned v) {
  b.push_back(static_cast<unsigned char>(v & 0xff));
  b.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}
void put_u32(std::vector<unsigned char>& b, unsigned long v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}
void put_tag(std::vector<unsigned char>& b, const char* tag) { b.insert(b.end(), tag, tag + 4); }

// Hand-assembled RIFF/WAVE file.
std::vector<unsigned char> wav_bytes(unsigned format, unsigned channels, unsigned bits, unsigned rate,
                                     const std::vector<unsigned char>& data) {
  std::vector<unsigned char> b;
  put_tag(b, "RIFF");
  put_u32(b, 36 + data.size());
  put_tag(b, "WAVE");
  put_tag(b, "fmt ");
  put_u32(b, 16);
  put_u16(b, format);
  put_u16(b, channels);
  put_u32(b, rate);
  put_u32(b, rate * channels * bits / 8);
  put_u16(b, channels * bits / 8);
  put_u16(b, bits);
  put_tag(b, "data");
  put_u32(b, data.size());
  b.insert(b.end(), data.begin(), data.end());
  return b;
}

std::vector<unsigned char> pcm16(const std::vector<int>& v) {
  std::vector<unsigned char> b;
  for (int s : v) put_u16(b, static_cast<unsigned>(static_cast<std::uint16_t>(static_cast<std::int16_t>(s))));
  return b;
}

std::vector<unsigned char> f32(const std::vector<float>& v) {
  std::vector<unsigned char> b(v.size() * 4);
  std::memcpy(b.data(), v.data(), b.size());
  return b;
}

Waveform sine(double hz, int sr, Index n, double amp = 0.8) {
  Eigen::VectorXd x(n);
  for (Index t = 0; t < n; ++t) x[t] = amp * std::sin(2.0 * std::numbers::pi * hz * t / sr);
  return Waveform(x, sr);
}

void touch(const std::filesystem::path& p) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p) << "x";
}

}  // namespace

TEST_CASE("read_wav: 16-bit PCM scaling") {
  const Waveform w = parse_wav(wav_bytes(1, 1, 16, 8000, pcm16({0, 16384, -32768})));
  REQUIRE(w.size() == 3);
  CHECK(w.sample_rate == 8000);
  CHECK(w.samples[0] == 0.0);
  CHECK(w.samples[1] == 0.5);
  CHECK(w.samples[2] == -1.0);
}

TEST_CASE("read_wav: stereo frames are averaged") {
  const Waveform w = parse_wav(wav_bytes(3, 2, 32, 8000, f32({0.2f, 0.4f})));
  REQUIRE(w.size() == 1);
  CHECK(w.samples[0] == doctest::Approx(0.3).epsilon(1e-7));
}

TEST_CASE("read_wav: write/read round trip of a 440 Hz sine") {
  TempDir dir("wav");
  const Waveform w = sine(440.0, 8000, 8000);
  write_wav(dir / "sine.wav", w);
  const Waveform r = read_wav(dir / "sine.wav");
  REQUIRE(r.size() == w.size());
  CHECK(r.sample_rate == 8000);
  CHECK((r.samples - w.samples).cwiseAbs().maxCoeff() <= 2.0 / 32768.0);

  write_wav(dir / "sine32.wav", w, WavEncoding::float32);
  const Waveform r32 = read_wav(dir / "sine32.wav");
  CHECK((r32.samples - w.samples).cwiseAbs().maxCoeff() <= 1e-7);
}

TEST_CASE("read_wav: errors") {
  CHECK_THROWS_AS(parse_wav({'R', 'I', 'F', 'F'}), FormatError);
  auto bad = wav_bytes(1, 1, 16, 8000, pcm16({1, 2}));
  bad[8] = 'X';  // WAVE tag
  CHECK_THROWS_AS(parse_wav(bad), FormatError);
  CHECK_THROWS_AS(parse_wav(wav_bytes(2, 1, 16, 8000, pcm16({1, 2}))), UnsupportedError);  // ADPCM
  CHECK_THROWS_AS(parse_wav(wav_bytes(1, 1, 24, 8000, {0, 0, 0})), UnsupportedError);
  CHECK_THROWS_AS(read_wav("/nonexistent/file.wav"), FormatError);
}

TEST_CASE("resample: 4 s at 44.1 kHz to 8 kHz gives 32000 samples") {
  const Waveform w(Eigen::VectorXd::Zero(176400), 44100);
  const Waveform r = resample(w, 8000);
  CHECK(r.size() == 32000);
  CHECK(r.sample_rate == 8000);
}

TEST_CASE("resample: identity at the same rate") {
  std::mt19937_64 rng(1);
  const Waveform w(testing::random_vector(1000, rng), 16000);
  const Waveform r = resample(w, 16000);
  CHECK(r.samples == w.samples);
  CHECK_THROWS_AS(resample(w, 0), ContractError);
}

TEST_CASE("resample: 100 Hz sine 44.1 kHz -> 8 kHz matches the ideal sine") {
  const Waveform w = sine(100.0, 44100, 44100);
  const Waveform r = resample(w, 8000);
  const Waveform ideal = sine(100.0, 8000, r.size());
  // Edges see the zero boundary of the interpolation kernel.
  const Index edge = 64;
  const auto c = pearson(r.samples.segment(edge, r.size() - 2 * edge),
                         ideal.samples.segment(edge, r.size() - 2 * edge));
  REQUIRE(c.has_value());
  CHECK(*c >= 0.999);
}

TEST_CASE("resample: round trip preserves band-limited sines") {
  for (double hz : {50.0, 440.0, 1200.0, 1500.0}) {  // below 0.4 * 4 kHz
    const Waveform w = sine(hz, 8000, 8000);
    const Waveform back = resample(resample(w, 22050), 8000);
    REQUIRE(back.size() == w.size());
    const Index edge = 100;
    const auto c = pearson(back.samples.segment(edge, w.size() - 2 * edge),
                           w.samples.segment(edge, w.size() - 2 * edge));
    REQUIRE(c.has_value());
    CHECK(*c >= 0.99);
  }
}

TEST_CASE("clip_or_pad") {
  const int sr = 100;
  std::mt19937_64 rng(2);
  const Waveform three(testing::random_vector(3 * sr, rng), sr);
  const Waveform padded = clip_or_pad(three, 4.0);
  REQUIRE(padded.size() == 4 * sr);
  CHECK(padded.samples.head(3 * sr) == three.samples);
  CHECK(padded.samples.tail(sr).isZero(0.0));

  const Waveform five(testing::random_vector(5 * sr, rng), sr);
  const Waveform cut = clip_or_pad(five, 4.0);
  REQUIRE(cut.size() == 4 * sr);
  CHECK(cut.samples == five.samples.head(4 * sr));

  CHECK(clip_or_pad(cut, 4.0).samples == cut.samples);
  CHECK(clip_or_pad(clip_or_pad(three, 4.0), 4.0).samples == padded.samples);
  CHECK_THROWS_AS(clip_or_pad(three, 0.0), ContractError);
}

TEST_CASE("split_clips") {
  std::mt19937_64 rng(3);
  const Waveform w(testing::random_vector(32000, rng), 8000);
  const auto clips = split_clips(w, 1.0);
  REQUIRE(clips.size() == 4);
  Eigen::VectorXd joined(32000);
  for (size_t i = 0; i < clips.size(); ++i) {
    CHECK(clips[i].size() == 8000);
    CHECK(clips[i].sample_rate == 8000);
    joined.segment(static_cast<Index>(i) * 8000, 8000) = clips[i].samples;
  }
  CHECK(joined == w.samples);

  const auto one = split_clips(w, 4.0);
  REQUIRE(one.size() == 1);
  CHECK(one[0].samples == w.samples);

  CHECK_THROWS_AS(split_clips(w, 1.5), ContractError);
}

TEST_CASE("load_manifest: UrbanSound8K row") {
  TempDir dir("manifest");
  touch(dir / "fold1/101415-3-0-2.wav");
  std::ofstream(dir / "meta.csv") << "slice_file_name,fsID,start,end,salience,fold,classID,class\n"
                                     "101415-3-0-2.wav,101415,0,4,1,1,3,dog_bark\n";
  const DatasetIndex idx = load_manifest(dir / "meta.csv", dir.path());
  REQUIRE(idx.entries.size() == 1);
  CHECK(idx.entries[0].fold == 1);
  CHECK(idx.entries[0].class_id == 3);
  CHECK(idx.entries[0].class_name == "dog_bark");
  CHECK(idx.entries[0].path == dir / "fold1/101415-3-0-2.wav");
}

TEST_CASE("load_manifest: empty body and fold grouping") {
  std::istringstream empty("slice_file_name,fold,classID,class\n");
  CHECK(parse_manifest(empty, ".", false).empty());

  std::ostringstream csv;
  csv << "slice_file_name,fold,classID,class\n";
  for (int f = 10; f >= 1; --f) csv << "f" << f << ".wav," << f << "," << f % 10 << ",c\n";
  std::istringstream in(csv.str());
  const DatasetIndex idx = parse_manifest(in, ".", false);
  const auto groups = idx.by_fold();
  CHECK(groups.size() == 10);
  for (const auto& [fold, entries] : groups) CHECK(entries.size() == 1);
  for (size_t i = 0; i < idx.entries.size(); ++i) CHECK(idx.entries[i].fold == static_cast<int>(i) + 1);
}

TEST_CASE("load_manifest: deterministic order by fold then filename") {
  std::istringstream in("slice_file_name,fold,classID,class\nb.wav,2,0,x\nz.wav,1,0,x\na.wav,2,1,y\nc.wav,1,1,y\n");
  const DatasetIndex idx = parse_manifest(in, ".", false);
  std::vector<std::string> names;
  for (const auto& e : idx.entries) names.push_back(e.path.filename().string());
  CHECK(names == std::vector<std::string>{"c.wav", "z.wav", "a.wav", "b.wav"});
}

TEST_CASE("load_manifest: errors") {
  std::istringstream missing("slice_file_name,fold,class\na.wav,1,x\n");
  CHECK_THROWS_AS(parse_manifest(missing, ".", false), FormatError);
  std::istringstream bad_fold("slice_file_name,fold,classID,class\na.wav,11,0,x\n");
  CHECK_THROWS_AS(parse_manifest(bad_fold, ".", false), ValidationError);
  std::istringstream bad_class("slice_file_name,fold,classID,class\na.wav,1,10,x\n");
  CHECK_THROWS_AS(parse_manifest(bad_class, ".", false), ValidationError);

  TempDir dir("manifest-missing");
  std::ofstream(dir / "meta.csv") << "slice_file_name,fold,classID,class\nnope.wav,1,0,x\n";
  CHECK_THROWS_AS(load_manifest(dir / "meta.csv", dir.path()), ValidationError);
}
