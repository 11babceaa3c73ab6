#include "doctest.h"
#include "support.hpp"

#include "wavescope/features.hpp"

#include <numbers>

using namespace wavescope;

TEST_CASE("mel scale definition point") {
  CHECK(std::abs(hz_to_mel(1000.0) - 1000.0) <= 1.0);
  CHECK(mel_to_hz(hz_to_mel(1234.5)) == doctest::Approx(1234.5).epsilon(1e-12));
}

TEST_CASE("mel_filterbank") {
  for (int n_mels : {1, 10, 40, 80}) {
    const int sr = 8000;
    const Index n_fft = 256;
    const RowMatrixXd fb = mel_filterbank(sr, n_fft, n_mels, 0.0, 4000.0);
    REQUIRE(fb.rows() == n_mels);
    REQUIRE(fb.cols() == n_fft / 2 + 1);
    CHECK(fb.minCoeff() >= 0.0);
    for (Index r = 0; r < fb.rows(); ++r) CHECK(fb.row(r).sum() > 0.0);

    Index prev = -1;
    for (Index r = 0; r < fb.rows(); ++r) {
      Index peak = 0;
      fb.row(r).maxCoeff(&peak);
      CHECK(peak >= prev);
      prev = peak;
    }
    for (Index b = 0; b < fb.cols(); ++b) CHECK(fb.col(b).sum() > 0.0);
  }

  const RowMatrixXd band = mel_filterbank(16000, 512, 26, 300.0, 3400.0);
  const double bin_hz = 16000.0 / 512.0;
  for (Index b = 0; b < band.cols(); ++b) {
    const double f = b * bin_hz;
    if (f >= 300.0 && f <= 3400.0) CHECK(band.col(b).sum() > 0.0);
  }
  CHECK_THROWS_AS(mel_filterbank(8000, 256, 40, 0.0, 4001.0), ContractError);
  CHECK_THROWS_AS(mel_filterbank(8000, 256, 0, 0.0, 4000.0), ContractError);
}

TEST_CASE("dct2_matrix is orthonormal") {
  const RowMatrixXd d = dct2_matrix(32, 32);
  CHECK((d * d.transpose() - RowMatrixXd::Identity(32, 32)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mfcc: silence") {
  MfccConfig cfg;
  cfg.n_mfcc = 13;
  const Waveform silence(Eigen::VectorXd::Zero(8000), 8000);
  const FeatureMatrix f = mfcc(silence, cfg);
  REQUIRE(f.values.rows() == 13);
  const double floor_c0 = std::sqrt(static_cast<double>(cfg.resolved_mels())) * std::log(1e-10);
  for (Index t = 0; t < f.values.cols(); ++t) {
    CHECK(f.values(0, t) == doctest::Approx(floor_c0).epsilon(1e-12));
    CHECK(f.values.col(t).tail(12).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((f.values.col(t) - f.values.col(0)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("mfcc: frame count and frame rate") {
  MfccConfig cfg;  // 25 ms frames, 10 ms hop
  const Waveform w(Eigen::VectorXd::Ones(8000), 8000);
  const FeatureMatrix f = mfcc(w, cfg);
  const Index frame = 200, hop = 80;
  CHECK(f.values.cols() == (8000 - frame) / hop + 1);
  CHECK(f.values.rows() == 40);
  CHECK(f.frame_rate == doctest::Approx(100.0));
}

TEST_CASE("mfcc: noise and a 500 Hz sine differ in coefficient 1") {
  std::mt19937_64 rng(21);
  const Waveform noise(testing::gaussian_vector(8000, rng) * 0.1, 8000);
  Eigen::VectorXd s(8000);
  for (Index t = 0; t < 8000; ++t) s[t] = 0.5 * std::sin(2.0 * std::numbers::pi * 500.0 * t / 8000.0);
  const Waveform tone(s, 8000);
  MfccConfig cfg;
  const double c1_noise = mfcc(noise, cfg).values.row(1).mean();
  const double c1_tone = mfcc(tone, cfg).values.row(1).mean();
  INFO("c1 noise ", c1_noise, " tone ", c1_tone);
  CHECK(std::abs(c1_noise - c1_tone) > 1.0);
}

TEST_CASE("mfcc: amplitude scaling moves only coefficient 0") {
  std::mt19937_64 rng(22);
  const Waveform w(testing::gaussian_vector(8000, rng) * 0.2, 8000);
  MfccConfig cfg;
  cfg.n_mfcc = 20;
  const double c = 3.0;
  const FeatureMatrix a = mfcc(w, cfg);
  const FeatureMatrix b = mfcc(Waveform(w.samples * c, 8000), cfg);
  CHECK((b.values.bottomRows(19) - a.values.bottomRows(19)).cwiseAbs().maxCoeff() <= 1e-6);
  const double shift = std::sqrt(static_cast<double>(cfg.resolved_mels())) * 2.0 * std::log(c);
  CHECK(((b.values.row(0) - a.values.row(0)).array() - shift).abs().maxCoeff() <= 1e-6);
}

TEST_CASE("mfcc: deterministic and preconditions") {
  std::mt19937_64 rng(23);
  const Waveform w(testing::random_vector(4000, rng), 8000);
  MfccConfig cfg;
  const FeatureMatrix a = mfcc(w, cfg), b = mfcc(w, cfg);
  CHECK(a.values == b.values);

  MfccConfig too_many;
  too_many.n_mfcc = 50;
  too_many.n_mels = 40;
  CHECK_THROWS_AS(mfcc(w, too_many), ContractError);
  CHECK_THROWS_AS(mfcc(Waveform(Eigen::VectorXd::Zero(100), 8000), cfg), ContractError);
  MfccConfig short_frame;
  short_frame.frame_ms = 0.5;
  CHECK_THROWS_AS(mfcc(w, short_frame), ContractError);
}
