#include "CLI11.hpp"

#include "wavescope/checkpoint.hpp"
#include "wavescope/eval.hpp"
#include "wavescope/export.hpp"
#include "wavescope/filter_analysis.hpp"
#include "wavescope/reconstruction.hpp"
#include "wavescope/stats.hpp"
#include "wavescope/synth.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace wavescope;

namespace {

struct Global {
  std::uint64_t seed = 0;
  bool quiet = false;
};

void log(const Global& g, const std::string& msg) {
  if (!g.quiet) std::cerr << msg << '\n';
}

std::string num(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

Waveform load_input(const fs::path& path, int sr) {
  Waveform w = read_wav(path);
  if (sr > 0 && w.sample_rate != sr) w = resample(w, sr);
  return w;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  require(static_cast<bool>(out), "cannot write " + path.string());
  out << text;
}

// ---------------------------------------------------------------------------
// transform

struct TransformArgs {
  fs::path in, out = ".";
  std::string op = "fft";
  int sr = 0;
  Index window = 256, hop = 128;
  std::string wavelet = "morlet";
  Index scales = 64, cwt_hop = 1;
  double fmin = 50.0, fmax = 0.0;
};

void run_transform(const TransformArgs& a, const Global& g) {
  const Waveform w = load_input(a.in, a.sr);
  fs::create_directories(a.out);
  const std::string sr_note = "sample_rate=" + std::to_string(w.sample_rate);

  if (a.op == "fft") {
    const Index n = next_pow2(w.size());
    Eigen::VectorXd padded = Eigen::VectorXd::Zero(n);
    padded.head(w.size()) = w.samples;
    const Spectrum s = fft(padded, w.sample_rate);
    const Index half = n / 2 + 1;
    RowMatrixXd table(half, 3);
    for (Index k = 0; k < half; ++k) table.row(k) << s.bins[k].real(), s.bins[k].imag(), std::norm(s.bins[k]);
    const Eigen::VectorXd hz = Eigen::VectorXd::LinSpaced(half, 0.0, s.bin_hz * double(half - 1));
    write_matrix_csv(a.out / "fft.csv", table, {sr_note, "n_fft=" + std::to_string(n)}, {"hz", "re", "im", "power"}, &hz);
    const Eigen::VectorXd db = (table.col(2).array() + 1e-20).log10() * 10.0;
    write_line_plot_png(a.out / "fft.png", {db});
  } else if (a.op == "stft") {
    const RowMatrixXd p = stft(w.samples, a.window, a.hop, Window::hann);
    write_matrix_csv(a.out / "stft.csv", p,
                     {sr_note, "window=" + std::to_string(a.window), "hop=" + std::to_string(a.hop), "rows=frames"});
    const RowMatrixXd image = p.transpose().colwise().reverse();
    write_heatmap_png(a.out / "stft.png", image, true);
  } else if (a.op == "cwt") {
    const WaveletBasis basis{wavelet_kind_from_string(a.wavelet)};
    const double fmax = a.fmax > 0.0 ? a.fmax : 0.45 * w.sample_rate;
    require(a.fmin > 0.0 && a.fmin < fmax && a.scales >= 2, "cwt: need 0 < fmin < fmax and >= 2 scales");
    const double a_min = scale_for_frequency(basis, fmax, w.sample_rate);
    const double a_max = scale_for_frequency(basis, a.fmin, w.sample_rate);
    const Eigen::VectorXd scales =
        geometric_scales(a_min, std::pow(a_max / a_min, 1.0 / double(a.scales - 1)), a.scales);
    const Scalogram s = cwt(w, scales, basis, a.cwt_hop);
    write_matrix_csv(a.out / "cwt.csv", s.coefficients,
                     {sr_note, std::string("basis=") + to_string(basis.kind), "hop=" + std::to_string(a.cwt_hop)},
                     {}, &s.scales);
    write_heatmap_png(a.out / "cwt.png", s.coefficients.cwiseAbs2(), true);
  } else {
    throw ContractError("transform: unknown op " + a.op);
  }
  log(g, "wrote " + (a.out / (a.op + ".csv")).string());
}

// ---------------------------------------------------------------------------
// mfcc

struct MfccArgs {
  fs::path in, out = "mfcc.csv";
  int sr = 0;
  MfccConfig cfg;
};

void run_mfcc(const MfccArgs& a, const Global& g) {
  const Waveform w = load_input(a.in, a.sr);
  const FeatureMatrix f = mfcc(w, a.cfg);
  if (a.out.has_parent_path()) fs::create_directories(a.out.parent_path());
  write_matrix_csv(a.out, f.values,
                   {"sample_rate=" + std::to_string(w.sample_rate), "n_mfcc=" + std::to_string(a.cfg.n_mfcc),
                    "n_mels=" + std::to_string(a.cfg.resolved_mels()), "frame_ms=" + num(a.cfg.frame_ms),
                    "hop_ms=" + num(a.cfg.hop_ms), "rows=coefficients"});
  fs::path png = a.out;
  write_heatmap_png(png.replace_extension(".png"), f.values);
  log(g, "mfcc " + std::to_string(f.values.rows()) + "x" + std::to_string(f.values.cols()) + " -> " + a.out.string());
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  fs::path out = "synth";
  SynthOptions opt;
};

void run_synth(SynthArgs a, const Global& g) {
  a.opt.seed = g.seed;
  const fs::path manifest = write_synthetic_dataset(a.out, a.opt);
  log(g, "wrote " + std::to_string(a.opt.classes * a.opt.per_class) + " clips, manifest " + manifest.string());
}

// ---------------------------------------------------------------------------
// train / eval

struct DataArgs {
  fs::path data = ".", manifest;
  int sr = 8000;
  double seconds = 0.0;  // 0: duration of the first file
};

struct ModelArgs {
  std::string pipeline = "raw";
  Index f1 = 72, nb_f = 32, stride = 2, hidden = 128, n_mfcc = 40, vgg = 16;
  bool vote_clips = false;
  double clip_seconds = 1.0;
};

struct TrainArgs {
  DataArgs data;
  ModelArgs model;
  TrainConfig train;
  int fold_out = 0;
  fs::path out = "model.bin";
};

struct EvalArgs {
  DataArgs data;
  ModelArgs model;
  TrainConfig train;
  bool kfold = false;
  fs::path ckpt, ckpt_dir, report = "report.csv";
  int fold = 0;
};

void add_data_options(CLI::App* app, DataArgs& d) {
  app->add_option("--data", d.data, "Audio root (fold<k>/ subdirectories)");
  app->add_option("--manifest", d.manifest, "Metadata CSV (default <data>/metadata.csv)");
  app->add_option("--sr", d.sr, "Working sample rate");
  app->add_option("--seconds", d.seconds, "Clip or pad every file to this duration (0: first file)");
}

void add_model_options(CLI::App* app, ModelArgs& m) {
  app->add_option("--pipeline", m.pipeline, "raw or mfcc")->check(CLI::IsMember({"raw", "mfcc"}));
  app->add_option("--f1", m.f1, "First-layer kernel length");
  app->add_option("--nbf", m.nb_f, "First-layer filter count");
  app->add_option("--stride", m.stride, "First-layer stride");
  app->add_option("--hidden", m.hidden, "Dense hidden units");
  app->add_option("--n-mfcc", m.n_mfcc, "MFCC coefficients (mfcc pipeline)");
  app->add_option("--vgg-channels", m.vgg, "VGG block 1 channels (mfcc pipeline)");
  app->add_flag("--vote-clips", m.vote_clips, "Train on clips and vote per file");
  app->add_option("--clip-seconds", m.clip_seconds, "Clip length for --vote-clips");
}

void add_train_options(CLI::App* app, TrainConfig& t) {
  app->add_option("--lr", t.lr, "Initial learning rate");
  app->add_option("--decay", t.decay, "Learning rate decay");
  app->add_option("--epochs-per-decay", t.epochs_per_decay);
  app->add_option("--epochs", t.max_epochs, "Maximum epochs");
  app->add_option("--patience", t.patience, "Early stopping patience");
  app->add_option("--min-delta", t.min_delta, "Relative loss improvement for early stopping");
  app->add_option("--batch", t.batch_size, "Mini-batch size");
}

std::vector<Example> load_dataset(const DataArgs& d, const Global& g) {
  const fs::path manifest = d.manifest.empty() ? d.data / "metadata.csv" : d.manifest;
  const DatasetIndex index = load_manifest(manifest, d.data);
  require(!index.empty(), "manifest lists no files: " + manifest.string());
  double seconds = d.seconds;
  if (seconds <= 0.0) seconds = resample(read_wav(index.entries.front().path), d.sr).duration();
  log(g, "loading " + std::to_string(index.entries.size()) + " files at " + std::to_string(d.sr) + " Hz, " +
             num(seconds) + " s each");
  return load_examples(index, d.sr, seconds);
}

PipelineOptions pipeline_options(const ModelArgs& m) {
  PipelineOptions opt;
  opt.mfcc.n_mfcc = static_cast<int>(m.n_mfcc);
  opt.vote_clips = m.vote_clips;
  opt.clip_seconds = m.clip_seconds;
  return opt;
}

ModelConfig model_config(const ModelArgs& m, const std::vector<Example>& data, const Global& g) {
  ModelConfig cfg;
  cfg.arch = pipeline_from_string(m.pipeline);
  cfg.f1 = m.f1;
  cfg.nb_f = m.nb_f;
  cfg.stride = m.stride;
  cfg.hidden = m.hidden;
  cfg.n_mfcc = m.n_mfcc;
  cfg.vgg_channels = m.vgg;
  cfg.seed = g.seed;
  Index classes = 0;
  for (const auto& e : data) classes = std::max(classes, e.label + 1);
  cfg.n_classes = std::max<Index>(classes, 2);
  return with_input_shape(cfg, data.front().wave, pipeline_options(m));
}

EpochCallback epoch_logger(const Global& g, const std::string& prefix) {
  return [&g, prefix](const EpochRecord& r) {
    log(g, prefix + "epoch " + std::to_string(r.epoch + 1) + " loss " + num(r.loss) + " acc " + num(r.accuracy) +
               " lr " + num(r.lr));
  };
}

double test_accuracy(const Model& model, const std::vector<Example>& test, Pipeline p, const PipelineOptions& opt) {
  if (test.empty()) return 0.0;
  size_t correct = 0;
  for (const auto& e : test) correct += classify(model, e.wave, p, opt) == e.label;
  return double(correct) / double(test.size());
}

void run_train(TrainArgs a, const Global& g) {
  a.train.seed = g.seed;
  const auto data = load_dataset(a.data, g);
  std::vector<Example> train_set, test_set;
  for (const auto& e : data) (a.fold_out > 0 && e.fold == a.fold_out ? test_set : train_set).push_back(e);
  require(!train_set.empty(), "train: no training files left");

  const ModelConfig cfg = model_config(a.model, data, g);
  const PipelineOptions opt = pipeline_options(a.model);
  Model model = build_model(cfg);
  log(g, "training " + std::string(to_string(cfg.arch)) + " model on " + std::to_string(train_set.size()) + " files");
  const TrainHistory h = train(model, make_samples(train_set, cfg.arch, opt), a.train, epoch_logger(g, ""));
  if (!h.diagnostic.empty()) log(g, h.diagnostic);
  if (a.out.has_parent_path()) fs::create_directories(a.out.parent_path());
  save_checkpoint(a.out, model, a.train, h);
  std::cout << "stop=" << to_string(h.stop) << " epochs=" << h.epochs.size();
  if (!test_set.empty())
    std::cout << " fold=" << a.fold_out << " test_acc=" << test_accuracy(model, test_set, cfg.arch, opt);
  std::cout << " checkpoint=" << a.out.string() << '\n';
}

void run_eval(EvalArgs a, const Global& g) {
  a.train.seed = g.seed;
  const auto data = load_dataset(a.data, g);
  const PipelineOptions opt = pipeline_options(a.model);
  EvalReport report;

  if (a.kfold) {
    const ModelConfig cfg = model_config(a.model, data, g);
    FoldCallback save;
    if (!a.ckpt_dir.empty()) {
      fs::create_directories(a.ckpt_dir);
      save = [&](int fold, const Model& m, const TrainConfig& tc, const TrainHistory& h) {
        save_checkpoint(a.ckpt_dir / ("fold" + std::to_string(fold) + ".bin"), m, tc, h);
      };
    }
    report = kfold_evaluate(data, cfg, a.train, opt, epoch_logger(g, "  "), save);
  } else {
    require(!a.ckpt.empty(), "eval: pass --kfold or --ckpt");
    const Checkpoint c = load_checkpoint(a.ckpt);
    const ModelConfig& cfg = c.model.config();
    FoldResult fr;
    fr.fold = a.fold;
    size_t correct = 0;
    for (const auto& e : data) {
      if (a.fold > 0 && e.fold != a.fold) continue;
      const Index pred = classify(c.model, e.wave, cfg.arch, opt);
      fr.files.push_back(e.name);
      fr.labels.push_back(e.label);
      fr.predicted.push_back(pred);
      correct += pred == e.label;
    }
    require(!fr.files.empty(), "eval: no files selected");
    fr.accuracy = double(correct) / double(fr.files.size());
    fr.history = c.history;
    report.pipeline = to_string(cfg.arch);
    report.f1 = cfg.arch == Pipeline::raw ? cfg.f1 : 0;
    report.nb_f = cfg.arch == Pipeline::raw ? cfg.nb_f : 0;
    report.n_mfcc = cfg.arch == Pipeline::mfcc ? cfg.n_mfcc : 0;
    report.freq_khz = cfg.sample_rate / 1000.0;
    report.folds.push_back(std::move(fr));
  }

  for (const auto& f : report.folds) std::cout << "fold " << f.fold << " acc " << f.accuracy << '\n';
  std::cout << "mean acc " << report.mean_accuracy() << '\n';
  if (a.report.has_parent_path()) fs::create_directories(a.report.parent_path());
  write_report(report, a.report);
  log(g, "wrote " + a.report.string());
}

// ---------------------------------------------------------------------------
// analyze-filters

struct AnalyzeArgs {
  fs::path ckpt, out = "filters", in;
  Index pad = 1024;
  std::string wavelet = "morlet";
};

void run_analyze(const AnalyzeArgs& a, const Global& g) {
  const FilterBank bank = load_filter_bank(a.ckpt);
  fs::create_directories(a.out);
  const FilterReport r = analyze_filters(bank, a.pad);

  std::ostringstream csv;
  csv << "filter,fc_hz,fb_hz\n";
  for (Index m = 0; m < bank.filters(); ++m) {
    csv << m << ',';
    if (r.filters[m]) csv << r.filters[m]->fc << ',' << r.filters[m]->fb;
    else csv << ',';
    csv << '\n';
  }
  write_text(a.out / "filters.csv", csv.str());

  std::ostringstream fit;
  fit << "rank,fc_hz\n";
  for (size_t i = 0; i < r.fit.sorted_fc.size(); ++i) fit << i << ',' << r.fit.sorted_fc[i] << '\n';
  if (r.fit.fit) fit << "# fc = alpha * exp(beta * rank): alpha=" << r.fit.fit->alpha << " beta=" << r.fit.fit->beta
                     << " r2=" << r.fit.fit->r2 << '\n';
  write_text(a.out / "sorted_fc.csv", fit.str());

  RowMatrixXd sorted(bank.filters(), r.spectra.cols());
  RowMatrixXd kernels(bank.filters(), bank.kernel());
  for (Index i = 0; i < bank.filters(); ++i) {
    sorted.row(i) = r.spectra.row(r.order[i]);
    kernels.row(i) = bank.weights.row(r.order[i]);
  }
  write_heatmap_png(a.out / "spectra.png", sorted, true);
  write_strip_png(a.out / "kernels.png", kernels);
  std::cout << "filters=" << bank.filters() << " below_2500hz=" << r.fraction_below(2500.0);
  if (r.fit.fit) std::cout << " beta=" << r.fit.fit->beta << " r2=" << r.fit.fit->r2;
  std::cout << '\n';

  if (a.in.empty()) return;
  const Waveform w = load_input(a.in, bank.sample_rate);
  const ActivationMap act = activation_map(bank, w);
  RowMatrixXd act_sorted(act.values.rows(), act.values.cols());
  for (Index i = 0; i < act.values.rows(); ++i) act_sorted.row(i) = act.values.row(r.order[i]);
  write_matrix_csv(a.out / "activation.csv", act_sorted,
                   {"rows=filters by ascending fc", "stride=" + std::to_string(act.stride)});
  write_heatmap_png(a.out / "activation.png", act_sorted);

  const WaveletBasis basis{wavelet_kind_from_string(a.wavelet)};
  Eigen::VectorXd scales(bank.filters());
  for (Index i = 0; i < bank.filters(); ++i) {
    const auto& f = r.filters[r.order[i]];
    const double hz = f && f->fc > 0.0 ? f->fc : r.bin_hz;
    scales[i] = scale_for_frequency(basis, hz, bank.sample_rate);
  }
  const CwtComparison c = compare_with_cwt(w, bank, scales, basis);
  write_heatmap_png(a.out / "cwt.png", c.cwt.coefficients.cwiseAbs());
  write_line_plot_png(a.out / "envelopes.png", {c.conv_envelope, c.cwt_envelope});
  std::cout << "conv_cwt_envelope_corr=" << (c.correlation ? num(*c.correlation) : std::string("n/a")) << '\n';
}

// ---------------------------------------------------------------------------
// reconstruct

struct ReconArgs {
  fs::path ckpt, in, out = "recon";
  std::string mode = "least_squares";
  ReconConfig cfg;
  double seconds = 0.0;
};

void run_reconstruct(ReconArgs a, const Global& g) {
  const FilterBank bank = load_filter_bank(a.ckpt);
  a.cfg.mode = recon_mode_from_string(a.mode);
  Waveform w = load_input(a.in, bank.sample_rate);
  if (a.seconds > 0.0) w = clip_or_pad(w, a.seconds);
  require(w.size() >= bank.kernel(), "reconstruct: input shorter than the kernel");
  fs::create_directories(a.out);

  const RowMatrixXd s = apply(bank, w.samples);
  const ReconResult r = recover(s, bank, a.cfg, &w.samples, w.size());
  write_wav(a.out / "recovered.wav", r.recovered, WavEncoding::float32);
  write_line_plot_png(a.out / "overlay.png", {w.samples, r.recovered.samples});
  write_strip_png(a.out / "basis.png", inverse_basis(bank, a.cfg).waveforms);

  const Index window = std::max<Index>(1, bank.sample_rate / 100);
  const auto env = pearson(amplitude_envelope(r.recovered.samples, window), amplitude_envelope(w.samples, window));
  std::ostringstream csv;
  csv << "metric,value\n"
      << "mode," << to_string(a.cfg.mode) << '\n'
      << "cm," << a.cfg.cm << '\n'
      << "relative_error," << (r.error ? num(*r.error) : std::string()) << '\n'
      << "envelope_correlation," << (env ? num(*env) : std::string()) << '\n'
      << "shift," << r.shift << '\n'
      << "gain," << r.gain << '\n'
      << "converged," << (r.converged ? 1 : 0) << '\n'
      << "iterations," << r.iterations << '\n'
      << "low_confidence_alignment," << (r.low_confidence_alignment ? 1 : 0) << '\n';
  write_text(a.out / "error.csv", csv.str());
  std::cout << "relative_error=" << (r.error ? num(*r.error) : "n/a")
            << " envelope_corr=" << (env ? num(*env) : "n/a") << " shift=" << r.shift << '\n';
  if (!r.converged) log(g, "warning: solver stopped before convergence");
  if (r.low_confidence_alignment) log(g, "warning: low-confidence alignment");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wavescope: raw-waveform CNN filter analysis toolkit"};
  app.set_config("--config", "", "key=value (TOML) file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--seed", g.seed, "Seed for data generation, initialization and shuffling (WAVESCOPE_SEED wins)");
  app.add_flag("-q,--quiet", g.quiet, "No progress output");

  TransformArgs ta;
  auto* t = app.add_subcommand("transform", "FFT, STFT or CWT of a WAV file");
  t->add_option("--in", ta.in)->required()->check(CLI::ExistingFile);
  t->add_option("--op", ta.op)->check(CLI::IsMember({"fft", "stft", "cwt"}));
  t->add_option("--out", ta.out, "Output directory");
  t->add_option("--sr", ta.sr, "Resample first (0 keeps the file rate)");
  t->add_option("--window", ta.window, "STFT window length");
  t->add_option("--hop", ta.hop, "STFT hop");
  t->add_option("--wavelet", ta.wavelet)->check(CLI::IsMember({"morlet", "mexican_hat"}));
  t->add_option("--scales", ta.scales, "CWT scale count");
  t->add_option("--cwt-hop", ta.cwt_hop);
  t->add_option("--fmin", ta.fmin, "Lowest CWT frequency (Hz)");
  t->add_option("--fmax", ta.fmax, "Highest CWT frequency (Hz, 0: 0.45 sr)");

  MfccArgs ma;
  auto* m = app.add_subcommand("mfcc", "MFCC matrix of a WAV file");
  m->add_option("--in", ma.in)->required()->check(CLI::ExistingFile);
  m->add_option("--out", ma.out, "CSV path; a PNG is written next to it");
  m->add_option("--sr", ma.sr, "Resample first (0 keeps the file rate)");
  m->add_option("--n-mfcc", ma.cfg.n_mfcc);
  m->add_option("--n-mels", ma.cfg.n_mels);
  m->add_option("--frame-ms", ma.cfg.frame_ms);
  m->add_option("--hop-ms", ma.cfg.hop_ms);
  m->add_option("--fmin", ma.cfg.fmin);
  m->add_option("--fmax", ma.cfg.fmax);

  SynthArgs sa;
  auto* s = app.add_subcommand("synth", "Write a synthetic bandpass-noise dataset");
  s->add_option("--out", sa.out, "Output directory");
  s->add_option("--classes", sa.opt.classes);
  s->add_option("--per-class", sa.opt.per_class);
  s->add_option("--sr", sa.opt.sample_rate);
  s->add_option("--seconds", sa.opt.seconds);
  s->add_option("--rel-width", sa.opt.rel_width, "Band width relative to the centre");
  s->add_option("--seed", g.seed);

  TrainArgs tra;
  auto* tr = app.add_subcommand("train", "Train one model and save a checkpoint");
  add_data_options(tr, tra.data);
  add_model_options(tr, tra.model);
  add_train_options(tr, tra.train);
  tr->add_option("--fold-out", tra.fold_out, "Hold out this fold and report its accuracy (0: train on all)");
  tr->add_option("--out", tra.out, "Checkpoint path");

  EvalArgs ea;
  auto* ev = app.add_subcommand("eval", "k-fold evaluation or checkpoint scoring");
  add_data_options(ev, ea.data);
  add_model_options(ev, ea.model);
  add_train_options(ev, ea.train);
  ev->add_flag("--kfold", ea.kfold, "Train and test once per fold");
  ev->add_option("--ckpt", ea.ckpt, "Score this checkpoint instead of training");
  ev->add_option("--fold", ea.fold, "With --ckpt: score only this fold");
  ev->add_option("--ckpt-dir", ea.ckpt_dir, "With --kfold: save fold<k>.bin checkpoints here");
  ev->add_option("--report", ea.report, "Report CSV path");

  AnalyzeArgs aa;
  auto* an = app.add_subcommand("analyze-filters", "Spectra, fc/fb and activation maps of a trained first layer");
  an->add_option("--ckpt", aa.ckpt)->required()->check(CLI::ExistingFile);
  an->add_option("--out", aa.out, "Output directory");
  an->add_option("--in", aa.in, "Optional WAV for activation maps and the CWT comparison")->check(CLI::ExistingFile);
  an->add_option("--pad", aa.pad, "Zero-padded FFT length");
  an->add_option("--wavelet", aa.wavelet)->check(CLI::IsMember({"morlet", "mexican_hat"}));

  ReconArgs ra;
  auto* rc = app.add_subcommand("reconstruct", "Recover a signal from the first-layer output");
  rc->add_option("--ckpt", ra.ckpt)->required()->check(CLI::ExistingFile);
  rc->add_option("--in", ra.in)->required()->check(CLI::ExistingFile);
  rc->add_option("--out", ra.out, "Output directory");
  rc->add_option("--mode", ra.mode)->check(CLI::IsMember({"least_squares", "spectral_division"}));
  rc->add_option("--cm", ra.cfg.cm, "Global normalization divisor");
  rc->add_option("--ridge", ra.cfg.ridge, "Relative regularization");
  rc->add_option("--smooth", ra.cfg.smooth_window, "Moving-average window (1 disables)");
  rc->add_option("--align-search", ra.cfg.align_search, "Realignment search in samples (-1: f1)");
  rc->add_flag("--auto-gain", ra.cfg.auto_gain, "Fit a global gain against the input");
  rc->add_option("--max-iter", ra.cfg.max_iterations);
  rc->add_option("--seconds", ra.seconds, "Clip or pad the input first");

  CLI11_PARSE(app, argc, argv);

  if (const char* env = std::getenv("WAVESCOPE_SEED"); env && *env) {
    try {
      g.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "error: WAVESCOPE_SEED is not an unsigned integer: " << env << '\n';
      return 2;
    }
  }

  try {
    if (*t) run_transform(ta, g);
    else if (*m) run_mfcc(ma, g);
    else if (*s) run_synth(sa, g);
    else if (*tr) run_train(tra, g);
    else if (*ev) run_eval(ea, g);
    else if (*an) run_analyze(aa, g);
    else if (*rc) run_reconstruct(ra, g);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
