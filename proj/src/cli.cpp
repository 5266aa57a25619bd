#include "avsal/cli.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "avsal/audio.hpp"
#include "avsal/checkpoint.hpp"
#include "avsal/fixation.hpp"
#include "avsal/harness.hpp"
#include "avsal/map_io.hpp"
#include "avsal/report.hpp"
#include "avsal/rng.hpp"
#include "avsal/synth.hpp"
#include "avsal/train.hpp"
#include "CLI11.hpp"
#include "json.hpp"

namespace avsal {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::zero_variance:
    case Errc::degenerate_data:
    case Errc::empty_fixations:
    case Errc::degenerate_negatives:
    case Errc::empty_negatives:
    case Errc::zero_mass:
    case Errc::short_audio:
      return 2;
    default:
      return 1;
  }
}

void echo_config(const ordered_json& cfg) { std::cout << cfg.dump(2) << "\n"; }

std::string shortest(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

// Frame size for fixation CSVs: explicit flags win, else the manifest.json
// sitting next to the CSV (the synthetic-corpus layout).
std::pair<int, int> resolve_frame_size(int height, int width, const fs::path& fix_path) {
  if (height > 0 && width > 0) return {height, width};
  auto manifest_path = fix_path.parent_path() / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) {
    throw Error(Errc::bad_argument,
                "frame size unknown: pass --height/--width or keep manifest.json next to " +
                    fix_path.string());
  }
  nlohmann::json manifest;
  try {
    in >> manifest;
    return {manifest.at("height").get<int>(), manifest.at("width").get<int>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::bad_format, manifest_path.string() + ": " + e.what());
  }
}

std::optional<double> ScoreRecord::* metric_field(const std::string& name) {
  if (name == "nss") return &ScoreRecord::nss;
  if (name == "auc_judd") return &ScoreRecord::auc_judd;
  if (name == "sauc") return &ScoreRecord::sauc;
  if (name == "cc") return &ScoreRecord::cc;
  if (name == "sim") return &ScoreRecord::sim;
  throw Error(Errc::bad_argument, "unknown metric: " + name);
}

std::map<std::string, VideoCategory> categories_or_default(const std::string& cats_path,
                                                           const FixationSet& fixations) {
  if (!cats_path.empty()) return read_category_csv(cats_path);
  // No labels provided: report everything under the catch-all bucket.
  std::map<std::string, VideoCategory> cats;
  for (const auto& id : fixations.video_ids()) cats[id] = VideoCategory::Miscellaneous;
  return cats;
}

void write_frame_maps(const fs::path& root, const std::string& video_id,
                      const std::vector<int>& frame_indices,
                      const std::vector<SaliencyMap>& maps) {
  auto dir = root / video_id;
  fs::create_directories(dir);
  for (size_t i = 0; i < frame_indices.size(); ++i) {
    char name[16];
    std::snprintf(name, sizeof(name), "%06d.smf", frame_indices[i]);
    write_map(maps[i], dir / name, MapFormat::SMF);
  }
}

// ---- subcommand bodies ----------------------------------------------------

struct SynthArgs {
  std::string spec_path, out;
  uint64_t seed = 0;
  bool seed_set = false, dry_run = false;
};

int cmd_synth(const SynthArgs& a) {
  auto spec = parse_synth_spec(a.spec_path);
  if (a.seed_set) spec.clip.seed = a.seed;
  ordered_json cfg;
  cfg["command"] = "synth";
  cfg["synth_spec"] = a.spec_path;
  cfg["out"] = a.out;
  cfg["clips"] = spec.clips;
  cfg["frames"] = spec.clip.frames;
  cfg["height"] = spec.clip.height;
  cfg["width"] = spec.clip.width;
  cfg["blob_count"] = spec.clip.blob_count;
  cfg["seed"] = spec.clip.seed;
  cfg["dry_run"] = a.dry_run;
  echo_config(cfg);
  if (!a.dry_run) write_synth_corpus(spec, a.out);
  return 0;
}

struct TrainArgs {
  std::string config_path, spec_path, data_dir, out, mode;
  uint64_t seed = 0;
  bool seed_set = false, dry_run = false;
};

int cmd_train(const TrainArgs& a) {
  auto cfg = parse_train_config(a.config_path);
  if (a.seed_set) cfg.seed = a.seed;
  if (!a.mode.empty()) cfg.mode = mode_from_token(a.mode);
  if (a.spec_path.empty() == a.data_dir.empty()) {
    throw Error(Errc::bad_argument, "train: pass exactly one of --synth-spec and --data");
  }

  SynthCorpusSpec spec;
  int height = 0, width = 0;
  if (!a.spec_path.empty()) {
    spec = parse_synth_spec(a.spec_path);
    height = spec.clip.height;
    width = spec.clip.width;
  } else {
    auto [h, w] = resolve_frame_size(0, 0, fs::path(a.data_dir) / "fixations.csv");
    height = h;
    width = w;
  }
  ModelConfig mc = model_config_for(cfg, height, width);

  ordered_json echo;
  echo["command"] = "train";
  echo["config"] = a.config_path;
  if (!a.spec_path.empty()) echo["synth_spec"] = a.spec_path;
  if (!a.data_dir.empty()) echo["data"] = a.data_dir;
  echo["out"] = a.out;
  echo["batch_size"] = cfg.batch_size;
  echo["lr"] = cfg.lr;
  echo["epochs"] = cfg.epochs;
  echo["seed"] = cfg.seed;
  echo["mode"] = mode_token(cfg.mode);
  echo["widths"] = mc.widths;
  echo["height"] = height;
  echo["width"] = width;
  echo["dry_run"] = a.dry_run;
  echo_config(echo);
  if (a.dry_run) return 0;

  std::vector<ClipSample> samples = !a.spec_path.empty()
                                        ? corpus_to_samples(synth_corpus(spec), mc)
                                        : load_corpus_dir(a.data_dir, mc);
  TwoStreamModel<float> model(mc);
  model.init(cfg.seed);
  auto result = train(model, samples, {}, cfg);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

  fs::create_directories(a.out);
  save_checkpoint(model, fs::path(a.out) / "checkpoint.dvck");
  std::string curve = "epoch,kind,loss\n";
  for (size_t i = 0; i < result.loss_curve.size(); ++i) {
    curve += std::to_string(i) + ',' + result.epoch_kinds[i] + ',' +
             shortest(result.loss_curve[i]) + '\n';
  }
  write_text(fs::path(a.out) / "loss.csv", curve);
  return 0;
}

struct PredictArgs {
  std::string ckpt, data_dir, out, mode;
  bool dry_run = false;
};

int cmd_predict(const PredictArgs& a) {
  auto model = load_checkpoint(a.ckpt);
  Mode mode = a.mode.empty() ? model.config().mode : mode_from_token(a.mode);

  std::ifstream mf(fs::path(a.data_dir) / "manifest.json");
  if (!mf) throw Error(Errc::io_error, "cannot open: " + a.data_dir + "/manifest.json");
  nlohmann::json manifest;
  try {
    mf >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::bad_format, std::string("manifest.json: ") + e.what());
  }
  int frames = manifest.at("frames").get<int>();

  ordered_json echo;
  echo["command"] = "predict";
  echo["ckpt"] = a.ckpt;
  echo["data"] = a.data_dir;
  echo["out"] = a.out;
  echo["mode"] = mode_token(mode);
  echo["videos"] = manifest.at("videos").size();
  echo["dry_run"] = a.dry_run;
  echo_config(echo);
  if (a.dry_run) return 0;

  for (const auto& id : manifest.at("videos")) {
    std::string video_id = id.get<std::string>();
    std::vector<SaliencyMap> clip_frames;
    std::vector<int> indices;
    for (int f = 0; f < frames; ++f) {
      char name[16];
      std::snprintf(name, sizeof(name), "%06d.smf", f);
      clip_frames.push_back(read_map(fs::path(a.data_dir) / "frames" / video_id / name));
      indices.push_back(f);
    }
    std::vector<double> audio;
    if (mode != Mode::VideoOnly) {
      PcmSignal wav = read_wav(fs::path(a.data_dir) / "audio" / (video_id + ".wav"));
      audio = (wav.sample_rate == kAudioRate ? wav : resample(wav, kAudioRate)).samples;
    }
    auto maps = predict_video(model, clip_frames, audio, mode);
    write_frame_maps(a.out, video_id, indices, maps);
  }
  return 0;
}

struct EvalArgs {
  std::string pred, fix, cats, out, name = "model";
  double geom = 0;
  int height = 0, width = 0, jobs = 1;
  uint64_t seed = 0;
  bool dry_run = false;
};

int cmd_eval(const EvalArgs& a) {
  if (!(a.geom > 0)) throw Error(Errc::bad_argument, "eval: --geom must be positive");
  if (a.jobs < 1) throw Error(Errc::bad_argument, "eval: --jobs must be >= 1");
  auto [height, width] = resolve_frame_size(a.height, a.width, a.fix);
  auto fixations = read_fixation_csv(a.fix, height, width);
  auto cats = categories_or_default(a.cats, fixations);

  ordered_json echo;
  echo["command"] = "eval";
  echo["pred"] = a.pred;
  echo["fix"] = a.fix;
  echo["cats"] = a.cats.empty() ? ordered_json(nullptr) : ordered_json(a.cats);
  echo["geom"] = a.geom;
  echo["out"] = a.out;
  echo["height"] = height;
  echo["width"] = width;
  echo["seed"] = a.seed;
  echo["jobs"] = a.jobs;
  echo["model"] = a.name;
  echo["dry_run"] = a.dry_run;
  echo_config(echo);
  if (a.dry_run) return 0;

  auto predictions = load_predictions(a.pred, fixations);
  EvalOptions opt;
  opt.seed = a.seed;
  auto fe = eval_frames(predictions, fixations, ViewingGeometry{a.geom}, opt);
  if (fe.records.empty()) {
    throw Error(Errc::degenerate_data, "eval: no ground-truth frame has a prediction");
  }
  emit_report(aggregate(fe, cats, a.name, a.seed), a.out);
  return 0;
}

struct MepArgs {
  std::string fix, out;
  double geom = 0;
  int height = 0, width = 0;
  bool dry_run = false;
};

int cmd_baseline_mep(const MepArgs& a) {
  if (!(a.geom > 0)) throw Error(Errc::bad_argument, "baseline-mep: --geom must be positive");
  auto [height, width] = resolve_frame_size(a.height, a.width, a.fix);
  auto fixations = read_fixation_csv(a.fix, height, width);

  ordered_json echo;
  echo["command"] = "baseline-mep";
  echo["fix"] = a.fix;
  echo["geom"] = a.geom;
  echo["out"] = a.out;
  echo["height"] = height;
  echo["width"] = width;
  echo["dry_run"] = a.dry_run;
  echo_config(echo);
  if (a.dry_run) return 0;

  ViewingGeometry geometry{a.geom};
  std::vector<Distribution> densities;
  for (const auto& video_id : fixations.video_ids()) {
    for (int frame_idx : fixations.frames_of(video_id)) {
      densities.push_back(density_map(fixations.frame(video_id, frame_idx), geometry));
    }
  }
  Distribution baseline = mep(densities);
  fs::create_directories(a.out);
  write_map(baseline, fs::path(a.out) / "mep.smf", MapFormat::SMF);
  for (const auto& video_id : fixations.video_ids()) {
    auto frames = fixations.frames_of(video_id);
    std::vector<SaliencyMap> maps(frames.size(), baseline);
    write_frame_maps(a.out, video_id, frames, maps);
  }
  return 0;
}

struct HumanInfArgs {
  std::string fix, cats, out;
  double geom = 0;
  int height = 0, width = 0;
  uint64_t seed = 0;
  bool dry_run = false;
};

int cmd_baseline_human_infinite(const HumanInfArgs& a) {
  if (!(a.geom > 0)) {
    throw Error(Errc::bad_argument, "baseline-human-infinite: --geom must be positive");
  }
  auto [height, width] = resolve_frame_size(a.height, a.width, a.fix);
  auto fixations = read_fixation_csv(a.fix, height, width);
  auto cats = categories_or_default(a.cats, fixations);

  std::set<std::string> subjects;
  for (const auto& video_id : fixations.video_ids()) {
    auto s = fixations.subjects_of(video_id);
    subjects.insert(s.begin(), s.end());
  }
  auto split = split_subjects(subjects, substream_seed(a.seed, "split"));

  ordered_json echo;
  echo["command"] = "baseline-human-infinite";
  echo["fix"] = a.fix;
  echo["geom"] = a.geom;
  echo["out"] = a.out;
  echo["height"] = height;
  echo["width"] = width;
  echo["seed"] = a.seed;
  echo["subjects"] = subjects.size();
  echo["dry_run"] = a.dry_run;
  echo_config(echo);
  if (a.dry_run) return 0;

  EvalOptions opt;
  opt.seed = a.seed;
  auto negatives = [&fixations, &opt](const std::string& video_id, int frame_idx) {
    return default_negatives(fixations, video_id, frame_idx, opt);
  };
  FrameEval fe;
  fe.records = human_infinite(fixations, split, ViewingGeometry{a.geom}, negatives);
  emit_report(aggregate(fe, cats, "human-infinite", a.seed), a.out);
  return 0;
}

struct AudioPrepArgs {
  std::string wav, out;
  bool dump_mel = false, dry_run = false;
};

int cmd_audio_prep(const AudioPrepArgs& a) {
  PcmSignal input = read_wav(a.wav);
  PcmSignal at16k = input.sample_rate == kAudioRate ? input : resample(input, kAudioRate);

  ordered_json echo;
  echo["command"] = "audio-prep";
  echo["wav"] = a.wav;
  echo["out"] = a.out;
  echo["input_rate"] = input.sample_rate;
  echo["input_samples"] = input.samples.size();
  echo["output_rate"] = kAudioRate;
  echo["output_samples"] = at16k.samples.size();
  echo["dump_mel"] = a.dump_mel;
  echo["dry_run"] = a.dry_run;
  echo_config(echo);
  if (a.dry_run) return 0;

  fs::create_directories(a.out);
  write_wav(at16k, fs::path(a.out) / "audio_16k.wav");
  if (a.dump_mel) {
    auto mel = log_mel(at16k);
    std::string csv;
    for (int t = 0; t < mel.frames; ++t) {
      for (int b = 0; b < LogMelSpectrogram::kBands; ++b) {
        if (b) csv += ',';
        csv += shortest(mel.at(t, b));
      }
      csv += '\n';
    }
    write_text(fs::path(a.out) / "mel.csv", csv);
  }
  return 0;
}

struct TemporalArgs {
  std::string scores, out, metric = "nss";
  int points = 1000, window = 25;
  bool dry_run = false;
};

int cmd_report_temporal(const TemporalArgs& a) {
  auto field = metric_field(a.metric);
  auto records = read_score_csv(a.scores);

  ordered_json echo;
  echo["command"] = "report-temporal";
  echo["scores"] = a.scores;
  echo["out"] = a.out;
  echo["metric"] = a.metric;
  echo["points"] = a.points;
  echo["window"] = a.window;
  echo["dry_run"] = a.dry_run;
  echo_config(echo);
  if (a.dry_run) return 0;

  std::map<std::string, std::vector<double>> sequences;
  for (const auto& rec : records) {
    if (rec.*field) sequences[rec.video_id].push_back(*(rec.*field));
  }
  auto profile = temporal_profile(sequences, a.points, a.window);
  for (const auto& w : profile.warnings) std::cerr << "warning: " << w << "\n";
  fs::create_directories(a.out);
  write_text(fs::path(a.out) / "temporal.csv", temporal_csv(profile));
  write_text(fs::path(a.out) / "temporal.svg",
             temporal_svg(profile, a.metric + " over video time"));
  return 0;
}

struct CategoriesArgs {
  std::string scores, cats, out, name = "model";
  uint64_t seed = 0;
  bool dry_run = false;
};

int cmd_report_categories(const CategoriesArgs& a) {
  auto records = read_score_csv(a.scores);
  auto cats = read_category_csv(a.cats);

  ordered_json echo;
  echo["command"] = "report-categories";
  echo["scores"] = a.scores;
  echo["cats"] = a.cats;
  echo["out"] = a.out;
  echo["model"] = a.name;
  echo["dry_run"] = a.dry_run;
  echo_config(echo);
  if (a.dry_run) return 0;

  FrameEval fe;
  fe.records = records;
  emit_report(aggregate(fe, cats, a.name, a.seed), a.out);
  return 0;
}

struct HistogramArgs {
  std::string scores, out, metric = "nss";
  int bins = 20;
  double lo = -2.0, hi = 6.0;
  bool dry_run = false;
};

int cmd_report_histogram(const HistogramArgs& a) {
  auto field = metric_field(a.metric);
  auto records = read_score_csv(a.scores);

  ordered_json echo;
  echo["command"] = "report-histogram";
  echo["scores"] = a.scores;
  echo["out"] = a.out;
  echo["metric"] = a.metric;
  echo["bins"] = a.bins;
  echo["lo"] = a.lo;
  echo["hi"] = a.hi;
  echo["dry_run"] = a.dry_run;
  echo_config(echo);
  if (a.dry_run) return 0;

  std::vector<double> values;
  for (const auto& rec : records) {
    if (rec.*field) values.push_back(*(rec.*field));
  }
  if (values.empty()) {
    throw Error(Errc::degenerate_data, "report-histogram: no present scores for " + a.metric);
  }
  auto histogram = score_histogram(values, a.bins, a.lo, a.hi);
  fs::create_directories(a.out);
  write_text(fs::path(a.out) / "histogram.csv", histogram_csv(histogram));
  write_text(fs::path(a.out) / "histogram.svg",
             histogram_svg(histogram, a.metric + " distribution"));
  return 0;
}

struct ImprovementArgs {
  std::string scores_a, scores_b, out, metric = "nss";
  bool dry_run = false;
};

int cmd_report_improvement(const ImprovementArgs& a) {
  auto field = metric_field(a.metric);
  auto records_a = read_score_csv(a.scores_a);
  auto records_b = read_score_csv(a.scores_b);

  ordered_json echo;
  echo["command"] = "report-improvement";
  echo["scores"] = a.scores_a;
  echo["scores_b"] = a.scores_b;
  echo["out"] = a.out;
  echo["metric"] = a.metric;
  echo["dry_run"] = a.dry_run;
  echo_config(echo);
  if (a.dry_run) return 0;

  auto collect = [&](const std::vector<ScoreRecord>& records) {
    std::map<FrameKey, double> scores;
    for (const auto& rec : records) {
      if (rec.*field) scores[{rec.video_id, rec.frame_idx}] = *(rec.*field);
    }
    return scores;
  };
  double rate = improvement_rate(collect(records_a), collect(records_b));
  fs::create_directories(a.out);
  char row[64];
  std::snprintf(row, sizeof(row), "%.4f", rate);
  write_text(fs::path(a.out) / "improvement.csv",
             "metric,rate_percent\n" + a.metric + ',' + row + '\n');
  return 0;
}

struct ContextualArgs {
  std::string pred, fix, sources, out;
  double geom = 0;
  int height = 0, width = 0;
  bool dry_run = false;
};

int cmd_report_contextual(const ContextualArgs& a) {
  if (!(a.geom > 0)) {
    throw Error(Errc::bad_argument, "report-contextual: --geom must be positive");
  }
  auto [height, width] = resolve_frame_size(a.height, a.width, a.fix);
  auto fixations = read_fixation_csv(a.fix, height, width);
  auto sources = read_source_csv(a.sources);

  ordered_json echo;
  echo["command"] = "report-contextual";
  echo["pred"] = a.pred;
  echo["fix"] = a.fix;
  echo["sources"] = a.sources;
  echo["geom"] = a.geom;
  echo["out"] = a.out;
  echo["height"] = height;
  echo["width"] = width;
  echo["dry_run"] = a.dry_run;
  echo_config(echo);
  if (a.dry_run) return 0;

  auto predictions = load_predictions(a.pred, fixations);
  auto records = contextual_eval(predictions, fixations, sources);
  if (records.empty()) {
    throw Error(Errc::degenerate_data, "report-contextual: no annotated frame was scoreable");
  }
  auto summary = summarize_contextual(records);
  fs::create_directories(a.out);
  write_text(fs::path(a.out) / "contextual.csv", contextual_csv(records));
  auto cell = [](const std::optional<double>& v) {
    char buf[32];
    if (!v) return std::string();
    std::snprintf(buf, sizeof(buf), "%.4f", *v);
    return std::string(buf);
  };
  write_text(fs::path(a.out) / "contextual_summary.csv",
             "in,out,full,frames\n" + cell(summary.in) + ',' + cell(summary.out) + ',' +
                 cell(summary.full) + ',' + std::to_string(summary.frames) + '\n');
  write_text(fs::path(a.out) / "contextual.svg",
             contextual_svg(summary, "NSS at the sound source"));
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"saliency benchmark toolkit"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic audio-visual corpus");
  synth_cmd->add_option("--synth-spec", synth_args.spec_path, "corpus spec (key-value text)")
      ->required()
      ->check(CLI::ExistingFile);
  synth_cmd->add_option("--out", synth_args.out, "output corpus directory")->required();
  auto* synth_seed = synth_cmd->add_option("--seed", synth_args.seed, "override the spec seed");
  synth_cmd->add_flag("--dry-run", synth_args.dry_run, "validate inputs, write nothing");

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train a model on a corpus");
  train_cmd->add_option("--config", train_args.config_path, "training config (key-value text)")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--synth-spec", train_args.spec_path, "generate the corpus in memory")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--data", train_args.data_dir, "corpus directory")
      ->check(CLI::ExistingDirectory);
  train_cmd->add_option("--out", train_args.out, "checkpoint + loss curve directory")
      ->required();
  auto* train_seed = train_cmd->add_option("--seed", train_args.seed, "override the config seed");
  train_cmd->add_option("--mode", train_args.mode, "av|video|audio (overrides config)");
  train_cmd->add_flag("--dry-run", train_args.dry_run, "validate inputs, write nothing");

  PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "write per-frame saliency maps");
  predict_cmd->add_option("--ckpt", predict_args.ckpt, "checkpoint file")
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--data", predict_args.data_dir, "corpus directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  predict_cmd->add_option("--out", predict_args.out, "prediction root directory")->required();
  predict_cmd->add_option("--mode", predict_args.mode, "av|video|audio (default: checkpoint)");
  predict_cmd->add_flag("--dry-run", predict_args.dry_run, "validate inputs, write nothing");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "score predictions against fixations");
  eval_cmd->add_option("--pred", eval_args.pred, "prediction root directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--fix", eval_args.fix, "fixation CSV")->required()->check(
      CLI::ExistingFile);
  eval_cmd->add_option("--cats", eval_args.cats, "category CSV")->check(CLI::ExistingFile);
  eval_cmd->add_option("--geom", eval_args.geom, "pixels per degree")->required();
  eval_cmd->add_option("--out", eval_args.out, "report directory")->required();
  eval_cmd->add_option("--height", eval_args.height, "frame height (else manifest.json)");
  eval_cmd->add_option("--width", eval_args.width, "frame width (else manifest.json)");
  eval_cmd->add_option("--seed", eval_args.seed, "negatives sampling seed");
  eval_cmd->add_option("--jobs", eval_args.jobs, "worker count (ordering-independent)");
  eval_cmd->add_option("--name", eval_args.name, "model name in the report");
  eval_cmd->add_flag("--dry-run", eval_args.dry_run, "validate inputs, write nothing");

  MepArgs mep_args;
  auto* mep_cmd = app.add_subcommand("baseline-mep", "mean-eye-position baseline predictions");
  mep_cmd->add_option("--fix", mep_args.fix, "fixation CSV")->required()->check(
      CLI::ExistingFile);
  mep_cmd->add_option("--geom", mep_args.geom, "pixels per degree")->required();
  mep_cmd->add_option("--out", mep_args.out, "output directory")->required();
  mep_cmd->add_option("--height", mep_args.height, "frame height (else manifest.json)");
  mep_cmd->add_option("--width", mep_args.width, "frame width (else manifest.json)");
  mep_cmd->add_flag("--dry-run", mep_args.dry_run, "validate inputs, write nothing");

  HumanInfArgs hi_args;
  auto* hi_cmd = app.add_subcommand("baseline-human-infinite",
                                    "split-half human agreement upper bound");
  hi_cmd->add_option("--fix", hi_args.fix, "fixation CSV")->required()->check(CLI::ExistingFile);
  hi_cmd->add_option("--cats", hi_args.cats, "category CSV")->check(CLI::ExistingFile);
  hi_cmd->add_option("--geom", hi_args.geom, "pixels per degree")->required();
  hi_cmd->add_option("--out", hi_args.out, "report directory")->required();
  hi_cmd->add_option("--height", hi_args.height, "frame height (else manifest.json)");
  hi_cmd->add_option("--width", hi_args.width, "frame width (else manifest.json)");
  hi_cmd->add_option("--seed", hi_args.seed, "subject-split seed");
  hi_cmd->add_flag("--dry-run", hi_args.dry_run, "validate inputs, write nothing");

  AudioPrepArgs audio_args;
  auto* audio_cmd = app.add_subcommand("audio-prep", "resample a WAV and dump features");
  audio_cmd->add_option("--wav", audio_args.wav, "input WAV")->required()->check(
      CLI::ExistingFile);
  audio_cmd->add_option("--out", audio_args.out, "output directory")->required();
  audio_cmd->add_flag("--dump-mel", audio_args.dump_mel, "write the log-mel spectrogram CSV");
  audio_cmd->add_flag("--dry-run", audio_args.dry_run, "validate inputs, write nothing");

  TemporalArgs temporal_args;
  auto* temporal_cmd = app.add_subcommand("report-temporal", "score profile over video time");
  temporal_cmd->add_option("--scores", temporal_args.scores, "per-frame score CSV")
      ->required()
      ->check(CLI::ExistingFile);
  temporal_cmd->add_option("--out", temporal_args.out, "output directory")->required();
  temporal_cmd->add_option("--metric", temporal_args.metric, "nss|auc_judd|sauc|cc|sim");
  temporal_cmd->add_option("--points", temporal_args.points, "resampled curve length");
  temporal_cmd->add_option("--window", temporal_args.window, "smoothing window (0 = off)");
  temporal_cmd->add_flag("--dry-run", temporal_args.dry_run, "validate inputs, write nothing");

  CategoriesArgs categories_args;
  auto* categories_cmd = app.add_subcommand("report-categories", "per-category aggregate table");
  categories_cmd->add_option("--scores", categories_args.scores, "per-frame score CSV")
      ->required()
      ->check(CLI::ExistingFile);
  categories_cmd->add_option("--cats", categories_args.cats, "category CSV")
      ->required()
      ->check(CLI::ExistingFile);
  categories_cmd->add_option("--out", categories_args.out, "report directory")->required();
  categories_cmd->add_option("--name", categories_args.name, "model name in the report");
  categories_cmd->add_flag("--dry-run", categories_args.dry_run,
                           "validate inputs, write nothing");

  HistogramArgs histogram_args;
  auto* histogram_cmd = app.add_subcommand("report-histogram", "score distribution histogram");
  histogram_cmd->add_option("--scores", histogram_args.scores, "per-frame score CSV")
      ->required()
      ->check(CLI::ExistingFile);
  histogram_cmd->add_option("--out", histogram_args.out, "output directory")->required();
  histogram_cmd->add_option("--metric", histogram_args.metric, "nss|auc_judd|sauc|cc|sim");
  histogram_cmd->add_option("--bins", histogram_args.bins, "bin count");
  histogram_cmd->add_option("--lo", histogram_args.lo, "range low edge");
  histogram_cmd->add_option("--hi", histogram_args.hi, "range high edge");
  histogram_cmd->add_flag("--dry-run", histogram_args.dry_run, "validate inputs, write nothing");

  ImprovementArgs improvement_args;
  auto* improvement_cmd =
      app.add_subcommand("report-improvement", "share of frames one model wins");
  improvement_cmd->add_option("--scores", improvement_args.scores_a, "per-frame score CSV (a)")
      ->required()
      ->check(CLI::ExistingFile);
  improvement_cmd->add_option("--scores-b", improvement_args.scores_b, "per-frame score CSV (b)")
      ->required()
      ->check(CLI::ExistingFile);
  improvement_cmd->add_option("--out", improvement_args.out, "output directory")->required();
  improvement_cmd->add_option("--metric", improvement_args.metric, "nss|auc_judd|sauc|cc|sim");
  improvement_cmd->add_flag("--dry-run", improvement_args.dry_run,
                            "validate inputs, write nothing");

  ContextualArgs contextual_args;
  auto* contextual_cmd =
      app.add_subcommand("report-contextual", "NSS inside/outside sound-source regions");
  contextual_cmd->add_option("--pred", contextual_args.pred, "prediction root directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  contextual_cmd->add_option("--fix", contextual_args.fix, "fixation CSV")
      ->required()
      ->check(CLI::ExistingFile);
  contextual_cmd->add_option("--sources", contextual_args.sources, "sound-source CSV")
      ->required()
      ->check(CLI::ExistingFile);
  contextual_cmd->add_option("--geom", contextual_args.geom, "pixels per degree")->required();
  contextual_cmd->add_option("--out", contextual_args.out, "output directory")->required();
  contextual_cmd->add_option("--height", contextual_args.height,
                             "frame height (else manifest.json)");
  contextual_cmd->add_option("--width", contextual_args.width,
                             "frame width (else manifest.json)");
  contextual_cmd->add_flag("--dry-run", contextual_args.dry_run,
                           "validate inputs, write nothing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    synth_args.seed_set = synth_seed->count() > 0;
    train_args.seed_set = train_seed->count() > 0;
    if (synth_cmd->parsed()) return cmd_synth(synth_args);
    if (train_cmd->parsed()) return cmd_train(train_args);
    if (predict_cmd->parsed()) return cmd_predict(predict_args);
    if (eval_cmd->parsed()) return cmd_eval(eval_args);
    if (mep_cmd->parsed()) return cmd_baseline_mep(mep_args);
    if (hi_cmd->parsed()) return cmd_baseline_human_infinite(hi_args);
    if (audio_cmd->parsed()) return cmd_audio_prep(audio_args);
    if (temporal_cmd->parsed()) return cmd_report_temporal(temporal_args);
    if (categories_cmd->parsed()) return cmd_report_categories(categories_args);
    if (histogram_cmd->parsed()) return cmd_report_histogram(histogram_args);
    if (improvement_cmd->parsed()) return cmd_report_improvement(improvement_args);
    if (contextual_cmd->parsed()) return cmd_report_contextual(contextual_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace avsal
