#include "avsal/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "avsal/audio.hpp"
#include "avsal/config_text.hpp"
#include "avsal/fixation.hpp"
#include "avsal/map_io.hpp"
#include "avsal/rng.hpp"
#include "json.hpp"

namespace avsal {

void TrainConfig::validate() const {
  if (batch_size < 1) throw Error(Errc::bad_argument, "train config: batch_size must be >= 1");
  if (!(lr > 0)) throw Error(Errc::bad_argument, "train config: lr must be positive");
  if (epochs < 1) throw Error(Errc::bad_argument, "train config: epochs must be >= 1");
}

TrainConfig parse_train_config_text(const std::string& text) {
  TrainConfig cfg;
  for (const auto& [key, value] : parse_key_values(text)) {
    try {
      if (key == "batch_size") {
        cfg.batch_size = std::stoi(value);
      } else if (key == "lr") {
        cfg.lr = std::stod(value);
      } else if (key == "epochs") {
        cfg.epochs = std::stoi(value);
      } else if (key == "seed") {
        cfg.seed = std::stoull(value);
      } else if (key == "widths") {
        cfg.widths = parse_int_list(value);
      } else if (key == "mode") {
        cfg.mode = mode_from_token(value);
      } else {
        throw Error(Errc::bad_format, "train config: unknown key: " + key);
      }
    } catch (const std::invalid_argument&) {
      throw Error(Errc::bad_format, "train config: bad value for " + key + ": " + value);
    } catch (const std::out_of_range&) {
      throw Error(Errc::bad_format, "train config: value out of range for " + key);
    }
  }
  cfg.validate();
  return cfg;
}

TrainConfig parse_train_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_train_config_text(buf.str());
}

ModelConfig model_config_for(const TrainConfig& cfg, int height, int width) {
  ModelConfig mc;
  if (!cfg.widths.empty()) {
    mc.widths = cfg.widths;
    mc.repeats.assign(cfg.widths.size(), 1);
  }
  mc.mode = cfg.mode;
  mc.height = height;
  mc.width = width;
  mc.validate();
  return mc;
}

void Adam::step(std::vector<nn::ParamRef<float>>& refs, PathSelection path) {
  for (auto& ref : refs) {
    if (ref.buffer || !ref.grad) continue;
    if (!TwoStreamModel<float>::on_path(ref.name, path)) continue;
    State& st = state_[ref.name];
    if (st.m.empty()) {
      st.m.assign(ref.value->size(), 0.0f);
      st.v.assign(ref.value->size(), 0.0f);
    }
    st.t += 1;
    double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(st.t));
    double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(st.t));
    for (size_t i = 0; i < ref.value->size(); ++i) {
      double g = (*ref.grad)[i];
      double m = kAdamBeta1 * st.m[i] + (1.0 - kAdamBeta1) * g;
      double v = kAdamBeta2 * st.v[i] + (1.0 - kAdamBeta2) * g * g;
      st.m[i] = static_cast<float>(m);
      st.v[i] = static_cast<float>(v);
      (*ref.value)[i] -= static_cast<float>(lr_ * (m / c1) / (std::sqrt(v / c2) + kAdamEpsilon));
    }
  }
}

const std::vector<float>* Adam::moment1(const std::string& name) const {
  auto it = state_.find(name);
  return it == state_.end() ? nullptr : &it->second.m;
}

const std::vector<float>* Adam::moment2(const std::string& name) const {
  auto it = state_.find(name);
  return it == state_.end() ? nullptr : &it->second.v;
}

int64_t Adam::steps(const std::string& name) const {
  auto it = state_.find(name);
  return it == state_.end() ? 0 : it->second.t;
}

namespace {

// Stacks per-sample tensors (shape S) into one batch tensor (N, S...).
nn::Tensor<float> stack(const std::vector<const nn::Tensor<float>*>& parts) {
  std::vector<int> shape = parts[0]->shape;
  shape.insert(shape.begin(), static_cast<int>(parts.size()));
  nn::Tensor<float> out(shape);
  size_t stride = parts[0]->data.size();
  for (size_t i = 0; i < parts.size(); ++i) {
    std::copy(parts[i]->data.begin(), parts[i]->data.end(), out.data.begin() + i * stride);
  }
  return out;
}

nn::Tensor<float> stack_targets(const std::vector<const Distribution*>& targets) {
  int h = targets[0]->height, w = targets[0]->width;
  nn::Tensor<float> out({static_cast<int>(targets.size()), 1, h, w});
  for (size_t i = 0; i < targets.size(); ++i) {
    const auto& vals = targets[i]->values;
    for (size_t j = 0; j < vals.size(); ++j) {
      out.data[i * vals.size() + j] = static_cast<float>(vals[j]);
    }
  }
  return out;
}

double step_batch(TwoStreamModel<float>& model, const nn::Tensor<float>* video,
                  const nn::Tensor<float>* audio, const nn::Tensor<float>& target, Mode mode,
                  PathSelection path, Adam& opt) {
  model.zero_grad();
  auto out = model.forward(video, audio, mode, /*training=*/true, /*update_running=*/true);
  if (out.shape != target.shape) {
    throw Error(Errc::shape_mismatch, "train_step: target grid does not match model output");
  }
  float loss = kl_loss(out, target);
  model.backward(kl_loss_grad(out, target));
  auto refs = model.params();
  opt.step(refs, path);
  return loss;
}

}  // namespace

double train_step(TwoStreamModel<float>& model, const std::vector<const ClipSample*>& batch,
                  Adam& opt) {
  if (batch.empty()) throw Error(Errc::bad_argument, "train_step: empty batch");
  std::vector<const nn::Tensor<float>*> videos, audios;
  std::vector<const Distribution*> targets;
  for (const auto* s : batch) {
    videos.push_back(&s->video);
    audios.push_back(&s->audio);
    targets.push_back(&s->target);
  }
  Mode mode = model.config().mode;
  nn::Tensor<float> video, audio;
  if (mode != Mode::AudioOnly) video = stack(videos);
  if (mode != Mode::VideoOnly) audio = stack(audios);
  auto target = stack_targets(targets);
  return step_batch(model, mode != Mode::AudioOnly ? &video : nullptr,
                    mode != Mode::VideoOnly ? &audio : nullptr, target, mode,
                    PathSelection::AudioVisual, opt);
}

double train_step(TwoStreamModel<float>& model, const std::vector<const ImageSample*>& batch,
                  Adam& opt) {
  if (batch.empty()) throw Error(Errc::bad_argument, "train_step: empty batch");
  if (model.config().mode == Mode::AudioOnly) {
    throw Error(Errc::bad_argument, "train_step: image batch on an audio-only model");
  }
  std::vector<const nn::Tensor<float>*> videos;
  std::vector<const Distribution*> targets;
  for (const auto* s : batch) {
    videos.push_back(&s->video);
    targets.push_back(&s->target);
  }
  auto video = stack(videos);
  auto target = stack_targets(targets);
  return step_batch(model, &video, nullptr, target, Mode::VideoOnly, PathSelection::ImageOnly,
                    opt);
}

TrainResult train(TwoStreamModel<float>& model, const std::vector<ClipSample>& av_dataset,
                  const std::vector<ImageSample>& image_dataset, const TrainConfig& cfg) {
  cfg.validate();
  if (av_dataset.empty()) throw Error(Errc::bad_argument, "train: empty audio-visual dataset");
  if (!image_dataset.empty() && model.config().mode == Mode::AudioOnly) {
    throw Error(Errc::bad_argument, "train: image epochs make no sense for an audio-only model");
  }

  TrainResult result;
  if (image_dataset.empty()) {
    result.warnings.push_back(
        "image dataset is empty; running every epoch on audio-visual clips");
  }
  Adam opt(cfg.lr);
  Rng data_rng(cfg.seed, "data");

  auto shuffled = [&](size_t n) {
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    for (size_t i = n; i > 1; --i) {
      std::swap(order[i - 1], order[data_rng.below(i)]);
    }
    return order;
  };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    bool av_epoch = image_dataset.empty() || epoch % 2 == 0;
    double loss_sum = 0.0;
    size_t seen = 0;
    if (av_epoch) {
      auto order = shuffled(av_dataset.size());
      for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
        std::vector<const ClipSample*> batch;
        for (size_t i = start; i < std::min(order.size(), start + cfg.batch_size); ++i) {
          batch.push_back(&av_dataset[order[i]]);
        }
        loss_sum += train_step(model, batch, opt) * batch.size();
        seen += batch.size();
      }
    } else {
      auto order = shuffled(image_dataset.size());
      for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
        std::vector<const ImageSample*> batch;
        for (size_t i = start; i < std::min(order.size(), start + cfg.batch_size); ++i) {
          batch.push_back(&image_dataset[order[i]]);
        }
        loss_sum += train_step(model, batch, opt) * batch.size();
        seen += batch.size();
      }
    }
    result.loss_curve.push_back(loss_sum / static_cast<double>(seen));
    result.epoch_kinds.push_back(av_epoch ? "av" : "img");
  }
  return result;
}

namespace {

nn::Tensor<float> frames_to_tensor(const std::vector<SaliencyMap>& frames, const ModelConfig& cfg) {
  if (static_cast<int>(frames.size()) != cfg.frames) {
    throw Error(Errc::shape_mismatch, "clip must have exactly 16 frames");
  }
  int h = cfg.height, w = cfg.width;
  nn::Tensor<float> t({3, cfg.frames, h, w});
  for (int f = 0; f < cfg.frames; ++f) {
    if (frames[f].height != h || frames[f].width != w) {
      throw Error(Errc::shape_mismatch, "frame size does not match model config");
    }
    for (int i = 0; i < h * w; ++i) {
      float v = static_cast<float>(frames[f].values[static_cast<size_t>(i)]);
      for (int c = 0; c < 3; ++c) {
        t.data[(static_cast<size_t>(c) * cfg.frames + f) * h * w + i] = v;
      }
    }
  }
  normalize_frames(t, cfg.frame_mean, cfg.frame_std);
  return t;
}

nn::Tensor<float> audio_to_tensor(const std::vector<double>& samples_16k) {
  AudioTensor a = audio_segment_tensor(PcmSignal{samples_16k, kAudioRate});
  nn::Tensor<float> t(
      {AudioTensor::kChannels, AudioTensor::kFrames, AudioTensor::kSteps, LogMelSpectrogram::kBands});
  for (int f = 0; f < AudioTensor::kFrames; ++f) {
    for (int c = 0; c < AudioTensor::kChannels; ++c) {
      for (int s = 0; s < AudioTensor::kSteps; ++s) {
        for (int m = 0; m < LogMelSpectrogram::kBands; ++m) {
          t.data[(((static_cast<size_t>(c) * AudioTensor::kFrames + f) * AudioTensor::kSteps + s) *
                  LogMelSpectrogram::kBands) +
                 m] = static_cast<float>(a.at(f, c, s, m));
        }
      }
    }
  }
  return t;
}

}  // namespace

ClipSample make_clip_sample(const std::string& video_id, const std::vector<SaliencyMap>& frames,
                            const std::vector<double>& audio_16k,
                            const FixationFrame& last_frame_fixations,
                            const ViewingGeometry& geometry, const ModelConfig& cfg) {
  ClipSample s;
  s.video_id = video_id;
  s.video = frames_to_tensor(frames, cfg);
  s.audio = audio_to_tensor(audio_16k);
  auto density = density_map(last_frame_fixations, geometry);
  s.target = downsample_area(density, cfg.map_h(), cfg.map_w());
  return s;
}

std::vector<ClipSample> corpus_to_samples(const std::vector<SynthClip>& clips,
                                          const ModelConfig& cfg) {
  std::vector<ClipSample> samples;
  ViewingGeometry geometry{kSynthSigma};
  for (const auto& clip : clips) {
    auto last = clip.fixations.frame(clip.video_id, static_cast<int>(clip.frames.size()) - 1);
    samples.push_back(
        make_clip_sample(clip.video_id, clip.frames, clip.audio, last, geometry, cfg));
  }
  return samples;
}

std::vector<ClipSample> load_corpus_dir(const std::filesystem::path& dir, const ModelConfig& cfg) {
  std::ifstream mf(dir / "manifest.json");
  if (!mf) throw Error(Errc::io_error, "cannot open: " + (dir / "manifest.json").string());
  nlohmann::json manifest;
  try {
    mf >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::bad_format, std::string("manifest.json: ") + e.what());
  }
  int frames = manifest.at("frames").get<int>();
  double ppd = manifest.at("pixels_per_degree").get<double>();
  auto fixations = read_fixation_csv(dir / "fixations.csv", manifest.at("height").get<int>(),
                                     manifest.at("width").get<int>());
  std::vector<ClipSample> samples;
  for (const auto& id : manifest.at("videos")) {
    std::string video_id = id.get<std::string>();
    std::vector<SaliencyMap> clip_frames;
    for (int f = 0; f < frames; ++f) {
      char name[16];
      std::snprintf(name, sizeof(name), "%06d.smf", f);
      clip_frames.push_back(read_map(dir / "frames" / video_id / name));
    }
    PcmSignal wav = read_wav(dir / "audio" / (video_id + ".wav"));
    PcmSignal mono16k = wav.sample_rate == kAudioRate ? wav : resample(wav, kAudioRate);
    auto last = fixations.frame(video_id, frames - 1);
    samples.push_back(make_clip_sample(video_id, clip_frames, mono16k.samples, last,
                                       ViewingGeometry{ppd}, cfg));
  }
  return samples;
}

std::vector<SaliencyMap> predict_video(TwoStreamModel<float>& model,
                                       const std::vector<SaliencyMap>& frames,
                                       const std::vector<double>& audio_16k, Mode mode) {
  if (frames.empty()) throw Error(Errc::bad_argument, "predict_video: no frames");
  const ModelConfig& cfg = model.config();
  int window = cfg.frames;
  std::vector<SaliencyMap> maps;
  for (int f = 0; f < static_cast<int>(frames.size()); ++f) {
    std::vector<SaliencyMap> clip(window);
    for (int k = 0; k < window; ++k) {
      int idx = std::max(0, f - window + 1 + k);
      clip[static_cast<size_t>(k)] = frames[static_cast<size_t>(idx)];
    }
    nn::Tensor<float> video, audio;
    if (mode != Mode::AudioOnly) {
      video = frames_to_tensor(clip, cfg);
      video.shape.insert(video.shape.begin(), 1);  // batch of one
    }
    if (mode != Mode::VideoOnly) {
      // Audio slice matching the causal frame window, at 640 samples per
      // frame; widened leftward when too short for one analysis window.
      int64_t spf = kAudioRate / kSynthFps;
      int64_t start = std::max<int64_t>(0, (f - window + 1)) * spf;
      int64_t end = std::min<int64_t>(static_cast<int64_t>(audio_16k.size()),
                                      (static_cast<int64_t>(f) + 1) * spf);
      start = std::min(start, std::max<int64_t>(0, end - kWindowLength));
      if (end - start < kWindowLength) {
        throw Error(Errc::short_audio, "predict_video: audio shorter than one analysis window");
      }
      std::vector<double> slice(audio_16k.begin() + start, audio_16k.begin() + end);
      audio = audio_to_tensor(slice);
      audio.shape.insert(audio.shape.begin(), 1);
    }
    auto out = model.forward(mode != Mode::AudioOnly ? &video : nullptr,
                             mode != Mode::VideoOnly ? &audio : nullptr, mode,
                             /*training=*/false, /*update_running=*/false);
    maps.push_back(plane_to_distribution(out, 0));
  }
  return maps;
}

}  // namespace avsal
