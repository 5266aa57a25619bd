#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "avsal/model.hpp"
#include "avsal/synth.hpp"

namespace avsal {

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;

struct TrainConfig {
  int batch_size = 10;
  double lr = 1e-3;
  int epochs = 10;
  uint64_t seed = 0;
  std::vector<int> widths;  // empty keeps the model defaults
  Mode mode = Mode::AV;

  void validate() const;
};

// Key-value text, one `key = value` (or `key value`) per line, '#' comments.
// Keys: batch_size, lr, epochs, seed, widths (comma-separated), mode.
TrainConfig parse_train_config_text(const std::string& text);
TrainConfig parse_train_config(const std::filesystem::path& path);

// Model shape implied by a training config at the given frame size.
ModelConfig model_config_for(const TrainConfig& cfg, int height, int width);

// One 16-frame segment with its supervision target.
struct ClipSample {
  std::string video_id;
  nn::Tensor<float> video;  // (3, 16, H, W), normalized frames
  nn::Tensor<float> audio;  // (3, 16, 64, 64) log-mel tensor
  Distribution target;      // (H/8) x (W/8)
};

// A static image replicated into a 16-frame volume.
struct ImageSample {
  std::string image_id;
  nn::Tensor<float> video;
  Distribution target;
};

// Adam keyed by parameter name. Tensors off the selected path are skipped
// entirely: their parameters, moments, and step counts stay bitwise intact.
class Adam {
 public:
  explicit Adam(double lr) : lr_(lr) {}

  void step(std::vector<nn::ParamRef<float>>& refs, PathSelection path);

  // Test hooks into the per-tensor state; null when the tensor has never
  // been updated.
  const std::vector<float>* moment1(const std::string& name) const;
  const std::vector<float>* moment2(const std::string& name) const;
  int64_t steps(const std::string& name) const;

 private:
  struct State {
    std::vector<float> m, v;
    int64_t t = 0;
  };
  double lr_;
  std::map<std::string, State> state_;
};

// One optimizer step over a batch; returns the batch loss. Audio-visual
// batches run the model in its configured mode; image batches run the
// video-only path and freeze the audio encoder and fusion mixer.
double train_step(TwoStreamModel<float>& model, const std::vector<const ClipSample*>& batch,
                  Adam& opt);
double train_step(TwoStreamModel<float>& model, const std::vector<const ImageSample*>& batch,
                  Adam& opt);

struct TrainResult {
  std::vector<double> loss_curve;        // mean loss per epoch
  std::vector<std::string> epoch_kinds;  // "av" or "img" per epoch
  std::vector<std::string> warnings;
};

// Alternates audio-visual and image epochs starting with audio-visual; an
// empty image dataset degrades to all audio-visual epochs with a warning.
// The model must already be initialized; shuffling draws from the "data"
// sub-stream of cfg.seed.
TrainResult train(TwoStreamModel<float>& model, const std::vector<ClipSample>& av_dataset,
                  const std::vector<ImageSample>& image_dataset, const TrainConfig& cfg);

// Sample construction: frames are replicated to three channels and
// normalized; the target is the last frame's fixation density, area-pooled
// to the output grid. Audio is 16 kHz mono covering the 16 frames.
ClipSample make_clip_sample(const std::string& video_id, const std::vector<SaliencyMap>& frames,
                            const std::vector<double>& audio_16k,
                            const FixationFrame& last_frame_fixations,
                            const ViewingGeometry& geometry, const ModelConfig& cfg);

std::vector<ClipSample> corpus_to_samples(const std::vector<SynthClip>& clips,
                                          const ModelConfig& cfg);

// Reads a corpus directory written by write_synth_corpus.
std::vector<ClipSample> load_corpus_dir(const std::filesystem::path& dir, const ModelConfig& cfg);

// One saliency map per frame, each predicted from the 16-frame causal
// window ending at that frame (early windows repeat the first frame; the
// matching audio slice is used for audio-aware modes).
std::vector<SaliencyMap> predict_video(TwoStreamModel<float>& model,
                                       const std::vector<SaliencyMap>& frames,
                                       const std::vector<double>& audio_16k, Mode mode);

}  // namespace avsal
