#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "avsal/audio.hpp"
#include "avsal/nn.hpp"
#include "avsal/types.hpp"

namespace avsal {

enum class Mode { AV, VideoOnly, AudioOnly };

Mode mode_from_token(const std::string& token);  // {av, video, audio}
std::string mode_token(Mode m);

// Which part of the graph a training step updates: ImageOnly batches leave
// the audio encoder and the fusion mixer untouched.
enum class PathSelection { AudioVisual, ImageOnly };

struct ModelConfig {
  std::vector<int> widths = {8, 16, 32, 64, 64};  // encoder channels per stage
  std::vector<int> repeats = {1, 1, 1, 1, 1};     // conv blocks per stage
  int frames = 16;
  int height = 64;  // input frame size; both dims divisible by 32
  int width = 96;
  Mode mode = Mode::AV;
  double frame_mean = 0.45;  // per-channel input normalization
  double frame_std = 0.225;

  int grid_h() const { return height / 32; }
  int grid_w() const { return width / 32; }
  int map_h() const { return height / 8; }
  int map_w() const { return width / 8; }

  // ResNet-18-shaped block counts at full width and the paper's input size.
  static ModelConfig full();

  void validate() const;
};

// Two-stream 3D-convolutional encoder-decoder. Video frames and the audio
// log-mel tensor are encoded separately; audio features are fused into the
// video grid through a 1x1 mixer, and a two-block decoder emits a spatial
// probability distribution at 1/8 input resolution.
template <typename T>
class TwoStreamModel {
 public:
  explicit TwoStreamModel(ModelConfig cfg);

  // Seeded uniform fan-in init; every tensor draws from its own named
  // sub-stream, so parameter values do not depend on registration order.
  void init(uint64_t seed);

  const ModelConfig& config() const { return cfg_; }

  // Parameters first, then buffers (batch-norm running statistics).
  std::vector<nn::ParamRef<T>> params();

  // video: (N, 3, frames, H, W); audio: (N, 3, 16, 64, 64). The pointer for
  // an unused modality may be null. Output: (N, 1, H/8, W/8), each plane a
  // probability distribution. `training` selects batch statistics in the
  // batch norms; `update_running` folds them into the running estimates
  // (kept separate so finite-difference probes stay pure).
  nn::Tensor<T> forward(const nn::Tensor<T>* video, const nn::Tensor<T>* audio, Mode mode,
                        bool training, bool update_running);

  // Reverse-mode pass for the most recent forward; accumulates parameter
  // gradients along the path that forward took.
  void backward(const nn::Tensor<T>& grad_out);

  void zero_grad();

  // True when the named tensor is updated under the given path selection.
  static bool on_path(const std::string& name, PathSelection path);

 private:
  struct Block {
    nn::Conv3d<T> conv;
    nn::BatchNorm<T> bn;
    nn::Relu<T> relu;
  };

  // Visits blocks as "<stream>.s<stage>.b<repeat>" in registration order.
  void for_each_encoder_block(std::vector<Block>& stages, const std::string& stream,
                              const std::function<void(const std::string&, Block&)>& fn);

  nn::Tensor<T> encode(std::vector<Block>& stages, const nn::Tensor<T>& x, bool training,
                       bool update_running);
  nn::Tensor<T> encode_backward(std::vector<Block>& stages, const nn::Tensor<T>& grad);
  nn::Tensor<T> decode(const nn::Tensor<T>& features, bool training, bool update_running);
  nn::Tensor<T> decode_backward(const nn::Tensor<T>& grad);

  ModelConfig cfg_;
  std::vector<Block> video_enc_, audio_enc_;
  nn::GlobalAvgPool<T> gap_;
  nn::Conv2d<T> mixer_;
  nn::Upsample2x<T> up1_, up2_;
  nn::Conv2d<T> dconv1_, dconv2_, head_;
  nn::BatchNorm<T> dbn1_, dbn2_;
  nn::Relu<T> drelu1_, drelu2_;
  nn::SpatialSoftmax<T> softmax_;

  Mode last_mode_ = Mode::AV;
  int last_n_ = 0;
  std::vector<int> video_feat_shape_;  // (N, Cv, 1, h, w) from the last forward
};

extern template class TwoStreamModel<float>;
extern template class TwoStreamModel<double>;

// KL(G || S) = sum G log((G+eps)/(S+eps)) per sample, averaged over the
// batch; eps = 1e-8 on both arguments (matches the evaluation metric).
template <typename T>
T kl_loss(const nn::Tensor<T>& s, const nn::Tensor<T>& g);

// dL/dS for kl_loss.
template <typename T>
nn::Tensor<T> kl_loss_grad(const nn::Tensor<T>& s, const nn::Tensor<T>& g);

extern template float kl_loss<float>(const nn::Tensor<float>&, const nn::Tensor<float>&);
extern template double kl_loss<double>(const nn::Tensor<double>&, const nn::Tensor<double>&);
extern template nn::Tensor<float> kl_loss_grad<float>(const nn::Tensor<float>&,
                                                      const nn::Tensor<float>&);
extern template nn::Tensor<double> kl_loss_grad<double>(const nn::Tensor<double>&,
                                                        const nn::Tensor<double>&);

// (frame value - mean) / std, applied uniformly to the three channels.
template <typename T>
void normalize_frames(nn::Tensor<T>& clip, double mean, double std_dev);

extern template void normalize_frames<float>(nn::Tensor<float>&, double, double);
extern template void normalize_frames<double>(nn::Tensor<double>&, double, double);

// One sample's output plane as a Distribution.
template <typename T>
Distribution plane_to_distribution(const nn::Tensor<T>& out, int sample);

extern template Distribution plane_to_distribution<float>(const nn::Tensor<float>&, int);
extern template Distribution plane_to_distribution<double>(const nn::Tensor<double>&, int);

}  // namespace avsal
