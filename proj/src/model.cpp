#include "avsal/model.hpp"

#include <cmath>

#include "avsal/metrics.hpp"
#include "avsal/rng.hpp"

namespace avsal {

Mode mode_from_token(const std::string& token) {
  if (token == "av") return Mode::AV;
  if (token == "video") return Mode::VideoOnly;
  if (token == "audio") return Mode::AudioOnly;
  throw Error(Errc::bad_argument, "unknown mode: " + token);
}

std::string mode_token(Mode m) {
  switch (m) {
    case Mode::AV: return "av";
    case Mode::VideoOnly: return "video";
    default: return "audio";
  }
}

ModelConfig ModelConfig::full() {
  ModelConfig cfg;
  cfg.widths = {64, 64, 128, 256, 512};
  cfg.repeats = {1, 2, 2, 2, 2};
  cfg.height = 256;
  cfg.width = 320;
  return cfg;
}

void ModelConfig::validate() const {
  if (widths.size() != 5 || repeats.size() != widths.size()) {
    throw Error(Errc::bad_argument, "model: need 5 stage widths and matching repeats");
  }
  for (int w : widths) {
    if (w < 4) throw Error(Errc::bad_argument, "model: stage widths must be >= 4");
  }
  for (int r : repeats) {
    if (r < 1) throw Error(Errc::bad_argument, "model: stage repeats must be >= 1");
  }
  if (widths.back() % 4 != 0) {
    throw Error(Errc::bad_argument, "model: final width must divide by 4 for the decoder");
  }
  if (frames != 16) throw Error(Errc::bad_argument, "model: clips are 16 frames");
  if (height % 32 != 0 || width % 32 != 0 || height < 32 || width < 32) {
    throw Error(Errc::bad_argument, "model: frame size must be divisible by 32");
  }
}

namespace {

template <typename T>
nn::Tensor<T> reshape(const nn::Tensor<T>& x, std::vector<int> shape) {
  nn::Tensor<T> y;
  y.shape = std::move(shape);
  y.data = x.data;
  return y;
}

// (N, C) vector tiled over an h x w grid.
template <typename T>
nn::Tensor<T> tile_grid(const nn::Tensor<T>& v, int h, int w) {
  int n = v.dim(0), c = v.dim(1);
  nn::Tensor<T> y({n, c, h, w});
  for (int b = 0; b < n; ++b) {
    for (int ch = 0; ch < c; ++ch) {
      T val = v.data[static_cast<size_t>(static_cast<int64_t>(b) * c + ch)];
      T* yp = &y.data[(static_cast<int64_t>(b) * c + ch) * h * w];
      for (int i = 0; i < h * w; ++i) yp[i] = val;
    }
  }
  return y;
}

template <typename T>
nn::Tensor<T> untile_grid(const nn::Tensor<T>& g) {
  int n = g.dim(0), c = g.dim(1), h = g.dim(2), w = g.dim(3);
  nn::Tensor<T> y({n, c});
  for (int b = 0; b < n; ++b) {
    for (int ch = 0; ch < c; ++ch) {
      const T* gp = &g.data[(static_cast<int64_t>(b) * c + ch) * h * w];
      T sum = 0;
      for (int i = 0; i < h * w; ++i) sum += gp[i];
      y.data[static_cast<size_t>(static_cast<int64_t>(b) * c + ch)] = sum;
    }
  }
  return y;
}

template <typename T>
nn::Tensor<T> concat_channels(const nn::Tensor<T>& a, const nn::Tensor<T>& b) {
  int n = a.dim(0), ca = a.dim(1), cb = b.dim(1), h = a.dim(2), w = a.dim(3);
  nn::Tensor<T> y({n, ca + cb, h, w});
  int64_t plane = static_cast<int64_t>(h) * w;
  for (int bi = 0; bi < n; ++bi) {
    std::copy_n(&a.data[static_cast<int64_t>(bi) * ca * plane], ca * plane,
                &y.data[static_cast<int64_t>(bi) * (ca + cb) * plane]);
    std::copy_n(&b.data[static_cast<int64_t>(bi) * cb * plane], cb * plane,
                &y.data[static_cast<int64_t>(bi) * (ca + cb) * plane + ca * plane]);
  }
  return y;
}

template <typename T>
void split_channels(const nn::Tensor<T>& g, int ca, nn::Tensor<T>& ga, nn::Tensor<T>& gb) {
  int n = g.dim(0), c = g.dim(1), h = g.dim(2), w = g.dim(3);
  int cb = c - ca;
  ga = nn::Tensor<T>({n, ca, h, w});
  gb = nn::Tensor<T>({n, cb, h, w});
  int64_t plane = static_cast<int64_t>(h) * w;
  for (int bi = 0; bi < n; ++bi) {
    std::copy_n(&g.data[static_cast<int64_t>(bi) * c * plane], ca * plane,
                &ga.data[static_cast<int64_t>(bi) * ca * plane]);
    std::copy_n(&g.data[static_cast<int64_t>(bi) * c * plane + ca * plane], cb * plane,
                &gb.data[static_cast<int64_t>(bi) * cb * plane]);
  }
}

}  // namespace

template <typename T>
TwoStreamModel<T>::TwoStreamModel(ModelConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  auto build = [&](std::vector<Block>& stages) {
    int in_c = 3, d = cfg_.frames;
    for (size_t s = 0; s < cfg_.widths.size(); ++s) {
      int out_c = cfg_.widths[s];
      int sd = d > 1 ? 2 : 1;
      for (int r = 0; r < cfg_.repeats[s]; ++r) {
        Block b;
        b.conv = r == 0 ? nn::Conv3d<T>(in_c, out_c, sd, 2) : nn::Conv3d<T>(out_c, out_c, 1, 1);
        b.bn = nn::BatchNorm<T>(out_c);
        stages.push_back(std::move(b));
      }
      d = nn::Conv3d<T>::out_dim(d, sd);
      in_c = out_c;
    }
  };
  build(video_enc_);
  build(audio_enc_);
  int c = cfg_.widths.back();
  // Mixer halves the concatenated channels: (Cv + Ca) / 2 = C. Bias is fine
  // here (a rectifier, not batch norm, follows).
  mixer_ = nn::Conv2d<T>(2 * c, c, 1, true);
  dconv1_ = nn::Conv2d<T>(c, c / 2, 3, false);  // batch norm follows: no bias
  dbn1_ = nn::BatchNorm<T>(c / 2);
  dconv2_ = nn::Conv2d<T>(c / 2, c / 4, 3, false);
  dbn2_ = nn::BatchNorm<T>(c / 4);
  // The softmax is shift-invariant, so a head bias would never get gradient.
  head_ = nn::Conv2d<T>(c / 4, 1, 1, false);
}

template <typename T>
void TwoStreamModel<T>::for_each_encoder_block(
    std::vector<Block>& stages, const std::string& stream,
    const std::function<void(const std::string&, Block&)>& fn) {
  size_t idx = 0;
  for (size_t s = 0; s < cfg_.repeats.size(); ++s) {
    for (int r = 0; r < cfg_.repeats[s]; ++r, ++idx) {
      fn(stream + ".s" + std::to_string(s) + ".b" + std::to_string(r), stages[idx]);
    }
  }
}

template <typename T>
std::vector<nn::ParamRef<T>> TwoStreamModel<T>::params() {
  std::vector<nn::ParamRef<T>> refs;
  auto add = [&](const std::string& name, std::vector<T>& v, std::vector<T>* g,
                 bool buffer = false) {
    refs.push_back({name, &v, g, buffer});
  };
  auto add_block = [&](const std::string& prefix, Block& b) {
    add(prefix + ".conv.w", b.conv.w, &b.conv.gw);
    add(prefix + ".bn.gamma", b.bn.gamma, &b.bn.g_gamma);
    add(prefix + ".bn.beta", b.bn.beta, &b.bn.g_beta);
    add(prefix + ".bn.running_mean", b.bn.running_mean, nullptr, true);
    add(prefix + ".bn.running_var", b.bn.running_var, nullptr, true);
  };
  for_each_encoder_block(video_enc_, "video", add_block);
  for_each_encoder_block(audio_enc_, "audio", add_block);
  add("fuse.mixer.w", mixer_.w, &mixer_.gw);
  add("fuse.mixer.b", mixer_.b, &mixer_.gb);
  add("dec.b0.conv.w", dconv1_.w, &dconv1_.gw);
  add("dec.b0.bn.gamma", dbn1_.gamma, &dbn1_.g_gamma);
  add("dec.b0.bn.beta", dbn1_.beta, &dbn1_.g_beta);
  add("dec.b0.bn.running_mean", dbn1_.running_mean, nullptr, true);
  add("dec.b0.bn.running_var", dbn1_.running_var, nullptr, true);
  add("dec.b1.conv.w", dconv2_.w, &dconv2_.gw);
  add("dec.b1.bn.gamma", dbn2_.gamma, &dbn2_.g_gamma);
  add("dec.b1.bn.beta", dbn2_.beta, &dbn2_.g_beta);
  add("dec.b1.bn.running_mean", dbn2_.running_mean, nullptr, true);
  add("dec.b1.bn.running_var", dbn2_.running_var, nullptr, true);
  add("dec.head.w", head_.w, &head_.gw);
  return refs;
}

template <typename T>
void TwoStreamModel<T>::init(uint64_t seed) {
  auto fill_uniform = [&](const std::string& name, std::vector<T>& v, int fan_in) {
    Rng rng(substream_seed(seed, "init:" + name));
    // He-uniform with the ReLU gain. The encoders stack five no-bias convs whose
    // batch norms start with identity running stats, so anything weaker lets the
    // activation variance decay geometrically and a freshly initialized net
    // degenerates to a near-uniform map before the running stats warm up.
    T bound = std::sqrt(T(6) / static_cast<T>(fan_in));
    for (auto& x : v) x = static_cast<T>(rng.uniform(-bound, bound));
  };
  auto init_block = [&](const std::string& prefix, Block& b) {
    fill_uniform(prefix + ".conv.w", b.conv.w, b.conv.in_c * 27);
    std::fill(b.bn.gamma.begin(), b.bn.gamma.end(), T(1));
    std::fill(b.bn.beta.begin(), b.bn.beta.end(), T(0));
    std::fill(b.bn.running_mean.begin(), b.bn.running_mean.end(), T(0));
    std::fill(b.bn.running_var.begin(), b.bn.running_var.end(), T(1));
  };
  for_each_encoder_block(video_enc_, "video", init_block);
  for_each_encoder_block(audio_enc_, "audio", init_block);
  fill_uniform("fuse.mixer.w", mixer_.w, mixer_.in_c);
  std::fill(mixer_.b.begin(), mixer_.b.end(), T(0));
  fill_uniform("dec.b0.conv.w", dconv1_.w, dconv1_.in_c * 9);
  std::fill(dbn1_.gamma.begin(), dbn1_.gamma.end(), T(1));
  std::fill(dbn1_.beta.begin(), dbn1_.beta.end(), T(0));
  std::fill(dbn1_.running_mean.begin(), dbn1_.running_mean.end(), T(0));
  std::fill(dbn1_.running_var.begin(), dbn1_.running_var.end(), T(1));
  fill_uniform("dec.b1.conv.w", dconv2_.w, dconv2_.in_c * 9);
  std::fill(dbn2_.gamma.begin(), dbn2_.gamma.end(), T(1));
  std::fill(dbn2_.beta.begin(), dbn2_.beta.end(), T(0));
  std::fill(dbn2_.running_mean.begin(), dbn2_.running_mean.end(), T(0));
  std::fill(dbn2_.running_var.begin(), dbn2_.running_var.end(), T(1));
  fill_uniform("dec.head.w", head_.w, head_.in_c);
}

template <typename T>
void TwoStreamModel<T>::zero_grad() {
  for (auto& ref : params()) {
    if (ref.grad) std::fill(ref.grad->begin(), ref.grad->end(), T(0));
  }
}

template <typename T>
bool TwoStreamModel<T>::on_path(const std::string& name, PathSelection path) {
  if (path == PathSelection::AudioVisual) return true;
  return name.rfind("audio.", 0) != 0 && name.rfind("fuse.", 0) != 0;
}

template <typename T>
nn::Tensor<T> TwoStreamModel<T>::encode(std::vector<Block>& stages, const nn::Tensor<T>& x,
                                        bool training, bool update_running) {
  nn::Tensor<T> cur = x;
  for (auto& b : stages) {
    cur = b.conv.forward(cur);
    cur = b.bn.forward(cur, training, update_running);
    cur = b.relu.forward(cur);
  }
  return cur;
}

template <typename T>
nn::Tensor<T> TwoStreamModel<T>::encode_backward(std::vector<Block>& stages,
                                                 const nn::Tensor<T>& grad) {
  nn::Tensor<T> cur = grad;
  for (auto it = stages.rbegin(); it != stages.rend(); ++it) {
    cur = it->relu.backward(cur);
    cur = it->bn.backward(cur);
    cur = it->conv.backward(cur);
  }
  return cur;
}

template <typename T>
nn::Tensor<T> TwoStreamModel<T>::decode(const nn::Tensor<T>& features, bool training,
                                        bool update_running) {
  auto x = up1_.forward(features);
  x = dconv1_.forward(x);
  x = dbn1_.forward(x, training, update_running);
  x = drelu1_.forward(x);
  x = up2_.forward(x);
  x = dconv2_.forward(x);
  x = dbn2_.forward(x, training, update_running);
  x = drelu2_.forward(x);
  x = head_.forward(x);
  return softmax_.forward(x);
}

template <typename T>
nn::Tensor<T> TwoStreamModel<T>::decode_backward(const nn::Tensor<T>& grad) {
  auto g = softmax_.backward(grad);
  g = head_.backward(g);
  g = drelu2_.backward(g);
  g = dbn2_.backward(g);
  g = dconv2_.backward(g);
  g = up2_.backward(g);
  g = drelu1_.backward(g);
  g = dbn1_.backward(g);
  g = dconv1_.backward(g);
  return up1_.backward(g);
}

template <typename T>
nn::Tensor<T> TwoStreamModel<T>::forward(const nn::Tensor<T>* video, const nn::Tensor<T>* audio,
                                         Mode mode, bool training, bool update_running) {
  last_mode_ = mode;
  bool needs_video = mode != Mode::AudioOnly;
  bool needs_audio = mode != Mode::VideoOnly;
  if (needs_video && !video) throw Error(Errc::bad_argument, "forward: video input required");
  if (needs_audio && !audio) throw Error(Errc::bad_argument, "forward: audio input required");
  if (needs_video) {
    if (video->shape.size() != 5 || video->dim(1) != 3 || video->dim(2) != cfg_.frames ||
        video->dim(3) != cfg_.height || video->dim(4) != cfg_.width) {
      throw Error(Errc::shape_mismatch, "forward: video tensor shape mismatch");
    }
  }
  if (needs_audio) {
    if (audio->shape.size() != 5 || audio->dim(1) != 3 || audio->dim(2) != AudioTensor::kFrames ||
        audio->dim(3) != AudioTensor::kSteps || audio->dim(4) != LogMelSpectrogram::kBands) {
      throw Error(Errc::shape_mismatch, "forward: audio tensor shape mismatch");
    }
  }
  last_n_ = needs_video ? video->dim(0) : audio->dim(0);
  if (needs_video && needs_audio && video->dim(0) != audio->dim(0)) {
    throw Error(Errc::shape_mismatch, "forward: batch sizes differ between modalities");
  }

  nn::Tensor<T> dec_in;
  if (mode == Mode::VideoOnly) {
    auto vf = encode(video_enc_, *video, training, update_running);
    video_feat_shape_ = vf.shape;
    dec_in = reshape(vf, {vf.dim(0), vf.dim(1), vf.dim(3), vf.dim(4)});
  } else if (mode == Mode::AudioOnly) {
    auto af = encode(audio_enc_, *audio, training, update_running);
    auto vec = gap_.forward(af);
    dec_in = tile_grid(vec, cfg_.grid_h(), cfg_.grid_w());
  } else {
    auto vf = encode(video_enc_, *video, training, update_running);
    video_feat_shape_ = vf.shape;
    auto v4 = reshape(vf, {vf.dim(0), vf.dim(1), vf.dim(3), vf.dim(4)});
    auto af = encode(audio_enc_, *audio, training, update_running);
    auto vec = gap_.forward(af);
    auto tiled = tile_grid(vec, v4.dim(2), v4.dim(3));
    auto cat = concat_channels(v4, tiled);
    // The mixer stays linear: a nonlinearity here can clamp every fused channel
    // to zero on small grids and silently cut the audio stream out of the graph.
    dec_in = mixer_.forward(cat);
  }
  return decode(dec_in, training, update_running);
}

template <typename T>
void TwoStreamModel<T>::backward(const nn::Tensor<T>& grad_out) {
  auto g = decode_backward(grad_out);
  if (last_mode_ == Mode::VideoOnly) {
    encode_backward(video_enc_, reshape(g, video_feat_shape_));
  } else if (last_mode_ == Mode::AudioOnly) {
    auto gvec = untile_grid(g);
    encode_backward(audio_enc_, gap_.backward(gvec));
  } else {
    auto gcat = mixer_.backward(g);
    int cv = video_feat_shape_[1];
    nn::Tensor<T> gv, ga;
    split_channels(gcat, cv, gv, ga);
    encode_backward(video_enc_, reshape(gv, video_feat_shape_));
    encode_backward(audio_enc_, gap_.backward(untile_grid(ga)));
  }
}

template <typename T>
T kl_loss(const nn::Tensor<T>& s, const nn::Tensor<T>& g) {
  if (s.shape != g.shape) throw Error(Errc::shape_mismatch, "kl_loss: shape mismatch");
  const T eps = static_cast<T>(kKlEpsilon);
  int n = s.dim(0);
  T acc = 0;
  for (size_t i = 0; i < s.data.size(); ++i) {
    acc += g.data[i] * std::log((g.data[i] + eps) / (s.data[i] + eps));
  }
  return acc / static_cast<T>(n);
}

template <typename T>
nn::Tensor<T> kl_loss_grad(const nn::Tensor<T>& s, const nn::Tensor<T>& g) {
  if (s.shape != g.shape) throw Error(Errc::shape_mismatch, "kl_loss_grad: shape mismatch");
  const T eps = static_cast<T>(kKlEpsilon);
  int n = s.dim(0);
  nn::Tensor<T> grad(s.shape);
  for (size_t i = 0; i < s.data.size(); ++i) {
    grad.data[i] = -g.data[i] / (s.data[i] + eps) / static_cast<T>(n);
  }
  return grad;
}

template <typename T>
void normalize_frames(nn::Tensor<T>& clip, double mean, double std_dev) {
  T m = static_cast<T>(mean), s = static_cast<T>(std_dev);
  for (auto& v : clip.data) v = (v - m) / s;
}

template <typename T>
Distribution plane_to_distribution(const nn::Tensor<T>& out, int sample) {
  if (out.shape.size() != 4 || out.dim(1) != 1) {
    throw Error(Errc::shape_mismatch, "plane_to_distribution: expected (N,1,H,W) tensor");
  }
  if (sample < 0 || sample >= out.dim(0)) {
    throw Error(Errc::bad_argument, "plane_to_distribution: sample index out of range");
  }
  int h = out.dim(2), w = out.dim(3);
  SaliencyMap map(h, w);
  const T* p = &out.data[static_cast<int64_t>(sample) * h * w];
  for (int i = 0; i < h * w; ++i) map.values[static_cast<size_t>(i)] = static_cast<double>(p[i]);
  return Distribution(std::move(map));
}

template class TwoStreamModel<float>;
template class TwoStreamModel<double>;
template float kl_loss<float>(const nn::Tensor<float>&, const nn::Tensor<float>&);
template double kl_loss<double>(const nn::Tensor<double>&, const nn::Tensor<double>&);
template nn::Tensor<float> kl_loss_grad<float>(const nn::Tensor<float>&, const nn::Tensor<float>&);
template nn::Tensor<double> kl_loss_grad<double>(const nn::Tensor<double>&,
                                                 const nn::Tensor<double>&);
template void normalize_frames<float>(nn::Tensor<float>&, double, double);
template void normalize_frames<double>(nn::Tensor<double>&, double, double);
template Distribution plane_to_distribution<float>(const nn::Tensor<float>&, int);
template Distribution plane_to_distribution<double>(const nn::Tensor<double>&, int);

}  // namespace avsal
