#include "avsal/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "avsal/audio.hpp"
#include "avsal/config_text.hpp"
#include "avsal/map_io.hpp"
#include "avsal/rng.hpp"
#include "json.hpp"

namespace avsal {

namespace {

// Blob appearance is tied to the blob index so the two are visually distinct
// types; only the audio tone says which one is the target.
double blob_sigma(int index) { return 3.0 + 1.5 * index; }
double blob_amp(int index) { return std::max(0.3, 1.0 - 0.35 * index); }

struct Trajectory {
  double y0, x0, vy, vx;
  double y(int frame) const { return y0 + vy * frame; }
  double x(int frame) const { return x0 + vx * frame; }
};

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

}  // namespace

void validate_spec(const SynthClipSpec& spec) {
  if (spec.frames < 1) throw Error(Errc::bad_argument, "synth: frames must be >= 1");
  if (spec.height < 16 || spec.width < 16) {
    throw Error(Errc::bad_argument, "synth: frame size too small");
  }
  if (spec.blob_count < 1) throw Error(Errc::bad_argument, "synth: need at least one blob");
  for (int b = 0; b < spec.blob_count; ++b) {
    auto it = spec.tone_map.find(b);
    if (it == spec.tone_map.end()) {
      throw Error(Errc::bad_argument, "synth: tone_map missing blob " + std::to_string(b));
    }
    if (!(it->second > 0.0 && it->second < 8000.0)) {
      throw Error(Errc::invalid_value, "synth: tone must lie in (0, 8000) Hz");
    }
  }
}

SynthClip synth_clip(const SynthClipSpec& spec, const std::string& video_id) {
  validate_spec(spec);
  Rng rng(spec.seed, "clip:" + video_id);

  SynthClip clip;
  clip.video_id = video_id;
  clip.target = static_cast<int>(rng.below(static_cast<uint64_t>(spec.blob_count)));
  clip.fixations = FixationSet(spec.height, spec.width);

  // Linear trajectories; resample until the whole path stays inside the
  // margin for that blob's size.
  std::vector<Trajectory> blobs;
  for (int b = 0; b < spec.blob_count; ++b) {
    double margin = std::ceil(2.0 * blob_sigma(b)) + 1.0;
    Trajectory t{};
    bool ok = false;
    for (int attempt = 0; attempt < 200 && !ok; ++attempt) {
      t.y0 = rng.uniform(margin, spec.height - 1 - margin);
      t.x0 = rng.uniform(margin, spec.width - 1 - margin);
      double speed = rng.uniform(0.15, 0.5);
      double angle = rng.uniform(0.0, 2.0 * M_PI);
      t.vy = speed * std::sin(angle);
      t.vx = speed * std::cos(angle);
      double ye = t.y(spec.frames - 1), xe = t.x(spec.frames - 1);
      ok = ye >= margin && ye <= spec.height - 1 - margin && xe >= margin &&
           xe <= spec.width - 1 - margin;
    }
    if (!ok) {  // tiny frames: park the blob
      t.vy = t.vx = 0.0;
      t.y0 = spec.height / 2.0;
      t.x0 = spec.width / 2.0;
    }
    blobs.push_back(t);
  }

  // Render.
  for (int f = 0; f < spec.frames; ++f) {
    SaliencyMap frame(spec.height, spec.width);
    for (int b = 0; b < spec.blob_count; ++b) {
      double cy = blobs[b].y(f), cx = blobs[b].x(f);
      double sig = blob_sigma(b), amp = blob_amp(b);
      double inv = 1.0 / (2.0 * sig * sig);
      int radius = static_cast<int>(std::ceil(4.0 * sig));
      int y0 = std::max(0, round_half_up(cy) - radius);
      int y1 = std::min(spec.height - 1, round_half_up(cy) + radius);
      int x0 = std::max(0, round_half_up(cx) - radius);
      int x1 = std::min(spec.width - 1, round_half_up(cx) + radius);
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          double d2 = (y - cy) * (y - cy) + (x - cx) * (x - cx);
          frame.at(y, x) += amp * std::exp(-d2 * inv);
        }
      }
    }
    for (auto& v : frame.values) v = std::min(v, 1.0);
    clip.frames.push_back(std::move(frame));
  }

  // Audio: pure sine at the target's tone, one video frame = 640 samples.
  double tone = spec.tone_map.at(clip.target);
  size_t samples = static_cast<size_t>(spec.frames) * (kAudioRate / kSynthFps);
  clip.audio.resize(samples);
  for (size_t i = 0; i < samples; ++i) {
    clip.audio[i] = 0.6 * std::sin(2.0 * M_PI * tone * static_cast<double>(i) / kAudioRate);
  }

  // Fixations: subjects 0..15 track the target, the rest track the next blob
  // (when present) so frames also carry off-target gaze.
  for (int f = 0; f < spec.frames; ++f) {
    for (int s = 0; s < kSynthSubjects; ++s) {
      int b = clip.target;
      if (spec.blob_count >= 2 && s >= 16) b = (clip.target + 1) % spec.blob_count;
      int y = round_half_up(blobs[b].y(f)) + rng.range(-1, 1);
      int x = round_half_up(blobs[b].x(f)) + rng.range(-1, 1);
      y = std::clamp(y, 0, spec.height - 1);
      x = std::clamp(x, 0, spec.width - 1);
      char sid[8];
      std::snprintf(sid, sizeof sid, "s%02d", s);
      clip.fixations.add({video_id, f, sid, x, y});
    }
  }

  // Target bounding box per frame: center ± 2 sigma.
  int r = static_cast<int>(std::ceil(2.0 * blob_sigma(clip.target)));
  for (int f = 0; f < spec.frames; ++f) {
    SourceRegion reg;
    reg.video_id = video_id;
    reg.frame_idx = f;
    int cy = round_half_up(blobs[clip.target].y(f));
    int cx = round_half_up(blobs[clip.target].x(f));
    reg.y_min = std::max(0, cy - r);
    reg.y_max = std::min(spec.height - 1, cy + r);
    reg.x_min = std::max(0, cx - r);
    reg.x_max = std::min(spec.width - 1, cx + r);
    clip.sources.push_back(reg);
  }
  return clip;
}

namespace {

std::string clip_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "clip_%03d", index);
  return buf;
}

}  // namespace

std::vector<SynthClip> synth_corpus(const SynthCorpusSpec& spec) {
  if (spec.clips < 1) throw Error(Errc::bad_argument, "synth: need at least one clip");
  std::vector<SynthClip> clips;
  clips.reserve(spec.clips);
  for (int i = 0; i < spec.clips; ++i) clips.push_back(synth_clip(spec.clip, clip_name(i)));
  return clips;
}

SynthCorpusSpec parse_synth_spec_text(const std::string& text) {
  SynthCorpusSpec spec;
  for (const auto& [key, value] : parse_key_values(text)) {
    try {
      if (key == "clips") {
        spec.clips = std::stoi(value);
      } else if (key == "frames") {
        spec.clip.frames = std::stoi(value);
      } else if (key == "height") {
        spec.clip.height = std::stoi(value);
      } else if (key == "width") {
        spec.clip.width = std::stoi(value);
      } else if (key == "blob_count") {
        spec.clip.blob_count = std::stoi(value);
      } else if (key == "seed") {
        spec.clip.seed = std::stoull(value);
      } else if (key == "tones") {
        spec.clip.tone_map.clear();
        auto tones = parse_double_list(value);
        for (size_t i = 0; i < tones.size(); ++i) {
          spec.clip.tone_map[static_cast<int>(i)] = tones[i];
        }
      } else {
        throw Error(Errc::bad_format, "synth spec: unknown key: " + key);
      }
    } catch (const std::invalid_argument&) {
      throw Error(Errc::bad_format, "synth spec: bad value for " + key + ": " + value);
    } catch (const std::out_of_range&) {
      throw Error(Errc::bad_format, "synth spec: value out of range for " + key);
    }
  }
  validate_spec(spec.clip);
  if (spec.clips < 1) throw Error(Errc::bad_argument, "synth spec: clips must be >= 1");
  return spec;
}

SynthCorpusSpec parse_synth_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_synth_spec_text(buf.str());
}

std::vector<std::string> write_synth_corpus(const SynthCorpusSpec& spec,
                                            const std::filesystem::path& out_dir) {
  auto clips = synth_corpus(spec);
  std::filesystem::create_directories(out_dir / "frames");
  std::filesystem::create_directories(out_dir / "audio");

  FixationSet all_fix(spec.clip.height, spec.clip.width);
  std::vector<SourceRegion> all_sources;
  std::map<std::string, VideoCategory> cats;
  std::vector<std::string> ids;
  const VideoCategory rota[3] = {VideoCategory::Nature, VideoCategory::SocialEvents,
                                 VideoCategory::Miscellaneous};

  for (size_t i = 0; i < clips.size(); ++i) {
    const auto& clip = clips[i];
    ids.push_back(clip.video_id);
    auto frame_dir = out_dir / "frames" / clip.video_id;
    std::filesystem::create_directories(frame_dir);
    for (size_t f = 0; f < clip.frames.size(); ++f) {
      char name[16];
      std::snprintf(name, sizeof name, "%06zu.smf", f);
      write_map(clip.frames[f], frame_dir / name, MapFormat::SMF);
    }
    PcmSignal audio{clip.audio, kAudioRate};
    write_wav(audio, out_dir / "audio" / (clip.video_id + ".wav"));
    for (const auto& rec : clip.fixations.records()) all_fix.add(rec);
    all_sources.insert(all_sources.end(), clip.sources.begin(), clip.sources.end());
    cats[clip.video_id] = rota[i % 3];
  }

  write_fixation_csv(all_fix, out_dir / "fixations.csv");
  write_source_csv(all_sources, out_dir / "sources.csv");
  write_category_csv(cats, out_dir / "categories.csv");

  nlohmann::ordered_json manifest;
  manifest["clips"] = spec.clips;
  manifest["frames"] = spec.clip.frames;
  manifest["height"] = spec.clip.height;
  manifest["width"] = spec.clip.width;
  manifest["blob_count"] = spec.clip.blob_count;
  manifest["seed"] = spec.clip.seed;
  manifest["fps"] = kSynthFps;
  manifest["sample_rate"] = kAudioRate;
  manifest["pixels_per_degree"] = kSynthSigma;
  manifest["videos"] = ids;
  std::ofstream out(out_dir / "manifest.json", std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write manifest");
  out << manifest.dump(2) << '\n';
  return ids;
}

}  // namespace avsal
