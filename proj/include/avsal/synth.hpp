#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "avsal/types.hpp"

namespace avsal {

// One synthetic clip: Gaussian blobs on linear trajectories over a dark
// background, with the audio naming the target blob by its tone.
struct SynthClipSpec {
  int frames = 16;
  int height = 64;
  int width = 96;
  int blob_count = 2;
  std::map<int, double> tone_map = {{0, 440.0}, {1, 2000.0}};  // blob index -> Hz
  uint64_t seed = 0;
};

void validate_spec(const SynthClipSpec& spec);

struct SynthClip {
  std::string video_id;
  int target = 0;                      // blob index carrying the tone
  std::vector<SaliencyMap> frames;     // grayscale luminance in [0, 1]
  std::vector<double> audio;           // 16 kHz mono samples
  FixationSet fixations;               // 20 virtual subjects
  std::vector<SourceRegion> sources;   // target bounding box per frame
};

constexpr int kSynthSubjects = 20;
constexpr int kSynthFps = 25;
constexpr double kSynthSigma = 2.0;  // pixels per degree for synthetic data

// Deterministic in (spec, video_id); blob trajectories stay in bounds.
// Sixteen subjects fixate the target blob with 1-px jitter; when a second
// blob exists the remaining four track it instead, so every frame has
// fixations both inside and outside the target region.
SynthClip synth_clip(const SynthClipSpec& spec, const std::string& video_id);

struct SynthCorpusSpec {
  int clips = 8;
  SynthClipSpec clip;
};

// Key-value text (`key = value`, '#' comments). Keys: clips, frames,
// height, width, blob_count, seed, tones (comma-separated Hz, blob i gets
// the i-th tone).
SynthCorpusSpec parse_synth_spec_text(const std::string& text);
SynthCorpusSpec parse_synth_spec(const std::filesystem::path& path);

// Dataset layout written under out_dir:
//   manifest.json, fixations.csv, categories.csv, sources.csv,
//   frames/<video_id>/<frame_idx:06d>.smf, audio/<video_id>.wav
// Clips are named clip_000..; categories rotate nature/social/misc.
std::vector<std::string> write_synth_corpus(const SynthCorpusSpec& spec,
                                            const std::filesystem::path& out_dir);

// Generates the corpus in memory (same clips write_synth_corpus persists).
std::vector<SynthClip> synth_corpus(const SynthCorpusSpec& spec);

}  // namespace avsal
