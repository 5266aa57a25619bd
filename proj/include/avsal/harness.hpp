#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "avsal/types.hpp"

namespace avsal {

struct EvalOptions {
  uint64_t seed = 0;
  int negative_videos = 10;  // other videos pooled per frame for shuffled AUC
  int negative_cap = 500;    // most negative fixations kept per frame
};

// Fixations from `negative_videos` uniformly sampled other videos at the
// same relative position in each video's frame list, pooled, shuffled, and
// capped. Deterministic per (seed, video, frame). May be empty when no
// other video exists.
FixationFrame default_negatives(const FixationSet& fixations, const std::string& video_id,
                                int frame_idx, const EvalOptions& opt);

struct FrameEval {
  std::vector<ScoreRecord> records;  // sorted by (video_id, frame_idx)
  std::vector<FrameKey> missing;     // ground-truth frames without predictions
};

// Scores every fixated ground-truth frame against the matching prediction:
// the prediction is bilinearly resampled to fixation resolution, the density
// ground truth is rebuilt from the fixations, and each metric that cannot be
// computed (constant map, no negatives) is left absent rather than failing
// the whole run.
FrameEval eval_frames(const std::map<FrameKey, SaliencyMap>& predictions,
                      const FixationSet& fixations, const ViewingGeometry& geometry,
                      const EvalOptions& opt);

struct AggregateRow {
  std::string scope;  // "overall", a category token, or a video id
  std::optional<double> nss, auc_judd, sauc, cc, sim;
  int frames = 0;   // scored frames in scope
  int missing = 0;  // ground-truth frames without predictions in scope
};

struct EvalReport {
  std::string model_name;
  uint64_t seed = 0;
  AggregateRow overall;
  std::vector<AggregateRow> per_category;  // category token order: nature, social, misc
  std::vector<AggregateRow> per_video;     // sorted by video id
  std::vector<ScoreRecord> frames;
};

// Frame-weighted means of the present per-frame scores. Every video needs a
// category label.
EvalReport aggregate(const FrameEval& eval, const std::map<std::string, VideoCategory>& categories,
                     const std::string& model_name, uint64_t seed);

struct TemporalProfile {
  std::vector<double> curve;  // n_points values over normalized video time
  int videos_used = 0;
  std::vector<std::string> warnings;  // videos excluded for having < 2 frames
};

// Each video's per-frame score sequence is linearly resampled onto n_points
// uniform positions of [0, 1] and the curves are averaged pointwise. A
// smooth_window > 1 applies a centered moving average with reflected edges.
TemporalProfile temporal_profile(const std::map<std::string, std::vector<double>>& sequences,
                                 int n_points = 1000, int smooth_window = 0);

struct ContextualScore {
  std::optional<double> in, out, full;
  int n_in = 0, n_out = 0;  // fixations inside/outside the source region
};

// NSS restricted to fixations inside the region, outside it, and over all of
// them; the z-score statistics come from the full map once, so
// full = (n_in*in + n_out*out) / (n_in + n_out) exactly.
ContextualScore contextual_nss(const SaliencyMap& s, const FixationFrame& fixations,
                               const SourceRegion& region);

struct ContextualRecord {
  FrameKey key;
  ContextualScore score;
};

// Scores every annotated frame that has both a prediction and fixations;
// frames whose map is constant are skipped (NSS undefined).
std::vector<ContextualRecord> contextual_eval(const std::map<FrameKey, SaliencyMap>& predictions,
                                              const FixationSet& fixations,
                                              const std::vector<SourceRegion>& sources);

// Percentage of frames where a strictly beats b; keys must match exactly.
double improvement_rate(const std::map<FrameKey, double>& a,
                        const std::map<FrameKey, double>& b);

struct Histogram {
  double lo = 0, hi = 0;
  std::vector<int64_t> counts;
  double mean = 0;
};

// Equal-width bins over [lo, hi]; out-of-range scores land in the edge bins.
Histogram score_histogram(const std::vector<double>& scores, int bin_count, double lo, double hi);

// Reads `<root>/<video_id>/<frame_idx:06d>.smf` for every fixated frame;
// files that do not exist are simply not in the result.
std::map<FrameKey, SaliencyMap> load_predictions(const std::filesystem::path& root,
                                                 const FixationSet& fixations);

}  // namespace avsal
