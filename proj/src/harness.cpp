#include "avsal/harness.hpp"

#include <algorithm>
#include <cmath>

#include "avsal/fixation.hpp"
#include "avsal/map_io.hpp"
#include "avsal/metrics.hpp"
#include "avsal/rng.hpp"

namespace avsal {

FixationFrame default_negatives(const FixationSet& fixations, const std::string& video_id,
                                int frame_idx, const EvalOptions& opt) {
  auto videos = fixations.video_ids();
  std::vector<std::string> others;
  for (const auto& v : videos) {
    if (v != video_id) others.push_back(v);
  }
  FixationFrame negatives(fixations.height(), fixations.width());
  if (others.empty()) return negatives;

  auto own_frames = fixations.frames_of(video_id);
  auto pos = std::find(own_frames.begin(), own_frames.end(), frame_idx);
  if (pos == own_frames.end()) {
    throw Error(Errc::bad_argument, "negatives: frame has no fixations in this set");
  }
  double rel = own_frames.size() > 1
                   ? static_cast<double>(pos - own_frames.begin()) /
                         static_cast<double>(own_frames.size() - 1)
                   : 0.0;

  Rng rng(substream_seed(opt.seed, "negatives:" + video_id + ":" + std::to_string(frame_idx)));
  std::vector<std::string> picked;
  if (static_cast<int>(others.size()) <= opt.negative_videos) {
    picked = others;
  } else {
    // Partial Fisher-Yates: first negative_videos entries of a shuffle.
    for (int i = 0; i < opt.negative_videos; ++i) {
      size_t j = i + rng.below(others.size() - i);
      std::swap(others[static_cast<size_t>(i)], others[j]);
      picked.push_back(others[static_cast<size_t>(i)]);
    }
  }

  std::vector<Point> pool;
  for (const auto& other : picked) {
    auto frames = fixations.frames_of(other);
    if (frames.empty()) continue;
    size_t j = static_cast<size_t>(std::lround(rel * static_cast<double>(frames.size() - 1)));
    for (const auto& p : fixations.frame(other, frames[j]).points) pool.push_back(p);
  }
  // Shuffle before capping so the kept subset is not biased toward the top
  // of the frame (points are stored sorted).
  for (size_t i = pool.size(); i > 1; --i) {
    std::swap(pool[i - 1], pool[rng.below(i)]);
  }
  if (static_cast<int>(pool.size()) > opt.negative_cap) {
    pool.resize(static_cast<size_t>(opt.negative_cap));
  }
  for (const auto& p : pool) negatives.add(p.y, p.x);
  return negatives;
}

FrameEval eval_frames(const std::map<FrameKey, SaliencyMap>& predictions,
                      const FixationSet& fixations, const ViewingGeometry& geometry,
                      const EvalOptions& opt) {
  FrameEval result;
  auto guarded = [](auto&& fn) -> std::optional<double> {
    try {
      return fn();
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  for (const auto& video_id : fixations.video_ids()) {
    for (int frame_idx : fixations.frames_of(video_id)) {
      FrameKey key{video_id, frame_idx};
      auto pred_it = predictions.find(key);
      if (pred_it == predictions.end()) {
        result.missing.push_back(key);
        continue;
      }
      auto fix = fixations.frame(video_id, frame_idx);
      SaliencyMap pred = bilinear_resize(pred_it->second, fixations.height(), fixations.width());
      auto density = density_map(fix, geometry);

      ScoreRecord rec;
      rec.video_id = video_id;
      rec.frame_idx = frame_idx;
      rec.nss = guarded([&] { return nss(pred, fix); });
      rec.auc_judd = guarded([&] { return auc_judd(pred, fix); });
      rec.sauc = guarded([&] {
        auto negatives = default_negatives(fixations, video_id, frame_idx, opt);
        return sauc(pred, fix, negatives);
      });
      rec.cc = guarded([&] { return cc(pred, density); });
      rec.sim = guarded([&] { return sim(normalize(pred), density); });
      result.records.push_back(std::move(rec));
    }
  }
  return result;
}

namespace {

struct MeanAcc {
  double sum = 0;
  int n = 0;
  void add(const std::optional<double>& v) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  std::optional<double> mean() const {
    if (n == 0) return std::nullopt;
    return sum / n;
  }
};

AggregateRow reduce(const std::string& scope, const std::vector<const ScoreRecord*>& records,
                    int missing) {
  MeanAcc nss, auc, sauc, cc, sim;
  for (const auto* r : records) {
    nss.add(r->nss);
    auc.add(r->auc_judd);
    sauc.add(r->sauc);
    cc.add(r->cc);
    sim.add(r->sim);
  }
  AggregateRow row;
  row.scope = scope;
  row.nss = nss.mean();
  row.auc_judd = auc.mean();
  row.sauc = sauc.mean();
  row.cc = cc.mean();
  row.sim = sim.mean();
  row.frames = static_cast<int>(records.size());
  row.missing = missing;
  return row;
}

}  // namespace

EvalReport aggregate(const FrameEval& eval, const std::map<std::string, VideoCategory>& categories,
                     const std::string& model_name, uint64_t seed) {
  EvalReport report;
  report.model_name = model_name;
  report.seed = seed;

  std::map<std::string, std::vector<const ScoreRecord*>> by_video;
  std::map<VideoCategory, std::vector<const ScoreRecord*>> by_category;
  std::vector<const ScoreRecord*> all;
  for (const auto& rec : eval.records) {
    auto cat = categories.find(rec.video_id);
    if (cat == categories.end()) {
      throw Error(Errc::missing_category, "no category for video: " + rec.video_id);
    }
    by_video[rec.video_id].push_back(&rec);
    by_category[cat->second].push_back(&rec);
    all.push_back(&rec);
  }
  std::map<std::string, int> missing_by_video;
  for (const auto& key : eval.missing) {
    if (!categories.count(key.video_id)) {
      throw Error(Errc::missing_category, "no category for video: " + key.video_id);
    }
    missing_by_video[key.video_id] += 1;
  }

  report.overall = reduce("overall", all, static_cast<int>(eval.missing.size()));
  for (VideoCategory cat :
       {VideoCategory::Nature, VideoCategory::SocialEvents, VideoCategory::Miscellaneous}) {
    int missing = 0;
    for (const auto& [video, count] : missing_by_video) {
      if (categories.at(video) == cat) missing += count;
    }
    auto it = by_category.find(cat);
    report.per_category.push_back(reduce(
        category_token(cat), it == by_category.end() ? std::vector<const ScoreRecord*>{} : it->second,
        missing));
  }
  for (const auto& [video, records] : by_video) {
    int missing = missing_by_video.count(video) ? missing_by_video.at(video) : 0;
    report.per_video.push_back(reduce(video, records, missing));
  }
  // Videos where every prediction is missing still deserve a row.
  for (const auto& [video, count] : missing_by_video) {
    if (!by_video.count(video)) report.per_video.push_back(reduce(video, {}, count));
  }
  std::sort(report.per_video.begin(), report.per_video.end(),
            [](const AggregateRow& a, const AggregateRow& b) { return a.scope < b.scope; });
  report.frames = eval.records;
  return report;
}

TemporalProfile temporal_profile(const std::map<std::string, std::vector<double>>& sequences,
                                 int n_points, int smooth_window) {
  if (n_points < 2) throw Error(Errc::bad_argument, "temporal_profile: need >= 2 points");
  if (sequences.empty()) throw Error(Errc::bad_argument, "temporal_profile: no sequences");
  TemporalProfile profile;
  std::vector<double> sum(static_cast<size_t>(n_points), 0.0);
  for (const auto& [video, seq] : sequences) {
    if (seq.size() < 2) {
      profile.warnings.push_back("video " + video + " has fewer than 2 scored frames; skipped");
      continue;
    }
    for (int i = 0; i < n_points; ++i) {
      // Multiply before dividing: when n_points matches the sequence length
      // the division is exact and the profile reproduces the input bitwise.
      double pos = static_cast<double>(i) * static_cast<double>(seq.size() - 1) / (n_points - 1);
      size_t lo = static_cast<size_t>(pos);
      if (lo >= seq.size() - 1) {
        sum[static_cast<size_t>(i)] += seq.back();
      } else {
        double frac = pos - static_cast<double>(lo);
        sum[static_cast<size_t>(i)] += seq[lo] * (1.0 - frac) + seq[lo + 1] * frac;
      }
    }
    profile.videos_used += 1;
  }
  if (profile.videos_used == 0) {
    throw Error(Errc::degenerate_data, "temporal_profile: every video has < 2 scored frames");
  }
  profile.curve.resize(static_cast<size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    profile.curve[static_cast<size_t>(i)] = sum[static_cast<size_t>(i)] / profile.videos_used;
  }
  if (smooth_window > 1) {
    int r = smooth_window / 2;
    std::vector<double> smoothed(profile.curve.size());
    int n = n_points;
    auto reflect = [n](int i) {
      while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * (n - 1) - i;
      }
      return i;
    };
    for (int i = 0; i < n; ++i) {
      double acc = 0;
      for (int d = -r; d <= r; ++d) acc += profile.curve[static_cast<size_t>(reflect(i + d))];
      smoothed[static_cast<size_t>(i)] = acc / (2 * r + 1);
    }
    profile.curve = std::move(smoothed);
  }
  return profile;
}

ContextualScore contextual_nss(const SaliencyMap& s, const FixationFrame& fixations,
                               const SourceRegion& region) {
  validate_map(s);
  validate_region(region, s.height, s.width);
  if (fixations.empty()) throw Error(Errc::empty_fixations, "contextual_nss: no fixations");
  if (fixations.height != s.height || fixations.width != s.width) {
    throw Error(Errc::shape_mismatch, "contextual_nss: map and fixation grids differ");
  }
  // One set of z-score statistics from the entire map; restricting only the
  // averaged fixations keeps full = weighted mean of in and out.
  double mean = 0;
  for (double v : s.values) mean += v;
  mean /= static_cast<double>(s.size());
  double var = 0;
  for (double v : s.values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(s.size());
  if (var == 0) throw Error(Errc::zero_variance, "contextual_nss: constant map");
  double sd = std::sqrt(var);

  double sum_in = 0, sum_out = 0;
  ContextualScore score;
  for (const auto& p : fixations.points) {
    double z = (s.at(p.y, p.x) - mean) / sd;
    if (region.contains(p.y, p.x)) {
      sum_in += z;
      score.n_in += 1;
    } else {
      sum_out += z;
      score.n_out += 1;
    }
  }
  if (score.n_in > 0) score.in = sum_in / score.n_in;
  if (score.n_out > 0) score.out = sum_out / score.n_out;
  score.full = (sum_in + sum_out) / (score.n_in + score.n_out);
  return score;
}

std::vector<ContextualRecord> contextual_eval(const std::map<FrameKey, SaliencyMap>& predictions,
                                              const FixationSet& fixations,
                                              const std::vector<SourceRegion>& sources) {
  std::vector<ContextualRecord> records;
  for (const auto& region : sources) {
    FrameKey key{region.video_id, region.frame_idx};
    auto pred = predictions.find(key);
    if (pred == predictions.end()) continue;
    if (!fixations.has_frame(region.video_id, region.frame_idx)) continue;
    auto fix = fixations.frame(region.video_id, region.frame_idx);
    SaliencyMap map = bilinear_resize(pred->second, fixations.height(), fixations.width());
    try {
      records.push_back({key, contextual_nss(map, fix, region)});
    } catch (const Error& e) {
      if (e.code() != Errc::zero_variance) throw;
    }
  }
  std::sort(records.begin(), records.end(),
            [](const ContextualRecord& a, const ContextualRecord& b) { return a.key < b.key; });
  return records;
}

double improvement_rate(const std::map<FrameKey, double>& a,
                        const std::map<FrameKey, double>& b) {
  if (a.empty()) throw Error(Errc::bad_argument, "improvement_rate: no scores");
  if (a.size() != b.size()) {
    throw Error(Errc::bad_argument, "improvement_rate: score sets differ in size");
  }
  int better = 0;
  auto ib = b.begin();
  for (auto ia = a.begin(); ia != a.end(); ++ia, ++ib) {
    if (!(ia->first == ib->first)) {
      throw Error(Errc::bad_argument, "improvement_rate: frame keys do not match");
    }
    if (ia->second > ib->second) ++better;
  }
  return 100.0 * better / static_cast<double>(a.size());
}

Histogram score_histogram(const std::vector<double>& scores, int bin_count, double lo, double hi) {
  if (scores.empty()) throw Error(Errc::bad_argument, "score_histogram: no scores");
  if (bin_count < 1) throw Error(Errc::bad_argument, "score_histogram: need >= 1 bin");
  if (!(lo < hi)) throw Error(Errc::bad_argument, "score_histogram: empty range");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(static_cast<size_t>(bin_count), 0);
  double sum = 0;
  for (double v : scores) {
    sum += v;
    int bin = static_cast<int>(std::floor((v - lo) / (hi - lo) * bin_count));
    bin = std::clamp(bin, 0, bin_count - 1);
    h.counts[static_cast<size_t>(bin)] += 1;
  }
  h.mean = sum / static_cast<double>(scores.size());
  return h;
}

std::map<FrameKey, SaliencyMap> load_predictions(const std::filesystem::path& root,
                                                 const FixationSet& fixations) {
  std::map<FrameKey, SaliencyMap> predictions;
  for (const auto& video_id : fixations.video_ids()) {
    for (int frame_idx : fixations.frames_of(video_id)) {
      char name[16];
      std::snprintf(name, sizeof(name), "%06d.smf", frame_idx);
      auto path = root / video_id / name;
      if (!std::filesystem::exists(path)) continue;
      predictions.emplace(FrameKey{video_id, frame_idx}, read_map(path));
    }
  }
  return predictions;
}

}  // namespace avsal
