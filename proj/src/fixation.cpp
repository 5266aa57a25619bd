#include "avsal/fixation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "avsal/metrics.hpp"
#include "avsal/rng.hpp"

namespace avsal {

SubjectSplit split_subjects(const std::set<std::string>& subjects, uint64_t seed) {
  if (subjects.size() < 2) {
    throw Error(Errc::bad_argument, "split_subjects: need at least two subjects");
  }
  std::vector<std::string> pool(subjects.begin(), subjects.end());
  Rng rng(seed);
  // Fisher-Yates with our own rng, so the split is stable across platforms.
  for (size_t i = pool.size() - 1; i > 0; --i) {
    size_t j = rng.below(i + 1);
    std::swap(pool[i], pool[j]);
  }
  SubjectSplit split;
  split.seed = seed;
  size_t cut = (pool.size() + 1) / 2;
  split.half_a.insert(pool.begin(), pool.begin() + cut);
  split.half_b.insert(pool.begin() + cut, pool.end());
  return split;
}

Distribution density_map(const FixationFrame& fixations, const ViewingGeometry& geometry) {
  if (fixations.empty()) throw Error(Errc::empty_fixations, "density_map: no fixations");
  double sigma = geometry.pixels_per_degree;
  if (!(sigma > 0.0)) throw Error(Errc::bad_argument, "density_map: pixels_per_degree must be > 0");

  SaliencyMap acc(fixations.height, fixations.width);
  int radius = static_cast<int>(std::ceil(4.0 * sigma));
  double r2 = 16.0 * sigma * sigma;  // (4 sigma)^2
  double inv = 1.0 / (2.0 * sigma * sigma);
  for (const auto& p : fixations.points) {
    int y0 = std::max(0, p.y - radius), y1 = std::min(fixations.height - 1, p.y + radius);
    int x0 = std::max(0, p.x - radius), x1 = std::min(fixations.width - 1, p.x + radius);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        double d2 = static_cast<double>(y - p.y) * (y - p.y) + static_cast<double>(x - p.x) * (x - p.x);
        if (d2 <= r2) acc.at(y, x) += std::exp(-d2 * inv);
      }
    }
  }
  return normalize(acc);
}

Distribution mep(const std::vector<Distribution>& densities) {
  if (densities.empty()) throw Error(Errc::bad_argument, "mep: empty input");
  const auto& first = densities.front();
  SaliencyMap acc(first.height, first.width);
  for (const auto& d : densities) {
    if (!d.same_shape(acc)) throw Error(Errc::shape_mismatch, "mep: inputs differ in shape");
    for (size_t i = 0; i < acc.values.size(); ++i) acc.values[i] += d.values[i];
  }
  double inv = 1.0 / static_cast<double>(densities.size());
  for (auto& v : acc.values) v *= inv;
  return normalize(acc);
}

namespace {

// Evaluate one metric, mapping degenerate-input errors to "absent".
template <typename Fn>
std::optional<double> guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::optional<double> avg(std::optional<double> a, std::optional<double> b) {
  if (a && b) return (*a + *b) / 2.0;
  return std::nullopt;
}

}  // namespace

std::vector<ScoreRecord> human_infinite(const FixationSet& records, const SubjectSplit& split,
                                        const ViewingGeometry& geometry,
                                        const NegativesFn& negatives) {
  std::vector<ScoreRecord> out;
  for (const auto& video : records.video_ids()) {
    for (int frame_idx : records.frames_of(video)) {
      ScoreRecord rec;
      rec.video_id = video;
      rec.frame_idx = frame_idx;
      auto fa = records.frame(video, frame_idx, split.half_a);
      auto fb = records.frame(video, frame_idx, split.half_b);
      if (fa.empty() || fb.empty()) {
        out.push_back(rec);  // subject-empty half: all scores absent
        continue;
      }
      auto da = density_map(fa, geometry);
      auto db = density_map(fb, geometry);
      rec.nss = avg(guarded([&] { return nss(da, fb); }), guarded([&] { return nss(db, fa); }));
      rec.auc_judd =
          avg(guarded([&] { return auc_judd(da, fb); }), guarded([&] { return auc_judd(db, fa); }));
      if (negatives) {
        auto neg = negatives(video, frame_idx);
        rec.sauc = avg(guarded([&] { return sauc(da, fb, neg); }),
                       guarded([&] { return sauc(db, fa, neg); }));
      }
      rec.cc = avg(guarded([&] { return cc(da, db); }), guarded([&] { return cc(db, da); }));
      rec.sim = avg(guarded([&] { return sim(da, db); }), guarded([&] { return sim(db, da); }));
      out.push_back(rec);
    }
  }
  return out;
}

}  // namespace avsal
