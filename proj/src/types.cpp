#include "avsal/types.hpp"

#include <algorithm>
#include <cmath>

namespace avsal {

void validate_map(const SaliencyMap& map) {
  if (map.height < 1 || map.width < 1) {
    throw Error(Errc::invalid_value, "map dimensions must be at least 1x1");
  }
  if (map.values.size() != static_cast<size_t>(map.height) * map.width) {
    throw Error(Errc::shape_mismatch, "map value count does not match height*width");
  }
  for (double v : map.values) {
    if (!std::isfinite(v)) throw Error(Errc::invalid_value, "map contains a non-finite value");
    if (v < 0.0) throw Error(Errc::invalid_value, "map contains a negative value");
  }
}

void validate_region(const SourceRegion& region, int height, int width) {
  if (region.x_min > region.x_max || region.y_min > region.y_max) {
    throw Error(Errc::invalid_value, "source region has inverted bounds");
  }
  if (region.x_min < 0 || region.y_min < 0 || region.x_max >= width || region.y_max >= height) {
    throw Error(Errc::invalid_value, "source region outside frame bounds");
  }
}

double map_sum(const SaliencyMap& map) {
  double s = 0.0;
  for (double v : map.values) s += v;
  return s;
}

bool is_normalized(const SaliencyMap& map, double tol) {
  return std::abs(map_sum(map) - 1.0) <= tol;
}

Distribution normalize(const SaliencyMap& map) {
  validate_map(map);
  double total = map_sum(map);
  if (total <= 0.0) throw Error(Errc::zero_mass, "cannot normalize an all-zero map");
  SaliencyMap out = map;
  for (double& v : out.values) v /= total;
  return Distribution(std::move(out));
}

SaliencyMap bilinear_resize(const SaliencyMap& map, int out_h, int out_w) {
  validate_map(map);
  if (out_h < 1 || out_w < 1) throw Error(Errc::bad_argument, "resize: bad output size");
  if (out_h == map.height && out_w == map.width) return map;
  SaliencyMap out(out_h, out_w);
  double sy = static_cast<double>(map.height) / out_h;
  double sx = static_cast<double>(map.width) / out_w;
  auto clamp_idx = [](int v, int n) { return std::min(std::max(v, 0), n - 1); };
  for (int y = 0; y < out_h; ++y) {
    double src_y = (y + 0.5) * sy - 0.5;
    int y0 = static_cast<int>(std::floor(src_y));
    double wy = src_y - y0;
    int ya = clamp_idx(y0, map.height), yb = clamp_idx(y0 + 1, map.height);
    for (int x = 0; x < out_w; ++x) {
      double src_x = (x + 0.5) * sx - 0.5;
      int x0 = static_cast<int>(std::floor(src_x));
      double wx = src_x - x0;
      int xa = clamp_idx(x0, map.width), xb = clamp_idx(x0 + 1, map.width);
      out.at(y, x) = (1.0 - wy) * ((1.0 - wx) * map.at(ya, xa) + wx * map.at(ya, xb)) +
                     wy * ((1.0 - wx) * map.at(yb, xa) + wx * map.at(yb, xb));
    }
  }
  return out;
}

Distribution downsample_area(const SaliencyMap& map, int out_h, int out_w) {
  validate_map(map);
  if (out_h < 1 || out_w < 1 || map.height % out_h != 0 || map.width % out_w != 0) {
    throw Error(Errc::bad_argument, "downsample_area: output must divide input dims");
  }
  int fy = map.height / out_h, fx = map.width / out_w;
  SaliencyMap out(out_h, out_w);
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (int dy = 0; dy < fy; ++dy) {
        for (int dx = 0; dx < fx; ++dx) acc += map.at(y * fy + dy, x * fx + dx);
      }
      out.at(y, x) = acc / (fy * fx);
    }
  }
  return normalize(out);
}

FixationFrame::FixationFrame(int h, int w, std::vector<Point> pts) : height(h), width(w) {
  for (const Point& p : pts) add(p.y, p.x);
}

void FixationFrame::add(int y, int x) {
  if (y < 0 || y >= height || x < 0 || x >= width) {
    throw Error(Errc::out_of_bounds, "fixation (" + std::to_string(y) + "," + std::to_string(x) +
                                         ") outside " + std::to_string(height) + "x" +
                                         std::to_string(width) + " frame");
  }
  Point p{y, x};
  auto it = std::lower_bound(points.begin(), points.end(), p);
  if (it == points.end() || !(*it == p)) points.insert(it, p);
}

SaliencyMap rasterize(const FixationFrame& fixations) {
  if (fixations.height < 1 || fixations.width < 1) {
    throw Error(Errc::invalid_value, "fixation frame has empty dimensions");
  }
  SaliencyMap map(fixations.height, fixations.width, 0.0);
  for (const Point& p : fixations.points) map.at(p.y, p.x) = 1.0;
  return map;
}

VideoCategory category_from_token(const std::string& token) {
  if (token == "nature") return VideoCategory::Nature;
  if (token == "social") return VideoCategory::SocialEvents;
  if (token == "misc") return VideoCategory::Miscellaneous;
  throw Error(Errc::bad_format, "unknown category token: " + token);
}

std::string category_token(VideoCategory c) {
  switch (c) {
    case VideoCategory::Nature: return "nature";
    case VideoCategory::SocialEvents: return "social";
    case VideoCategory::Miscellaneous: return "misc";
  }
  return "misc";
}

std::string category_label(VideoCategory c) {
  switch (c) {
    case VideoCategory::Nature: return "Nature";
    case VideoCategory::SocialEvents: return "SocialEvents";
    case VideoCategory::Miscellaneous: return "Miscellaneous";
  }
  return "Miscellaneous";
}

void FixationSet::add(const FixationRecord& rec) {
  if (rec.x < 0 || rec.x >= width_ || rec.y < 0 || rec.y >= height_) {
    throw Error(Errc::out_of_bounds, "fixation for " + rec.video_id + " frame " +
                                         std::to_string(rec.frame_idx) + " at (" +
                                         std::to_string(rec.y) + "," + std::to_string(rec.x) +
                                         ") outside " + std::to_string(height_) + "x" +
                                         std::to_string(width_));
  }
  if (rec.frame_idx < 0) throw Error(Errc::invalid_value, "negative frame index");
  by_frame_[FrameKey{rec.video_id, rec.frame_idx}].push_back(records_.size());
  records_.push_back(rec);
}

std::vector<std::string> FixationSet::video_ids() const {
  std::vector<std::string> ids;
  for (const auto& [key, _] : by_frame_) {
    if (ids.empty() || ids.back() != key.video_id) ids.push_back(key.video_id);
  }
  return ids;
}

std::vector<int> FixationSet::frames_of(const std::string& video_id) const {
  std::vector<int> frames;
  auto it = by_frame_.lower_bound(FrameKey{video_id, 0});
  for (; it != by_frame_.end() && it->first.video_id == video_id; ++it) {
    frames.push_back(it->first.frame_idx);
  }
  return frames;
}

std::set<std::string> FixationSet::subjects_of(const std::string& video_id) const {
  std::set<std::string> subjects;
  for (const auto& rec : records_) {
    if (rec.video_id == video_id) subjects.insert(rec.subject_id);
  }
  return subjects;
}

FixationFrame FixationSet::frame(const std::string& video_id, int frame_idx) const {
  FixationFrame out(height_, width_);
  auto it = by_frame_.find(FrameKey{video_id, frame_idx});
  if (it == by_frame_.end()) return out;
  for (size_t idx : it->second) out.add(records_[idx].y, records_[idx].x);
  return out;
}

FixationFrame FixationSet::frame(const std::string& video_id, int frame_idx,
                                 const std::set<std::string>& subjects) const {
  FixationFrame out(height_, width_);
  auto it = by_frame_.find(FrameKey{video_id, frame_idx});
  if (it == by_frame_.end()) return out;
  for (size_t idx : it->second) {
    if (subjects.count(records_[idx].subject_id)) out.add(records_[idx].y, records_[idx].x);
  }
  return out;
}

bool FixationSet::has_frame(const std::string& video_id, int frame_idx) const {
  return by_frame_.count(FrameKey{video_id, frame_idx}) > 0;
}

}  // namespace avsal
