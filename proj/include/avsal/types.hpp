#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace avsal {

enum class Errc {
  io_error,
  bad_format,
  truncated_file,
  invalid_value,
  zero_mass,
  empty_fixations,
  zero_variance,
  unnormalized_input,
  degenerate_negatives,
  empty_negatives,
  shape_mismatch,
  short_audio,
  unsupported_wav,
  bad_argument,
  degenerate_data,
  out_of_bounds,
  missing_category,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

// Dense non-negative grid of per-pixel saliency values, row-major.
struct SaliencyMap {
  int height = 0;
  int width = 0;
  std::vector<double> values;

  SaliencyMap() = default;
  SaliencyMap(int h, int w, double fill = 0.0)
      : height(h), width(w), values(static_cast<size_t>(h) * w, fill) {}
  SaliencyMap(int h, int w, std::vector<double> vals)
      : height(h), width(w), values(std::move(vals)) {}

  double& at(int y, int x) { return values[static_cast<size_t>(y) * width + x]; }
  double at(int y, int x) const { return values[static_cast<size_t>(y) * width + x]; }
  size_t size() const { return values.size(); }
  bool same_shape(const SaliencyMap& o) const { return height == o.height && width == o.width; }
};

// A SaliencyMap whose values sum to 1. Produced by normalize() and the model head.
struct Distribution : SaliencyMap {
  Distribution() = default;
  explicit Distribution(SaliencyMap m) : SaliencyMap(std::move(m)) {}
};

// Throws Errc::invalid_value on non-finite or negative entries, bad dims.
void validate_map(const SaliencyMap& map);

double map_sum(const SaliencyMap& map);
bool is_normalized(const SaliencyMap& map, double tol = 1e-6);

// Divides by the total mass. Throws Errc::zero_mass on an all-zero map.
Distribution normalize(const SaliencyMap& map);

// Half-pixel bilinear resize (the convention used by the model's upsampler).
SaliencyMap bilinear_resize(const SaliencyMap& map, int out_h, int out_w);

// Integer-factor area-average downsample, renormalized to sum 1.
// Requires map dims to be whole multiples of the output dims.
Distribution downsample_area(const SaliencyMap& map, int out_h, int out_w);

struct FixationRecord {
  std::string video_id;
  int frame_idx = 0;  // 0-based
  std::string subject_id;
  int x = 0;  // column
  int y = 0;  // row
};

struct Point {
  int y = 0;
  int x = 0;
  friend bool operator<(const Point& a, const Point& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  }
  friend bool operator==(const Point& a, const Point& b) { return a.y == b.y && a.x == b.x; }
};

// Deduplicated set of fixated pixels for one frame.
struct FixationFrame {
  int height = 0;
  int width = 0;
  std::vector<Point> points;  // sorted, unique

  FixationFrame() = default;
  FixationFrame(int h, int w) : height(h), width(w) {}
  FixationFrame(int h, int w, std::vector<Point> pts);

  bool empty() const { return points.empty(); }
  size_t count() const { return points.size(); }
  void add(int y, int x);  // keeps set semantics, checks bounds
};

// 1 at each fixated pixel, 0 elsewhere.
SaliencyMap rasterize(const FixationFrame& fixations);

enum class VideoCategory { Nature, SocialEvents, Miscellaneous };

// CSV tokens are {nature, social, misc}.
VideoCategory category_from_token(const std::string& token);
std::string category_token(VideoCategory c);
std::string category_label(VideoCategory c);

struct ViewingGeometry {
  double pixels_per_degree = 0.0;
};

struct FrameKey {
  std::string video_id;
  int frame_idx = 0;
  friend bool operator<(const FrameKey& a, const FrameKey& b) {
    return a.video_id != b.video_id ? a.video_id < b.video_id : a.frame_idx < b.frame_idx;
  }
  friend bool operator==(const FrameKey& a, const FrameKey& b) {
    return a.video_id == b.video_id && a.frame_idx == b.frame_idx;
  }
};

// Per-video, per-frame, per-subject fixation records plus the shared frame size.
class FixationSet {
 public:
  FixationSet() = default;
  FixationSet(int height, int width) : height_(height), width_(width) {}

  int height() const { return height_; }
  int width() const { return width_; }

  void add(const FixationRecord& rec);  // bounds-checked against (height_, width_)
  const std::vector<FixationRecord>& records() const { return records_; }

  std::vector<std::string> video_ids() const;
  std::vector<int> frames_of(const std::string& video_id) const;
  std::set<std::string> subjects_of(const std::string& video_id) const;

  // Pools all subjects of a frame (or only `subjects` when given).
  FixationFrame frame(const std::string& video_id, int frame_idx) const;
  FixationFrame frame(const std::string& video_id, int frame_idx,
                      const std::set<std::string>& subjects) const;

  bool has_frame(const std::string& video_id, int frame_idx) const;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<FixationRecord> records_;
  std::map<FrameKey, std::vector<size_t>> by_frame_;
};

// Annotated sound-source location, inclusive pixel bounds.
struct SourceRegion {
  std::string video_id;
  int frame_idx = 0;
  int x_min = 0, y_min = 0, x_max = 0, y_max = 0;

  bool contains(int y, int x) const {
    return y >= y_min && y <= y_max && x >= x_min && x <= x_max;
  }
};

// Throws Errc::invalid_value unless min ≤ max and the box is inside h×w.
void validate_region(const SourceRegion& region, int height, int width);

// Per-frame metric scores; absent entries mark frames where a score is undefined.
struct ScoreRecord {
  std::string video_id;
  int frame_idx = 0;
  std::optional<double> nss;
  std::optional<double> auc_judd;
  std::optional<double> sauc;
  std::optional<double> cc;
  std::optional<double> sim;
};

}  // namespace avsal
