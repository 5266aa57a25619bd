#include "avsal/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "avsal/map_io.hpp"
#include "json.hpp"

namespace avsal {
namespace {

std::string fmt4(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", *v);
  return buf;
}

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string shortest(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void append_row(std::string& out, const std::string& model, const AggregateRow& row) {
  out += model + ',' + row.scope + ',' + fmt4(row.nss) + ',' + fmt4(row.auc_judd) + ',' +
         fmt4(row.sauc) + ',' + fmt4(row.cc) + ',' + fmt4(row.sim) + ',' +
         std::to_string(row.frames) + ',' + std::to_string(row.missing) + '\n';
}

nlohmann::ordered_json row_json(const AggregateRow& row) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json j;
  j["scope"] = row.scope;
  j["nss"] = opt(row.nss);
  j["auc_judd"] = opt(row.auc_judd);
  j["sauc"] = opt(row.sauc);
  j["cc"] = opt(row.cc);
  j["sim"] = opt(row.sim);
  j["frames"] = row.frames;
  j["missing"] = row.missing;
  return j;
}

// Minimal standalone SVG plot scaffolding shared by the chart emitters.
constexpr int kSvgW = 720, kSvgH = 400, kSvgMargin = 60;

std::string svg_open(const std::string& title) {
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kSvgW) +
       "\" height=\"" + std::to_string(kSvgH) + "\" viewBox=\"0 0 " + std::to_string(kSvgW) +
       " " + std::to_string(kSvgH) + "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(kSvgW) + "\" height=\"" +
       std::to_string(kSvgH) + "\" fill=\"white\"/>\n";
  s += "<text x=\"" + std::to_string(kSvgW / 2) +
       "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" + title +
       "</text>\n";
  s += "<rect x=\"" + std::to_string(kSvgMargin) + "\" y=\"" + std::to_string(kSvgMargin) +
       "\" width=\"" + std::to_string(kSvgW - 2 * kSvgMargin) + "\" height=\"" +
       std::to_string(kSvgH - 2 * kSvgMargin) + "\" fill=\"none\" stroke=\"#888\"/>\n";
  return s;
}

std::string axis_label(double v, double x, double y, const char* anchor) {
  std::string s;
  s += "<text x=\"" + fmt2(x) + "\" y=\"" + fmt2(y) + "\" text-anchor=\"" + anchor +
       "\" font-family=\"sans-serif\" font-size=\"11\">" + fmt4(v) + "</text>\n";
  return s;
}

}  // namespace

std::string report_csv(const EvalReport& report) {
  std::string out = "model,scope,nss,auc_judd,sauc,cc,sim,frames,missing\n";
  append_row(out, report.model_name, report.overall);
  for (const auto& row : report.per_category) append_row(out, report.model_name, row);
  for (const auto& row : report.per_video) append_row(out, report.model_name, row);
  return out;
}

std::string report_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["model"] = report.model_name;
  j["seed"] = report.seed;
  j["overall"] = row_json(report.overall);
  j["categories"] = nlohmann::ordered_json::array();
  for (const auto& row : report.per_category) j["categories"].push_back(row_json(row));
  j["videos"] = nlohmann::ordered_json::array();
  for (const auto& row : report.per_video) j["videos"].push_back(row_json(row));
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  j["frames"] = nlohmann::ordered_json::array();
  for (const auto& rec : report.frames) {
    nlohmann::ordered_json f;
    f["video_id"] = rec.video_id;
    f["frame_idx"] = rec.frame_idx;
    f["nss"] = opt(rec.nss);
    f["auc_judd"] = opt(rec.auc_judd);
    f["sauc"] = opt(rec.sauc);
    f["cc"] = opt(rec.cc);
    f["sim"] = opt(rec.sim);
    j["frames"].push_back(std::move(f));
  }
  return j.dump(2) + "\n";
}

std::string temporal_csv(const TemporalProfile& profile) {
  std::string out = "position,value\n";
  size_t n = profile.curve.size();
  for (size_t i = 0; i < n; ++i) {
    double pos = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
    out += shortest(pos) + ',' + shortest(profile.curve[i]) + '\n';
  }
  return out;
}

std::string temporal_svg(const TemporalProfile& profile, const std::string& title) {
  const auto& curve = profile.curve;
  double lo = curve[0], hi = curve[0];
  for (double v : curve) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == lo) hi = lo + 1.0;  // keep a constant curve drawable
  double plot_w = kSvgW - 2.0 * kSvgMargin, plot_h = kSvgH - 2.0 * kSvgMargin;
  std::string s = svg_open(title);
  s += axis_label(hi, kSvgMargin - 6, kSvgMargin + 4, "end");
  s += axis_label(lo, kSvgMargin - 6, kSvgMargin + plot_h + 4, "end");
  s += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
  for (size_t i = 0; i < curve.size(); ++i) {
    double x = kSvgMargin + plot_w * static_cast<double>(i) / static_cast<double>(curve.size() - 1);
    double y = kSvgMargin + plot_h * (1.0 - (curve[i] - lo) / (hi - lo));
    if (i) s += ' ';
    s += fmt2(x) + ',' + fmt2(y);
  }
  s += "\"/>\n</svg>\n";
  return s;
}

std::string histogram_csv(const Histogram& histogram) {
  std::string out = "bin_lo,bin_hi,count\n";
  size_t n = histogram.counts.size();
  double width = (histogram.hi - histogram.lo) / static_cast<double>(n);
  for (size_t i = 0; i < n; ++i) {
    out += shortest(histogram.lo + width * static_cast<double>(i)) + ',' +
           shortest(histogram.lo + width * static_cast<double>(i + 1)) + ',' +
           std::to_string(histogram.counts[i]) + '\n';
  }
  out += "# mean," + shortest(histogram.mean) + '\n';
  return out;
}

std::string histogram_svg(const Histogram& histogram, const std::string& title) {
  int64_t peak = 1;
  for (int64_t c : histogram.counts) peak = std::max(peak, c);
  double plot_w = kSvgW - 2.0 * kSvgMargin, plot_h = kSvgH - 2.0 * kSvgMargin;
  size_t n = histogram.counts.size();
  double bar_w = plot_w / static_cast<double>(n);
  std::string s = svg_open(title);
  s += axis_label(static_cast<double>(peak), kSvgMargin - 6, kSvgMargin + 4, "end");
  for (size_t i = 0; i < n; ++i) {
    double h = plot_h * static_cast<double>(histogram.counts[i]) / static_cast<double>(peak);
    double x = kSvgMargin + bar_w * static_cast<double>(i);
    double y = kSvgMargin + plot_h - h;
    s += "<rect x=\"" + fmt2(x) + "\" y=\"" + fmt2(y) + "\" width=\"" + fmt2(bar_w * 0.9) +
         "\" height=\"" + fmt2(h) + "\" fill=\"#1f77b4\"/>\n";
  }
  double mean_x =
      kSvgMargin + plot_w * (histogram.mean - histogram.lo) / (histogram.hi - histogram.lo);
  mean_x = std::clamp(mean_x, static_cast<double>(kSvgMargin), kSvgMargin + plot_w);
  s += "<line x1=\"" + fmt2(mean_x) + "\" y1=\"" + std::to_string(kSvgMargin) + "\" x2=\"" +
       fmt2(mean_x) + "\" y2=\"" + fmt2(kSvgMargin + plot_h) +
       "\" stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>\n";
  s += "</svg>\n";
  return s;
}

ContextualSummary summarize_contextual(const std::vector<ContextualRecord>& records) {
  ContextualSummary summary;
  double in_sum = 0, out_sum = 0, full_sum = 0;
  int in_n = 0, out_n = 0, full_n = 0;
  for (const auto& rec : records) {
    if (rec.score.in) {
      in_sum += *rec.score.in;
      ++in_n;
    }
    if (rec.score.out) {
      out_sum += *rec.score.out;
      ++out_n;
    }
    if (rec.score.full) {
      full_sum += *rec.score.full;
      ++full_n;
    }
  }
  if (in_n) summary.in = in_sum / in_n;
  if (out_n) summary.out = out_sum / out_n;
  if (full_n) summary.full = full_sum / full_n;
  summary.frames = static_cast<int>(records.size());
  return summary;
}

std::string contextual_csv(const std::vector<ContextualRecord>& records) {
  std::string out = "video_id,frame_idx,in,out,full,n_in,n_out\n";
  auto cell = [](const std::optional<double>& v) { return v ? shortest(*v) : std::string(); };
  for (const auto& rec : records) {
    out += rec.key.video_id + ',' + std::to_string(rec.key.frame_idx) + ',' +
           cell(rec.score.in) + ',' + cell(rec.score.out) + ',' + cell(rec.score.full) + ',' +
           std::to_string(rec.score.n_in) + ',' + std::to_string(rec.score.n_out) + '\n';
  }
  return out;
}

std::string contextual_svg(const ContextualSummary& summary, const std::string& title) {
  struct Bar {
    const char* label;
    std::optional<double> value;
  };
  Bar bars[3] = {{"in", summary.in}, {"full", summary.full}, {"out", summary.out}};
  double lo = 0, hi = 0;
  for (const auto& b : bars) {
    if (b.value) {
      lo = std::min(lo, *b.value);
      hi = std::max(hi, *b.value);
    }
  }
  if (hi == lo) hi = lo + 1.0;
  double plot_w = kSvgW - 2.0 * kSvgMargin, plot_h = kSvgH - 2.0 * kSvgMargin;
  auto y_of = [&](double v) { return kSvgMargin + plot_h * (1.0 - (v - lo) / (hi - lo)); };
  std::string s = svg_open(title);
  s += axis_label(hi, kSvgMargin - 6, kSvgMargin + 4, "end");
  s += axis_label(lo, kSvgMargin - 6, kSvgMargin + plot_h + 4, "end");
  double zero_y = y_of(0.0);
  s += "<line x1=\"" + std::to_string(kSvgMargin) + "\" y1=\"" + fmt2(zero_y) + "\" x2=\"" +
       fmt2(kSvgMargin + plot_w) + "\" y2=\"" + fmt2(zero_y) + "\" stroke=\"#bbb\"/>\n";
  double slot = plot_w / 3.0;
  for (int i = 0; i < 3; ++i) {
    double cx = kSvgMargin + slot * (i + 0.5);
    if (bars[i].value) {
      double v = *bars[i].value;
      double top = std::min(y_of(v), zero_y);
      double h = std::fabs(y_of(v) - zero_y);
      s += "<rect x=\"" + fmt2(cx - slot * 0.3) + "\" y=\"" + fmt2(top) + "\" width=\"" +
           fmt2(slot * 0.6) + "\" height=\"" + fmt2(h) + "\" fill=\"#1f77b4\"/>\n";
      s += axis_label(v, cx, top - 6, "middle");
    }
    s += "<text x=\"" + fmt2(cx) + "\" y=\"" + fmt2(kSvgMargin + plot_h + 18) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
         bars[i].label + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

void emit_report(const EvalReport& report, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  auto write_file = [&](const char* name, const std::string& content) {
    std::ofstream out(out_dir / name, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write: " + (out_dir / name).string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
  };
  write_file("report.csv", report_csv(report));
  write_file("report.json", report_json(report));
  write_score_csv(report.frames, out_dir / "frames.csv");
}

}  // namespace avsal
