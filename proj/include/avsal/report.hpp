#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "avsal/harness.hpp"

namespace avsal {

// Table-2-shaped aggregate table: header
// `model,scope,nss,auc_judd,sauc,cc,sim,frames,missing`, one row for the
// overall scope, then categories, then videos. Four decimals, empty cells
// for absent scores.
std::string report_csv(const EvalReport& report);

// Same content with full-precision numbers; absent scores become nulls.
std::string report_json(const EvalReport& report);

std::string temporal_csv(const TemporalProfile& profile);
std::string temporal_svg(const TemporalProfile& profile, const std::string& title);

std::string histogram_csv(const Histogram& histogram);
std::string histogram_svg(const Histogram& histogram, const std::string& title);

struct ContextualSummary {
  std::optional<double> in, out, full;  // means over frames with the part present
  int frames = 0;
};

ContextualSummary summarize_contextual(const std::vector<ContextualRecord>& records);

// Per-frame table `video_id,frame_idx,in,out,full,n_in,n_out` with
// shortest-round-trip values (this one feeds further tooling, not print).
std::string contextual_csv(const std::vector<ContextualRecord>& records);
std::string contextual_svg(const ContextualSummary& summary, const std::string& title);

// Writes report.csv, report.json, and frames.csv under out_dir. Output is
// byte-deterministic for identical reports.
void emit_report(const EvalReport& report, const std::filesystem::path& out_dir);

}  // namespace avsal
