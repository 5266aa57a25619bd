#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "avsal/types.hpp"

namespace avsal {

enum class MapFormat { SMF, PGM };

// SMF: "SMF1" magic, height and width as u32 LE, then h*w f32 LE row-major.
// Lossless up to f32; the round trip is bitwise on the payload.
void write_map(const SaliencyMap& map, const std::filesystem::path& path, MapFormat format);
SaliencyMap read_map(const std::filesystem::path& path, MapFormat format);

// Format inferred from extension (.smf / .pgm).
SaliencyMap read_map(const std::filesystem::path& path);
void write_map(const SaliencyMap& map, const std::filesystem::path& path);

void write_smf(const SaliencyMap& map, std::ostream& out);
SaliencyMap read_smf(std::istream& in);

// Fixation CSV: header `video_id,frame_idx,subject_id,x,y`. Sub-pixel
// coordinates are rounded half-up at ingestion.
FixationSet read_fixation_csv(const std::filesystem::path& path, int height, int width);
void write_fixation_csv(const FixationSet& set, const std::filesystem::path& path);

// Category CSV: header `video_id,category`, category in {nature,social,misc}.
std::map<std::string, VideoCategory> read_category_csv(const std::filesystem::path& path);
void write_category_csv(const std::map<std::string, VideoCategory>& cats,
                        const std::filesystem::path& path);

// Per-frame score CSV: `video_id,frame_idx,nss,auc_judd,sauc,cc,sim`,
// empty cells for absent scores. Values are shortest round-trip decimals.
void write_score_csv(const std::vector<ScoreRecord>& records, const std::filesystem::path& path);
std::vector<ScoreRecord> read_score_csv(const std::filesystem::path& path);

// Sound-source CSV: header `video_id,frame_idx,x_min,y_min,x_max,y_max`.
std::vector<SourceRegion> read_source_csv(const std::filesystem::path& path);
void write_source_csv(const std::vector<SourceRegion>& regions, const std::filesystem::path& path);

}  // namespace avsal
