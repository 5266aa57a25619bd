#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "avsal/types.hpp"

namespace avsal {

// Disjoint halves of a subject pool; sizes differ by at most one.
struct SubjectSplit {
  std::set<std::string> half_a;
  std::set<std::string> half_b;
  uint64_t seed = 0;
};

// Seeded shuffle, first ceil(n/2) subjects go to half_a.
SubjectSplit split_subjects(const std::set<std::string>& subjects, uint64_t seed);

// Sum of isotropic Gaussians (sigma = pixels_per_degree) centered at each
// fixation, truncated at 4 sigma, normalized to total mass 1.
// Throws Errc::empty_fixations, Errc::bad_argument on non-positive sigma.
Distribution density_map(const FixationFrame& fixations, const ViewingGeometry& geometry);

// Pixelwise mean of the inputs, renormalized. Throws on empty list or
// shape mismatch.
Distribution mep(const std::vector<Distribution>& densities);

// Supplies the negative point set for sAUC at a given frame; when absent,
// the sauc column stays empty.
using NegativesFn = std::function<FixationFrame(const std::string& video_id, int frame_idx)>;

// One half's density scored against the other half's fixations (NSS, AUCs)
// and density (CC, SIM), both directions averaged. Frames where either half
// has no fixations get an all-absent record.
std::vector<ScoreRecord> human_infinite(const FixationSet& records, const SubjectSplit& split,
                                        const ViewingGeometry& geometry,
                                        const NegativesFn& negatives = nullptr);

}  // namespace avsal
