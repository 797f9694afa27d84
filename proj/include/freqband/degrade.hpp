#ifndef FREQBAND_DEGRADE_HPP
#define FREQBAND_DEGRADE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "freqband/image.hpp"
#include "freqband/planner.hpp"
#include "freqband/rng.hpp"

// Synthetic degradation generators and the procedural base images they
// corrupt. Everything is deterministic under its seed; per-item randomness
// is derived from (seed, index) so parallel and serial runs agree.

namespace freqband::degrade {

struct DegradationSpec {
    planner::TaskToken kind = planner::TaskToken::kDenoise;
    std::map<std::string, double> params;
    std::uint64_t seed = 0;
};

// Parameter keys understood by apply(), with the sampling ranges used by
// make_corpus. Counts are densities per megapixel and lengths are fractions
// of the image diagonal so the same spec reads the same at any resolution.
//
//   rain:       angle_deg [-30,30] (from vertical), density_mpx [3800,4800],
//               length_frac [0.07,0.10], intensity [0.20,0.22]
//   snow:       density_mpx [280,520], radius_frac [0.0035,0.0075],
//               intensity [0.85,0.95]
//   noise:      sigma {15/255, 25/255}   (50/255 supported, not sampled:
//               at that level blob counts dominate every other cue)
//   blur:       blur_kind 0=gaussian 1=motion, sigma_frac [0.004,0.008],
//               length_frac [0.02,0.035], angle_deg [0,180)
//   haze:       airlight [0.70,0.76] (below the snow luma threshold),
//               beta [0.9,1.5] (the near field stays sharp)
//   low_light:  gain [0.50,0.62], gamma [1.20,1.40]
//   sr:         factor {5,6}
ImageBuffer apply(const ImageBuffer& base, const DegradationSpec& spec);

struct CorpusItem {
    ImageBuffer image;
    planner::TaskToken task = planner::TaskToken::kDenoise;
    DegradationSpec spec;
};

// n_per_class items for each of the seven tasks, in task order. Bases must
// be clean: any base whose severity margins fire a rule is rejected with a
// diagnostic. Items are generated in parallel when threads > 1; per-item
// seeding keeps the result identical either way.
std::vector<CorpusItem> make_corpus(const std::vector<ImageBuffer>& bases, int n_per_class,
                                    std::uint64_t seed, int threads = 1);

// Procedural clean bases: smooth colored background, multi-orientation
// fine texture and a broad oriented component, tuned so that no planner
// rule fires on them.
std::vector<ImageBuffer> builtin_bases(int size, int count, std::uint64_t seed);

std::string spec_to_json(const DegradationSpec& spec);
DegradationSpec spec_from_json(const std::string& json_text);

}  // namespace freqband::degrade

#endif
