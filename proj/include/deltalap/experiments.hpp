#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deltalap/config.hpp"
#include "deltalap/report.hpp"

namespace deltalap {

struct CriterionInfo {
    int id;
    const char* experiment;
    const char* title;
};

const std::vector<CriterionInfo>& criteria();
std::vector<int> criteria_for(const std::string& experiment);

// Seeded test family: Gaussians with random centers, widths and phases; every
// second member (when augment is set) carries an added multiple of G_omega.
struct FamilyMember {
    Field field;
    bool singular = false;
};
std::vector<FamilyMember> make_family(const GridSpec& g, int count, std::uint64_t seed, bool augment,
                                      double omega_aug);

Field gaussian(const GridSpec& g, double sigma, const std::array<double, 3>& center = {0, 0, 0}, cplx amp = 1.0);

// spread of positive values in decades, log10(max/min)
double decade_spread(const std::vector<double>& v);

RunOutput run_criterion(int id, const ExperimentConfig& cfg);

// all criteria of cfg.experiment, at most `threads` at a time; output in criterion order
RunOutput run_experiment(const ExperimentConfig& cfg, int threads);

}  // namespace deltalap
