#pragma once

#include "bifrac/config.hpp"
#include "bifrac/verify.hpp"

namespace bifrac {

/// Run the experiment named in the spec.  Most theorems produce one report;
/// thmG produces the sufficiency and necessity sections.
std::vector<TheoremReport> run_experiment(const ExperimentSpec& spec);

/// Serialized artifact (no timestamps: identical spec => identical bytes).
std::string artifact_json(const ExperimentSpec& spec, const std::vector<TheoremReport>& reports);
std::string artifact_csv(const ExperimentSpec& spec, const std::vector<TheoremReport>& reports);

}  // namespace bifrac
