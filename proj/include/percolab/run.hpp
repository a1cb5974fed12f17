#pragma once

#include <string>

#include "percolab/config.hpp"
#include "percolab/record.hpp"

namespace percolab {

// Dispatches the experiment, writes record.json plus CSV/SVG artifacts under
// output_dir/<kind>-<hash8>/, and returns the record.
ResultRecord run(const ExperimentConfig& cfg);

struct ReportOutcome {
  std::string text;
  int exit_code;  // 0 ok, 3 when any audit reported violations
};

// Summarizes every record found under the directory.
ReportOutcome report(const std::string& output_dir);

}  // namespace percolab
