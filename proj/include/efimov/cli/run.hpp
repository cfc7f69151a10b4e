#pragma once

#include "efimov/cli/report_io.hpp"
#include "efimov/cli/run_config.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>

namespace efimov::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFailedCheck = 2;

struct RunOutcome {
    int exit_code = kExitOk;
    nlohmann::ordered_json report;
    Table table;
    std::optional<PlotData> plot;
};

/// Runs the experiment without touching the disk. Throws on error.
RunOutcome evaluate(const RunConfig& config);

/// Writes report.json, table.csv and (spectrum, accumulate) plot.svg into
/// config.out_dir. Errors go to err and yield exit code 1.
int run(const RunConfig& config, std::ostream& err);

}  // namespace efimov::cli
