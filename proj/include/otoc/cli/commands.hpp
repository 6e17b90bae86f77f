#pragma once

#include <string>
#include <vector>

#include "otoc/cli/config.hpp"
#include "otoc/cli/output.hpp"

namespace otoc::cli {

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_numerical = 3, exit_unresolved = 4 };

// A minimum or maximum that sits on the search boundary.
class UnresolvedExtremum : public Error {
 public:
  using Error::Error;
};

ResultEnvelope cmd_trace(const RunConfig& cfg);
ResultEnvelope cmd_scan(const RunConfig& cfg);
// Throws UnresolvedExtremum after filling `partial` when a member's minimum
// is on the boundary of the search window.
ResultEnvelope cmd_scaling(const RunConfig& cfg, ResultEnvelope* partial = nullptr);
ResultEnvelope cmd_order_param(const RunConfig& cfg);
ResultEnvelope cmd_size_fit(const RunConfig& cfg);
ResultEnvelope cmd_cutoff_study(const RunConfig& cfg);

ResultEnvelope dispatch(const RunConfig& cfg, ResultEnvelope* partial = nullptr);

// Full front end: argument parsing, config resolution, execution, writing
// and exit-code mapping. Diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace otoc::cli
