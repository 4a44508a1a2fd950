#ifndef XIDPS_COMMANDS_HPP
#define XIDPS_COMMANDS_HPP

#include <string>

#include "xidps/config.hpp"

namespace xidps {

// Exit codes shared by every subcommand:
//   0 ok, 2 config/validation error, 3 missing prerequisite artifact,
//   4 internal invariant violation.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitMissingArtifact = 3;
inline constexpr int kExitInternal = 4;

int cmd_ingest(const RunConfig& config);
int cmd_train(const RunConfig& config);
int cmd_explain(const RunConfig& config);
int cmd_select(const RunConfig& config);
int cmd_ablate(const RunConfig& config);
int cmd_zeroday(const RunConfig& config);
int cmd_simulate(const RunConfig& config);
int cmd_report(const RunConfig& config);

// dispatch by subcommand name; unknown names exit with kExitConfig
int run_command(const std::string& command, const RunConfig& config);

}  // namespace xidps

#endif  // XIDPS_COMMANDS_HPP
