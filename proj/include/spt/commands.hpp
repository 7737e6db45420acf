#pragma once

#include "spt/config.hpp"
#include "spt/report.hpp"

#include <iosfwd>
#include <string>

namespace spt {

/// Exit codes: success, configuration or validation error, identity-suite failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitIdentity = 2;

void cmd_zoo_list(std::ostream& os);
/// Throws UnknownModel.
void cmd_zoo_describe(const std::string& id, std::ostream& os);

/// Writes ensemble.csv (t,path_id,mu1..) and simulate.json into cfg.out.
int cmd_simulate(ExperimentConfig cfg, std::ostream& log);
/// Writes strategy.csv (path 0: t,theta1..,V) and strategy.json into cfg.out.
int cmd_strategy(ExperimentConfig cfg, std::ostream& log);
/// Writes verify.json into cfg.out; returns kExitIdentity when an identity fails.
int cmd_verify(ExperimentConfig cfg, std::ostream& log);
/// Writes gammaH.csv and ingest.json into out_dir.
int cmd_ingest(const std::string& file, const std::string& out_dir, std::ostream& log);

/// The verify report itself; identities_pass receives the suite outcome.
Json verify_report(ExperimentConfig& cfg, bool& identities_pass);

}  // namespace spt
