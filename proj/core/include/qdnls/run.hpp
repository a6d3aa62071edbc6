#pragma once

// Orchestration of one RunConfig: regime gate, experiment, artifacts.

#include <filesystem>
#include <string>
#include <vector>

#include "qdnls/config.hpp"

namespace qdnls {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitConfig = 2,
  kExitBlowUp = 3,
  kExitInconclusive = 4,
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::string summary;  ///< same text as report.txt
  std::vector<std::filesystem::path> artifacts;
};

/// Human-readable regime classification of p: discriminants, M factors,
/// and every applicable theorem with its Sobolev threshold.
std::string regime_banner(const SystemParams& p);

/// Throws ConfigError (before any numerical work) when the command's
/// regime precondition fails for cfg.params.
void check_regime_gate(const RunConfig& cfg);

/// Runs cfg.command and writes config.echo, report.txt and the command's
/// CSVs and snapshots into cfg.out_dir, each file atomically.
RunOutcome run(const RunConfig& cfg);

}  // namespace qdnls
