// runner.hpp - executes one RunConfig and writes its artifacts.

#pragma once

#include <ostream>

#include "wqed/config.hpp"

namespace wqed {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitNonConvergence = 3;

/// Files written, all prefixed by cfg.out:
///   evolve          _trajectory.csv
///   markov-compare  _trajectory.csv (with markov_* columns)
///   oracle-compare  _trajectory.csv, _oracle.csv
///   field           _field_gt<time>.csv per snapshot time
///   spectrum        _spectrum.csv
/// and _report.json for every mode. The report is also printed to `out`.
/// Failures print one JSON line {"error", "exit_code", "message"} to `err`.
/// When the node-doubling check fails the results of the base node set are
/// still written, marked "converged = false", and the exit code is 3.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Error line in the format used by run().
void write_error_line(std::ostream& err, int exit_code, const std::string& kind,
                      const std::string& message);

}  // namespace wqed
