#pragma once

#include <string>

#include "snse/config.hpp"

namespace snse {

/// Dispatches one subcommand: simulate | cost | continuity | convergence |
/// tail | logmoment | subadd | gronwall | optimize. Writes CSV outputs with
/// a '#' metadata header into out_dir. Returns 0 on success, nonzero when an
/// experiment assertion fails (diagnostics on stderr).
int run(const std::string& subcommand, const RunSpec& spec,
        const std::string& out_dir, bool long_format = true);

}  // namespace snse
