#pragma once

#include "fdwlan/config.hpp"

#include <iosfwd>
#include <string>

namespace fdwlan {

/// Subcommand bodies. Each builds its complete CSV first and writes it to
/// `out` only on success, so a failing run leaves the stream untouched; the
/// return value is the process exit code (0 ok, 1 error). Diagnostics go to
/// `err`.
int cmd_solve(const RunConfig& rc, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& rc, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& rc, std::ostream& out, std::ostream& err);
int cmd_figures(const std::string& preset, const RunConfig& rc, std::ostream& out,
                std::ostream& err);

/// Argument parsing and dispatch for the fdwlan binary.
int run_cli(int argc, char** argv);

/// Value formatting used in all CSV output: 9 significant digits.
std::string csv_num(double v);

} // namespace fdwlan
