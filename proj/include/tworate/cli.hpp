#pragma once

#include <iosfwd>
#include <optional>
#include <string>

namespace tworate {

enum class Command { Balance, Trajectory, Irr, Approximate, ClassicalIrr };

/// Exit statuses of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitDomainError = 1, kExitParseError = 2 };

struct CommandRequest {
    Command command = Command::Irr;
    std::string stream_path;
    std::optional<std::string> deposit_path;
    std::optional<std::string> invest_path;
    std::optional<double> at;
    std::optional<double> eps;
    double tol = 1e-3;
    double root_tol = 1e-10;
    double imax = 10.0;
    std::optional<std::string> out_path;
};

/// Checks the per-command input requirements; returns the message for the
/// first missing or invalid input.
std::optional<std::string> validate(const CommandRequest& req);

/// Runs one command. Results go to `out`, diagnostics to `err`; the return
/// value is the process exit status.
int run_command(const CommandRequest& req, std::ostream& out, std::ostream& err);

}  // namespace tworate
