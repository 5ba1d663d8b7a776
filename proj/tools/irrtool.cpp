// irrtool: two-rate balances and internal rates of return from JSON specs.
//
//   irrtool balance       --stream F --deposit A --invest B --at T [--tol X]
//   irrtool trajectory    --stream F --deposit A --invest B [--out P]
//   irrtool irr           --stream F --deposit A [--root-tol X] [--tol X]
//   irrtool approximate   --stream F --eps X --out P
//   irrtool classical-irr --stream F [--root-tol X] [--imax X]
//
// IRRTOOL_LOG=off|info|debug controls diagnostics on stderr.

#include <cstdlib>
#include <iostream>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "tworate/cli.hpp"

namespace {

void configure_logging() {
    auto logger = spdlog::stderr_color_mt("irrtool");
    spdlog::set_default_logger(logger);
    const char* env = std::getenv("IRRTOOL_LOG");
    const std::string level = env ? env : "off";
    if (level == "debug") {
        spdlog::set_level(spdlog::level::debug);
    } else if (level == "info") {
        spdlog::set_level(spdlog::level::info);
    } else {
        spdlog::set_level(spdlog::level::off);
    }
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();

    CLI::App app{"Two-rate balance functions and internal rates of return"};
    app.require_subcommand(1);

    tworate::CommandRequest req;
    std::string deposit, invest, out;
    double at = 0.0, eps = 0.0;

    auto common = [&](CLI::App* sub) { sub->add_option("--stream", req.stream_path, "Stream spec (JSON)"); };

    auto* balance = app.add_subcommand("balance", "Balance of a stream at a time");
    common(balance);
    balance->add_option("--deposit", deposit, "Deposit accumulation spec (JSON)");
    balance->add_option("--invest", invest, "Investment accumulation spec (JSON)");
    auto* at_opt = balance->add_option("--at", at, "Valuation time");
    balance->add_option("--tol", req.tol, "Balance tolerance for piecewise streams");

    auto* trajectory = app.add_subcommand("trajectory", "Two-rate balance at every flow time (CSV)");
    common(trajectory);
    trajectory->add_option("--deposit", deposit, "Deposit accumulation spec (JSON)");
    trajectory->add_option("--invest", invest, "Investment accumulation spec (JSON)");
    trajectory->add_option("--out", out, "Output CSV path (default stdout)");

    auto* irr = app.add_subcommand("irr", "Internal rate of return of an investment project");
    common(irr);
    irr->add_option("--deposit", deposit, "Deposit accumulation spec (JSON)");
    irr->add_option("--root-tol", req.root_tol, "Bisection width in x");
    irr->add_option("--tol", req.tol, "Balance tolerance for piecewise streams");

    auto* approximate = app.add_subcommand("approximate", "Step approximation of a piecewise stream");
    common(approximate);
    auto* eps_opt = approximate->add_option("--eps", eps, "Sup-norm tolerance");
    approximate->add_option("--out", out, "Output step spec path");

    auto* classical = app.add_subcommand("classical-irr", "All roots of the net present value");
    common(classical);
    classical->add_option("--root-tol", req.root_tol, "Bisection width in i");
    classical->add_option("--imax", req.imax, "Upper end of the scanned rate range");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return tworate::kExitParseError;
    }

    if (balance->parsed()) req.command = tworate::Command::Balance;
    if (trajectory->parsed()) req.command = tworate::Command::Trajectory;
    if (irr->parsed()) req.command = tworate::Command::Irr;
    if (approximate->parsed()) req.command = tworate::Command::Approximate;
    if (classical->parsed()) req.command = tworate::Command::ClassicalIrr;
    if (!deposit.empty()) req.deposit_path = deposit;
    if (!invest.empty()) req.invest_path = invest;
    if (!out.empty()) req.out_path = out;
    if (at_opt->count() > 0) req.at = at;
    if (eps_opt->count() > 0) req.eps = eps;

    return tworate::run_command(req, std::cout, std::cerr);
}
