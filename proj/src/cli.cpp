#include "tworate/cli.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "tworate/balance.hpp"
#include "tworate/irr.hpp"
#include "tworate/spec_io.hpp"

namespace tworate {

namespace {

std::string_view command_name(Command c) {
    switch (c) {
    case Command::Balance: return "balance";
    case Command::Trajectory: return "trajectory";
    case Command::Irr: return "irr";
    case Command::Approximate: return "approximate";
    case Command::ClassicalIrr: return "classical-irr";
    }
    return "?";
}

// Input errors the caller can fix; reported with exit status 1.
struct DomainFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const StepStream& require_step(const Stream& f, Command c) {
    if (const auto* s = std::get_if<StepStream>(&f)) return *s;
    throw DomainFailure(fmt::format("{} requires a step stream; run `approximate` on a piecewise stream first",
                                    command_name(c)));
}

void emit(const CommandRequest& req, std::ostream& out, const std::string& text) {
    if (req.out_path) {
        write_file_atomically(*req.out_path, text);
    } else {
        out << text;
    }
}

int dispatch(const CommandRequest& req, std::ostream& out) {
    const Stream stream = parse_stream_spec(read_text_file(req.stream_path));
    auto load = [](const std::optional<std::string>& path) { return parse_accumulation_spec(read_text_file(*path)); };

    switch (req.command) {
    case Command::Balance: {
        const auto deposit = load(req.deposit_path);
        const auto invest = load(req.invest_path);
        if (const auto* step = std::get_if<StepStream>(&stream)) {
            out << format_number(balance_at(*step, deposit, invest, *req.at)) << '\n';
        } else {
            const auto cb = balance_regulated(std::get<RegulatedStream>(stream), deposit, invest, *req.at, req.tol);
            out << format_number(cb.value) << '\n' << "error_bound=" << format_number(cb.error_bound) << '\n';
        }
        return kExitOk;
    }
    case Command::Trajectory: {
        const auto& step = require_step(stream, req.command);
        const auto trajectory = trm_trajectory(step, load(req.deposit_path), load(req.invest_path));
        std::ostringstream csv;
        write_trajectory_csv(csv, trajectory);
        emit(req, out, csv.str());
        return kExitOk;
    }
    case Command::Irr: {
        const auto deposit = load(req.deposit_path);
        const IrrResult r = irr_of(stream, deposit, req.root_tol, req.tol);
        spdlog::info("irr: bracket [{}, {}], residual {}", r.x_lo, r.x_hi, r.residual);
        out << "nu,irr,residual\n"
            << format_number(r.nu) << ',' << format_number(r.irr) << ',' << format_number(r.residual) << '\n';
        if (std::holds_alternative<RegulatedStream>(stream)) {
            out << "error_bound=" << format_number(r.error_bound) << '\n';
        }
        out << "IRR=" << format_number(r.irr) << '\n';
        return kExitOk;
    }
    case Command::Approximate: {
        const auto* reg = std::get_if<RegulatedStream>(&stream);
        if (!reg) throw DomainFailure("approximate requires a piecewise stream");
        const StepStream step = approximate(*reg, *req.eps);
        spdlog::info("approximate: {} cash flows at eps {}", step.size(), *req.eps);
        write_file_atomically(*req.out_path, to_spec_json(step) + "\n");
        return kExitOk;
    }
    case Command::ClassicalIrr: {
        const auto roots = classical_irr(require_step(stream, req.command), req.root_tol, req.imax);
        for (double r : roots) out << format_number(r) << '\n';
        return kExitOk;
    }
    }
    return kExitDomainError;
}

}  // namespace

std::optional<std::string> validate(const CommandRequest& req) {
    const auto name = command_name(req.command);
    if (req.stream_path.empty()) return fmt::format("{}: missing --stream", name);
    const bool needs_deposit = req.command == Command::Balance || req.command == Command::Trajectory ||
                               req.command == Command::Irr;
    const bool needs_invest = req.command == Command::Balance || req.command == Command::Trajectory;
    if (needs_deposit && !req.deposit_path) return fmt::format("{}: missing --deposit", name);
    if (needs_invest && !req.invest_path) return fmt::format("{}: missing --invest", name);
    if (req.command == Command::Balance && !req.at) return fmt::format("{}: missing --at", name);
    if (req.command == Command::Approximate) {
        if (!req.eps) return fmt::format("{}: missing --eps", name);
        if (!(*req.eps > 0.0)) return fmt::format("{}: --eps must be > 0", name);
        if (!req.out_path) return fmt::format("{}: missing --out", name);
    }
    if (!(req.tol > 0.0)) return fmt::format("{}: --tol must be > 0", name);
    if (!(req.root_tol > 0.0)) return fmt::format("{}: --root-tol must be > 0", name);
    if (req.at && !std::isfinite(*req.at)) return fmt::format("{}: --at must be finite", name);
    return std::nullopt;
}

int run_command(const CommandRequest& req, std::ostream& out, std::ostream& err) {
    if (auto problem = validate(req)) {
        err << "error: " << *problem << '\n';
        return kExitDomainError;
    }
    try {
        return dispatch(req, out);
    } catch (const SpecError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitParseError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomainError;
    }
}

}  // namespace tworate
