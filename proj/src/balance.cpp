#include "tworate/balance.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace tworate {

namespace {

struct Step {
    double balance;
    Branch branch;
};

Step advance(double balance, double s, double t, double flow, const AccumulationFunction& deposit,
             const AccumulationFunction& investment) {
    if (balance > 0.0) return {deposit(s, t) * balance + flow, Branch::Deposit};
    if (balance < 0.0) return {investment(s, t) * balance + flow, Branch::Investment};
    return {flow, Branch::Boundary};
}

// a(s,t) over one step. Constant rates, powers and their products depend on
// t - s only; for those the factor is cached per step width.
class StepFactor {
public:
    explicit StepFactor(const AccumulationFunction& a) : a_(a), homogeneous_(is_homogeneous(a)) {
        if (homogeneous_) unit_ = a(0.0, 1.0);
    }

    double operator()(double s, double t, double width) {
        if (!homogeneous_) return a_(s, t);
        if (width != width_) {
            width_ = width;
            factor_ = unit_ == 0.0 ? (width > 0.0 ? 0.0 : 1.0) : std::pow(unit_, width);
        }
        return factor_;
    }

private:
    static bool is_homogeneous(const AccumulationFunction& a) {
        using K = AccumulationFunction::Kind;
        switch (a.kind()) {
        case K::ConstantRate:
        case K::Power: return true;
        case K::Force: return false;
        case K::Product:
            for (const auto& g : a.factors()) {
                if (!is_homogeneous(g)) return false;
            }
            return true;
        }
        return false;
    }

    const AccumulationFunction& a_;
    bool homogeneous_;
    double unit_ = 1.0;
    double width_ = -1.0;
    double factor_ = 1.0;
};

}  // namespace

std::string_view to_string(Branch branch) {
    switch (branch) {
    case Branch::Deposit: return "deposit";
    case Branch::Investment: return "investment";
    case Branch::Boundary: return "boundary";
    }
    return "?";
}

BalanceTrajectory trm_trajectory(const StepStream& f, const AccumulationFunction& deposit,
                                 const AccumulationFunction& investment) {
    BalanceTrajectory out{{}, deposit, investment};
    const auto flows = f.flows();
    if (flows.empty()) return out;
    out.events.reserve(flows.size());
    out.events.push_back({flows[0].t, flows[0].amount, Branch::Boundary});
    for (std::size_t j = 1; j < flows.size(); ++j) {
        const auto& prev = out.events.back();
        const Step step = advance(prev.balance, prev.t, flows[j].t, flows[j].amount, deposit, investment);
        out.events.push_back({flows[j].t, step.balance, step.branch});
    }
    return out;
}

double balance_at(const StepStream& f, const AccumulationFunction& deposit, const AccumulationFunction& investment,
                  double t) {
    const auto flows = f.flows();
    if (flows.empty() || t < flows.front().t - kTimeTol) return 0.0;
    double balance = flows.front().amount;
    double at = flows.front().t;
    for (std::size_t j = 1; j < flows.size() && flows[j].t <= t + kTimeTol; ++j) {
        balance = advance(balance, at, flows[j].t, flows[j].amount, deposit, investment).balance;
        at = flows[j].t;
    }
    if (t - at > kTimeTol) balance = advance(balance, at, t, 0.0, deposit, investment).balance;
    return balance;
}

StepStream update_map(const StepStream& f, const AccumulationFunction& deposit,
                      const AccumulationFunction& investment, double s) {
    if (f.empty() || s < f.flows().front().t - kTimeTol) {
        throw std::invalid_argument(fmt::format("update time {} precedes the first cash flow", s));
    }
    std::vector<CashFlow> flows{{s, balance_at(f, deposit, investment, s)}};
    for (const auto& cf : f.flows()) {
        if (cf.t > s + kTimeTol) flows.push_back(cf);
    }
    return StepStream::on_partition(std::move(flows));
}

double linear_balance(const StepStream& f, const AccumulationFunction& a, double t) {
    double total = 0.0;
    for (const auto& cf : f.flows()) {
        if (cf.t > t + kTimeTol) break;
        total += cf.amount * a(cf.t, std::max(cf.t, t));
    }
    return total;
}

double approximant_balance(const RegulatedStream& f, double mesh_eps, const AccumulationFunction& deposit,
                           const AccumulationFunction& investment, double t, std::size_t max_cells) {
    StepFactor grow(deposit);
    StepFactor owe(investment);
    auto advance_by = [&](double balance, double s, double u, double width, double flow) {
        if (balance > 0.0) return grow(s, u, width) * balance + flow;
        if (balance < 0.0) return owe(s, u, width) * balance + flow;
        return flow;
    };
    bool started = false;
    double balance = 0.0;
    double at = 0.0;
    for_each_approximant_flow(f, mesh_eps, max_cells, [&](double s, double amount, double width) {
        if (s > t + kTimeTol) return;
        if (started) {
            balance = advance_by(balance, at, s, width, amount);
        } else {
            started = true;
            balance = amount;
        }
        at = s;
    });
    if (!started) return 0.0;
    if (t - at > kTimeTol) balance = advance_by(balance, at, t, t - at, 0.0);
    return balance;
}

AccumulationFunction common_upper_bound(const AccumulationFunction& deposit, const AccumulationFunction& investment) {
    // Monotone increasing accumulation functions are >= 1, so the product of
    // the two bounds dominates each function.
    return product(monotone_upper_bound(deposit), monotone_upper_bound(investment));
}

CertifiedBalance balance_regulated(const RegulatedStream& f, const AccumulationFunction& deposit,
                                   const AccumulationFunction& investment, double t, double tol,
                                   std::size_t max_cells) {
    if (!(tol > 0.0) || !std::isfinite(tol)) {
        throw std::invalid_argument(fmt::format("balance tolerance must be > 0 (got {})", tol));
    }
    const auto support = minimal_support(f);
    if (!support || t < support->lo) return {0.0, 0.0, 0.0};

    const double y = common_upper_bound(deposit, investment)(support->lo, t);
    if (!std::isfinite(y) || !(y > 0.0)) {
        throw std::domain_error(fmt::format("upper bound y(t0, t) = {} is not finite", y));
    }
    const double eps = tol / (2.0 * y);
    const double mesh_eps = 0.5 * eps;
    return {approximant_balance(f, mesh_eps, deposit, investment, t, max_cells), 2.0 * y * mesh_eps, mesh_eps};
}

}  // namespace tworate
