#include "tworate/testkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "tworate/balance.hpp"

namespace tworate::testkit {

namespace {

constexpr double kSlack = 1e-9;

// Accumulates margins into a report.
class Tally {
public:
    explicit Tally(PropertyReport& report) : report_(report) {}

    // lhs <= rhs up to kSlack * (1 + scale).
    void le(double lhs, double rhs, double scale) { record(rhs + kSlack * (1.0 + scale) - lhs); }
    // |lhs - rhs| <= rel * (1 + scale).
    void near(double lhs, double rhs, double rel, double scale) {
        record(rel * (1.0 + scale) - std::abs(lhs - rhs));
    }
    // Exact equalities count violations but do not enter worst_margin.
    void exact(double lhs, double rhs) {
        if (lhs != rhs) record(-std::abs(lhs - rhs));
    }

private:
    void record(double margin) {
        if (!(margin >= 0.0)) ++report_.violations;
        report_.worst_margin = std::min(report_.worst_margin, margin);
    }
    PropertyReport& report_;
};

PropertyReport start(const char* name, std::size_t trials, std::uint64_t seed) {
    if (trials == 0) throw std::invalid_argument("trials must be > 0");
    PropertyReport r;
    r.name = name;
    r.trials = trials;
    r.seed = seed;
    r.worst_margin = std::numeric_limits<double>::infinity();
    return r;
}

// Bound on the size of any balance of f up to t: sum |C_k| y(t_0, t).
double magnitude(const StepStream& f, const AccumulationFunction& y, double t) {
    if (f.empty()) return 0.0;
    double total = 0.0;
    for (const auto& cf : f.flows()) total += std::abs(cf.amount);
    return total * y(f.flows().front().t, std::max(t, f.flows().front().t));
}

std::vector<double> balances(const StepStream& f, const AccumulationFunction& a, const AccumulationFunction& b) {
    std::vector<double> out;
    for (const auto& e : trm_trajectory(f, a, b).events) out.push_back(e.balance);
    return out;
}

StepStream scaled(const StepStream& f, double lambda) {
    std::vector<CashFlow> flows(f.flows().begin(), f.flows().end());
    for (auto& cf : flows) cf.amount *= lambda;
    return StepStream::on_partition(std::move(flows));
}

StepStream difference_on_partition(const StepStream& c, const StepStream& d) {
    std::vector<CashFlow> flows;
    for (std::size_t k = 0; k < c.size(); ++k) flows.push_back({c.flows()[k].t, c.flows()[k].amount - d.flows()[k].amount});
    return StepStream::on_partition(std::move(flows));
}

}  // namespace

std::string PropertyReport::csv_line() const {
    return fmt::format("{},{},{},{:.6g},{}", name, trials, violations, worst_margin, seed);
}

// ---------------------------------------------------------------------------
// RandomCorpus

std::vector<double> RandomCorpus::event_times(int count, double horizon) {
    std::vector<double> times;
    while (static_cast<int>(times.size()) < count) {
        const double t = std::round(uniform(0.0, horizon) * 1e6) / 1e6;
        if (std::none_of(times.begin(), times.end(), [t](double s) { return std::abs(s - t) < 1e-6; })) {
            times.push_back(t);
        }
    }
    std::sort(times.begin(), times.end());
    return times;
}

StepStream RandomCorpus::step_stream(int max_flows) {
    std::vector<CashFlow> flows;
    for (double t : event_times(uniform_int(1, max_flows))) flows.push_back({t, uniform(-1000.0, 1000.0)});
    return StepStream::from_cashflows(std::move(flows));
}

StepStream RandomCorpus::step_stream_on(const StepStream& like) {
    std::vector<CashFlow> flows;
    for (const auto& cf : like.flows()) {
        const int mode = uniform_int(0, 2);
        const double amount = mode == 0 ? cf.amount : mode == 1 ? cf.amount + uniform(-10.0, 10.0)
                                                                : uniform(-1000.0, 1000.0);
        flows.push_back({cf.t, amount});
    }
    return StepStream::on_partition(std::move(flows));
}

StepStream RandomCorpus::step_project(int max_flows) {
    std::vector<CashFlow> flows;
    const auto times = event_times(uniform_int(1, max_flows));
    for (std::size_t k = 0; k < times.size(); ++k) {
        flows.push_back({times[k], k == 0 ? -uniform(1.0, 1000.0) : uniform(-1000.0, 1000.0)});
    }
    return StepStream::from_cashflows(std::move(flows));
}

RegulatedStream RandomCorpus::regulated_stream(double horizon) {
    const int pieces = uniform_int(1, 3);
    const double end = horizon * uniform(0.3, 1.0);
    std::vector<double> knots{0.0};
    for (double t : event_times(pieces - 1, end)) {
        if (t > knots.back() + 1e-3 && t < end - 1e-3) knots.push_back(t);
    }
    knots.push_back(end);
    std::vector<StreamSegment> segs;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        const double len = knots[k + 1] - knots[k];
        std::vector<double> c{uniform(-100.0, 100.0)};
        const int degree = uniform_int(0, 2);
        if (degree >= 1) c.push_back(uniform(-100.0, 100.0) / len);
        if (degree >= 2) c.push_back(uniform(-100.0, 100.0) / (len * len));
        segs.push_back({knots[k], knots[k + 1], Polynomial(std::move(c))});
    }
    return RegulatedStream(std::move(segs));
}

RegulatedStream RandomCorpus::regulated_project(double horizon) {
    const double end = horizon * uniform(0.5, 1.0);
    const double split = end * uniform(0.2, 0.6);
    std::vector<StreamSegment> segs;
    // Start-up phase: negative start, or zero start with a negative slope.
    std::vector<double> head = coin() ? std::vector<double>{-uniform(1.0, 100.0), -uniform(0.0, 200.0)}
                                      : std::vector<double>{0.0, -uniform(10.0, 300.0)};
    const Polynomial first(head);
    segs.push_back({0.0, split, first});
    // Returns phase: rising from the level reached (plus a jump).
    const double level = first(split) + uniform(-20.0, 50.0);
    const double len = end - split;
    segs.push_back({split, end, Polynomial{level, uniform(100.0, 600.0) / len, uniform(-50.0, 50.0) / (len * len)}});
    return RegulatedStream(std::move(segs));
}

AccumulationFunction RandomCorpus::simple_accumulation(bool allow_zero) {
    switch (uniform_int(0, 2)) {
    case 0:
        if (allow_zero && coin(0.05)) return make_constant_rate(-1.0);
        return make_constant_rate(uniform(-0.3, 0.3));
    case 1:
        if (allow_zero && coin(0.1)) return make_power(0.0);
        return make_power(uniform(0.6, 1.4));
    default: {
        std::vector<ForceSegment> segs;
        const int pieces = uniform_int(1, 3);
        double from = 0.0;
        for (int k = 0; k < pieces; ++k) {
            const double to = k + 1 == pieces ? 10.0 : from + uniform(0.5, (10.0 - from) / 2.0);
            const double len = to - from;
            std::vector<double> c{uniform(-0.15, 0.15)};
            if (coin()) c.push_back(uniform(-0.1, 0.1) / len);
            if (coin(0.3)) c.push_back(uniform(-0.1, 0.1) / (len * len));
            segs.push_back({from, to, Polynomial(std::move(c))});
            from = to;
        }
        return make_force_of_interest(std::move(segs));
    }
    }
}

AccumulationFunction RandomCorpus::accumulation() {
    if (coin(0.2)) return product(simple_accumulation(true), simple_accumulation(true));
    return simple_accumulation(true);
}

AccumulationFunction RandomCorpus::positive_accumulation() {
    if (coin(0.2)) return product(simple_accumulation(false), simple_accumulation(false));
    return simple_accumulation(false);
}

// ---------------------------------------------------------------------------
// Suites

PropertyReport axiom_suite(std::size_t trials, std::uint64_t seed) {
    PropertyReport report = start("axioms", trials, seed);
    Tally tally(report);
    RandomCorpus rnd(seed);

    // The zero stream has zero balance.
    const StepStream zero;
    for (double t : {-1.0, 0.0, 3.5}) tally.exact(balance_at(zero, make_power(1.1), make_power(0.9), t), 0.0);

    for (std::size_t trial = 0; trial < trials; ++trial) {
        const StepStream f = rnd.step_stream();
        const auto a = rnd.accumulation();
        const auto b = rnd.accumulation();
        const auto y = common_upper_bound(a, b);
        const auto flows = f.flows();
        const double scale = magnitude(f, y, 11.0);

        // Flows added after r do not change B_r.
        {
            const double r = rnd.uniform(-1.0, 10.0);
            const double u = r + rnd.uniform(1e-6, 2.0);
            const StepStream g = combine(f, StepStream::from_cashflows({{u, rnd.uniform(-1000.0, 1000.0)}}), 1.0, 1.0);
            tally.exact(balance_at(g, a, b, r), balance_at(f, a, b, r));
        }
        // Linearity in the final cash flow.
        {
            const double t = rnd.coin() ? flows[static_cast<std::size_t>(rnd.uniform_int(0, static_cast<int>(f.size()) - 1))].t
                                        : rnd.uniform(0.0, 11.0);
            const double lambda = rnd.uniform(-1000.0, 1000.0);
            const StepStream g = combine(f, StepStream::from_cashflows({{t, lambda}}), 1.0, 1.0);
            tally.near(balance_at(g, a, b, t), balance_at(f, a, b, t) + lambda, 1e-12, scale + std::abs(lambda));
        }
        // Scale: positive homogeneity, and B(uf) = -u B(-f) for u <= 0.
        {
            const double lambda = rnd.uniform(0.0, 5.0);
            const double u = -rnd.uniform(0.0, 5.0);
            const auto base = balances(f, a, b);
            const auto up = balances(scaled(f, lambda), a, b);
            const auto neg = balances(scaled(f, -1.0), a, b);
            const auto down = balances(scaled(f, u), a, b);
            for (std::size_t j = 0; j < base.size(); ++j) {
                tally.near(up[j], lambda * base[j], kSlack, lambda * scale);
                tally.near(down[j], -u * neg[j], kSlack, -u * scale);
            }
            for (std::size_t k = 0; k < flows.size(); ++k) {
                // single cash flows keep their sign
                const StepStream unit = StepStream::from_cashflows({{flows[k].t, 1.0}});
                const StepStream debit = StepStream::from_cashflows({{flows[k].t, -1.0}});
                tally.le(0.0, balance_at(unit, a, b, 10.5), 0.0);
                tally.le(balance_at(debit, a, b, 10.5), 0.0, 0.0);
            }
        }
        // Replacement at every pair of event times s <= t.
        for (std::size_t s = 0; s < flows.size(); ++s) {
            const StepStream updated = update_map(f, a, b, flows[s].t);
            for (std::size_t t = s; t < flows.size(); ++t) {
                tally.near(balance_at(updated, a, b, flows[t].t), balance_at(f, a, b, flows[t].t), 1e-10, scale);
            }
        }
        // Continuity: step approximants converge at the certified rate.
        {
            const RegulatedStream g = rnd.regulated_stream();
            const auto support = minimal_support(g);
            if (!support) continue;
            const double eps = rnd.uniform(1.0, 5.0);
            const StepStream coarse = approximate(g, eps);
            const StepStream fine = approximate(g, eps / 8.0);
            const double t = rnd.uniform(support->lo, support->hi + 0.5);
            const double y_t = y(support->lo, t);
            const double gap = sup_norm(combine(coarse, fine, 1.0, -1.0));
            const double gscale = 1000.0 * y_t;
            tally.le(gap, eps + eps / 8.0, 0.0);
            tally.le(std::abs(balance_at(coarse, a, b, t) - balance_at(fine, a, b, t)), 2.0 * y_t * gap, gscale);
            const auto limit = balance_regulated(g, a, b, t, 0.25 * y_t * eps);
            tally.le(std::abs(balance_at(coarse, a, b, t) - limit.value), 2.0 * y_t * eps + limit.error_bound, gscale);
        }
    }
    return report;
}

PropertyReport sandwich_suite(std::size_t trials, std::uint64_t seed) {
    PropertyReport report = start("sandwich", trials, seed);
    Tally tally(report);
    RandomCorpus rnd(seed);
    const auto zero = make_power(0.0);

    for (std::size_t trial = 0; trial < trials; ++trial) {
        const StepStream c = rnd.step_stream();
        const StepStream d = rnd.step_stream_on(c);
        const auto a = rnd.accumulation();
        const auto b = rnd.accumulation();
        const auto y = common_upper_bound(a, b);
        const double scale = magnitude(c, y, 10.0) + magnitude(d, y, 10.0);

        // B(0,y) <= B(a,b) <= B(y,0)
        const auto mid = balances(c, a, b);
        const auto low = balances(c, zero, y);
        const auto high = balances(c, y, zero);
        for (std::size_t j = 0; j < mid.size(); ++j) {
            tally.le(low[j], mid[j], scale);
            tally.le(mid[j], high[j], scale);
        }

        // Larger deposit raises, larger investment lowers: a <= a * x1, b <= b * x2 for x1, x2 >= 1.
        const auto bigger_a = product(a, make_power(rnd.uniform(1.0, 1.5)));
        const auto bigger_b = product(b, make_power(rnd.uniform(1.0, 1.5)));
        const auto up_deposit = balances(c, bigger_a, b);
        const auto up_invest = balances(c, a, bigger_b);
        const double wide = scale * std::pow(1.5, 10.0);
        for (std::size_t j = 0; j < mid.size(); ++j) {
            tally.le(mid[j], up_deposit[j], wide);
            tally.le(up_invest[j], mid[j], wide);
        }

        // Difference sandwich on the common partition.
        const StepStream diff = difference_on_partition(c, d);
        const auto bc = balances(c, a, b);
        const auto bd = balances(d, a, b);
        const auto dlow = balances(diff, zero, y);
        const auto dhigh = balances(diff, y, zero);
        for (std::size_t j = 0; j < bc.size(); ++j) {
            tally.le(dlow[j], bc[j] - bd[j], scale);
            tally.le(bc[j] - bd[j], dhigh[j], scale);
        }
    }
    return report;
}

PropertyReport difference_bound_suite(std::size_t trials, std::uint64_t seed) {
    PropertyReport report = start("difference_bound", trials, seed);
    Tally tally(report);
    RandomCorpus rnd(seed);

    for (std::size_t trial = 0; trial < trials; ++trial) {
        const StepStream c = rnd.step_stream();
        const StepStream d = rnd.step_stream_on(c);
        const auto a = rnd.accumulation();
        const auto b = rnd.accumulation();
        const auto y = common_upper_bound(a, b);
        const double norm = sup_norm(difference_on_partition(c, d));
        const double scale = magnitude(c, y, 10.0) + magnitude(d, y, 10.0);
        const auto bc = balances(c, a, b);
        const auto bd = balances(d, a, b);
        const double t0 = c.flows().front().t;
        for (std::size_t j = 0; j < bc.size(); ++j) {
            tally.le(std::abs(bc[j] - bd[j]), 2.0 * y(t0, c.flows()[j].t) * norm, scale);
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Oracles

double reference_balance(std::span<const CashFlow> flows, const AccumulationFunction& a, double x, double t) {
    if (flows.empty() || t < flows.front().t) return 0.0;
    double balance = 0.0;
    double last = flows.front().t;
    auto carry = [&](double to) {
        if (to == last) return;
        if (balance > 0.0) {
            balance *= a(last, to);
        } else if (balance < 0.0) {
            balance *= x == 0.0 ? 0.0 : std::pow(x, to - last);
        }
        last = to;
    };
    for (const auto& cf : flows) {
        if (cf.t > t) break;
        carry(cf.t);
        balance += cf.amount;
    }
    carry(t);
    return balance;
}

double grid_root_oracle(const Stream& f, const AccumulationFunction& a, double x_max, double step,
                        double regulated_eps) {
    if (!(step > 0.0) || !(x_max > 0.0)) throw std::invalid_argument("grid step and x_max must be > 0");
    const auto support = minimal_support(f);
    if (!support) throw std::invalid_argument("zero stream has no IRR");
    StepStream flows_holder;
    if (const auto* s = std::get_if<StepStream>(&f)) {
        flows_holder = *s;
    } else {
        flows_holder = approximate(std::get<RegulatedStream>(f), regulated_eps);
    }
    const auto flows = flows_holder.flows();
    const double d = support->hi;

    const auto cells = static_cast<std::size_t>(std::floor(x_max / step + 1e-9));
    bool positive = reference_balance(flows, a, 0.0, d) > 0.0;
    if (!positive) {
        for (std::size_t k = 1; k <= cells; ++k) {
            if (reference_balance(flows, a, static_cast<double>(k) * step, d) > 0.0) {
                throw OracleFailure(fmt::format("balance turns positive again at x = {}", static_cast<double>(k) * step));
            }
        }
        return 0.0;
    }
    std::optional<double> root;
    for (std::size_t k = 1; k <= cells; ++k) {
        const double x = static_cast<double>(k) * step;
        const bool now = reference_balance(flows, a, x, d) > 0.0;
        if (now == positive) continue;
        if (now || root) throw OracleFailure(fmt::format("second sign change of the terminal balance at x = {}", x));
        root = x - 0.5 * step;
        positive = now;
    }
    if (!root) throw OracleFailure(fmt::format("terminal balance still positive at x_max = {}", x_max));
    return *root;
}

bool abel_bound_oracle(std::span<const double> coeffs, std::span<const double> inputs) {
    if (coeffs.size() != inputs.size() || coeffs.empty()) {
        throw std::invalid_argument("coefficients and inputs must be non-empty and of equal length");
    }
    std::vector<double> partial(inputs.size());
    double run = 0.0;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        run += inputs[k];
        partial[k] = run;
        if (coeffs[k] < 0.0 || (k > 0 && coeffs[k] > coeffs[k - 1])) {
            throw std::invalid_argument("coefficients must be non-increasing and nonnegative");
        }
        if (partial[k] > 0.0 || (k > 0 && partial[k] > partial[k - 1])) {
            throw std::invalid_argument("partial sums must be non-increasing and <= 0");
        }
    }
    double total = 0.0;
    double scale = 0.0;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        total += coeffs[k] * inputs[k];
        scale += std::abs(coeffs[k] * inputs[k]);
    }
    const double slack = 1e-12 * (1.0 + scale);
    for (std::size_t m = 0; m < inputs.size(); ++m) {
        const double bound = coeffs[m] * partial[m];
        if (total > bound + slack || bound > slack) return false;
    }
    return true;
}

}  // namespace tworate::testkit
