// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "tworate/balance.hpp"
#include "tworate/irr.hpp"
#include "tworate/testkit.hpp"

using namespace tworate;
using namespace tworate::testkit;

namespace {

// Pinned tolerances.
constexpr double kLoanTol = 1e-6;
constexpr double kLoanRootTol = 1e-8;
constexpr double kLoanSeconds = 1.0;
constexpr double kRootTol = 1e-6;
constexpr double kIntegralTol = 1e-4;
constexpr std::size_t kSuiteTrials = 1000;
constexpr double kAxiomSeconds = 10.0;
constexpr double kScaleRootTol = 1e-10;
constexpr double kOracleStep = 1e-4;
constexpr double kOracleAgreement = 2e-4;
constexpr double kOracleXMax = 10.0;
constexpr double kRobustFinalDiff = 1e-3;

constexpr std::uint64_t kSeed = 42;

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// A random step project with at least two flows and nu below x_max.
StepStream bounded_project(RandomCorpus& rnd, const AccumulationFunction& a, double x_max, int& resampled) {
    for (;;) {
        const StepStream f = rnd.step_project();
        if (f.size() >= 2 && balance_vs_x(f, a, f.flows().back().t, x_max) < 0.0) return f;
        ++resampled;
    }
}

Outcome loan_irr() {
    const auto start = std::chrono::steady_clock::now();
    const auto f = StepStream::from_cashflows({{0.0, -100.0}, {2.0, 121.0}});
    const double irr = irr_of(f, make_constant_rate(0.05), kLoanRootTol).irr;
    const auto roots = classical_irr(f, kLoanRootTol);
    const double elapsed = seconds_since(start);
    const bool ok = std::abs(irr - 0.10) <= kLoanTol && roots.size() == 1 && std::abs(roots[0] - 0.10) <= kLoanTol &&
                    elapsed < kLoanSeconds;
    return {ok, fmt::format("irr={:.12g} classical={} runtime={:.3f}s", irr,
                            roots.empty() ? std::string("none") : fmt::format("{:.12g}", roots[0]), elapsed)};
}

Outcome multiple_roots() {
    const auto f = StepStream::from_cashflows({{0.0, -100.0}, {1.0, 230.0}, {2.0, -132.0}});
    const auto roots = classical_irr(f, 1e-12);
    const double at10 = irr_of(f, make_constant_rate(0.10), 1e-10).irr;
    const double at20 = irr_of(f, make_constant_rate(0.20), 1e-10).irr;
    const bool classical_ok = roots.size() == 2 && std::abs(roots[0] - 0.10) <= kRootTol &&
                              std::abs(roots[1] - 0.20) <= kRootTol;
    const bool ok = classical_ok && std::abs(at10 - 0.10) <= kRootTol && std::abs(at20 - 0.20) <= kRootTol;
    std::string listed;
    for (double r : roots) listed += fmt::format("{}{:.10g}", listed.empty() ? "" : " ", r);
    return {ok, fmt::format("classical=[{}] irr(10%)={:.10g} irr(20%)={:.10g}", listed, at10, at20)};
}

Outcome linear_integral() {
    const auto a = make_force_of_interest({{0.0, 10.0, Polynomial{std::log(1.05)}}});
    const RegulatedStream f({{0.0, 1.0, Polynomial{0.0, 1.0}}});
    const auto cb = balance_regulated(f, a, a, 1.0, kIntegralTol);
    const double exact = 0.05 / std::log(1.05);
    const double err = std::abs(cb.value - exact);
    return {err <= kIntegralTol && cb.error_bound <= kIntegralTol,
            fmt::format("value={:.10g} exact={:.10g} |err|={:.3g} error_bound={:.3g}", cb.value, exact, err, cb.error_bound)};
}

Outcome suite(const std::function<PropertyReport()>& run, double max_seconds) {
    const auto start = std::chrono::steady_clock::now();
    const auto report = run();
    const double elapsed = seconds_since(start);
    return {report.passed() && elapsed < max_seconds, fmt::format("{} runtime={:.2f}s", report.csv_line(), elapsed)};
}

Outcome strict_decrease() {
    RandomCorpus rnd(kSeed + 7);
    std::size_t checked = 0, failures = 0, resampled_total = 0;
    double worst_step = INFINITY, worst_reg = INFINITY;
    auto grid = [&rnd](int n, double hi) {
        std::vector<double> xs{0.0};
        for (int k = 0; k < n; ++k) xs.push_back(rnd.uniform(0.0, hi));
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        return xs;
    };

    for (int p = 0; p < 100; ++p) {
        const auto a = rnd.positive_accumulation();
        int resampled = 0;
        const StepStream f = bounded_project(rnd, a, 50.0, resampled);
        resampled_total += static_cast<std::size_t>(resampled);
        const double d = minimal_support(f)->hi;
        const auto xs = grid(8, 3.0);
        for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
            const double lo = balance_vs_x(f, a, d, xs[k]);
            const double hi = balance_vs_x(f, a, d, xs[k + 1]);
            ++checked;
            worst_step = std::min(worst_step, lo - hi);
            if (!(hi < lo)) ++failures;
        }
    }

    // Regulated: certify each comparison, refining until the margin exceeds
    // the combined error bound.
    for (int p = 0; p < 20; ++p) {
        const auto a = rnd.positive_accumulation();
        const Stream f = rnd.regulated_project();
        const double d = minimal_support(f)->hi;
        const auto xs = grid(5, 3.0);
        for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
            ++checked;
            bool certified = false;
            for (double tol = 1.0; tol >= 1e-4 && !certified; tol /= 8.0) {
                const auto lo = certified_balance_vs_x(f, a, d, xs[k], tol);
                const auto hi = certified_balance_vs_x(f, a, d, xs[k + 1], tol);
                const double margin = (lo.value - hi.value) - (lo.error_bound + hi.error_bound);
                if (margin > 0.0) {
                    certified = true;
                    worst_reg = std::min(worst_reg, margin);
                }
            }
            if (!certified) ++failures;
        }
    }
    return {failures == 0,
            fmt::format("comparisons={} failures={} worst_step_gap={:.3g} worst_certified_margin={:.3g} resampled={}",
                        checked, failures, worst_step, worst_reg, resampled_total)};
}

Outcome scale_invariance() {
    RandomCorpus rnd(kSeed + 8);
    double worst = 0.0;
    int resampled = 0;
    for (int p = 0; p < 50; ++p) {
        const auto a = rnd.positive_accumulation();
        const StepStream f = bounded_project(rnd, a, 1e3, resampled);
        const double base = irr_of(f, a, kScaleRootTol).irr;
        for (double lambda : {0.5, 3.0, 1000.0}) {
            const double scaled = irr_of(combine(f, StepStream{}, lambda, 0.0), a, kScaleRootTol).irr;
            worst = std::max(worst, std::abs(scaled - base));
        }
    }
    return {worst <= 2.0 * kScaleRootTol, fmt::format("max|delta irr|={:.3g} bound={:.3g} resampled={}", worst,
                                                      2.0 * kScaleRootTol, resampled)};
}

Outcome oracle_equivalence() {
    RandomCorpus rnd(kSeed + 9);
    double worst = 0.0;
    int resampled = 0;
    std::size_t oracle_failures = 0;
    for (int p = 0; p < 100; ++p) {
        const auto a = rnd.positive_accumulation();
        const StepStream f = bounded_project(rnd, a, kOracleXMax, resampled);
        const double nu = nu_measure(f, a, 1e-10);
        try {
            worst = std::max(worst, std::abs(nu - grid_root_oracle(f, a, kOracleXMax, kOracleStep)));
        } catch (const OracleFailure&) {
            ++oracle_failures;
        }
    }
    return {oracle_failures == 0 && worst <= kOracleAgreement,
            fmt::format("max|nu - grid|={:.3g} oracle_failures={} resampled={}", worst, oracle_failures, resampled)};
}

Outcome approximation_robustness() {
    // f' = -300 on [0,0.5), +800 on [0.5,1)
    const RegulatedStream f({{0.0, 0.5, Polynomial{0.0, -300.0}}, {0.5, 1.0, Polynomial{-150.0, 800.0}}});
    const auto a = make_constant_rate(0.05);
    std::vector<double> irrs;
    for (double eps : {0.1, 0.05, 0.025, 0.0125}) irrs.push_back(irr_of(approximate(f, eps), a, 1e-12).irr);
    std::vector<double> diffs;
    for (std::size_t k = 1; k < irrs.size(); ++k) diffs.push_back(std::abs(irrs[k] - irrs[k - 1]));
    bool shrinking = true;
    for (std::size_t k = 1; k < diffs.size(); ++k) shrinking = shrinking && diffs[k] < diffs[k - 1];
    return {shrinking && diffs.back() < kRobustFinalDiff,
            fmt::format("irr=[{:.10g}, {:.10g}, {:.10g}, {:.10g}] diffs=[{:.3g}, {:.3g}, {:.3g}]", irrs[0], irrs[1],
                        irrs[2], irrs[3], diffs[0], diffs[1], diffs[2])};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "loan-contract IRR", loan_irr},
        {2, "multiple-root resolution", multiple_roots},
        {3, "linear-case integral", linear_integral},
        {4, "axiom suite", [] { return suite([] { return axiom_suite(kSuiteTrials, kSeed); }, kAxiomSeconds); }},
        {5, "sandwich suite", [] { return suite([] { return sandwich_suite(kSuiteTrials, kSeed); }, INFINITY); }},
        {6, "difference bound suite", [] { return suite([] { return difference_bound_suite(kSuiteTrials, kSeed); }, INFINITY); }},
        {7, "strict decrease in x", strict_decrease},
        {8, "scale invariance", scale_invariance},
        {9, "oracle equivalence", oracle_equivalence},
        {10, "approximation robustness", approximation_robustness},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, fmt::format("exception: {}", e.what())};
        }
        if (!o.pass) ++failed;
        std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
