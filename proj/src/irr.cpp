#include "tworate/irr.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace tworate {

namespace {

constexpr double kMaxBracket = 18446744073709551616.0;  // 2^64

void require_factor(double x) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument(fmt::format("x must be nonnegative (got {})", x));
}

SupportInterval require_project(const Stream& f, const AccumulationFunction& deposit, double root_tol) {
    if (!(root_tol > 0.0)) throw std::invalid_argument(fmt::format("root tolerance must be > 0 (got {})", root_tol));
    if (!deposit.is_positive()) throw std::invalid_argument("the deposit accumulation function must be positive");
    if (!is_investment_project(f)) {
        throw std::invalid_argument("stream is not an investment project; strict decrease in x is not guaranteed");
    }
    return *minimal_support(f);
}

IrrResult solve_step(const StepStream& f, const AccumulationFunction& deposit, double d, double root_tol) {
    auto terminal = [&](double x) { return balance_at(f, deposit, make_power(x), d); };
    if (terminal(0.0) <= 0.0) return {0.0, -1.0, 0.0, 0.0, 0.0, 0.0};

    double lo = 0.0;
    double hi = 1.0;
    while (terminal(hi) >= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > kMaxBracket) throw std::domain_error("terminal balance stays nonnegative up to x = 2^64");
    }
    while (hi - lo > root_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (terminal(mid) >= 0.0 ? lo : hi) = mid;
    }
    const double nu = 0.5 * (lo + hi);
    return {nu, nu - 1.0, lo, hi, std::abs(terminal(nu)), 0.0};
}

// Regulated project: one approximant mesh per bracket. The Cauchy bound uses
// y(x) = upper(a)(c,d) * max(x,1)^(d-c), which grows with x, so the
// approximant built for x_hi certifies every x in [0, x_hi].
class RegulatedSolver {
public:
    RegulatedSolver(const RegulatedStream& f, const AccumulationFunction& deposit, SupportInterval support,
                    double tol)
        : f_(f), deposit_(deposit), support_(support), tol_(tol),
          upper_deposit_(monotone_upper_bound(deposit)(support.lo, support.hi)) {
        if (!(tol > 0.0)) throw std::invalid_argument(fmt::format("balance tolerance must be > 0 (got {})", tol));
    }

    double y(double x) const {
        return upper_deposit_ * std::pow(std::max(x, 1.0), support_.hi - support_.lo);
    }

    void prepare(double x_cap) {
        if (x_cap <= built_for_ && built_for_ > 0.0) return;
        const double y_cap = y(x_cap);
        if (!std::isfinite(y_cap)) throw std::domain_error("upper bound y overflows; the project horizon is too long");
        mesh_ = 0.25 * tol_ / y_cap;
        built_for_ = std::max(x_cap, 1.0);
        spdlog::debug("regulated irr: approximant for x <= {} has {} flows (mesh eps {})", built_for_,
                      approximation_cells(f_, mesh_), mesh_);
    }

    double value(double x) const { return approximant_balance(f_, mesh_, deposit_, make_power(x), support_.hi); }
    double error(double x) const { return 2.0 * y(x) * mesh_; }

    bool certified_nonnegative(double x) const { return value(x) - error(x) >= 0.0; }
    bool certified_negative(double x) const { return value(x) + error(x) < 0.0; }

    IrrResult solve(double root_tol) {
        prepare(1.0);
        if (value(0.0) + error(0.0) <= 0.0) return {0.0, -1.0, 0.0, 0.0, 0.0, 0.0};

        double lo = 0.0;
        double hi = 1.0;
        while (true) {
            prepare(hi);
            if (certified_negative(hi)) break;
            if (certified_nonnegative(hi)) lo = hi;
            hi *= 2.0;
            if (hi > kMaxBracket) throw std::domain_error("terminal balance stays nonnegative up to x = 2^64");
        }

        // Plain bisection while signs are certified.
        double uncertain = -1.0;
        while (hi - lo > root_tol) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (certified_nonnegative(mid)) {
                lo = mid;
            } else if (certified_negative(mid)) {
                hi = mid;
            } else {
                uncertain = mid;
                break;
            }
        }
        // The root lies in the uncertain zone around `uncertain`; tighten both
        // certified ends toward it.
        if (uncertain >= 0.0) {
            double a = lo, b = uncertain;
            while (b - a > root_tol && 0.5 * (a + b) > a && 0.5 * (a + b) < b) {
                const double c = 0.5 * (a + b);
                (certified_nonnegative(c) ? a : b) = c;
            }
            lo = a;
            a = uncertain;
            b = hi;
            while (b - a > root_tol && 0.5 * (a + b) > a && 0.5 * (a + b) < b) {
                const double c = 0.5 * (a + b);
                (certified_negative(c) ? b : a) = c;
            }
            hi = b;
        }
        const double nu = 0.5 * (lo + hi);
        return {nu, nu - 1.0, lo, hi, std::abs(value(nu)), error(nu)};
    }

private:
    const RegulatedStream& f_;
    const AccumulationFunction& deposit_;
    SupportInterval support_;
    double tol_;
    double upper_deposit_;
    double built_for_ = 0.0;
    double mesh_ = 0.0;
};

}  // namespace

CertifiedBalance certified_balance_vs_x(const Stream& f, const AccumulationFunction& deposit, double t, double x,
                                        double tol) {
    require_factor(x);
    if (const auto* step = std::get_if<StepStream>(&f)) {
        return {balance_at(*step, deposit, make_power(x), t), 0.0, 0.0};
    }
    return balance_regulated(std::get<RegulatedStream>(f), deposit, make_power(x), t, tol);
}

double balance_vs_x(const Stream& f, const AccumulationFunction& deposit, double t, double x, double tol) {
    return certified_balance_vs_x(f, deposit, t, x, tol).value;
}

IrrResult irr_of(const Stream& f, const AccumulationFunction& deposit, double root_tol, double tol) {
    const SupportInterval support = require_project(f, deposit, root_tol);
    if (const auto* step = std::get_if<StepStream>(&f)) return solve_step(*step, deposit, support.hi, root_tol);
    RegulatedSolver solver(std::get<RegulatedStream>(f), deposit, support, tol);
    return solver.solve(root_tol);
}

double nu_measure(const Stream& f, const AccumulationFunction& deposit, double root_tol, double tol) {
    return irr_of(f, deposit, root_tol, tol).nu;
}

std::vector<double> classical_irr(const StepStream& f, double root_tol, double i_max) {
    if (!(root_tol > 0.0)) throw std::invalid_argument(fmt::format("root tolerance must be > 0 (got {})", root_tol));
    if (!(i_max > -1.0)) throw std::invalid_argument(fmt::format("i_max must exceed -1 (got {})", i_max));
    const auto flows = f.flows();
    bool has_positive = false, has_negative = false;
    for (const auto& cf : flows) {
        has_positive |= cf.amount > 0.0;
        has_negative |= cf.amount < 0.0;
    }
    if (!has_positive || !has_negative) {
        throw std::invalid_argument("cash flows never change sign; NPV has no root");
    }

    // Sign of NPV(i) equals the sign of the future value at the last flow
    // time, which stays finite as 1+i -> 0.
    const double horizon = flows.back().t;
    auto future_value = [&](double u) {
        double acc = 0.0;
        for (const auto& cf : flows) acc += cf.amount * std::pow(u, horizon - cf.t);
        return acc;
    };

    constexpr int kGrid = 20000;
    const double log_lo = std::log(1e-6);
    const double log_hi = std::log1p(i_max);
    std::vector<double> roots;
    double u_prev = std::exp(log_lo);
    double v_prev = future_value(u_prev);
    if (v_prev == 0.0) roots.push_back(u_prev - 1.0);
    for (int k = 1; k <= kGrid; ++k) {
        const double u = k == kGrid ? 1.0 + i_max : std::exp(log_lo + (log_hi - log_lo) * k / kGrid);
        const double v = future_value(u);
        if (v == 0.0) {
            roots.push_back(u - 1.0);
        } else if (v_prev != 0.0 && (v < 0.0) != (v_prev < 0.0)) {
            double a = u_prev, b = u;
            const bool a_negative = v_prev < 0.0;
            while (b - a > root_tol) {
                const double m = 0.5 * (a + b);
                if (m <= a || m >= b) break;
                const double vm = future_value(m);
                if (vm == 0.0) {
                    a = b = m;
                    break;
                }
                ((vm < 0.0) == a_negative ? a : b) = m;
            }
            roots.push_back(0.5 * (a + b) - 1.0);
        }
        u_prev = u;
        v_prev = v;
    }
    return roots;
}

}  // namespace tworate
