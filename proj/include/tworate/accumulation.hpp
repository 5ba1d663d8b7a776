#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tworate/polynomial.hpp"

namespace tworate {

/// Relative tolerance for comparing accumulation factors.
inline constexpr double kFactorRelTol = 1e-12;

/// One piece of a force-of-interest density, delta(t) = poly(t - from) on
/// [from, to). The density is zero outside all segments.
struct ForceSegment {
    double from;
    double to;
    Polynomial delta;
};

/// Growth factor a(s, t) of one monetary unit held from s to t.
///
/// Four closed-form kinds are supported:
///  - constant rate i:        a(s,t) = (1+i)^(t-s),   i >= -1
///  - power x:                a(s,t) = x^(t-s),       x >= 0, with 0^0 = 1
///  - force of interest:      a(s,t) = exp(integral of delta over [s,t])
///  - product of the above:   pointwise product of the factors
///
/// Values are immutable and cheap to copy (shared representation). For
/// positive kinds, evaluation with s > t returns 1/a(t,s); the kinds that can
/// vanish (x = 0, i = -1, or products containing them) reject s > t.
class AccumulationFunction {
public:
    enum class Kind { ConstantRate, Power, Force, Product };

    static AccumulationFunction constant_rate(double i);
    static AccumulationFunction power(double x);
    static AccumulationFunction force_of_interest(std::vector<ForceSegment> segments);
    static AccumulationFunction product(std::vector<AccumulationFunction> factors);

    Kind kind() const;

    /// a(s, t).
    double operator()(double s, double t) const;
    double evaluate(double s, double t) const { return (*this)(s, t); }

    /// True when a(s,t) > 0 for all s <= t.
    bool is_positive() const;

    // Kind-specific accessors; each throws std::logic_error on the wrong kind.
    double rate() const;
    double factor() const;
    std::span<const ForceSegment> segments() const;
    std::span<const AccumulationFunction> factors() const;

    /// log a(s,t) for positive kinds; used by the force kind and products.
    double log_growth(double s, double t) const;

private:
    struct Node;
    explicit AccumulationFunction(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

AccumulationFunction make_constant_rate(double i);
AccumulationFunction make_power(double x);
AccumulationFunction make_force_of_interest(std::vector<ForceSegment> segments);
AccumulationFunction product(const AccumulationFunction& a, const AccumulationFunction& b);

/// Monotone increasing upper bound y >= a, and, when a is positive, a
/// monotone decreasing lower bound 0 < c <= a.
struct MonotoneBound {
    AccumulationFunction upper;
    std::optional<AccumulationFunction> lower;
};

/// Smallest closed-form monotone increasing accumulation function dominating
/// a: rates and factors are raised to at least 1, and a force density is
/// replaced by its absolute value (segments split at the sign changes).
AccumulationFunction monotone_upper_bound(const AccumulationFunction& a);

/// Mirror of monotone_upper_bound; empty when a can vanish.
std::optional<AccumulationFunction> monotone_lower_bound(const AccumulationFunction& a);

MonotoneBound monotone_bounds(const AccumulationFunction& a);

}  // namespace tworate
