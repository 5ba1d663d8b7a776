#include "tworate/accumulation.hpp"

#include <algorithm>
#include <cmath>
#include <variant>

#include <fmt/format.h>

namespace tworate {

namespace {

struct ConstantRate { double i; };
struct Power { double x; };
struct Force {
    std::vector<ForceSegment> segments;
    std::vector<Polynomial> integrals;  // antiderivative of each density, zero at `from`
};
struct Product { std::vector<AccumulationFunction> factors; };

// x^(t-s) with 0^0 = 1; caller guarantees s <= t when x == 0.
double power_factor(double x, double s, double t) {
    if (s == t) return 1.0;
    if (x == 0.0) return 0.0;
    return std::pow(x, t - s);
}

// Integral of delta over [s, t], s <= t, summed in closed form per segment.
double force_integral(const Force& force, double s, double t) {
    double total = 0.0;
    for (std::size_t k = 0; k < force.segments.size(); ++k) {
        const auto& seg = force.segments[k];
        if (seg.from >= t) break;
        const double lo = std::max(s, seg.from);
        const double hi = std::min(t, seg.to);
        if (hi <= lo) continue;
        const Polynomial& g = force.integrals[k];
        total += g(hi - seg.from) - g(lo - seg.from);
    }
    return total;
}

}  // namespace

struct AccumulationFunction::Node {
    std::variant<ConstantRate, Power, Force, Product> v;
};

AccumulationFunction AccumulationFunction::constant_rate(double i) {
    if (!std::isfinite(i) || i < -1.0) throw std::invalid_argument(fmt::format("rate i must be finite and >= -1 (got {})", i));
    return AccumulationFunction(std::make_shared<const Node>(Node{ConstantRate{i}}));
}

AccumulationFunction AccumulationFunction::power(double x) {
    if (!std::isfinite(x) || x < 0.0) throw std::invalid_argument(fmt::format("x must be nonnegative (got {})", x));
    return AccumulationFunction(std::make_shared<const Node>(Node{Power{x}}));
}

AccumulationFunction AccumulationFunction::force_of_interest(std::vector<ForceSegment> segments) {
    std::sort(segments.begin(), segments.end(),
              [](const ForceSegment& a, const ForceSegment& b) { return a.from < b.from; });
    for (std::size_t k = 0; k < segments.size(); ++k) {
        const auto& seg = segments[k];
        if (!std::isfinite(seg.from) || !std::isfinite(seg.to) || !(seg.from < seg.to)) {
            throw std::invalid_argument(fmt::format("force segment {} must satisfy from < to with finite bounds", k));
        }
        for (double c : seg.delta.coefficients()) {
            if (!std::isfinite(c)) throw std::invalid_argument(fmt::format("force segment {} has a non-finite coefficient", k));
        }
        if (k > 0 && seg.from < segments[k - 1].to) {
            throw std::invalid_argument(fmt::format("force segments overlap at t = {}", seg.from));
        }
    }
    std::vector<Polynomial> integrals;
    for (const auto& seg : segments) integrals.push_back(seg.delta.antiderivative());
    return AccumulationFunction(std::make_shared<const Node>(Node{Force{std::move(segments), std::move(integrals)}}));
}

AccumulationFunction AccumulationFunction::product(std::vector<AccumulationFunction> factors) {
    if (factors.empty()) return power(1.0);
    return AccumulationFunction(std::make_shared<const Node>(Node{Product{std::move(factors)}}));
}

AccumulationFunction::Kind AccumulationFunction::kind() const {
    return static_cast<Kind>(node_->v.index());
}

bool AccumulationFunction::is_positive() const {
    return std::visit(
        [](const auto& k) -> bool {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, ConstantRate>) return k.i > -1.0;
            else if constexpr (std::is_same_v<T, Power>) return k.x > 0.0;
            else if constexpr (std::is_same_v<T, Force>) return true;
            else return std::all_of(k.factors.begin(), k.factors.end(), [](const auto& f) { return f.is_positive(); });
        },
        node_->v);
}

double AccumulationFunction::operator()(double s, double t) const {
    if (s == t) return 1.0;
    if (s > t) {
        if (!is_positive()) {
            throw std::domain_error("accumulation function can vanish; a(s,t) is undefined for s > t");
        }
        return 1.0 / (*this)(t, s);
    }
    return std::visit(
        [s, t](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, ConstantRate>) return power_factor(1.0 + k.i, s, t);
            else if constexpr (std::is_same_v<T, Power>) return power_factor(k.x, s, t);
            else if constexpr (std::is_same_v<T, Force>) return std::exp(force_integral(k, s, t));
            else {
                double acc = 1.0;
                for (const auto& f : k.factors) acc *= f(s, t);
                return acc;
            }
        },
        node_->v);
}

double AccumulationFunction::log_growth(double s, double t) const {
    if (!is_positive()) throw std::domain_error("log growth requires a positive accumulation function");
    if (s > t) return -log_growth(t, s);
    return std::visit(
        [s, t](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, ConstantRate>) return (t - s) * std::log1p(k.i);
            else if constexpr (std::is_same_v<T, Power>) return (t - s) * std::log(k.x);
            else if constexpr (std::is_same_v<T, Force>) return force_integral(k, s, t);
            else {
                double acc = 0.0;
                for (const auto& f : k.factors) acc += f.log_growth(s, t);
                return acc;
            }
        },
        node_->v);
}

double AccumulationFunction::rate() const {
    if (const auto* k = std::get_if<ConstantRate>(&node_->v)) return k->i;
    throw std::logic_error("not a constant-rate accumulation function");
}

double AccumulationFunction::factor() const {
    if (const auto* k = std::get_if<Power>(&node_->v)) return k->x;
    throw std::logic_error("not a power accumulation function");
}

std::span<const ForceSegment> AccumulationFunction::segments() const {
    if (const auto* k = std::get_if<Force>(&node_->v)) return k->segments;
    throw std::logic_error("not a force-of-interest accumulation function");
}

std::span<const AccumulationFunction> AccumulationFunction::factors() const {
    if (const auto* k = std::get_if<Product>(&node_->v)) return k->factors;
    throw std::logic_error("not a product accumulation function");
}

AccumulationFunction make_constant_rate(double i) { return AccumulationFunction::constant_rate(i); }
AccumulationFunction make_power(double x) { return AccumulationFunction::power(x); }
AccumulationFunction make_force_of_interest(std::vector<ForceSegment> segments) {
    return AccumulationFunction::force_of_interest(std::move(segments));
}
AccumulationFunction product(const AccumulationFunction& a, const AccumulationFunction& b) {
    return AccumulationFunction::product({a, b});
}

namespace {

// Splits each segment at the sign changes of its density. keep_sign = +1
// yields |delta|, keep_sign = -1 yields -|delta|.
std::vector<ForceSegment> split_by_sign(std::span<const ForceSegment> segs, double keep_sign) {
    std::vector<ForceSegment> out;
    for (const auto& seg : segs) {
        const double len = seg.to - seg.from;
        std::vector<double> cuts{0.0};
        for (double r : seg.delta.roots_in(0.0, len)) {
            if (r > cuts.back() && r < len) cuts.push_back(r);
        }
        cuts.push_back(len);
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double a = cuts[k];
            const double b = cuts[k + 1];
            if (!(seg.from + a < seg.from + b)) continue;
            const Polynomial piece = seg.delta.shifted(a);
            const double mid = seg.delta(0.5 * (a + b));
            const double sign = (mid < 0.0 ? -1.0 : 1.0) * keep_sign;
            out.push_back({seg.from + a, k + 2 == cuts.size() ? seg.to : seg.from + b, piece * sign});
        }
    }
    return out;
}

}  // namespace

AccumulationFunction monotone_upper_bound(const AccumulationFunction& a) {
    using K = AccumulationFunction::Kind;
    switch (a.kind()) {
    case K::ConstantRate: return make_power(std::max(1.0 + a.rate(), 1.0));
    case K::Power: return make_power(std::max(a.factor(), 1.0));
    case K::Force: return make_force_of_interest(split_by_sign(a.segments(), 1.0));
    case K::Product: {
        std::vector<AccumulationFunction> bounds;
        for (const auto& f : a.factors()) bounds.push_back(monotone_upper_bound(f));
        return AccumulationFunction::product(std::move(bounds));
    }
    }
    throw std::logic_error("unknown accumulation kind");
}

std::optional<AccumulationFunction> monotone_lower_bound(const AccumulationFunction& a) {
    using K = AccumulationFunction::Kind;
    if (!a.is_positive()) return std::nullopt;
    switch (a.kind()) {
    case K::ConstantRate: return make_power(std::min(1.0 + a.rate(), 1.0));
    case K::Power: return make_power(std::min(a.factor(), 1.0));
    case K::Force: return make_force_of_interest(split_by_sign(a.segments(), -1.0));
    case K::Product: {
        std::vector<AccumulationFunction> bounds;
        for (const auto& f : a.factors()) bounds.push_back(*monotone_lower_bound(f));
        return AccumulationFunction::product(std::move(bounds));
    }
    }
    throw std::logic_error("unknown accumulation kind");
}

MonotoneBound monotone_bounds(const AccumulationFunction& a) {
    return {monotone_upper_bound(a), monotone_lower_bound(a)};
}

}  // namespace tworate
