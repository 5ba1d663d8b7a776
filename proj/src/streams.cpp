#include "tworate/streams.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace tworate {

namespace {

std::vector<CashFlow> sort_and_merge(std::vector<CashFlow> flows) {
    for (std::size_t k = 0; k < flows.size(); ++k) {
        if (!std::isfinite(flows[k].t) || !std::isfinite(flows[k].amount)) {
            throw std::invalid_argument(fmt::format("cash flow {} has a non-finite time or amount", k));
        }
    }
    std::stable_sort(flows.begin(), flows.end(), [](const CashFlow& a, const CashFlow& b) { return a.t < b.t; });
    std::vector<CashFlow> merged;
    merged.reserve(flows.size());
    for (const auto& cf : flows) {
        if (!merged.empty() && cf.t - merged.back().t <= kTimeTol) {
            merged.back().amount += cf.amount;
        } else {
            merged.push_back(cf);
        }
    }
    return merged;
}

void drop_zero_flows(std::vector<CashFlow>& flows) {
    std::erase_if(flows, [](const CashFlow& cf) { return cf.amount == 0.0; });
}

// Polynomial in (t - at) describing f on [at, next breakpoint).
Polynomial piece_at(const RegulatedStream& f, double at) {
    const auto segs = f.segments();
    if (segs.empty() || at < segs.front().from) return Polynomial{};
    if (at >= segs.back().to) return Polynomial{f.final_value()};
    auto it = std::upper_bound(segs.begin(), segs.end(), at,
                               [](double t, const StreamSegment& s) { return t < s.from; });
    const auto& seg = *std::prev(it);
    return seg.poly.shifted(at - seg.from);
}

double first_nonzero_coefficient(const Polynomial& p) {
    for (double c : p.coefficients()) {
        if (c != 0.0) return c;
    }
    return 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// StepStream

StepStream StepStream::from_cashflows(std::vector<CashFlow> flows) {
    auto merged = sort_and_merge(std::move(flows));
    drop_zero_flows(merged);
    return StepStream(std::move(merged));
}

StepStream StepStream::on_partition(std::vector<CashFlow> flows) {
    return StepStream(sort_and_merge(std::move(flows)));
}

bool StepStream::is_zero() const {
    return std::all_of(flows_.begin(), flows_.end(), [](const CashFlow& cf) { return cf.amount == 0.0; });
}

double StepStream::operator()(double t) const {
    double acc = 0.0;
    for (const auto& cf : flows_) {
        if (cf.t > t) break;
        acc += cf.amount;
    }
    return acc;
}

StepStream StepStream::with_partition_point(double t) const {
    std::vector<CashFlow> flows = flows_;
    flows.push_back({t, 0.0});
    return on_partition(std::move(flows));
}

StepStream StepStream::normalized() const {
    std::vector<CashFlow> flows = flows_;
    drop_zero_flows(flows);
    return StepStream(std::move(flows));
}

// ---------------------------------------------------------------------------
// RegulatedStream

RegulatedStream::RegulatedStream(std::vector<StreamSegment> segments) : segments_(std::move(segments)) {
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        auto& seg = segments_[k];
        if (!std::isfinite(seg.from) || !std::isfinite(seg.to) || !(seg.from < seg.to)) {
            throw std::invalid_argument(fmt::format("segment {} must satisfy from < to with finite bounds", k));
        }
        for (double c : seg.poly.coefficients()) {
            if (!std::isfinite(c)) throw std::invalid_argument(fmt::format("segment {} has a non-finite coefficient", k));
        }
        if (k > 0) {
            const double prev_to = segments_[k - 1].to;
            if (std::abs(seg.from - prev_to) > kTimeTol) {
                throw std::invalid_argument(
                    fmt::format("segment {} starts at {} but the previous segment ends at {}", k, seg.from, prev_to));
            }
            seg.from = prev_to;
        }
    }
}

double RegulatedStream::operator()(double t) const {
    if (segments_.empty() || t < segments_.front().from) return 0.0;
    if (t >= segments_.back().to) return final_value();
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double x, const StreamSegment& s) { return x < s.from; });
    const auto& seg = *std::prev(it);
    return seg.poly(t - seg.from);
}

double RegulatedStream::final_value() const {
    if (segments_.empty()) return 0.0;
    const auto& last = segments_.back();
    return last.poly(last.to - last.from);
}

// ---------------------------------------------------------------------------
// Free operations

double evaluate_stream(const StepStream& f, double t) { return f(t); }
double evaluate_stream(const RegulatedStream& f, double t) { return f(t); }
double evaluate_stream(const Stream& f, double t) {
    return std::visit([t](const auto& s) { return evaluate_stream(s, t); }, f);
}

StepStream combine(const StepStream& f, const StepStream& g, double alpha, double beta) {
    std::vector<CashFlow> flows;
    flows.reserve(f.size() + g.size());
    for (const auto& cf : f.flows()) flows.push_back({cf.t, alpha * cf.amount});
    for (const auto& cf : g.flows()) flows.push_back({cf.t, beta * cf.amount});
    return StepStream::from_cashflows(std::move(flows));
}

RegulatedStream combine(const RegulatedStream& f, const RegulatedStream& g, double alpha, double beta) {
    std::vector<double> knots;
    for (const auto* s : {&f, &g}) {
        for (const auto& seg : s->segments()) {
            knots.push_back(seg.from);
            knots.push_back(seg.to);
        }
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end(), [](double a, double b) { return b - a <= kTimeTol; }),
                knots.end());

    std::vector<StreamSegment> out;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        const double at = knots[k];
        out.push_back({at, knots[k + 1], piece_at(f, at) * alpha + piece_at(g, at) * beta});
    }
    return RegulatedStream(std::move(out));
}

Stream combine(const Stream& f, const Stream& g, double alpha, double beta) {
    if (const auto* fs = std::get_if<StepStream>(&f)) {
        if (const auto* gs = std::get_if<StepStream>(&g)) return combine(*fs, *gs, alpha, beta);
    }
    if (const auto* fr = std::get_if<RegulatedStream>(&f)) {
        if (const auto* gr = std::get_if<RegulatedStream>(&g)) return combine(*fr, *gr, alpha, beta);
    }
    throw std::invalid_argument("combine requires two step streams or two regulated streams; approximate first");
}

double sup_norm(const StepStream& f) {
    double partial = 0.0;
    double best = 0.0;
    for (const auto& cf : f.flows()) {
        partial += cf.amount;
        best = std::max(best, std::abs(partial));
    }
    return best;
}

std::optional<SupportInterval> minimal_support(const StepStream& f) {
    const auto flows = f.flows();
    auto first = std::find_if(flows.begin(), flows.end(), [](const CashFlow& cf) { return cf.amount != 0.0; });
    if (first == flows.end()) return std::nullopt;
    auto last = std::find_if(flows.rbegin(), flows.rend(), [](const CashFlow& cf) { return cf.amount != 0.0; });
    return SupportInterval{first->t, last->t};
}

std::optional<SupportInterval> minimal_support(const RegulatedStream& f) {
    const auto segs = f.segments();
    auto first = std::find_if(segs.begin(), segs.end(), [](const StreamSegment& s) { return !s.poly.is_zero(); });
    if (first == segs.end()) return std::nullopt;
    const double lo = first->from;

    const double final_value = f.final_value();
    double hi = segs.back().to;
    for (auto it = segs.rbegin(); it != segs.rend(); ++it) {
        const bool equals_final = it->poly.is_constant() && it->poly(0.0) == final_value;
        if (!equals_final) break;
        hi = it->from;
    }
    return SupportInterval{lo, std::max(lo, hi)};
}

std::optional<SupportInterval> minimal_support(const Stream& f) {
    return std::visit([](const auto& s) { return minimal_support(s); }, f);
}

namespace {

std::vector<MeshPiece> plan_mesh(const RegulatedStream& f, const SupportInterval& support, double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) {
        throw std::invalid_argument(fmt::format("approximation tolerance eps must be > 0 (got {})", eps));
    }
    std::vector<MeshPiece> plan;
    for (const auto& seg : f.segments()) {
        if (seg.from < support.lo || seg.from >= support.hi) continue;
        const double len = seg.to - seg.from;
        const double slope = seg.poly.derivative().max_abs_on(0.0, len);
        const double need = std::ceil(slope * len / eps);
        if (!std::isfinite(need) || need > static_cast<double>(std::size_t{1} << 52)) {
            throw std::length_error("approximation partition is too large for the requested eps");
        }
        plan.push_back({&seg, std::max<std::size_t>(1, static_cast<std::size_t>(need))});
    }
    return plan;
}

}  // namespace

std::size_t approximation_cells(const RegulatedStream& f, double eps) {
    const auto support = minimal_support(f);
    if (!support) return 0;
    std::size_t total = 1;
    for (const auto& m : plan_mesh(f, *support, eps)) total += m.cells;
    return total;
}

ApproximantMesh approximant_mesh(const RegulatedStream& f, double eps, std::size_t max_cells) {
    if (!(eps > 0.0)) throw std::invalid_argument(fmt::format("approximation tolerance eps must be > 0 (got {})", eps));
    const auto support = minimal_support(f);
    if (!support) return {};
    const auto plan = plan_mesh(f, *support, eps);
    std::size_t total = 1;
    for (const auto& m : plan) total += m.cells;
    if (total > max_cells) {
        throw std::length_error(
            fmt::format("approximation needs {} partition points (limit {}); use a larger tolerance", total, max_cells));
    }
    return {plan, support->hi};
}

StepStream approximate(const RegulatedStream& f, double eps, std::size_t max_cells) {
    std::vector<CashFlow> flows;
    for_each_approximant_flow(f, eps, max_cells, [&flows](double t, double amount, double) {
        flows.push_back({t, amount});
    });
    return StepStream::from_cashflows(std::move(flows));
}

bool is_investment_project(const StepStream& f) {
    for (const auto& cf : f.flows()) {
        if (cf.amount != 0.0) return cf.amount < 0.0;
    }
    throw std::invalid_argument("the zero stream has empty support and is not an investment project");
}

bool is_investment_project(const RegulatedStream& f) {
    for (const auto& seg : f.segments()) {
        if (seg.poly.is_zero()) continue;
        // Near the start p(u) ~ c_k u^k with c_k the first nonzero coefficient;
        // c_0 < 0 means f(a) < 0, and for k >= 1 the sign of c_k decides both
        // negativity and monotonicity on (a, a + delta].
        return first_nonzero_coefficient(seg.poly) < 0.0;
    }
    throw std::invalid_argument("the zero stream has empty support and is not an investment project");
}

bool is_investment_project(const Stream& f) {
    return std::visit([](const auto& s) { return is_investment_project(s); }, f);
}

}  // namespace tworate
