#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "tworate/polynomial.hpp"

namespace tworate {

/// Times closer than this are the same partition point.
inline constexpr double kTimeTol = 1e-12;

struct CashFlow {
    double t;
    double amount;

    bool operator==(const CashFlow&) const = default;
};

/// Compact interval [lo, hi] outside which a stream is 0 before and constant
/// after. The zero stream has no support (std::nullopt).
struct SupportInterval {
    double lo;
    double hi;

    bool operator==(const SupportInterval&) const = default;
};

/// Finite cash-flow sequence viewed as the right-continuous step function
/// f(t) = sum of the amounts with t_i <= t.
///
/// Flow times are strictly increasing. Zero-amount flows are allowed inside
/// the sequence (they mark partition points and leave f unchanged); the
/// normalising constructor from_cashflows drops them.
class StepStream {
public:
    StepStream() = default;

    /// Sorts, merges flows within kTimeTol by summation and drops zero flows.
    static StepStream from_cashflows(std::vector<CashFlow> flows);
    /// Sorts and merges, but keeps zero flows as explicit partition points.
    static StepStream on_partition(std::vector<CashFlow> flows);

    std::span<const CashFlow> flows() const { return flows_; }
    std::size_t size() const { return flows_.size(); }
    bool empty() const { return flows_.empty(); }

    /// True when every amount is zero, i.e. the induced function is 0.
    bool is_zero() const;

    double operator()(double t) const;

    /// Copy with a zero flow at t (no-op when t is already a partition point).
    StepStream with_partition_point(double t) const;

    /// Copy without zero flows.
    StepStream normalized() const;

    bool operator==(const StepStream&) const = default;

private:
    explicit StepStream(std::vector<CashFlow> flows) : flows_(std::move(flows)) {}
    std::vector<CashFlow> flows_;
};

/// Polynomial piece of a regulated stream: f(t) = poly(t - from) on [from, to).
struct StreamSegment {
    double from;
    double to;
    Polynomial poly;

    bool operator==(const StreamSegment&) const = default;
};

/// Right-continuous piecewise polynomial payment stream with jumps between
/// segments. f = 0 before the first segment and f equals the left limit at
/// the last `to` afterwards.
class RegulatedStream {
public:
    RegulatedStream() = default;
    /// Segments must be ordered, non-empty and contiguous (gaps and overlaps
    /// up to kTimeTol are snapped).
    explicit RegulatedStream(std::vector<StreamSegment> segments);

    std::span<const StreamSegment> segments() const { return segments_; }
    bool empty() const { return segments_.empty(); }

    double operator()(double t) const;
    /// Value on [last to, infinity).
    double final_value() const;

    bool operator==(const RegulatedStream&) const = default;

private:
    std::vector<StreamSegment> segments_;
};

using Stream = std::variant<StepStream, RegulatedStream>;

double evaluate_stream(const StepStream& f, double t);
double evaluate_stream(const RegulatedStream& f, double t);
double evaluate_stream(const Stream& f, double t);

StepStream combine(const StepStream& f, const StepStream& g, double alpha, double beta);
RegulatedStream combine(const RegulatedStream& f, const RegulatedStream& g, double alpha, double beta);
/// Throws std::invalid_argument on mixed representations.
Stream combine(const Stream& f, const Stream& g, double alpha, double beta);

/// max over p of |C_0 + ... + C_p|.
double sup_norm(const StepStream& f);

std::optional<SupportInterval> minimal_support(const StepStream& f);
std::optional<SupportInterval> minimal_support(const RegulatedStream& f);
std::optional<SupportInterval> minimal_support(const Stream& f);

/// Upper limit on the partition size built by approximate().
inline constexpr std::size_t kDefaultMaxCells = std::size_t{1} << 23;

/// Step stream f_n with f_n(t_i) = f(t_i) on a partition of the minimal
/// support and sup |f_n - f| <= eps. Each segment is cut uniformly with mesh h
/// such that max|poly'| * h <= eps; segment boundaries are partition points.
/// Throws std::invalid_argument for eps <= 0 and std::length_error when the
/// partition would exceed max_cells points.
StepStream approximate(const RegulatedStream& f, double eps, std::size_t max_cells = kDefaultMaxCells);

/// Number of partition points approximate() would use; cheap, no allocation.
/// Uniform mesh behind approximate(f, eps): segment `seg` is cut into `cells`
/// equal cells. The pieces cover the minimal support, which ends at `end`;
/// `end` is empty only for the zero stream.
struct MeshPiece {
    const StreamSegment* seg;
    std::size_t cells;
};
struct ApproximantMesh {
    std::vector<MeshPiece> pieces;
    std::optional<double> end;
};
ApproximantMesh approximant_mesh(const RegulatedStream& f, double eps, std::size_t max_cells);

/// Visits the flows of approximate(f, eps) in time order as
/// visit(t, amount, width), zero amounts included. `width` is the nominal
/// cell width since the previous flow (0 for the first); it differs from the
/// difference of the times only by rounding.
template <class Visit>
void for_each_approximant_flow(const RegulatedStream& f, double eps, std::size_t max_cells, Visit&& visit) {
    const auto mesh = approximant_mesh(f, eps, max_cells);
    if (!mesh.end) return;
    double previous = 0.0;
    double width = 0.0;
    for (const auto& piece : mesh.pieces) {
        const auto& seg = *piece.seg;
        const double len = seg.to - seg.from;
        const double cells = static_cast<double>(piece.cells);
        for (std::size_t k = 0; k < piece.cells; ++k) {
            const double u = len * static_cast<double>(k) / cells;
            const double value = seg.poly(u);
            visit(seg.from + u, value - previous, width);
            previous = value;
            width = len / cells;
        }
    }
    visit(*mesh.end, f(*mesh.end) - previous, width);
}

std::size_t approximation_cells(const RegulatedStream& f, double eps);

/// f(a) < 0, or f(a) = 0 and f is negative and non-increasing just after a,
/// where a is the start of the minimal support. Throws std::invalid_argument
/// for the zero stream.
bool is_investment_project(const StepStream& f);
bool is_investment_project(const RegulatedStream& f);
bool is_investment_project(const Stream& f);

}  // namespace tworate
