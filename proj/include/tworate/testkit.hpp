#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

#include "tworate/accumulation.hpp"
#include "tworate/streams.hpp"

namespace tworate::testkit {

/// Outcome of one property suite. worst_margin is the smallest observed
/// (bound - value) over all checks; a violation is a margin below the
/// allowed slack.
struct PropertyReport {
    std::string name;
    std::size_t trials = 0;
    std::size_t violations = 0;
    double worst_margin = 0.0;
    std::uint64_t seed = 0;

    bool passed() const { return violations == 0; }
    /// `name,trials,violations,worst_margin,seed`
    std::string csv_line() const;
};

/// Raised by the oracles when the property they scan for is falsified.
class OracleFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Seeded generator of streams and accumulation functions. Step streams have
/// at most 12 flows, amounts in [-1000, 1000] and times in [0, 10].
class RandomCorpus {
public:
    explicit RandomCorpus(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

    std::vector<double> event_times(int count, double horizon = 10.0);
    StepStream step_stream(int max_flows = 12);
    /// Same flow times as `like`, fresh amounts; zero flows are kept so both
    /// streams share a partition.
    StepStream step_stream_on(const StepStream& like);
    /// First flow strictly negative.
    StepStream step_project(int max_flows = 12);
    /// One to three polynomial segments of degree <= 2 on [0, horizon].
    RegulatedStream regulated_stream(double horizon = 3.0);
    /// Starts negative, or at zero with a negative slope.
    RegulatedStream regulated_project(double horizon = 1.5);

    AccumulationFunction accumulation();
    /// Positive kinds only (no zero factor).
    AccumulationFunction positive_accumulation();
    AccumulationFunction constant_rate(double lo, double hi) { return make_constant_rate(uniform(lo, hi)); }

private:
    AccumulationFunction simple_accumulation(bool allow_zero);
    std::mt19937_64 rng_;
};

/// Balance axioms (later-flow irrelevance, final-flow additivity, scale,
/// replacement, continuity) on random step streams and accumulation pairs.
/// Continuity compares step approximants of random regulated streams against
/// the Cauchy bound.
PropertyReport axiom_suite(std::size_t trials, std::uint64_t seed);

/// B(0,y) <= B(a,b) <= B(y,0), the comparison lemma for larger deposit or
/// investment functions, and the difference sandwich
/// B(C-D)(0,y) <= B(C)(a,b) - B(D)(a,b) <= B(C-D)(y,0), at every event.
PropertyReport sandwich_suite(std::size_t trials, std::uint64_t seed);

/// |B_j(C) - B_j(D)| <= 2 y(t_0,t_j) ||f_{C-D}|| at every event.
PropertyReport difference_bound_suite(std::size_t trials, std::uint64_t seed);

/// Terminal balance B^x_t of a step stream by a direct loop, independent of
/// the balance module: deposit `a` on surpluses, x^(t-s) on debts.
double reference_balance(std::span<const CashFlow> flows, const AccumulationFunction& a, double x, double t);

/// Scans B^x_d(f) on {0, step, 2 step, ..., x_max} with d the end of the
/// minimal support. Returns the midpoint of the unique cell where the balance
/// turns from positive to non-positive, or 0 when it is never positive.
/// Throws OracleFailure on more than one sign change or when no non-positive
/// value is reached by x_max. Regulated streams are scanned through a step
/// approximant at sup-norm `regulated_eps`.
double grid_root_oracle(const Stream& f, const AccumulationFunction& a, double x_max, double step,
                        double regulated_eps = 1e-3);

/// Abel summation bound: with a_0 >= ... >= a_n >= 0 and partial sums
/// 0 >= S_0 >= ... >= S_n of u, checks S = sum a_k u_k <= a_m S_m <= 0 for
/// every m by direct summation. Throws std::invalid_argument when the
/// preconditions fail.
bool abel_bound_oracle(std::span<const double> coeffs, std::span<const double> inputs);

}  // namespace tworate::testkit
