#pragma once

#include <string_view>
#include <vector>

#include "tworate/accumulation.hpp"
#include "tworate/streams.hpp"

namespace tworate {

/// Which accumulation function carried the balance into an event.
enum class Branch {
    Deposit,     ///< prior balance > 0, accumulated with the deposit function
    Investment,  ///< prior balance < 0, accumulated with the investment function
    Boundary,    ///< prior balance == 0 (both branches agree; deposit applied)
};

std::string_view to_string(Branch branch);

struct BalanceEvent {
    double t;
    double balance;
    Branch branch;
};

/// Two-rate running balance of a step stream: at every flow time t_j the
/// balance B_j together with the branch used to reach it. The first event
/// has no prior balance and is recorded as Boundary.
struct BalanceTrajectory {
    std::vector<BalanceEvent> events;
    AccumulationFunction deposit;
    AccumulationFunction investment;
};

/// Balance of a regulated stream obtained as the limit of step approximants,
/// with error_bound = 2 * y(t_0, t) * mesh_eps.
struct CertifiedBalance {
    double value;
    double error_bound;
    double mesh_eps;
};

/// B_0 = C_0 and B_{j+1} = a(t_j,t_{j+1}) B_j + C_{j+1} when B_j >= 0,
/// b(t_j,t_{j+1}) B_j + C_{j+1} when B_j < 0.
BalanceTrajectory trm_trajectory(const StepStream& f, const AccumulationFunction& deposit,
                                 const AccumulationFunction& investment);

/// Balance at an arbitrary time t, with a zero flow inserted at t when it is
/// not already a flow time. Returns 0 before the first flow.
double balance_at(const StepStream& f, const AccumulationFunction& deposit, const AccumulationFunction& investment,
                  double t);

/// Stream with a single flow B_s(f) at s followed by the flows of f after s.
/// Throws std::invalid_argument when s precedes the first flow.
StepStream update_map(const StepStream& f, const AccumulationFunction& deposit,
                      const AccumulationFunction& investment, double s);

/// Closed form for deposit == investment: sum of C_k a(t_k, t) over t_k <= t.
double linear_balance(const StepStream& f, const AccumulationFunction& a, double t);

/// Cell limit for approximants that are streamed rather than stored.
inline constexpr std::size_t kStreamingMaxCells = std::size_t{1} << 32;

/// balance_at(approximate(f, mesh_eps), deposit, investment, t), evaluated
/// flow by flow without storing the approximant.
double approximant_balance(const RegulatedStream& f, double mesh_eps, const AccumulationFunction& deposit,
                           const AccumulationFunction& investment, double t,
                           std::size_t max_cells = kStreamingMaxCells);

/// Certified balance of a regulated stream within tol. The mesh is chosen so
/// that 2 y(t_0,t) eps <= tol with y the product of the monotone upper bounds
/// of both accumulation functions, and the stream is approximated at eps/2.
CertifiedBalance balance_regulated(const RegulatedStream& f, const AccumulationFunction& deposit,
                                   const AccumulationFunction& investment, double t, double tol,
                                   std::size_t max_cells = kStreamingMaxCells);

/// Common monotone increasing upper bound of a pair of accumulation functions.
AccumulationFunction common_upper_bound(const AccumulationFunction& deposit, const AccumulationFunction& investment);

}  // namespace tworate
