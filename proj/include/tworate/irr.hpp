#pragma once

#include <vector>

#include "tworate/accumulation.hpp"
#include "tworate/balance.hpp"
#include "tworate/streams.hpp"

namespace tworate {

/// Balance tolerance used for regulated projects when the caller gives none.
inline constexpr double kDefaultRegulatedTol = 1e-3;

/// Terminal balance as a function of the investment factor x, and the
/// resulting internal rate of return.
///
///  nu          measure of {x >= 0 : B^x_d(f) >= 0}; the root when one exists
///  irr         nu - 1
///  x_lo, x_hi  final bracket, x_lo <= nu <= x_hi
///  residual    |B^nu_d(f)| (0 when nu = 0)
///  error_bound certification error of the balances near the root; 0 for
///              step projects
struct IrrResult {
    double nu;
    double irr;
    double x_lo;
    double x_hi;
    double residual;
    double error_bound;
};

/// B^x_t(f): balance with deposit a and investment x^(t-s). Exact for step
/// streams; for regulated streams the value is certified within tol.
double balance_vs_x(const Stream& f, const AccumulationFunction& deposit, double t, double x,
                    double tol = kDefaultRegulatedTol);
CertifiedBalance certified_balance_vs_x(const Stream& f, const AccumulationFunction& deposit, double t, double x,
                                        double tol = kDefaultRegulatedTol);

/// Throws std::invalid_argument when f is not an investment project or the
/// deposit function can vanish.
double nu_measure(const Stream& f, const AccumulationFunction& deposit, double root_tol,
                  double tol = kDefaultRegulatedTol);

/// Bracket-and-bisect on x. Step projects are solved exactly up to root_tol.
/// Regulated projects are solved on one step approximant whose error bound
/// holds over the whole bracket; bisection stops early when a midpoint's sign
/// cannot be certified, and the certified bracket is returned.
IrrResult irr_of(const Stream& f, const AccumulationFunction& deposit, double root_tol,
                 double tol = kDefaultRegulatedTol);

/// All roots i in (-1, i_max] of NPV(i) = sum C_k (1+i)^(-t_k) found by a
/// logarithmic grid scan in 1+i followed by bisection. Throws
/// std::invalid_argument when the flows never change sign.
std::vector<double> classical_irr(const StepStream& f, double root_tol, double i_max = 10.0);

}  // namespace tworate
