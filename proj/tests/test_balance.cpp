#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "tworate/balance.hpp"

using namespace tworate;

namespace {

std::vector<double> balances_of(const BalanceTrajectory& tr) {
    std::vector<double> out;
    for (const auto& e : tr.events) out.push_back(e.balance);
    return out;
}

}  // namespace

TEST(Trajectory, TwoRateIteration) {
    const auto f = StepStream::from_cashflows({{0.0, -100.0}, {1.0, 150.0}, {2.0, -40.0}, {3.0, 10.0}});
    const auto tr = trm_trajectory(f, make_power(1.0), make_power(1.1));
    const auto b = balances_of(tr);
    ASSERT_EQ(b.size(), 4u);
    // -100 -> -110 + 150 = 40 -> 40 - 40 = 0 -> 0 + 10
    EXPECT_NEAR(b[0], -100.0, 1e-12);
    EXPECT_NEAR(b[1], 40.0, 1e-12);
    EXPECT_NEAR(b[2], 0.0, 1e-12);
    EXPECT_NEAR(b[3], 10.0, 1e-12);
    EXPECT_EQ(tr.events[0].branch, Branch::Boundary);
    EXPECT_EQ(tr.events[1].branch, Branch::Investment);
    EXPECT_EQ(tr.events[2].branch, Branch::Deposit);
}

TEST(Trajectory, EqualRatesGiveFutureValue) {
    const auto a = make_constant_rate(0.10);
    const auto b = balances_of(trm_trajectory(StepStream::from_cashflows({{0.0, 100.0}, {1.0, 100.0}}), a, a));
    ASSERT_EQ(b.size(), 2u);
    EXPECT_NEAR(b[0], 100.0, 1e-12);
    EXPECT_NEAR(b[1], 210.0, 1e-12);
}

TEST(Trajectory, ZeroStream) {
    const auto a = make_power(1.2);
    const auto b = balances_of(trm_trajectory(StepStream::on_partition({{0.0, 0.0}}), a, a));
    ASSERT_EQ(b.size(), 1u);
    EXPECT_EQ(b[0], 0.0);
    EXPECT_TRUE(trm_trajectory(StepStream{}, a, a).events.empty());
}

TEST(Trajectory, ZeroInvestmentWipesDebt) {
    const auto f = StepStream::from_cashflows({{0.0, -100.0}, {1.0, 30.0}});
    const auto b = balances_of(trm_trajectory(f, make_power(1.0), make_power(0.0)));
    EXPECT_EQ(b[1], 30.0);
}

TEST(BalanceAt, SingleBranchAccumulation) {
    const auto a = make_constant_rate(0.10);
    const auto f = StepStream::from_cashflows({{0.0, -100.0}});
    EXPECT_NEAR(balance_at(f, a, a, 0.5), -100.0 * std::sqrt(1.1), 1e-12);
    EXPECT_NEAR(balance_at(f, a, a, 0.5), -104.8809, 1e-4);
}

TEST(BalanceAt, BreakEven) {
    const auto a = make_constant_rate(0.10);
    EXPECT_NEAR(balance_at(StepStream::from_cashflows({{0.0, -100.0}, {1.0, 110.0}}), a, a, 1.0), 0.0, 1e-12);
}

TEST(BalanceAt, BeforeSupportIsZero) {
    const auto f = StepStream::from_cashflows({{2.0, -5.0}, {3.0, 9.0}});
    EXPECT_EQ(balance_at(f, make_power(1.3), make_power(0.7), 1.999), 0.0);
}

TEST(BalanceAt, BetweenFlowsUsesCurrentBranch) {
    const auto f = StepStream::from_cashflows({{0.0, 100.0}, {1.0, -300.0}});
    const auto dep = make_constant_rate(0.05);
    const auto inv = make_constant_rate(0.20);
    EXPECT_NEAR(balance_at(f, dep, inv, 0.5), 100.0 * std::sqrt(1.05), 1e-12);
    EXPECT_NEAR(balance_at(f, dep, inv, 2.0), (105.0 - 300.0) * 1.2, 1e-12);
}

TEST(UpdateMap, ReplacesHistoryByBalance) {
    const auto a = make_constant_rate(0.10);
    const auto f = StepStream::from_cashflows({{0.0, -100.0}, {1.0, 60.0}, {2.0, 60.0}});
    const auto g = update_map(f, a, a, 1.0);
    ASSERT_EQ(g.size(), 2u);
    EXPECT_NEAR(g.flows()[0].amount, -50.0, 1e-12);
    EXPECT_EQ(g.flows()[0].t, 1.0);
    EXPECT_EQ(g.flows()[1], (CashFlow{2.0, 60.0}));
    EXPECT_NEAR(balance_at(g, a, a, 2.0), 5.0, 1e-12);
    EXPECT_NEAR(balance_at(f, a, a, 2.0), 5.0, 1e-12);
}

TEST(UpdateMap, AtFirstFlowIsIdentity) {
    const auto a = make_power(1.07);
    const auto f = StepStream::from_cashflows({{0.5, -10.0}, {1.0, 4.0}, {3.0, 9.0}});
    EXPECT_EQ(update_map(f, a, a, 0.5), f);
    EXPECT_THROW(update_map(f, a, a, 0.0), std::invalid_argument);
}

TEST(UpdateMap, BetweenFlows) {
    const auto dep = make_power(1.02);
    const auto inv = make_power(1.15);
    const auto f = StepStream::from_cashflows({{0.0, -10.0}, {1.0, 25.0}, {3.0, -40.0}, {4.0, 30.0}});
    const auto g = update_map(f, dep, inv, 2.2);
    for (double t : {2.2, 3.0, 3.5, 4.0, 6.0}) EXPECT_NEAR(balance_at(g, dep, inv, t), balance_at(f, dep, inv, t), 1e-11);
}

TEST(LinearBalance, FutureValue) {
    const auto a = make_constant_rate(0.10);
    EXPECT_NEAR(linear_balance(StepStream::from_cashflows({{0.0, 100.0}, {1.0, 100.0}}), a, 1.0), 210.0, 1e-12);
    EXPECT_NEAR(linear_balance(StepStream::from_cashflows({{0.0, -100.0}, {2.0, 121.0}}), a, 2.0), 0.0, 1e-12);
}

TEST(LinearBalance, SingleFlowRecoversAccumulation) {
    const auto a = make_force_of_interest({{0.0, 5.0, Polynomial{0.02, 0.01}}});
    const auto f = StepStream::from_cashflows({{1.0, 1.0}});
    EXPECT_NEAR(linear_balance(f, a, 3.5), a(1.0, 3.5), 1e-14);
    EXPECT_NEAR(balance_at(f, a, a, 3.5), a(1.0, 3.5), 1e-14);
}

TEST(LinearBalance, MatchesTwoRateWhenRatesAgree) {
    const auto a = make_constant_rate(0.04);
    const auto f = StepStream::from_cashflows({{0.0, -100.0}, {1.0, 300.0}, {2.5, -400.0}, {4.0, 50.0}});
    for (double t : {0.0, 1.0, 2.0, 3.0, 5.0}) EXPECT_NEAR(balance_at(f, a, a, t), linear_balance(f, a, t), 1e-10);
}

TEST(BalanceRegulated, LinearCaseIntegral) {
    // f(t) = t on [0,1): B_1 = int_0^1 1.05^(1-s) ds = 0.05 / ln 1.05
    const auto a = make_force_of_interest({{0.0, 10.0, Polynomial{std::log(1.05)}}});
    const RegulatedStream f({{0.0, 1.0, Polynomial{0.0, 1.0}}});
    const auto cb = balance_regulated(f, a, a, 1.0, 1e-3);
    const double exact = 0.05 / std::log(1.05);
    EXPECT_NEAR(cb.value, exact, 1e-3);
    EXPECT_NEAR(exact, 1.0247968, 1e-7);
    EXPECT_LE(cb.error_bound, 1e-3);
    EXPECT_LE(std::abs(cb.value - exact), cb.error_bound);
}

TEST(BalanceRegulated, PiecewiseConstantIsExact) {
    const auto dep = make_power(1.04);
    const auto inv = make_power(1.2);
    const RegulatedStream f({{0.0, 1.0, Polynomial{-100.0}}, {1.0, 2.0, Polynomial{20.0}}, {2.0, 3.0, Polynomial{50.0}}});
    const auto step = StepStream::from_cashflows({{0.0, -100.0}, {1.0, 120.0}, {2.0, 30.0}});
    const auto cb = balance_regulated(f, dep, inv, 2.5, 1e-6);
    EXPECT_EQ(cb.value, balance_at(step, dep, inv, 2.5));
    EXPECT_LE(cb.error_bound, 1e-6);
}

TEST(BalanceRegulated, IdentityAccumulation) {
    const auto one = make_power(1.0);
    const auto cb = balance_regulated(RegulatedStream({{0.0, 1.0, Polynomial{0.0, -100.0}}}), one, one, 1.0, 1e-6);
    EXPECT_NEAR(cb.value, -100.0, 1e-6);
}

TEST(BalanceRegulated, ErrorBoundCoversFinerApproximant) {
    const auto dep = make_constant_rate(0.03);
    const auto inv = make_constant_rate(0.25);
    const RegulatedStream f({{0.0, 0.5, Polynomial{0.0, -200.0}}, {0.5, 1.5, Polynomial{-100.0, 300.0}}});
    const auto coarse = balance_regulated(f, dep, inv, 2.0, 1e-2);
    const auto fine = balance_regulated(f, dep, inv, 2.0, 1e-5);
    EXPECT_LE(std::abs(coarse.value - fine.value), coarse.error_bound + fine.error_bound);
    EXPECT_LE(coarse.error_bound, 1e-2);
}

TEST(CommonUpperBound, DominatesBoth) {
    const auto dep = make_power(0.9);
    const auto inv = make_constant_rate(0.08);
    const auto y = common_upper_bound(dep, inv);
    EXPECT_NEAR(y(0.0, 2.0), 1.08 * 1.08, 1e-14);
}
