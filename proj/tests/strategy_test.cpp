#include "support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace dexarb;
using namespace dexarb::testing;

namespace {

const CurrencyId kXrp = CurrencyId::xrp();
const CurrencyId kUsd = cur("USD", "G1");
const CurrencyId kEur = cur("EUR", "G1");
const AccountId kBot("bot");

// XRP -> USD at 2, USD -> EUR at 3/2, EUR -> XRP at 2/5: product 6/5.
class CycleMarket : public ::testing::Test {
 protected:
  void SetUp() override {
    run_ledger(ledger, {tx_fund("G1", xrp(10000)), tx_fund("M1", xrp(1000)), tx_fund("M2", xrp(1000)),
                        tx_fund("M3", xrp(1000)), tx_fund("bot", xrp(1000)), tx_trust("M1", amt(1000, kUsd)),
                        tx_trust("M2", amt(1000, kEur)), tx_trust("bot", amt(1000, kUsd)),
                        tx_trust("bot", amt(1000, kEur))});
    run_ledger(ledger, {tx_pay("G1", "M1", amt(100, kUsd)), tx_pay("G1", "M2", amt(100, kEur)),
                        tx_pay("G1", "bot", amt(100, kUsd))});
    run_ledger(ledger, {tx_offer("M1", xrp(12), amt(24, kUsd)), tx_offer("M2", amt(20, kUsd), amt(30, kEur)),
                        tx_offer("M3", amt(30, kEur), xrp(12))});
    graph = build(ledger.books(), ledger.index());
    cycle = detect(graph);
    ASSERT_TRUE(cycle.has_value());
    opp = evaluate(*cycle, graph, ledger.fee_per_tx(), 1);
    ASSERT_TRUE(opp.has_value());
  }

  void TearDown() override {
    EXPECT_TRUE(ledger.iou_conserved());
    EXPECT_TRUE(ledger.xrp_conserved());
  }

  Ledger ledger;
  RateGraph graph;
  std::optional<Cycle> cycle;
  std::optional<Opportunity> opp;
};

}  // namespace

TEST(Allowlist, ParsesPairsAndComments) {
  std::istringstream in("# trusted gateways\nUSD G1\n\nEUR G1  # second\n");
  const IssuerAllowlist l = IssuerAllowlist::parse(in);
  EXPECT_TRUE(l.allows(kUsd));
  EXPECT_TRUE(l.allows(kEur));
  EXPECT_TRUE(l.allows(kXrp));
  EXPECT_FALSE(l.allows(cur("USD", "G2")));
  EXPECT_EQ(l.entries().size(), 2u);
}

TEST(Allowlist, RejectsMalformedLines) {
  std::istringstream one("USD\n");
  EXPECT_THROW(IssuerAllowlist::parse(one), std::runtime_error);
  std::istringstream three("USD G1 extra\n");
  EXPECT_THROW(IssuerAllowlist::parse(three), std::runtime_error);
  std::istringstream xrp("XRP G1\n");
  EXPECT_THROW(IssuerAllowlist::parse(xrp), TxError);
}

TEST_F(CycleMarket, PlanIsOneSelfPaymentOverThreeHops) {
  const auto plan = plan_cycle(*opp, graph, ledger, IssuerAllowlist::allow_all(), kBot, ledger.index() + 1);
  ASSERT_TRUE(plan.has_value());
  ASSERT_EQ(plan->transactions.size(), 1u);
  const Transaction& tx = plan->transactions[0];
  EXPECT_EQ(tx.kind(), TxKind::Payment);
  EXPECT_TRUE(tx.flags.partial_payment);
  EXPECT_TRUE(tx.flags.no_direct_ripple);
  EXPECT_FALSE(tx.signature.empty());
  const auto& p = std::get<PaymentTx>(tx.payload);
  EXPECT_EQ(p.destination, kBot);
  ASSERT_EQ(p.paths.size(), 3u);
  // Rotated off XRP: the payment starts and ends in USD.
  EXPECT_EQ(p.paths.front().pay, kUsd);
  EXPECT_EQ(p.paths.back().get, kUsd);
  EXPECT_EQ(p.send_max, amt(20, kUsd));
  EXPECT_EQ(p.amount, amt(24, kUsd));
  // 4 USD at 3/5 XRP per USD, less one fee.
  EXPECT_EQ(plan->expected_net.value, Rational(12, 5) - Rational(10, 1'000'000));
}

TEST_F(CycleMarket, ExecutedPlanRealizesExpectedNet) {
  const auto plan = plan_cycle(*opp, graph, ledger, IssuerAllowlist::allow_all(), kBot, ledger.index() + 1);
  ASSERT_TRUE(plan.has_value());
  const Holdings before = holdings(ledger, *plan);
  const auto out = run_ledger(ledger, plan->transactions);
  ASSERT_EQ(out[0].code, TxResultCode::Success) << out[0].message;
  const PnLRecord r = settle(*plan, out, before, holdings(ledger, *plan), ledger.index());
  EXPECT_EQ(r.outcome, PnLOutcome::Completed);
  EXPECT_EQ(r.realized, plan->expected_net.value);
  EXPECT_EQ(r.fees_paid, Amount::drops(10));
  EXPECT_EQ(ledger.iou_balance(kBot, kUsd), 104);
}

TEST_F(CycleMarket, NonAllowlistedIssuerGivesNoPlan) {
  IssuerAllowlist only_usd;
  only_usd.add(kUsd);
  EXPECT_FALSE(plan_cycle(*opp, graph, ledger, only_usd, kBot, 1).has_value());
  only_usd.add(kEur);
  EXPECT_TRUE(plan_cycle(*opp, graph, ledger, only_usd, kBot, 1).has_value());
}

TEST_F(CycleMarket, MissingIntermediateTrustlineGivesNoPlan) {
  run_ledger(ledger, {tx_fund("other", xrp(1000)), tx_trust("other", amt(1000, kUsd))});
  run_ledger(ledger, {tx_pay("G1", "other", amt(50, kUsd))});
  EXPECT_FALSE(plan_cycle(*opp, graph, ledger, IssuerAllowlist::allow_all(), AccountId("other"), 1).has_value());
}

TEST_F(CycleMarket, PlanSizedToFunds) {
  run_ledger(ledger, {tx_pay("bot", "G1", amt(95, kUsd))});
  const auto plan = plan_cycle(*opp, graph, ledger, IssuerAllowlist::allow_all(), kBot, 1);
  ASSERT_TRUE(plan.has_value());
  EXPECT_EQ(std::get<PaymentTx>(plan->transactions[0].payload).send_max, amt(5, kUsd));
  EXPECT_EQ(plan->expected_net.value, Rational(3, 5) - Rational(10, 1'000'000));
}

TEST_F(CycleMarket, UnprofitableAfterFeesGivesNoPlan) {
  Ledger expensive(xrp(3));
  EXPECT_FALSE(evaluate(*cycle, graph, expensive.fee_per_tx(), 1).has_value());
  Opportunity o = *opp;
  o.net_profit = Amount::zero(kXrp);
  EXPECT_FALSE(plan_cycle(o, graph, ledger, IssuerAllowlist::allow_all(), kBot, 1).has_value());
}

TEST_F(CycleMarket, CompetitorTakingHeadLeavesIncompleteLoss) {
  const auto plan = plan_cycle(*opp, graph, ledger, IssuerAllowlist::allow_all(), kBot, ledger.index() + 1);
  ASSERT_TRUE(plan.has_value());
  run_ledger(ledger, {tx_fund("rival", xrp(100)), tx_trust("rival", amt(1000, kUsd)),
                      tx_trust("rival", amt(1000, kEur))});
  run_ledger(ledger, {tx_pay("G1", "rival", amt(20, kUsd))});
  const Holdings before = holdings(ledger, *plan);
  // The rival's payment lands first and empties the USD -> EUR side.
  const auto out = run_ledger(ledger, {tx_pay("rival", "rival", amt(30, kEur), amt(20, kUsd), {{kUsd, kEur}}),
                                       plan->transactions[0]});
  ASSERT_EQ(out[0].code, TxResultCode::Success) << out[0].message;
  const std::vector<TxOutcome> ours{out[1]};
  const PnLRecord r = settle(*plan, ours, before, holdings(ledger, *plan), ledger.index());
  EXPECT_EQ(r.outcome, PnLOutcome::Incomplete);
  EXPECT_EQ(r.realized, -r.fees_paid.value);
  EXPECT_EQ(r.fees_paid, Amount::drops(10));
  EXPECT_EQ(ledger.iou_balance(kBot, kUsd), 100);
  EXPECT_EQ(ledger.iou_balance(kBot, kEur), 0);
}

TEST(RoundTrip, GainIsXPrimeMinusXMinusFees) {
  const RoundTripResult r = run_round_trip(xrp(100), xrp(101), Amount::drops(10));
  ASSERT_FALSE(r.plan.rejected);
  EXPECT_EQ(r.plan.aggregate_gain(), Rational(99998, 100000));
  EXPECT_EQ(r.gain, Rational(99998, 100000));
  ASSERT_EQ(r.outcomes.size(), 2u);
  for (const auto& o : r.outcomes) EXPECT_EQ(o.code, TxResultCode::Success) << o.message;
  EXPECT_EQ(r.pnl.outcome, PnLOutcome::Completed);
  EXPECT_EQ(r.pnl.realized, r.gain);
}

TEST(RoundTrip, PlanShape) {
  const CurrencyId c = cur("CUR", "A");
  const RoundTripPlan p = plan_round_trip(AccountId("A"), AccountId("B"), c, xrp(100), xrp(101), Amount::drops(10),
                                          {{kXrp, kUsd}, {kUsd, kXrp}}, amt(100, c));
  ASSERT_EQ(p.transactions.size(), 2u);
  const auto& offer = std::get<OfferCreateTx>(p.transactions[0].payload);
  EXPECT_EQ(offer.taker_pays, xrp(101));
  EXPECT_EQ(offer.taker_gets, amt(100, c));
  const auto& pay = std::get<PaymentTx>(p.transactions[1].payload);
  EXPECT_EQ(pay.destination, AccountId("B"));
  EXPECT_EQ(pay.send_max, xrp(100));
  EXPECT_EQ(pay.paths.back(), (DirectedPair{kXrp, c}));
  EXPECT_EQ(p.e, Amount::drops(20));
}

TEST(RoundTrip, EqualPricesRejected) {
  const CurrencyId c = cur("CUR", "A");
  const RoundTripPlan p =
      plan_round_trip(AccountId("A"), AccountId("B"), c, xrp(100), xrp(100), Amount::drops(10), {}, amt(1, c));
  EXPECT_TRUE(p.rejected);
  EXPECT_EQ(p.aggregate_gain(), -Rational(20, 1'000'000));
  EXPECT_TRUE(p.transactions.empty());
}

TEST(RoundTrip, ZeroGainRejected) {
  const CurrencyId c = cur("CUR", "A");
  const RoundTripPlan p = plan_round_trip(AccountId("A"), AccountId("B"), c, xrp(100),
                                          Amount(100 + Rational(20, 1'000'000), kXrp), Amount::drops(10), {},
                                          amt(1, c));
  EXPECT_EQ(p.aggregate_gain(), 0);
  EXPECT_TRUE(p.rejected);
}

TEST(RoundTrip, CurMustBeIssuedByA) {
  EXPECT_THROW(plan_round_trip(AccountId("A"), AccountId("B"), kUsd, xrp(100), xrp(101), Amount::drops(10), {},
                               amt(1, kUsd)),
               TxError);
}

TEST(Settle, OutcomeCountMustMatch) {
  Plan p;
  p.transactions.resize(2);
  EXPECT_THROW(settle(p, {}, {}, {}, 1), std::invalid_argument);
}

TEST(Settle, FailedTransactionIsIncomplete) {
  Plan p;
  p.transactions.resize(1);
  p.controlled = {kBot};
  p.xrp_value[kXrp] = 1;
  p.planned_delivery = xrp(5);
  TxOutcome o;
  o.code = TxResultCode::PathDry;
  o.fee_charged = Amount::drops(10);
  const Holdings before{{{kBot, kXrp}, 100}};
  const Holdings after{{{kBot, kXrp}, 100 - Rational(10, 1'000'000)}};
  const PnLRecord r = settle(p, {o}, before, after, 3);
  EXPECT_EQ(r.outcome, PnLOutcome::Incomplete);
  EXPECT_EQ(r.realized, -Rational(10, 1'000'000));
  EXPECT_EQ(r.ledger, 3u);
}

TEST(Settle, RejectedRecordCarriesIntent) {
  const PnLRecord r = rejected_record(4, xrp(2));
  EXPECT_EQ(r.outcome, PnLOutcome::Rejected);
  EXPECT_EQ(r.realized, 0);
  EXPECT_EQ(r.intended, xrp(2));
}
