#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace dexarb;
using namespace dexarb::testing;

namespace {

std::vector<LedgerEvent> load(const std::string& name) {
  std::ifstream in(std::string(DEXARB_FIXTURE_DIR) + "/" + name);
  EXPECT_TRUE(in.good()) << name;
  return read_fixture(in, true).events;
}

std::vector<PnLRecord> all_pnl(const RunReport& r) {
  std::vector<PnLRecord> out;
  for (const auto& l : r.ledgers) out.insert(out.end(), l.pnl.begin(), l.pnl.end());
  return out;
}

}  // namespace

TEST(Replay, TriangleCompletes) {
  Ledger final_state;
  const RunReport r = replay(load("triangle.jsonl"), ReplayConfig{}, &final_state);
  const auto pnl = all_pnl(r);
  ASSERT_EQ(pnl.size(), 1u);
  EXPECT_EQ(pnl[0].outcome, PnLOutcome::Completed);
  EXPECT_EQ(pnl[0].realized, Rational(12, 5) - Rational(10, 1'000'000));
  EXPECT_EQ(pnl[0].realized, pnl[0].intended.value);
  EXPECT_EQ(pnl[0].ledger, 4u);
  EXPECT_EQ(final_state.iou_balance(AccountId("bot"), cur("USD")), 104);
  EXPECT_TRUE(final_state.iou_conserved());
  EXPECT_TRUE(final_state.xrp_conserved());
}

TEST(Replay, CompetitorLeavesOneIncompleteFeeLoss) {
  Ledger final_state;
  const RunReport r = replay(load("competitor.jsonl"), ReplayConfig{}, &final_state);
  const auto pnl = all_pnl(r);
  ASSERT_EQ(pnl.size(), 1u);
  EXPECT_EQ(pnl[0].outcome, PnLOutcome::Incomplete);
  EXPECT_EQ(pnl[0].realized, -pnl[0].fees_paid.value);
  EXPECT_EQ(pnl[0].fees_paid, Amount::drops(10));
  const AccountId bot("bot");
  EXPECT_EQ(final_state.iou_balance(bot, cur("USD")), 100);
  EXPECT_EQ(final_state.iou_balance(bot, cur("EUR")), 0);
  // Two TrustSets in the fixture plus the failed cycle payment.
  EXPECT_EQ(final_state.xrp_balance(bot), 1000 - Rational(30, 1'000'000));
  EXPECT_TRUE(final_state.iou_conserved());
  EXPECT_TRUE(final_state.xrp_conserved());
}

TEST(Replay, RoundTripWithPartner) {
  ReplayConfig cfg;
  cfg.round_trip_partner = AccountId("B");
  Ledger final_state;
  const RunReport r = replay(load("round_trip.jsonl"), cfg, &final_state);
  const auto pnl = all_pnl(r);
  ASSERT_EQ(pnl.size(), 1u);
  EXPECT_EQ(pnl[0].outcome, PnLOutcome::Completed);
  EXPECT_EQ(pnl[0].realized, Rational(99998, 100000));
  EXPECT_EQ(final_state.iou_balance(AccountId("B"), cur("CUR", "bot")), 101);
  // Two TrustSet fees, then the round trip's gain.
  EXPECT_EQ(final_state.xrp_balance(AccountId("bot")), 1100 - Rational(20, 1'000'000) + Rational(99998, 100000));
}

TEST(Replay, AllowlistBlocksPlan) {
  std::ifstream al(std::string(DEXARB_FIXTURE_DIR) + "/allowlist.txt");
  ReplayConfig cfg;
  cfg.allowlist = IssuerAllowlist::parse(al);
  const RunReport r = replay(load("triangle.jsonl"), cfg);
  for (const auto& l : r.ledgers) EXPECT_EQ(l.plans_submitted, 0u);
  const auto pnl = all_pnl(r);
  ASSERT_EQ(pnl.size(), 1u);
  EXPECT_EQ(pnl[0].outcome, PnLOutcome::Rejected);
}

TEST(Replay, NoCycleFixtureSkipsQuietLedgers) {
  const RunReport r = replay(load("no_cycle.jsonl"), ReplayConfig{});
  ASSERT_EQ(r.ledgers.size(), 5u);
  std::vector<bool> ran;
  for (const auto& l : r.ledgers) {
    ran.push_back(l.detection_ran);
    EXPECT_FALSE(l.cycle.has_value());
    EXPECT_EQ(l.plans_submitted, 0u);
  }
  EXPECT_EQ(ran, (std::vector<bool>{false, false, true, false, true}));
  EXPECT_EQ(r.totals.detections_run, 2u);
  EXPECT_EQ(r.totals.detections_skipped, 3u);
  EXPECT_EQ(r.ledgers[1].skipped_reason, "no best offer changed");
}

TEST(Replay, SkippedLedgersRepeatPriorResult) {
  const RunReport r = replay(load("competitor.jsonl"), ReplayConfig{});
  for (std::size_t i = 1; i < r.ledgers.size(); ++i) {
    const auto& l = r.ledgers[i];
    if (l.detection_ran) continue;
    EXPECT_EQ(l.cycle.has_value(), r.ledgers[i - 1].cycle.has_value());
    if (l.cycle) {
      EXPECT_EQ(l.cycle->path(), r.ledgers[i - 1].cycle->path());
    }
  }
}

TEST(Replay, ReportsAreByteIdentical) {
  const auto events = load("competitor.jsonl");
  EXPECT_EQ(to_json(replay(events, ReplayConfig{})), to_json(replay(events, ReplayConfig{})));
}

TEST(Replay, LatencyOnlyOnRequest) {
  ReplayConfig cfg;
  cfg.record_latency = true;
  const RunReport r = replay(load("no_cycle.jsonl"), cfg);
  EXPECT_EQ(to_json(r).find("detect_latency_us"), std::string::npos);
  EXPECT_NE(to_json(r, true).find("detect_latency_us"), std::string::npos);
}

TEST(Replay, ReportShape) {
  const auto j = nlohmann::json::parse(to_json(replay(load("triangle.jsonl"), ReplayConfig{})));
  ASSERT_TRUE(j.contains("ledgers"));
  ASSERT_TRUE(j.contains("totals"));
  const auto& l3 = j["ledgers"][2];
  EXPECT_EQ(l3["ledger"], 3);
  EXPECT_EQ(l3["detection_ran"], true);
  EXPECT_EQ(l3["cycle"], nlohmann::json::parse(R"(["XRP","USD@G1","EUR@G1","XRP"])"));
  EXPECT_EQ(l3["plan"]["transactions"][0]["paths"].size(), 3u);
  EXPECT_EQ(j["totals"]["completed"], 1);
  EXPECT_EQ(j["totals"]["net_pnl_exact"], "239999/100000");
}

TEST(Replay, EventAfterItsLedgerRejected) {
  auto events = load("no_cycle.jsonl");
  std::swap(events.front(), events.back());
  EXPECT_THROW(replay(events, ReplayConfig{}), FixtureError);
}

// Every planted cycle of length 3..5 with product >= 1.01 is found in the
// ledger it is placed, through the one above-fair edge.
TEST(Replay, PlantedCyclesAreRecalled) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    ScenarioConfig cfg;
    cfg.seed = seed;
    cfg.currencies = 8;
    cfg.offers = 300;
    cfg.ledgers = 20;
    cfg.plant = PlantedCycle{Rational(101 + static_cast<long long>(seed % 5) * 3, 100), 3 + seed % 3};
    const Scenario sc = generate_scenario(cfg);
    const RunReport r = replay(sc.events, ReplayConfig{});
    const PlantTruth& t = *sc.truth;
    const LedgerReport& at = r.ledgers.at(t.ledger - 1);
    ASSERT_EQ(at.ledger, t.ledger);
    ASSERT_TRUE(at.detection_ran);
    ASSERT_TRUE(at.cycle.has_value()) << "seed " << seed;
    const CurrencyId closing_from = t.currencies.back();
    const CurrencyId closing_to = t.currencies.front();
    bool has_closing = false;
    for (const auto& e : at.cycle->edges) has_closing |= e.from == closing_from && e.to == closing_to;
    EXPECT_TRUE(has_closing) << "seed " << seed << " cycle " << at.cycle->to_string();
    EXPECT_GT(at.cycle->gross_multiplier(), 1);
  }
}

// Without a plant every rate is at or below fair, so nothing is detected.
TEST(Replay, UnplantedScenarioHasNoCycles) {
  ScenarioConfig cfg;
  cfg.seed = 77;
  cfg.currencies = 10;
  cfg.offers = 500;
  cfg.ledgers = 30;
  const RunReport r = replay(generate_scenario(cfg).events, ReplayConfig{});
  for (const auto& l : r.ledgers) EXPECT_FALSE(l.cycle.has_value()) << "ledger " << l.ledger;
}
