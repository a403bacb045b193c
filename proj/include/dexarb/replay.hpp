#ifndef DEXARB_REPLAY_HPP
#define DEXARB_REPLAY_HPP

#include "dexarb/cycle_detector.hpp"
#include "dexarb/fixture.hpp"
#include "dexarb/ledger.hpp"
#include "dexarb/rate_graph.hpp"
#include "dexarb/strategy.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace dexarb {

struct ReplayConfig {
  Amount fee_per_tx = Amount::drops(10);
  IssuerAllowlist allowlist = IssuerAllowlist::allow_all();
  AccountId bot{"bot"};
  // When set, cycles through XRP are taken with the two-transaction round
  // trip: the bot issues CUR (code below) that only this partner trusts.
  std::optional<AccountId> round_trip_partner;
  std::string round_trip_code = "CUR";
  bool timed = false;
  bool record_latency = false;
};

struct LedgerReport {
  LedgerIndex ledger = 0;
  bool detection_ran = false;
  std::string skipped_reason;
  std::optional<Cycle> cycle;
  std::vector<Opportunity> opportunities;
  std::size_t plans_submitted = 0;
  std::optional<Plan> plan;    // submitted for the next ledger
  std::vector<PnLRecord> pnl;  // settlements and rejections in this ledger
  std::int64_t detect_latency_us = 0;
};

struct RunTotals {
  Rational net_pnl = 0;
  Rational fees = 0;
  std::size_t completed = 0;
  std::size_t incomplete = 0;
  std::size_t rejected = 0;
  std::size_t detections_run = 0;
  std::size_t detections_skipped = 0;
};

struct RunReport {
  std::vector<LedgerReport> ledgers;
  RunTotals totals;
};

namespace detail {

struct PendingPlan {
  Plan plan;
  std::size_t first_outcome = 0;
  std::size_t submitted = 0;
  Holdings before;
};

inline bool touches_xrp(const Cycle& c) {
  return std::any_of(c.edges.begin(), c.edges.end(), [](const RateEdge& e) { return e.from.is_native(); });
}

inline std::optional<Plan> plan_round_trip_for(const Opportunity& opp, const RateGraph& graph, const Ledger& ledger,
                                               const ReplayConfig& cfg, LedgerIndex deadline) {
  for (const auto& e : opp.cycle.edges)
    if (!cfg.allowlist.allows(e.from)) return std::nullopt;
  const Cycle cycle = opp.cycle.rotated_to(CurrencyId::xrp());
  for (const auto& e : cycle.edges)
    if (!e.from.is_native() && e.from.issuer() != cfg.bot && !ledger.trustline(cfg.bot, e.from)) return std::nullopt;
  auto sized = evaluate(cycle, graph, ledger.fee_per_tx(), 2);
  if (!sized) return std::nullopt;
  Rational x = std::min(sized->notional_pay.value, ledger.xrp_balance(cfg.bot) - ledger.fee_per_tx().value * 2);
  if (x <= 0) return std::nullopt;
  const auto amounts = propagate(cycle, x);
  x = amounts.front();
  const Amount x_prime(amounts.back(), CurrencyId::xrp());
  const CurrencyId cur = CurrencyId::issued(cfg.round_trip_code, cfg.bot);
  RoundTripPlan rt = plan_round_trip(cfg.bot, *cfg.round_trip_partner, cur, Amount(x, CurrencyId::xrp()), x_prime,
                                     ledger.fee_per_tx(), cycle.path(), Amount(x_prime.value, cur));
  if (rt.rejected) return std::nullopt;
  Plan plan = rt.to_plan(deadline);
  for (auto& tx : plan.transactions) tx.signature = stamp(cfg.bot, deadline, &tx - plan.transactions.data());
  Opportunity o = *sized;
  o.cycle = cycle;
  o.notional_pay = rt.x;
  o.expected_receive = rt.x_prime;
  o.net_profit = plan.expected_net;
  plan.opportunity = std::move(o);
  return plan;
}

inline nlohmann::ordered_json amount_json(const Amount& a) { return a.render() + " " + a.currency.to_string(); }

inline nlohmann::ordered_json cycle_json(const Cycle& c) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& e : c.edges) arr.push_back(e.from.to_string());
  arr.push_back(c.start_currency.to_string());
  return arr;
}

inline nlohmann::ordered_json plan_json(const Plan& p) {
  auto txs = nlohmann::ordered_json::array();
  for (const auto& tx : p.transactions) {
    nlohmann::ordered_json t;
    t["type"] = std::string(to_string(tx.kind()));
    t["account"] = tx.sender.str();
    if (const auto* pay = std::get_if<PaymentTx>(&tx.payload)) {
      t["destination"] = pay->destination.str();
      t["amount"] = amount_json(pay->amount);
      if (pay->send_max) t["send_max"] = amount_json(*pay->send_max);
      auto hops = nlohmann::ordered_json::array();
      for (const auto& h : pay->paths) hops.push_back({h.pay.to_string(), h.get.to_string()});
      t["paths"] = std::move(hops);
    } else if (const auto* oc = std::get_if<OfferCreateTx>(&tx.payload)) {
      t["taker_pays"] = amount_json(oc->taker_pays);
      t["taker_gets"] = amount_json(oc->taker_gets);
    }
    txs.push_back(std::move(t));
  }
  nlohmann::ordered_json j;
  j["expected_net_xrp"] = p.expected_net.render();
  j["transactions"] = std::move(txs);
  return j;
}

inline nlohmann::ordered_json pnl_json(const PnLRecord& r) {
  nlohmann::ordered_json j;
  j["ledger"] = r.ledger;
  j["outcome"] = std::string(to_string(r.outcome));
  j["intended_xrp"] = render_signed_xrp(r.intended.value);
  j["realized_xrp"] = render_signed_xrp(r.realized);
  j["realized_exact"] = rational_to_string(r.realized);
  j["fees_paid_xrp"] = render_signed_xrp(r.fees_paid.value);
  return j;
}

}  // namespace detail

/// Drives the ledger through the fixture: per ledger, apply events and any
/// plan from the previous ledger, close, settle, update the graph, and run
/// detection only when some best offer changed.
inline RunReport replay(const std::vector<LedgerEvent>& events, const ReplayConfig& cfg,
                        Ledger* final_ledger = nullptr) {
  Ledger ledger(cfg.fee_per_tx);
  RateGraph graph = build(ledger.books(), ledger.index());
  RunReport report;
  std::optional<detail::PendingPlan> pending;
  std::optional<Cycle> last_cycle;
  std::vector<Opportunity> last_opps;

  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].ledger == 0 || (i > 0 && events[i].ledger < events[i - 1].ledger))
      throw FixtureError(i + 1, 0, "event ledger indices must be >= 1 and non-decreasing");
  }
  const LedgerIndex last = events.empty() ? 0 : events.back().ledger;
  std::size_t next = 0;
  for (LedgerIndex l = 1; l <= last || pending; ++l) {
    LedgerReport rep;
    rep.ledger = l;
    std::size_t queued = 0;
    for (; next < events.size() && events[next].ledger == l; ++next)
      if (ledger.submit(events[next].tx) == TxResultCode::Success) ++queued;
    std::vector<bool> plan_queued;
    if (pending) {
      pending->first_outcome = queued;
      pending->before = holdings(ledger, pending->plan);
      for (const auto& tx : pending->plan.transactions)
        plan_queued.push_back(ledger.submit(tx) == TxResultCode::Success);
    }

    if (cfg.timed) std::this_thread::sleep_for(std::chrono::milliseconds(ledger.interval_ms()));
    LedgerClose closed = ledger.close();

    if (pending) {
      std::vector<TxOutcome> outcomes;
      std::size_t at = pending->first_outcome;
      for (bool q : plan_queued) {
        if (q) {
          outcomes.push_back(closed.outcomes.at(at++));
        } else {
          TxOutcome o;
          o.code = TxResultCode::InsufficientFee;
          outcomes.push_back(std::move(o));
        }
      }
      PnLRecord r = settle(pending->plan, outcomes, pending->before, holdings(ledger, pending->plan), l);
      rep.pnl.push_back(r);
      pending.reset();
    }

    const auto t0 = std::chrono::steady_clock::now();
    update(graph, closed.delta, ledger.books());
    if (closed.delta.best_changed.empty()) {
      rep.detection_ran = false;
      rep.skipped_reason = "no best offer changed";
      rep.cycle = last_cycle;
      rep.opportunities = last_opps;
    } else {
      rep.detection_ran = true;
      rep.cycle = detect(graph);
      rep.opportunities.clear();
      if (rep.cycle) {
        const bool two_tx = cfg.round_trip_partner && detail::touches_xrp(*rep.cycle);
        if (auto opp = evaluate(*rep.cycle, graph, ledger.fee_per_tx(), two_tx ? 2 : 1)) {
          rep.opportunities.push_back(*opp);
          std::optional<Plan> plan =
              two_tx ? detail::plan_round_trip_for(*opp, graph, ledger, cfg, l + 1)
                     : plan_cycle(*opp, graph, ledger, cfg.allowlist, cfg.bot, l + 1);
          if (plan && plan->expected_net.value > 0) {
            rep.plan = plan;
            pending = detail::PendingPlan{std::move(*plan), 0, 0, {}};
            rep.plans_submitted = 1;
          } else {
            rep.pnl.push_back(rejected_record(l, opp->net_profit));
          }
        }
      }
      last_cycle = rep.cycle;
      last_opps = rep.opportunities;
    }
    rep.detect_latency_us =
        std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - t0).count();

    for (const auto& r : rep.pnl) {
      report.totals.net_pnl += r.realized;
      report.totals.fees += r.fees_paid.value;
      switch (r.outcome) {
        case PnLOutcome::Completed: ++report.totals.completed; break;
        case PnLOutcome::Incomplete: ++report.totals.incomplete; break;
        case PnLOutcome::Rejected: ++report.totals.rejected; break;
      }
    }
    if (rep.detection_ran) ++report.totals.detections_run;
    else ++report.totals.detections_skipped;
    report.ledgers.push_back(std::move(rep));
  }
  if (final_ledger) *final_ledger = std::move(ledger);
  return report;
}

/// Stable-key JSON rendering of a report. Latency is wall-clock and is only
/// included on request, so default reports are byte-reproducible.
inline std::string to_json(const RunReport& report, bool include_latency = false) {
  nlohmann::ordered_json j;
  auto ledgers = nlohmann::ordered_json::array();
  for (const auto& r : report.ledgers) {
    nlohmann::ordered_json lj;
    lj["ledger"] = r.ledger;
    lj["detection_ran"] = r.detection_ran;
    if (!r.detection_ran) lj["skipped_reason"] = r.skipped_reason;
    lj["cycle"] = r.cycle ? detail::cycle_json(*r.cycle) : nlohmann::ordered_json(nullptr);
    auto opps = nlohmann::ordered_json::array();
    for (const auto& o : r.opportunities) {
      nlohmann::ordered_json oj;
      oj["cycle"] = detail::cycle_json(o.cycle);
      oj["gross_multiplier"] = rational_to_string(o.gross_multiplier);
      oj["notional_pay"] = detail::amount_json(o.notional_pay);
      oj["expected_receive"] = detail::amount_json(o.expected_receive);
      oj["fee_total_xrp"] = o.fee_total.render();
      oj["net_profit_xrp"] = o.net_profit.render();
      opps.push_back(std::move(oj));
    }
    lj["opportunities"] = std::move(opps);
    lj["plans_submitted"] = r.plans_submitted;
    if (r.plan) lj["plan"] = detail::plan_json(*r.plan);
    auto pnl = nlohmann::ordered_json::array();
    for (const auto& p : r.pnl) pnl.push_back(detail::pnl_json(p));
    lj["pnl"] = std::move(pnl);
    if (include_latency) lj["detect_latency_us"] = r.detect_latency_us;
    ledgers.push_back(std::move(lj));
  }
  j["ledgers"] = std::move(ledgers);
  nlohmann::ordered_json t;
  t["net_pnl_xrp"] = render_signed_xrp(report.totals.net_pnl);
  t["net_pnl_exact"] = rational_to_string(report.totals.net_pnl);
  t["fees_xrp"] = render_signed_xrp(report.totals.fees);
  t["completed"] = report.totals.completed;
  t["incomplete"] = report.totals.incomplete;
  t["rejected"] = report.totals.rejected;
  t["detections_run"] = report.totals.detections_run;
  t["detections_skipped"] = report.totals.detections_skipped;
  j["totals"] = std::move(t);
  return j.dump(2) + "\n";
}

}  // namespace dexarb

#endif
