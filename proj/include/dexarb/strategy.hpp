#ifndef DEXARB_STRATEGY_HPP
#define DEXARB_STRATEGY_HPP

#include "dexarb/cycle_detector.hpp"
#include "dexarb/ledger.hpp"

#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace dexarb {

/// Issuers whose IOUs the strategy is willing to route through. Native XRP
/// is always allowed.
class IssuerAllowlist {
 public:
  static IssuerAllowlist allow_all() {
    IssuerAllowlist l;
    l.allow_all_ = true;
    return l;
  }

  /// One `CODE issuer-account` pair per line; `#` starts a comment.
  static IssuerAllowlist parse(std::istream& in) {
    IssuerAllowlist l;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream fields(line);
      std::string code, issuer, extra;
      if (!(fields >> code)) continue;
      if (!(fields >> issuer) || (fields >> extra))
        throw std::runtime_error("allow-list line " + std::to_string(lineno) + ": expected `CODE issuer`");
      l.add(CurrencyId::issued(code, AccountId(issuer)));
    }
    return l;
  }

  void add(const CurrencyId& c) { entries_.insert(c); }

  bool allows(const CurrencyId& c) const { return c.is_native() || allow_all_ || entries_.contains(c); }
  bool allows_all() const noexcept { return allow_all_; }
  const std::set<CurrencyId>& entries() const noexcept { return entries_; }

 private:
  bool allow_all_ = false;
  std::set<CurrencyId> entries_;
};

struct Plan {
  std::vector<Transaction> transactions;
  Amount expected_net;  // native
  LedgerIndex deadline_ledger = 0;
  std::vector<AccountId> controlled;
  std::map<CurrencyId, Rational> xrp_value;  // XRP per unit, for PnL
  Amount planned_delivery;
  std::optional<Opportunity> opportunity;
};

inline constexpr TxFlags kArbFlags{true, true};

inline std::string stamp(const AccountId& a, LedgerIndex ledger, std::size_t n) {
  return "signed:" + a.str() + ":" + std::to_string(ledger) + ":" + std::to_string(n);
}

/// Issuing the whole cycle as one multi-hop payment from `account` to
/// itself. A cycle that starts at XRP is rotated to start at its first IOU,
/// since an XRP-to-XRP payment may not cross currencies. Returns nothing if
/// the cycle touches a non-allow-listed issuer, the account lacks a needed
/// trustline or funds, or the resized trade is no longer profitable.
inline std::optional<Plan> plan_cycle(const Opportunity& opp, const RateGraph& graph, const Ledger& ledger,
                                      const IssuerAllowlist& allow, const AccountId& account,
                                      LedgerIndex deadline) {
  if (opp.net_profit.value <= 0) return std::nullopt;
  for (const auto& e : opp.cycle.edges)
    if (!allow.allows(e.from)) return std::nullopt;

  Cycle cycle = opp.cycle;
  if (cycle.start_currency.is_native()) {
    auto iou = std::find_if(cycle.edges.begin(), cycle.edges.end(), [](const RateEdge& e) { return !e.from.is_native(); });
    if (iou == cycle.edges.end()) return std::nullopt;
    cycle = cycle.rotated_to(iou->from);
  }

  for (const auto& e : cycle.edges) {
    const CurrencyId& c = e.from;
    if (c.is_native() || c.issuer() == account) continue;
    if (!ledger.trustline(account, c)) return std::nullopt;
  }

  const Rational funds = ledger.balance(account, cycle.start_currency);
  Rational notional = max_notional(cycle);
  if (cycle.start_currency.issuer() != account) notional = std::min(notional, funds);
  if (notional <= 0) return std::nullopt;

  Cycle sized = cycle;
  const std::vector<Rational> amounts = propagate(sized, notional);
  auto resized = evaluate(sized, graph, ledger.fee_per_tx(), 1);
  if (!resized) return std::nullopt;
  const Rational pay = amounts.front();
  const Rational receive = amounts.back();
  const Rational gain = detail::floor_to_drops((receive - pay) * resized->xrp_per_start);
  if (gain <= ledger.fee_per_tx().value) return std::nullopt;

  Plan plan;
  plan.deadline_ledger = deadline;
  plan.controlled = {account};
  plan.expected_net = Amount(gain - ledger.fee_per_tx().value, CurrencyId::xrp());
  plan.planned_delivery = Amount(receive, cycle.start_currency);

  Rational prefix = 1;
  for (const auto& e : cycle.edges) {
    plan.xrp_value.emplace(e.from, resized->xrp_per_start / prefix);
    prefix *= e.rate;
  }
  plan.xrp_value[CurrencyId::xrp()] = 1;

  Transaction tx;
  tx.sender = account;
  tx.flags = kArbFlags;
  tx.payload = PaymentTx{account, Amount(receive, cycle.start_currency), Amount(pay, cycle.start_currency),
                         cycle.path()};
  tx.signature = stamp(account, deadline, 0);
  plan.transactions.push_back(std::move(tx));

  Opportunity o = *resized;
  o.notional_pay = Amount(pay, cycle.start_currency);
  o.expected_receive = plan.planned_delivery;
  o.net_profit = plan.expected_net;
  plan.opportunity = std::move(o);
  return plan;
}

/// Two-account XRP round trip: A rests an offer selling its own CUR for x′
/// XRP, then pays x XRP through `market_path` (XRP → … → XRP) and A's own
/// offer so that B receives CUR. A and B together gain x′ − x − e.
struct RoundTripPlan {
  AccountId account_a;
  AccountId account_b;
  CurrencyId cur;
  Amount x;
  Amount x_prime;
  Amount e;
  Amount cur_amount;
  std::vector<Transaction> transactions;
  bool rejected = false;
  std::string reason;

  Rational aggregate_gain() const { return x_prime.value - x.value - e.value; }

  Plan to_plan(LedgerIndex deadline) const {
    Plan p;
    p.transactions = transactions;
    p.expected_net = Amount(rejected ? Rational(0) : aggregate_gain(), CurrencyId::xrp());
    p.deadline_ledger = deadline;
    p.controlled = {account_a, account_b};
    p.xrp_value[CurrencyId::xrp()] = 1;
    p.xrp_value[cur] = 0;  // A's liability and B's holding cancel
    p.planned_delivery = cur_amount;
    return p;
  }
};

inline RoundTripPlan plan_round_trip(const AccountId& a, const AccountId& b, const CurrencyId& cur, const Amount& x,
                                     const Amount& x_prime, const Amount& fee_per_tx,
                                     const std::vector<DirectedPair>& market_path, const Amount& cur_amount) {
  RoundTripPlan p{a, b, cur, x, x_prime, Amount(fee_per_tx.value * 2, CurrencyId::xrp()), cur_amount, {}, false, {}};
  if (!x.is_native() || !x_prime.is_native() || !fee_per_tx.is_native())
    throw TxError(TxResultCode::MalformedTx, "round trip amounts must be XRP");
  if (cur.is_native() || cur.issuer() != a || cur_amount.currency != cur)
    throw TxError(TxResultCode::MalformedTx, "CUR must be issued by account A");
  if (p.aggregate_gain() <= 0) {
    p.rejected = true;
    p.reason = "x' must exceed x + 2 fees";
    return p;
  }

  Transaction offer;
  offer.sender = a;
  offer.payload = OfferCreateTx{0, x_prime, cur_amount};
  offer.signature = stamp(a, 0, 0);

  std::vector<DirectedPair> path = market_path;
  path.push_back({CurrencyId::xrp(), cur});
  Transaction pay;
  pay.sender = a;
  pay.flags = kArbFlags;
  pay.payload = PaymentTx{b, cur_amount, x, std::move(path)};
  pay.signature = stamp(a, 0, 1);

  p.transactions = {std::move(offer), std::move(pay)};
  return p;
}

enum class PnLOutcome { Completed, Incomplete, Rejected };

inline std::string_view to_string(PnLOutcome o) {
  switch (o) {
    case PnLOutcome::Completed: return "Completed";
    case PnLOutcome::Incomplete: return "Incomplete";
    case PnLOutcome::Rejected: return "Rejected";
  }
  return "?";
}

struct PnLRecord {
  LedgerIndex ledger = 0;
  Amount intended = Amount::zero(CurrencyId::xrp());
  Rational realized = 0;  // XRP, signed
  Amount fees_paid = Amount::zero(CurrencyId::xrp());
  PnLOutcome outcome = PnLOutcome::Rejected;
};

using Holdings = std::map<std::pair<AccountId, CurrencyId>, Rational>;

inline Holdings holdings(const Ledger& ledger, const Plan& plan) {
  Holdings h;
  for (const auto& a : plan.controlled)
    for (const auto& [c, _] : plan.xrp_value) h[{a, c}] = ledger.balance(a, c);
  return h;
}

/// Values the change in controlled holdings at the plan's exact rates.
/// Fees are part of the XRP delta.
inline PnLRecord settle(const Plan& plan, const std::vector<TxOutcome>& outcomes, const Holdings& before,
                        const Holdings& after, LedgerIndex ledger) {
  if (outcomes.size() != plan.transactions.size())
    throw std::invalid_argument("settle: outcome count does not match plan");
  PnLRecord r;
  r.ledger = ledger;
  r.intended = plan.expected_net;
  for (const auto& o : outcomes) r.fees_paid.value += o.fee_charged.value;
  for (const auto& [key, v] : after) {
    auto b = before.find(key);
    const Rational delta = v - (b == before.end() ? Rational(0) : b->second);
    r.realized += delta * plan.xrp_value.at(key.second);
  }
  bool complete = !outcomes.empty();
  for (const auto& o : outcomes) complete = complete && o.code == TxResultCode::Success;
  if (complete) {
    const TxOutcome& last = outcomes.back();
    complete = last.delivered && last.delivered->value == plan.planned_delivery.value;
  }
  r.outcome = complete ? PnLOutcome::Completed : PnLOutcome::Incomplete;
  return r;
}

inline PnLRecord rejected_record(LedgerIndex ledger, const Amount& intended) {
  PnLRecord r;
  r.ledger = ledger;
  r.intended = intended;
  r.outcome = PnLOutcome::Rejected;
  return r;
}

}  // namespace dexarb

#endif
