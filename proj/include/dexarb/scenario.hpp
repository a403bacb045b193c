#ifndef DEXARB_SCENARIO_HPP
#define DEXARB_SCENARIO_HPP

#include "dexarb/fixture.hpp"
#include "dexarb/strategy.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace dexarb {

struct PlantedCycle {
  Rational product;  // exact Π of the planted rates
  std::size_t length = 3;
};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  std::size_t currencies = 4;  // including XRP
  std::size_t offers = 100;
  std::size_t ledgers = 20;
  std::optional<PlantedCycle> plant;
  std::string bot = "bot";
};

struct PlantTruth {
  LedgerIndex ledger = 0;
  Rational product;
  std::vector<CurrencyId> currencies;  // in trade order, cycle closes back to the first

  std::string to_json() const {
    nlohmann::ordered_json j;
    j["ledger"] = ledger;
    j["product"] = rational_to_string(product);
    j["length"] = currencies.size();
    auto cs = nlohmann::ordered_json::array();
    for (const auto& c : currencies) cs.push_back(c.to_string());
    j["currencies"] = std::move(cs);
    return j.dump();
  }
};

struct Scenario {
  std::vector<LedgerEvent> events;
  std::optional<PlantTruth> truth;
};

namespace detail {

// Portable draws: std::uniform_int_distribution is implementation-defined.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + rng_() % (hi - lo + 1); }
  bool chance(unsigned percent) { return between(1, 100) <= percent; }

 private:
  std::mt19937_64 rng_;
};

inline std::string two_digit(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02zu", i);
  return buf;
}

inline Amount amount_of(const BigInt& numer, const BigInt& denom, const CurrencyId& c) {
  return Amount(Rational(numer, denom), c);
}

}  // namespace detail

/// Seeded synthetic market. Currency k has a fair XRP price p_k; every
/// random offer quotes below fair by 1-5%, so no random cycle is profitable.
/// A planted cycle quotes at fair price except for one leg scaled by the
/// requested product.
inline Scenario generate_scenario(const ScenarioConfig& cfg) {
  if (cfg.currencies < 2) throw std::invalid_argument("need at least 2 currencies");
  if (cfg.ledgers < 3) throw std::invalid_argument("need at least 3 ledgers");
  // A two-leg cycle with product > 1 is a crossed book and fills on entry.
  if (cfg.plant && (cfg.plant->length < 3 || cfg.plant->length > cfg.currencies))
    throw std::invalid_argument("planted cycle length must be within [3, currencies]");
  if (cfg.plant && cfg.plant->product <= 0) throw std::invalid_argument("planted product must be positive");

  detail::Draw draw(cfg.seed);
  Scenario sc;
  const AccountId bot(cfg.bot);
  const std::size_t makers = 5;

  std::vector<CurrencyId> cur{CurrencyId::xrp()};
  std::vector<std::uint64_t> price{1};
  std::vector<AccountId> gateways;
  for (std::size_t i = 1; i < cfg.currencies; ++i) {
    gateways.emplace_back("G" + detail::two_digit(i));
    cur.push_back(CurrencyId::issued("C" + detail::two_digit(i), gateways.back()));
    price.push_back(draw.between(1, 20));
  }
  std::vector<AccountId> maker;
  for (std::size_t m = 1; m <= makers; ++m) maker.emplace_back("M" + detail::two_digit(m));
  const AccountId planter("P01");

  auto push = [&](LedgerIndex l, AccountId sender, auto payload, TxFlags flags = {}) {
    LedgerEvent ev;
    ev.ledger = l;
    ev.tx.sender = std::move(sender);
    ev.tx.payload = std::move(payload);
    ev.tx.flags = flags;
    sc.events.push_back(std::move(ev));
  };

  // Ledger 1: accounts and trustlines. Ledger 2: IOU distribution.
  const Amount big_xrp = make_amount("1000000000", CurrencyId::xrp());
  for (const auto& g : gateways) push(1, g, FundTx{make_amount("1000", CurrencyId::xrp())});
  std::vector<AccountId> holders = maker;
  holders.push_back(planter);
  for (const auto& h : holders) push(1, h, FundTx{big_xrp});
  push(1, bot, FundTx{make_amount("1000000", CurrencyId::xrp())});
  holders.push_back(bot);
  for (const auto& h : holders)
    for (std::size_t i = 1; i < cur.size(); ++i)
      push(1, h, TrustSetTx{make_amount("1000000000000", cur[i])});
  for (const auto& h : holders)
    for (std::size_t i = 1; i < cur.size(); ++i)
      push(2, gateways[i - 1], PaymentTx{h, make_amount(h == bot ? "1000000" : "1000000000", cur[i]), std::nullopt, {}});

  std::map<AccountId, std::uint64_t> next_seq;
  std::vector<std::pair<AccountId, std::uint64_t>> live;
  std::vector<std::vector<LedgerEvent>> by_ledger(cfg.ledgers + 1);

  for (std::size_t n = 0; n < cfg.offers; ++n) {
    const LedgerIndex l = draw.between(3, cfg.ledgers);
    const std::size_t a = draw.between(0, cur.size() - 1);
    std::size_t b = draw.between(0, cur.size() - 2);
    if (b >= a) ++b;
    const std::uint64_t spread = draw.between(1, 5);
    const std::uint64_t k = draw.between(1, 100);
    // rate = p_a/p_b * (100-s)/100, pays = k*p_b, gets = k*p_a*(100-s)/100
    const AccountId& who = maker[draw.between(0, makers - 1)];
    OfferCreateTx oc;
    oc.sequence = ++next_seq[who];
    oc.taker_pays = detail::amount_of(BigInt(k * price[b]), 1, cur[a]);
    oc.taker_gets = detail::amount_of(BigInt(k * price[a] * (100 - spread)), 100, cur[b]);
    LedgerEvent ev;
    ev.ledger = l;
    ev.tx.sender = who;
    ev.tx.payload = oc;
    by_ledger[l].push_back(std::move(ev));
  }

  // Cancellations of earlier offers, about one per five creates.
  for (LedgerIndex l = 3; l <= cfg.ledgers; ++l) {
    for (const auto& ev : by_ledger[l]) {
      if (ev.tx.kind() == TxKind::OfferCreate)
        live.emplace_back(ev.tx.sender, std::get<OfferCreateTx>(ev.tx.payload).sequence);
    }
    if (!live.empty() && l < cfg.ledgers && draw.chance(20)) {
      const std::size_t i = draw.between(0, live.size() - 1);
      LedgerEvent ev;
      ev.ledger = l + 1;
      ev.tx.sender = live[i].first;
      ev.tx.payload = OfferCancelTx{live[i].second};
      by_ledger[l + 1].insert(by_ledger[l + 1].begin(), std::move(ev));
      live.erase(live.begin() + static_cast<std::ptrdiff_t>(i));
    }
  }

  if (cfg.plant) {
    const LedgerIndex l = std::max<LedgerIndex>(3, cfg.ledgers / 2);
    std::vector<std::size_t> idx(cur.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = idx.size() - 1; i > 0; --i) std::swap(idx[i], idx[draw.between(0, i)]);
    idx.resize(cfg.plant->length);

    PlantTruth truth{l, cfg.plant->product, {}};
    const BigInt pn = boost::multiprecision::numerator(cfg.plant->product);
    const BigInt pd = boost::multiprecision::denominator(cfg.plant->product);
    const BigInt depth = 1000;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const std::size_t from = idx[i];
      const std::size_t to = idx[(i + 1) % idx.size()];
      const bool closing = i + 1 == idx.size();
      OfferCreateTx oc;
      oc.sequence = ++next_seq[planter];
      oc.taker_pays = detail::amount_of(depth * price[to] * pd, 1, cur[from]);
      oc.taker_gets = detail::amount_of(depth * price[from] * (closing ? pn : pd), 1, cur[to]);
      LedgerEvent ev;
      ev.ledger = l;
      ev.tx.sender = planter;
      ev.tx.payload = oc;
      by_ledger[l].push_back(std::move(ev));
      truth.currencies.push_back(cur[from]);
    }
    sc.truth = std::move(truth);
  }

  for (auto& evs : by_ledger)
    for (auto& ev : evs) sc.events.push_back(std::move(ev));
  return sc;
}

/// Accounts and market used by the two-account round trip.
struct RoundTripSetup {
  AccountId a{"A"};
  AccountId b{"B"};
  AccountId gateway{"G"};
  AccountId seller{"M1"};  // sells USD for x XRP
  AccountId buyer{"M2"};   // pays x′ XRP for EUR
  AccountId broker{"M3"};  // sells EUR for USD at par
  CurrencyId usd = CurrencyId::issued("USD", AccountId("G"));
  CurrencyId eur = CurrencyId::issued("EUR", AccountId("G"));

  // XRP -> USD -> EUR -> XRP. Three legs, so the mispriced offers cannot
  // cross each other directly.
  std::vector<DirectedPair> market_path() const {
    return {{CurrencyId::xrp(), usd}, {usd, eur}, {eur, CurrencyId::xrp()}};
  }
  CurrencyId cur = CurrencyId::issued("CUR", AccountId("A"));
};

struct RoundTripResult {
  RoundTripPlan plan;
  std::vector<TxOutcome> outcomes;
  Rational gain;  // realized XRP change of A and B together
  PnLRecord pnl;
  Ledger ledger;
};

/// Ledger events setting up the market for a round trip: ledger 1 funds and
/// trusts, ledger 2 places the two mispriced market offers.
inline std::vector<LedgerEvent> round_trip_market(const RoundTripSetup& s, const Amount& x, const Amount& x_prime,
                                                  const Amount& cur_amount) {
  const Amount usd_lot = make_amount("1000", s.usd);
  const Amount eur_lot = make_amount("1000", s.eur);
  std::vector<LedgerEvent> evs;
  auto push = [&](LedgerIndex l, const AccountId& sender, auto payload) {
    LedgerEvent ev;
    ev.ledger = l;
    ev.tx.sender = sender;
    ev.tx.payload = std::move(payload);
    evs.push_back(std::move(ev));
  };
  const Amount thousand = make_amount("1000", CurrencyId::xrp());
  push(1, s.a, FundTx{thousand + x});
  push(1, s.b, FundTx{thousand});
  push(1, s.gateway, FundTx{thousand});
  push(1, s.seller, FundTx{thousand});
  push(1, s.broker, FundTx{thousand});
  push(1, s.buyer, FundTx{thousand + x_prime});
  push(1, s.a, TrustSetTx{make_amount("1000000", s.usd)});
  push(1, s.a, TrustSetTx{make_amount("1000000", s.eur)});
  push(1, s.seller, TrustSetTx{make_amount("1000000", s.usd)});
  push(1, s.broker, TrustSetTx{make_amount("1000000", s.eur)});
  push(1, s.b, TrustSetTx{Amount(cur_amount.value * 10, s.cur)});
  push(2, s.gateway, PaymentTx{s.seller, usd_lot, std::nullopt, {}});
  push(2, s.gateway, PaymentTx{s.broker, eur_lot, std::nullopt, {}});
  push(2, s.seller, OfferCreateTx{1, x, usd_lot});
  push(2, s.broker, OfferCreateTx{1, usd_lot, eur_lot});
  push(2, s.buyer, OfferCreateTx{1, eur_lot, x_prime});
  return evs;
}

/// Runs the round trip end to end in a fresh ledger and measures the
/// realized aggregate gain of A and B.
inline RoundTripResult run_round_trip(const Amount& x, const Amount& x_prime, const Amount& fee_per_tx) {
  RoundTripSetup s;
  const Amount cur_amount = make_amount("100", s.cur);
  Ledger ledger(fee_per_tx);
  for (const auto& ev : round_trip_market(s, x, x_prime, cur_amount)) {
    while (ledger.index() + 1 < ev.ledger) ledger.close();
    ledger.submit(ev.tx);
  }
  ledger.close();

  RoundTripResult r{plan_round_trip(s.a, s.b, s.cur, x, x_prime, fee_per_tx,
                                    s.market_path(), cur_amount),
                    {}, 0, {}, Ledger(fee_per_tx)};
  const Plan plan = r.plan.to_plan(ledger.index() + 1);
  if (r.plan.rejected) {
    r.pnl = rejected_record(ledger.index() + 1, plan.expected_net);
    r.ledger = std::move(ledger);
    return r;
  }
  const Holdings before = holdings(ledger, plan);
  for (const auto& tx : r.plan.transactions) ledger.submit(tx);
  LedgerClose closed = ledger.close();
  r.outcomes = closed.outcomes;
  const Holdings after = holdings(ledger, plan);
  r.pnl = settle(plan, r.outcomes, before, after, closed.index);
  r.gain = (ledger.xrp_balance(s.a) + ledger.xrp_balance(s.b)) -
           (before.at({s.a, CurrencyId::xrp()}) + before.at({s.b, CurrencyId::xrp()}));
  r.ledger = std::move(ledger);
  return r;
}

}  // namespace dexarb

#endif
