// Shared generators and oracles for the unit and acceptance suites.
#ifndef DEXARB_TEST_SUPPORT_HPP
#define DEXARB_TEST_SUPPORT_HPP

#include "dexarb/dexarb.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace dexarb::testing {

inline CurrencyId cur(const std::string& code, const std::string& issuer = "G1") {
  return CurrencyId::issued(code, AccountId(issuer));
}

inline RateEdge make_edge(const CurrencyId& from, const CurrencyId& to, const Rational& rate,
                          const Rational& capacity = Rational(1'000'000)) {
  RateEdge e;
  e.from = from;
  e.to = to;
  e.rate = rate;
  e.weight = edge_weight(rate);
  e.capacity_pay = Amount(capacity, from);
  e.source_offer = OfferKey{AccountId("m"), 1};
  return e;
}

inline RateGraph graph_of(const std::vector<RateEdge>& edges) {
  RateGraph g;
  for (const auto& e : edges) {
    g.edges[{e.from, e.to}] = e;
    g.vertices.insert(e.from);
    g.vertices.insert(e.to);
  }
  return g;
}

// Small-integer rate matrix: rate[i][j] = num/den, den == 0 means no edge.
struct SmallGraph {
  std::size_t n = 0;
  std::vector<std::vector<std::int64_t>> num, den;
};

inline SmallGraph random_small_graph(std::mt19937_64& rng, std::size_t max_vertices, std::int64_t max_term) {
  SmallGraph g;
  g.n = 2 + rng() % (max_vertices - 1);
  g.num.assign(g.n, std::vector<std::int64_t>(g.n, 0));
  g.den.assign(g.n, std::vector<std::int64_t>(g.n, 0));
  const unsigned density = 30 + static_cast<unsigned>(rng() % 70);
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.n; ++j) {
      if (i == j || rng() % 100 >= density) continue;
      g.num[i][j] = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(max_term));
      g.den[i][j] = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(max_term));
    }
  return g;
}

// Rates from per-vertex prices with a small multiplicative perturbation, so
// cycle products sit near one and some are exactly one.
inline SmallGraph random_near_fair_graph(std::mt19937_64& rng, std::size_t max_vertices) {
  SmallGraph g;
  g.n = 2 + rng() % (max_vertices - 1);
  std::vector<std::int64_t> price(g.n);
  for (auto& p : price) p = 1 + static_cast<std::int64_t>(rng() % 20);
  g.num.assign(g.n, std::vector<std::int64_t>(g.n, 0));
  g.den.assign(g.n, std::vector<std::int64_t>(g.n, 0));
  const unsigned density = 30 + static_cast<unsigned>(rng() % 70);
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.n; ++j) {
      if (i == j || rng() % 100 >= density) continue;
      const std::int64_t bump = rng() % 3 == 0 ? static_cast<std::int64_t>(rng() % 5) - 2 : 0;
      g.num[i][j] = price[i] * (100 + bump);
      g.den[i][j] = price[j] * 100;
    }
  return g;
}

inline std::vector<CurrencyId> small_currencies(std::size_t n) {
  std::vector<CurrencyId> out{CurrencyId::xrp()};
  for (std::size_t i = 1; i < n; ++i) out.push_back(cur("C" + std::string(2 - std::to_string(i).size(), '0') + std::to_string(i)));
  return out;
}

inline RateGraph to_rate_graph(const SmallGraph& s) {
  const auto c = small_currencies(s.n);
  std::vector<RateEdge> edges;
  for (std::size_t i = 0; i < s.n; ++i)
    for (std::size_t j = 0; j < s.n; ++j)
      if (s.den[i][j]) edges.push_back(make_edge(c[i], c[j], Rational(s.num[i][j], s.den[i][j])));
  RateGraph g = graph_of(edges);
  for (const auto& v : c) g.vertices.insert(v);
  return g;
}

// Exhaustive simple-cycle enumeration in integer arithmetic. Each cycle is
// visited once, rooted at its smallest vertex. Calls `visit(vertices)` for
// every cycle whose product exceeds one; stops early when it returns false.
inline void enumerate_profitable_cycles(const SmallGraph& g,
                                        const std::function<bool(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> path;
  std::vector<bool> used(g.n, false);
  bool stop = false;
  std::function<void(std::size_t, __int128, __int128)> dfs = [&](std::size_t u, __int128 pn, __int128 pd) {
    const std::size_t root = path.front();
    for (std::size_t v = root; v < g.n && !stop; ++v) {
      if (!g.den[u][v]) continue;
      const __int128 nn = pn * g.num[u][v], nd = pd * g.den[u][v];
      if (v == root) {
        if (path.size() >= 2 && nn > nd && !visit(path)) stop = true;
        continue;
      }
      if (used[v]) continue;
      used[v] = true;
      path.push_back(v);
      dfs(v, nn, nd);
      path.pop_back();
      used[v] = false;
    }
  };
  for (std::size_t r = 0; r < g.n && !stop; ++r) {
    path = {r};
    used.assign(g.n, false);
    used[r] = true;
    dfs(r, 1, 1);
  }
}

inline bool has_profitable_cycle(const SmallGraph& g) {
  bool found = false;
  enumerate_profitable_cycles(g, [&](const std::vector<std::size_t>&) {
    found = true;
    return false;
  });
  return found;
}

// Random book mutations over a fixed currency set. Returns the number of
// mutations applied.
struct BookMutator {
  std::vector<CurrencyId> currencies;
  std::vector<OfferKey> live;
  std::uint64_t seq = 0;

  std::size_t mutate(OrderBook& b, std::mt19937_64& rng, LedgerIndex ledger, std::size_t count) {
    for (std::size_t m = 0; m < count; ++m) {
      const unsigned op = static_cast<unsigned>(rng() % 10);
      if (op < 5 || live.empty()) {
        const auto i = rng() % currencies.size();
        auto j = rng() % (currencies.size() - 1);
        if (j >= i) ++j;
        Offer o{AccountId("o" + std::to_string(rng() % 4)), ++seq,
                Amount(Rational(static_cast<long long>(1 + rng() % 50)), currencies[i]),
                Amount(Rational(static_cast<long long>(1 + rng() % 50)), currencies[j]), ledger};
        b.apply_offer_create(o);
        live.push_back(o.key());
      } else if (op < 8) {
        const auto k = rng() % live.size();
        b.apply_offer_cancel(live[k].owner, live[k].sequence);
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(k));
      } else {
        const auto k = rng() % live.size();
        const Offer* o = b.find(live[k]);
        b.fill_offer(live[k], o->taker_pays.value * Rational(static_cast<long long>(1 + rng() % 4), 4));
        if (!b.find(live[k])) live.erase(live.begin() + static_cast<std::ptrdiff_t>(k));
      }
    }
    return count;
  }
};

// Transaction builders.
inline Transaction tx_offer(const std::string& who, const Amount& pays, const Amount& gets, std::uint64_t seq = 0) {
  return Transaction{AccountId(who), OfferCreateTx{seq, pays, gets}, {}, {}};
}
inline Transaction tx_cancel(const std::string& who, std::uint64_t seq) {
  return Transaction{AccountId(who), OfferCancelTx{seq}, {}, {}};
}
inline Transaction tx_trust(const std::string& who, const Amount& limit) {
  return Transaction{AccountId(who), TrustSetTx{limit}, {}, {}};
}
inline Transaction tx_fund(const std::string& who, const Amount& xrp) {
  return Transaction{AccountId(who), FundTx{xrp}, {}, {}};
}
inline Transaction tx_pay(const std::string& who, const std::string& to, const Amount& amount,
                          std::optional<Amount> send_max = std::nullopt, std::vector<DirectedPair> paths = {},
                          TxFlags flags = {}) {
  return Transaction{AccountId(who), PaymentTx{AccountId(to), amount, std::move(send_max), std::move(paths)}, flags, {}};
}
inline Amount xrp(const Rational& v) { return Amount(v, CurrencyId::xrp()); }
inline Amount amt(const Rational& v, const CurrencyId& c) { return Amount(v, c); }

// Applies transactions in one ledger and returns their outcomes.
inline std::vector<TxOutcome> run_ledger(Ledger& l, const std::vector<Transaction>& txs) {
  for (const auto& t : txs) l.submit(t);
  return l.close().outcomes;
}

}  // namespace dexarb::testing

#endif
