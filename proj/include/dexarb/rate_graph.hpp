#ifndef DEXARB_RATE_GRAPH_HPP
#define DEXARB_RATE_GRAPH_HPP

#include "dexarb/order_book.hpp"

#include <cmath>
#include <map>
#include <set>

namespace dexarb {

/// −ln(rate) in double precision. Monotone decreasing; negative iff rate > 1.
inline double edge_weight(const Rational& rate) {
  if (rate <= 0) throw TxError(TxResultCode::MalformedTx, "edge rate must be positive");
  // Numerator and denominator logs separately: both can exceed double range
  // after repeated proportional fills.
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  auto big_log = [](const BigInt& v) {
    const auto bits = boost::multiprecision::msb(v);
    if (bits < 1000) return std::log(v.convert_to<double>());
    const auto shift = bits - 60;
    return std::log(BigInt(v >> shift).convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
  };
  return big_log(denominator(rate)) - big_log(numerator(rate));
}

/// The single best-offer edge for one directed pair.
struct RateEdge {
  CurrencyId from;
  CurrencyId to;
  Rational rate;
  double weight = 0.0;
  Amount capacity_pay;
  OfferKey source_offer;

  bool operator==(const RateEdge&) const = default;
};

inline double edge_weight(const RateEdge& e) { return edge_weight(e.rate); }

inline RateEdge edge_from_head(const Offer& head) {
  RateEdge e;
  e.from = head.taker_pays.currency;
  e.to = head.taker_gets.currency;
  e.rate = head.quality();
  e.weight = edge_weight(e.rate);
  e.capacity_pay = head.taker_pays;
  e.source_offer = head.key();
  return e;
}

struct RateGraph {
  std::set<CurrencyId> vertices;
  std::map<DirectedPair, RateEdge> edges;
  LedgerIndex version = 0;

  const RateEdge* edge(const CurrencyId& from, const CurrencyId& to) const {
    auto it = edges.find(DirectedPair{from, to});
    return it == edges.end() ? nullptr : &it->second;
  }

  bool operator==(const RateGraph&) const = default;
};

namespace detail {

inline void refresh_vertices(RateGraph& g) {
  g.vertices.clear();
  for (const auto& [p, e] : g.edges) {
    g.vertices.insert(p.pay);
    g.vertices.insert(p.get);
  }
}

}  // namespace detail

/// One vertex per currency in any non-empty side, one edge per side from
/// its head offer.
inline RateGraph build(const OrderBook& books, LedgerIndex version = 0) {
  RateGraph g;
  g.version = version;
  for (const auto& [pair, side] : books.sides())
    if (const Offer* h = side.head()) g.edges.emplace(pair, edge_from_head(*h));
  detail::refresh_vertices(g);
  return g;
}

/// Swaps in the edges whose head changed. Returns false, leaving the graph
/// untouched apart from its version, when nothing changed.
inline bool update(RateGraph& graph, const BookDelta& delta, const OrderBook& books) {
  if (delta.ledger != graph.version + 1)
    throw std::logic_error("out-of-order book delta: graph at ledger " + std::to_string(graph.version) +
                           ", delta for ledger " + std::to_string(delta.ledger));
  graph.version = delta.ledger;
  bool changed = false;
  for (const DirectedPair& p : delta.best_changed) {
    const Offer* h = books.head(p);
    auto it = graph.edges.find(p);
    if (!h) {
      if (it != graph.edges.end()) {
        graph.edges.erase(it);
        changed = true;
      }
      continue;
    }
    RateEdge e = edge_from_head(*h);
    if (it == graph.edges.end()) {
      graph.edges.emplace(p, std::move(e));
      changed = true;
    } else if (!(it->second == e)) {
      it->second = std::move(e);
      changed = true;
    }
  }
  if (changed) detail::refresh_vertices(graph);
  return changed;
}

}  // namespace dexarb

#endif
