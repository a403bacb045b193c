#ifndef DEXARB_CYCLE_DETECTOR_HPP
#define DEXARB_CYCLE_DETECTOR_HPP

#include "dexarb/rate_graph.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace dexarb {

/// Strict-improvement slack for float relaxation. Decisions to act are
/// always re-checked with exact rationals.
inline constexpr double kRelaxEpsilon = 1e-12;

class ExtractionFailed : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Result of a Bellman-Ford run, indexed by position in `vertices`.
struct BellmanState {
  std::vector<CurrencyId> vertices;
  std::vector<double> distance;
  std::vector<std::optional<std::size_t>> predecessor;
  std::optional<std::size_t> witness;

  std::optional<std::size_t> index_of(const CurrencyId& c) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), c);
    if (it == vertices.end() || *it != c) return std::nullopt;
    return static_cast<std::size_t>(it - vertices.begin());
  }

  double distance_to(const CurrencyId& c) const {
    auto i = index_of(c);
    return i ? distance[*i] : std::numeric_limits<double>::infinity();
  }

  bool has_negative_cycle() const noexcept { return witness.has_value(); }
};

/// A closed loop of best-offer edges in trade order.
struct Cycle {
  std::vector<RateEdge> edges;
  CurrencyId start_currency;

  std::size_t length() const noexcept { return edges.size(); }

  Rational gross_multiplier() const {
    Rational p = 1;
    for (const auto& e : edges) p *= e.rate;
    return p;
  }

  /// Chains, closes, and visits no vertex twice.
  bool is_closed_simple() const {
    if (edges.empty() || edges.front().from != start_currency) return false;
    std::set<CurrencyId> seen;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const auto& next = edges[(i + 1) % edges.size()];
      if (edges[i].to != next.from) return false;
      if (!seen.insert(edges[i].from).second) return false;
    }
    return true;
  }

  std::vector<DirectedPair> path() const {
    std::vector<DirectedPair> out;
    out.reserve(edges.size());
    for (const auto& e : edges) out.push_back({e.from, e.to});
    return out;
  }

  /// Same loop starting at `c`; unchanged if `c` is not on it.
  Cycle rotated_to(const CurrencyId& c) const {
    auto it = std::find_if(edges.begin(), edges.end(), [&](const RateEdge& e) { return e.from == c; });
    if (it == edges.end()) return *this;
    Cycle r;
    r.edges.assign(it, edges.end());
    r.edges.insert(r.edges.end(), edges.begin(), it);
    r.start_currency = c;
    return r;
  }

  std::string to_string() const {
    std::string s;
    for (const auto& e : edges) s += e.from.to_string() + " -> ";
    return s + start_currency.to_string();
  }
};

/// Relaxes every edge |V|−1 times, then once more to find a witness of a
/// negative cycle. Without `source` a virtual source with zero-weight edges
/// to every vertex is used, so cycles in any component are found.
inline BellmanState bellman_ford(const RateGraph& graph, const std::optional<CurrencyId>& source = std::nullopt) {
  BellmanState st;
  st.vertices.assign(graph.vertices.begin(), graph.vertices.end());
  const std::size_t n = st.vertices.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  st.distance.assign(n, source ? inf : 0.0);
  st.predecessor.assign(n, std::nullopt);
  if (source) {
    auto s = st.index_of(*source);
    if (!s) throw std::invalid_argument("source currency not in graph: " + source->to_string());
    st.distance[*s] = 0.0;
  }

  struct Arc {
    std::size_t u, v;
    double w;
  };
  std::vector<Arc> arcs;
  arcs.reserve(graph.edges.size());
  for (const auto& [p, e] : graph.edges) arcs.push_back({*st.index_of(p.pay), *st.index_of(p.get), e.weight});

  auto relaxable = [&](const Arc& a) {
    return st.distance[a.u] != inf && st.distance[a.u] + a.w < st.distance[a.v] - kRelaxEpsilon;
  };

  for (std::size_t pass = 1; pass < n; ++pass) {
    bool changed = false;
    for (const Arc& a : arcs) {
      if (relaxable(a)) {
        st.distance[a.v] = st.distance[a.u] + a.w;
        st.predecessor[a.v] = a.u;
        changed = true;
      }
    }
    if (!changed) return st;
  }
  for (const Arc& a : arcs) {
    if (relaxable(a)) {
      st.predecessor[a.v] = a.u;
      st.witness = a.v;
      break;
    }
  }
  return st;
}

/// Walks predecessors |V| steps from the witness to land on the cycle, then
/// collects it. The result starts at its smallest currency.
inline Cycle extract_cycle(const BellmanState& st, const RateGraph& graph) {
  if (!st.witness) throw ExtractionFailed("no witness vertex");
  const std::size_t n = st.vertices.size();
  std::size_t x = *st.witness;
  for (std::size_t i = 0; i < n; ++i) {
    if (!st.predecessor[x]) throw ExtractionFailed("predecessor chain ends at " + st.vertices[x].to_string());
    x = *st.predecessor[x];
  }
  std::vector<std::size_t> loop{x};
  for (std::size_t y = *st.predecessor[x]; y != x;) {
    if (loop.size() > n) throw ExtractionFailed("predecessor walk does not close");
    loop.push_back(y);
    if (!st.predecessor[y]) throw ExtractionFailed("predecessor chain ends at " + st.vertices[y].to_string());
    y = *st.predecessor[y];
  }
  std::reverse(loop.begin(), loop.end());

  Cycle c;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const auto& from = st.vertices[loop[i]];
    const auto& to = st.vertices[loop[(i + 1) % loop.size()]];
    const RateEdge* e = graph.edge(from, to);
    if (!e) throw ExtractionFailed("no edge " + from.to_string() + " -> " + to.to_string());
    c.edges.push_back(*e);
  }
  c.start_currency = c.edges.front().from;
  CurrencyId smallest = c.start_currency;
  for (const auto& e : c.edges) smallest = std::min(smallest, e.from);
  return c.rotated_to(smallest);
}

/// Bellman-Ford plus extraction plus exact confirmation Π rates > 1.
inline std::optional<Cycle> detect(const RateGraph& graph) {
  const BellmanState st = bellman_ford(graph);
  if (!st.witness) return std::nullopt;
  Cycle c = extract_cycle(st, graph);
  if (c.gross_multiplier() <= 1) return std::nullopt;
  return c;
}

struct Opportunity {
  Cycle cycle;
  Rational gross_multiplier;
  Amount notional_pay;      // start currency
  Amount expected_receive;  // start currency
  Amount fee_total;         // native
  Amount net_profit;        // native
  Rational xrp_per_start;   // exact rate used to value start-currency profit
};

/// Per-node amounts along the cycle for a given start amount. Native nodes
/// are whole drops: an intermediate native node is floored and the whole
/// chain rescaled; a native start is floored up front and the final
/// receive is floored.
inline std::vector<Rational> propagate(const Cycle& cycle, Rational start) {
  const std::size_t L = cycle.edges.size();
  std::vector<Rational> a(L + 1);
  if (cycle.start_currency.is_native()) start = detail::floor_to_drops(start);
  a[0] = start;
  for (std::size_t i = 0; i < L; ++i) a[i + 1] = a[i] * cycle.edges[i].rate;
  if (cycle.start_currency.is_native()) {
    a[L] = detail::floor_to_drops(a[L]);
    return a;
  }
  for (std::size_t k = 1; k < L; ++k) {
    if (!cycle.edges[k].from.is_native() || a[k] == 0) continue;
    const Rational scale = detail::floor_to_drops(a[k]) / a[k];
    for (auto& v : a) v *= scale;
    break;
  }
  return a;
}

/// Largest start amount that fits every edge's head capacity.
inline Rational max_notional(const Cycle& cycle) {
  std::optional<Rational> best;
  Rational prefix = 1;
  for (const auto& e : cycle.edges) {
    const Rational cap = e.capacity_pay.value / prefix;
    if (!best || cap < *best) best = cap;
    prefix *= e.rate;
  }
  return best.value_or(Rational(0));
}

/// Sizes the cycle against head capacities and nets out fees. Returns
/// nothing unless the exact net profit in XRP is strictly positive.
inline std::optional<Opportunity> evaluate(const Cycle& cycle, const RateGraph& graph, const Amount& fee_per_tx,
                                           std::size_t tx_count) {
  if (!fee_per_tx.is_native()) throw TxError(TxResultCode::MalformedTx, "fee must be native");
  if (cycle.edges.empty()) return std::nullopt;
  const Rational gross = cycle.gross_multiplier();
  if (gross <= 1) return std::nullopt;

  const std::vector<Rational> a = propagate(cycle, max_notional(cycle));
  const Rational pay = a.front();
  const Rational receive = a.back();
  if (receive <= pay) return std::nullopt;

  Rational xrp_rate;
  if (cycle.start_currency.is_native()) {
    xrp_rate = 1;
  } else {
    std::optional<Rational> chain;
    Rational prefix = 1;
    for (const auto& e : cycle.edges) {
      prefix *= e.rate;
      if (e.to.is_native()) {
        chain = prefix;
        break;
      }
    }
    if (!chain) {
      if (const RateEdge* direct = graph.edge(cycle.start_currency, CurrencyId::xrp())) chain = direct->rate;
    }
    if (!chain) return std::nullopt;
    xrp_rate = *chain;
  }

  const Rational gain_xrp = detail::floor_to_drops((receive - pay) * xrp_rate);
  const Rational fees = fee_per_tx.value * static_cast<long long>(tx_count);
  if (gain_xrp <= fees) return std::nullopt;

  Opportunity o;
  o.cycle = cycle;
  o.gross_multiplier = gross;
  o.notional_pay = Amount(pay, cycle.start_currency);
  o.expected_receive = Amount(receive, cycle.start_currency);
  o.fee_total = Amount(fees, CurrencyId::xrp());
  o.net_profit = Amount(gain_xrp - fees, CurrencyId::xrp());
  o.xrp_per_start = xrp_rate;
  return o;
}

}  // namespace dexarb

#endif
