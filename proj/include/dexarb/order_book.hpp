#ifndef DEXARB_ORDER_BOOK_HPP
#define DEXARB_ORDER_BOOK_HPP

#include "dexarb/amount.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dexarb {

struct OfferKey {
  AccountId owner;
  std::uint64_t sequence = 0;

  auto operator<=>(const OfferKey&) const = default;
  std::string to_string() const { return owner.str() + "#" + std::to_string(sequence); }
};

/// Direction of a book side from the taker's view: the taker delivers `pay`
/// and receives `get`.
struct DirectedPair {
  CurrencyId pay;
  CurrencyId get;

  auto operator<=>(const DirectedPair&) const = default;
  std::string to_string() const { return pay.to_string() + "->" + get.to_string(); }
};

struct Offer {
  AccountId owner;
  std::uint64_t sequence = 0;
  Amount taker_pays;
  Amount taker_gets;
  LedgerIndex placed_at = 0;

  /// Units received per unit paid, from the taker's side.
  Rational quality() const { return taker_gets.value / taker_pays.value; }
  OfferKey key() const { return {owner, sequence}; }
  DirectedPair pair() const { return {taker_pays.currency, taker_gets.currency}; }

  bool operator==(const Offer&) const = default;
};

inline void validate_offer(const Offer& o) {
  if (o.owner.empty()) throw TxError(TxResultCode::MalformedTx, "offer without owner");
  if (o.taker_pays.value <= 0 || o.taker_gets.value <= 0)
    throw TxError(TxResultCode::MalformedTx, "offer amounts must be positive");
  if (o.taker_pays.currency == o.taker_gets.currency)
    throw TxError(TxResultCode::MalformedTx, "offer must exchange two different currencies");
  if ((o.taker_pays.is_native() && !detail::is_whole_drops(o.taker_pays.value)) ||
      (o.taker_gets.is_native() && !detail::is_whole_drops(o.taker_gets.value)))
    throw TxError(TxResultCode::MalformedTx, "fractional drops in offer");
}

// Book order: quality desc, then FIFO by (placed_at, sequence); owner last so
// the order is total.
inline bool offer_precedes(const Offer& a, const Offer& b) {
  const Rational qa = a.quality();
  const Rational qb = b.quality();
  if (qa != qb) return qa > qb;
  if (a.placed_at != b.placed_at) return a.placed_at < b.placed_at;
  if (a.sequence != b.sequence) return a.sequence < b.sequence;
  return a.owner < b.owner;
}

class BookSide {
 public:
  BookSide() = default;
  explicit BookSide(DirectedPair pair) : pair_(std::move(pair)) {}

  const DirectedPair& pair() const noexcept { return pair_; }
  const std::vector<Offer>& offers() const noexcept { return offers_; }
  bool empty() const noexcept { return offers_.empty(); }
  std::size_t size() const noexcept { return offers_.size(); }
  const Offer* head() const noexcept { return offers_.empty() ? nullptr : &offers_.front(); }

  void insert(Offer o) {
    auto pos = std::upper_bound(offers_.begin(), offers_.end(), o, offer_precedes);
    offers_.insert(pos, std::move(o));
  }

  Offer* find(const OfferKey& k) {
    auto it = std::find_if(offers_.begin(), offers_.end(), [&](const Offer& o) { return o.key() == k; });
    return it == offers_.end() ? nullptr : &*it;
  }

  const Offer* find(const OfferKey& k) const {
    auto it = std::find_if(offers_.begin(), offers_.end(), [&](const Offer& o) { return o.key() == k; });
    return it == offers_.end() ? nullptr : &*it;
  }

  bool operator==(const BookSide&) const = default;

  bool erase(const OfferKey& k) {
    auto it = std::find_if(offers_.begin(), offers_.end(), [&](const Offer& o) { return o.key() == k; });
    if (it == offers_.end()) return false;
    offers_.erase(it);
    return true;
  }

 private:
  DirectedPair pair_;
  std::vector<Offer> offers_;
};

/// Per-ledger summary of which book sides were mutated and which of those
/// had their head offer change (identity or remaining amounts).
struct BookDelta {
  LedgerIndex ledger = 0;
  std::set<DirectedPair> touched_pairs;
  std::set<DirectedPair> best_changed;
};

/// Effect of one mutation on one side.
struct BookChange {
  std::optional<DirectedPair> pair;
  bool best_changed = false;
};

struct Fill {
  OfferKey offer;
  Amount paid;      // delivered by the taker to the offer owner
  Amount received;  // delivered by the offer owner to the taker
};

struct ConsumeResult {
  Amount filled_pay;
  Amount filled_get;
  std::vector<Fill> offers_touched;
};

/// All book sides, indexed by directed pair, plus the per-ledger delta
/// accumulator.
class OrderBook {
 public:
  using Sides = std::map<DirectedPair, BookSide>;

  const Sides& sides() const noexcept { return sides_; }
  std::size_t offer_count() const noexcept { return index_.size(); }

  const BookSide* side(const DirectedPair& p) const {
    auto it = sides_.find(p);
    return it == sides_.end() ? nullptr : &it->second;
  }

  const Offer* head(const DirectedPair& p) const {
    const BookSide* s = side(p);
    return s ? s->head() : nullptr;
  }

  const Offer* find(const OfferKey& k) const {
    auto it = index_.find(k);
    if (it == index_.end()) return nullptr;
    return sides_.at(it->second).find(k);
  }

  BookChange apply_offer_create(Offer offer) {
    validate_offer(offer);
    const OfferKey k = offer.key();
    if (index_.contains(k))
      throw TxError(TxResultCode::MalformedTx, "duplicate offer " + k.to_string());
    const DirectedPair p = offer.pair();
    const auto before = head_state(p);
    auto [it, inserted] = sides_.try_emplace(p, p);
    it->second.insert(std::move(offer));
    index_.emplace(k, p);
    return record(p, before);
  }

  /// Removing an unknown offer is a successful no-op.
  BookChange apply_offer_cancel(const AccountId& owner, std::uint64_t sequence) {
    const OfferKey k{owner, sequence};
    auto it = index_.find(k);
    if (it == index_.end()) return {};
    const DirectedPair p = it->second;
    const auto before = head_state(p);
    erase_offer(p, k);
    return record(p, before);
  }

  /// Takes up to `pay_limit` of the offer's taker_pays. Amounts shrink
  /// proportionally so quality is preserved; the native side stays whole
  /// drops, so the actual fill may be slightly below the limit. Fully
  /// consumed offers are removed.
  Fill fill_offer(const OfferKey& k, const Rational& pay_limit) {
    auto it = index_.find(k);
    if (it == index_.end()) throw TxError(TxResultCode::NoSuchOffer, "no offer " + k.to_string());
    const DirectedPair p = it->second;
    const auto before = head_state(p);
    BookSide& s = sides_.at(p);
    Offer& o = *s.find(k);

    Rational pay = std::min(pay_limit, o.taker_pays.value);
    Rational get;
    if (pay == o.taker_pays.value) {
      get = o.taker_gets.value;
    } else {
      const Rational q = o.quality();
      if (o.taker_pays.is_native()) pay = detail::floor_to_drops(pay);
      get = pay * q;
      if (o.taker_gets.is_native()) {
        get = detail::floor_to_drops(get);
        pay = get / q;
      }
    }
    Fill f{k, Amount(pay, o.taker_pays.currency), Amount(get, o.taker_gets.currency)};
    if (pay == 0 && get == 0) return f;

    if (pay == o.taker_pays.value) {
      erase_offer(p, k);
    } else {
      o.taker_pays.value -= pay;
      o.taker_gets.value -= get;
    }
    record(p, before);
    return f;
  }

  /// Drops an offer without filling it (used for unfunded offers).
  BookChange remove_offer(const OfferKey& k) { return apply_offer_cancel(k.owner, k.sequence); }

  /// Best-first fill of up to `taker_budget` against one side.
  ConsumeResult consume(const DirectedPair& p, const Amount& taker_budget) {
    if (taker_budget.currency != p.pay)
      throw TxError(TxResultCode::MalformedTx, "budget currency does not match book side");
    ConsumeResult r{Amount::zero(p.pay), Amount::zero(p.get), {}};
    Rational remaining = taker_budget.value;
    while (remaining > 0) {
      const Offer* h = head(p);
      if (!h) break;
      Fill f = fill_offer(h->key(), remaining);
      if (f.paid.is_zero()) break;
      remaining -= f.paid.value;
      r.filled_pay.value += f.paid.value;
      r.filled_get.value += f.received.value;
      r.offers_touched.push_back(std::move(f));
    }
    return r;
  }

  std::vector<Offer> snapshot(const DirectedPair& p, std::size_t depth) const {
    if (depth < 1) throw TxError(TxResultCode::MalformedTx, "snapshot depth must be >= 1");
    const BookSide* s = side(p);
    if (!s) return {};
    const auto n = std::min(depth, s->size());
    return {s->offers().begin(), s->offers().begin() + static_cast<std::ptrdiff_t>(n)};
  }

  BookDelta close_delta(LedgerIndex ledger) {
    BookDelta d{ledger, std::move(pending_.touched_pairs), std::move(pending_.best_changed)};
    pending_ = BookDelta{};
    return d;
  }

  /// Offers owned by an account, in book order per side.
  std::vector<Offer> offers_of(const AccountId& owner) const {
    std::vector<Offer> out;
    for (const auto& [k, p] : index_)
      if (k.owner == owner) out.push_back(*find(k));
    return out;
  }

 private:
  struct HeadState {
    OfferKey key;
    Rational pays;
    Rational gets;
    bool operator==(const HeadState&) const = default;
  };

  std::optional<HeadState> head_state(const DirectedPair& p) const {
    const Offer* h = head(p);
    if (!h) return std::nullopt;
    return HeadState{h->key(), h->taker_pays.value, h->taker_gets.value};
  }

  BookChange record(const DirectedPair& p, const std::optional<HeadState>& before) {
    const bool changed = head_state(p) != before;
    pending_.touched_pairs.insert(p);
    if (changed) pending_.best_changed.insert(p);
    return {p, changed};
  }

  void erase_offer(const DirectedPair& p, const OfferKey& k) {
    auto it = sides_.find(p);
    it->second.erase(k);
    if (it->second.empty()) sides_.erase(it);
    index_.erase(k);
  }

  Sides sides_;
  std::map<OfferKey, DirectedPair> index_;
  BookDelta pending_;
};

}  // namespace dexarb

#endif
