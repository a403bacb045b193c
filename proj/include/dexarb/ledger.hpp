#ifndef DEXARB_LEDGER_HPP
#define DEXARB_LEDGER_HPP

#include "dexarb/order_book.hpp"

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace dexarb {

struct TxFlags {
  bool partial_payment = false;    // tfPartialPayment
  bool no_direct_ripple = false;   // tfNoDirectRipple

  bool operator==(const TxFlags&) const = default;
};

struct OfferCreateTx {
  std::uint64_t sequence = 0;  // 0: assign the sender's next sequence
  Amount taker_pays;
  Amount taker_gets;
};

struct OfferCancelTx {
  std::uint64_t offer_sequence = 0;
};

struct PaymentTx {
  AccountId destination;
  Amount amount;                  // to deliver
  std::optional<Amount> send_max; // required for cross-currency
  std::vector<DirectedPair> paths;
};

struct TrustSetTx {
  Amount limit;
};

/// Genesis credit of XRP; creates the account. Carries no fee.
struct FundTx {
  Amount amount;
};

enum class TxKind { OfferCreate, OfferCancel, Payment, TrustSet, Fund };

inline std::string_view to_string(TxKind k) {
  switch (k) {
    case TxKind::OfferCreate: return "OfferCreate";
    case TxKind::OfferCancel: return "OfferCancel";
    case TxKind::Payment: return "Payment";
    case TxKind::TrustSet: return "TrustSet";
    case TxKind::Fund: return "Fund";
  }
  return "?";
}

struct Transaction {
  AccountId sender;
  std::variant<OfferCreateTx, OfferCancelTx, PaymentTx, TrustSetTx, FundTx> payload;
  TxFlags flags;
  std::string signature;  // opaque stamp; no cryptography

  TxKind kind() const { return static_cast<TxKind>(payload.index()); }
};

struct TxOutcome {
  TxResultCode code = TxResultCode::Success;
  std::optional<Amount> delivered;
  Amount fee_charged = Amount::zero(CurrencyId::xrp());
  std::vector<Fill> offers_consumed;
  std::string message;
};

struct LedgerClose {
  LedgerIndex index = 0;
  BookDelta delta;
  std::vector<TxOutcome> outcomes;
};

struct TrustLine {
  Rational balance;
  Rational limit;
  bool operator==(const TrustLine&) const = default;
};

/// Deterministic single-writer ledger: accounts, trustlines, books, fees.
/// Queued transactions apply in submission order at close.
class Ledger {
 public:
  explicit Ledger(Amount fee_per_tx = Amount::drops(10), int interval_ms = 3500)
      : fee_(std::move(fee_per_tx)), interval_ms_(interval_ms) {
    if (!fee_.is_native()) throw TxError(TxResultCode::MalformedTx, "fee must be native");
  }

  LedgerIndex index() const noexcept { return index_; }
  const Amount& fee_per_tx() const noexcept { return fee_; }
  int interval_ms() const noexcept { return interval_ms_; }
  const OrderBook& books() const noexcept { return state_.books; }
  const Rational& burned() const noexcept { return burned_; }
  const Rational& genesis_total() const noexcept { return genesis_; }
  std::size_t pending() const noexcept { return queue_.size(); }

  bool has_account(const AccountId& a) const { return state_.accounts.contains(a); }

  std::vector<AccountId> accounts() const {
    std::vector<AccountId> out;
    for (const auto& [a, _] : state_.accounts) out.push_back(a);
    return out;
  }

  Rational xrp_balance(const AccountId& a) const {
    auto it = state_.accounts.find(a);
    return it == state_.accounts.end() ? Rational(0) : it->second;
  }

  /// Holder's balance of an IOU; the issuer's own position is -issuance.
  Rational iou_balance(const AccountId& holder, const CurrencyId& c) const {
    if (holder == c.issuer()) return -issuance(c);
    auto it = state_.lines.find({holder, c});
    return it == state_.lines.end() ? Rational(0) : it->second.balance;
  }

  Rational balance(const AccountId& a, const CurrencyId& c) const {
    return c.is_native() ? xrp_balance(a) : iou_balance(a, c);
  }

  std::optional<TrustLine> trustline(const AccountId& holder, const CurrencyId& c) const {
    auto it = state_.lines.find({holder, c});
    if (it == state_.lines.end()) return std::nullopt;
    return it->second;
  }

  const std::map<std::pair<AccountId, CurrencyId>, TrustLine>& trustlines() const noexcept { return state_.lines; }

  Rational issuance(const CurrencyId& c) const {
    auto it = state_.issuance.find(c);
    return it == state_.issuance.end() ? Rational(0) : it->second;
  }

  /// Immediate genesis credit (outside the queue).
  void fund(const AccountId& a, const Amount& xrp) {
    if (!xrp.is_native()) throw TxError(TxResultCode::MalformedTx, "fund requires XRP");
    state_.accounts[a] += xrp.value;
    genesis_ += xrp.value;
  }

  /// Queues a transaction for the next close.
  TxResultCode submit(Transaction tx) {
    if (tx.kind() != TxKind::Fund) {
      // Genesis credits queued ahead in the same ledger count as funds.
      Rational projected = xrp_balance(tx.sender);
      bool known = has_account(tx.sender);
      for (const auto& q : queue_) {
        if (q.kind() == TxKind::Fund && q.sender == tx.sender) {
          projected += std::get<FundTx>(q.payload).amount.value;
          known = true;
        }
      }
      if (!known || projected < fee_.value) return TxResultCode::InsufficientFee;
    }
    queue_.push_back(std::move(tx));
    return TxResultCode::Success;
  }

  LedgerClose close() {
    LedgerClose out;
    out.index = index_ + 1;
    placing_at_ = out.index;
    std::vector<Transaction> txs;
    txs.swap(queue_);
    for (auto& tx : txs) out.outcomes.push_back(apply(tx));
    index_ = out.index;
    out.delta = state_.books.close_delta(out.index);
    return out;
  }

  /// Applies one transaction now: charges the fee, then dispatches. Any
  /// failure after the fee leaves balances and books untouched.
  TxOutcome apply(const Transaction& tx) {
    if (tx.kind() == TxKind::Fund) {
      fund(tx.sender, std::get<FundTx>(tx.payload).amount);
      return {};
    }
    TxOutcome out;
    auto acct = state_.accounts.find(tx.sender);
    if (acct == state_.accounts.end() || acct->second < fee_.value) {
      out.code = TxResultCode::InsufficientFee;
      out.message = "sender cannot pay fee";
      return out;
    }
    acct->second -= fee_.value;
    burned_ += fee_.value;
    out.fee_charged = fee_;

    // Payments can fail part-way, so they run on a copy. The other kinds
    // reject before their first mutation.
    std::optional<State> scratch;
    if (tx.kind() == TxKind::Payment) scratch = state_;
    State& target = scratch ? *scratch : state_;
    try {
      switch (tx.kind()) {
        case TxKind::OfferCreate: offer_create(target, tx, out); break;
        case TxKind::OfferCancel:
          target.books.apply_offer_cancel(tx.sender, std::get<OfferCancelTx>(tx.payload).offer_sequence);
          break;
        case TxKind::Payment: payment(target, tx, out); break;
        case TxKind::TrustSet: trust_set(target, tx, out); break;
        case TxKind::Fund: break;
      }
    } catch (const TxError& e) {
      out.code = e.code();
      out.message = e.what();
    }
    if (out.code == TxResultCode::Success) {
      if (scratch) state_ = std::move(*scratch);
    } else {
      out.delivered.reset();
      out.offers_consumed.clear();
    }
    return out;
  }

  TxOutcome execute_payment(const Transaction& tx) { return apply_kind(tx, TxKind::Payment); }
  TxOutcome execute_offer_create(const Transaction& tx) { return apply_kind(tx, TxKind::OfferCreate); }
  TxOutcome set_trustline(const Transaction& tx) { return apply_kind(tx, TxKind::TrustSet); }

  /// Σ holder balances equals issuance for every IOU.
  bool iou_conserved() const {
    std::map<CurrencyId, Rational> held;
    for (const auto& [k, line] : state_.lines) held[k.second] += line.balance;
    for (const auto& [c, total] : state_.issuance)
      if (held[c] != total) return false;
    for (const auto& [c, sum] : held)
      if (sum != issuance(c)) return false;
    return true;
  }

  /// Σ XRP balances + burned fees equals everything ever funded.
  bool xrp_conserved() const {
    Rational total = burned_;
    for (const auto& [a, v] : state_.accounts) total += v;
    return total == genesis_;
  }

  bool operator==(const Ledger& o) const {
    return index_ == o.index_ && fee_ == o.fee_ && burned_ == o.burned_ && genesis_ == o.genesis_ &&
           state_.accounts == o.state_.accounts && state_.lines == o.state_.lines &&
           state_.issuance == o.state_.issuance && state_.books.sides() == o.state_.books.sides();
  }

 private:
  struct State {
    std::map<AccountId, Rational> accounts;
    std::map<std::pair<AccountId, CurrencyId>, TrustLine> lines;
    std::map<CurrencyId, Rational> issuance;
    OrderBook books;
    std::map<AccountId, std::uint64_t> last_sequence;
  };

  static bool is_issuer(const AccountId& a, const CurrencyId& c) { return !c.is_native() && c.issuer() == a; }

  // Spendable amount; nullopt means unbounded (issuer of the currency).
  static std::optional<Rational> available(const State& s, const AccountId& a, const CurrencyId& c) {
    if (c.is_native()) {
      auto it = s.accounts.find(a);
      return it == s.accounts.end() ? Rational(0) : it->second;
    }
    if (is_issuer(a, c)) return std::nullopt;
    auto it = s.lines.find({a, c});
    return it == s.lines.end() ? Rational(0) : it->second.balance;
  }

  static bool can_receive(const State& s, const AccountId& a, const CurrencyId& c) {
    return c.is_native() || is_issuer(a, c) || s.lines.contains({a, c});
  }

  static void transfer(State& s, const AccountId& from, const AccountId& to, const Amount& amt, bool implicit_line) {
    if (amt.value == 0 || from == to) return;
    const CurrencyId& c = amt.currency;
    if (c.is_native()) {
      auto& src = s.accounts[from];
      if (src < amt.value) throw TxError(TxResultCode::Unfunded, "insufficient XRP: " + from.str());
      src -= amt.value;
      s.accounts[to] += amt.value;
      return;
    }
    if (is_issuer(from, c)) {
      s.issuance[c] += amt.value;
    } else {
      auto it = s.lines.find({from, c});
      if (it == s.lines.end() || it->second.balance < amt.value)
        throw TxError(TxResultCode::Unfunded, "insufficient " + c.to_string() + ": " + from.str());
      it->second.balance -= amt.value;
    }
    if (is_issuer(to, c)) {
      s.issuance[c] -= amt.value;
    } else {
      auto it = s.lines.find({to, c});
      if (it == s.lines.end()) {
        if (!implicit_line) throw TxError(TxResultCode::PathDry, "no trustline " + to.str() + " -> " + c.to_string());
        // Offer owners accept what they asked for; model as an unlimited line.
        it = s.lines.emplace(std::pair{to, c}, TrustLine{0, -1}).first;
      }
      it->second.balance += amt.value;
    }
  }

  // Remaining receivable room under the destination's limit; nullopt if unbounded.
  static std::optional<Rational> room(const State& s, const AccountId& a, const CurrencyId& c) {
    if (c.is_native() || is_issuer(a, c)) return std::nullopt;
    auto it = s.lines.find({a, c});
    if (it == s.lines.end()) return Rational(0);
    if (it->second.limit < 0) return std::nullopt;
    const Rational r = it->second.limit - it->second.balance;
    return r > 0 ? r : Rational(0);
  }

  TxOutcome apply_kind(const Transaction& tx, TxKind expected) {
    if (tx.kind() != expected) throw std::invalid_argument("wrong transaction kind");
    return apply(tx);
  }

  // Head of a side after pruning offers whose owner holds nothing to give.
  // Returns the head and its funded capacity in taker-pays units.
  std::optional<std::pair<Offer, Rational>> funded_head(State& s, const DirectedPair& p) {
    while (const Offer* h = s.books.head(p)) {
      auto avail = available(s, h->owner, h->taker_gets.currency);
      if (avail && *avail <= 0) {
        s.books.remove_offer(h->key());
        continue;
      }
      Rational cap = h->taker_pays.value;
      if (avail && *avail < h->taker_gets.value) cap = *avail / h->quality();
      return std::pair{*h, cap};
    }
    return std::nullopt;
  }

  void offer_create(State& s, const Transaction& tx, TxOutcome& out) {
    const auto& oc = std::get<OfferCreateTx>(tx.payload);
    Offer own{tx.sender, oc.sequence, oc.taker_pays, oc.taker_gets, placing_at_};
    auto& last = s.last_sequence[tx.sender];
    if (own.sequence == 0) own.sequence = last + 1;
    validate_offer(own);
    if (s.books.find(own.key())) throw TxError(TxResultCode::MalformedTx, "duplicate offer " + own.key().to_string());
    last = std::max(last, own.sequence);

    const CurrencyId& give = own.taker_gets.currency;
    const CurrencyId& want = own.taker_pays.currency;
    auto creator_avail = available(s, tx.sender, give);
    if (creator_avail && *creator_avail <= 0) throw TxError(TxResultCode::Unfunded, "creator holds no " + give.to_string());

    const Rational own_quality = own.quality();
    const DirectedPair opposing{give, want};
    Rational give_left = own.taker_gets.value;
    Rational want_left = own.taker_pays.value;

    while (give_left > 0 && want_left > 0) {
      auto head = funded_head(s, opposing);
      if (!head) break;
      const auto& [h, cap] = *head;
      // Crosses when the maker gives at least our asking price.
      if (h.quality() * own_quality < 1) break;
      Rational limit = std::min({give_left, cap, want_left / h.quality()});
      if (auto a = available(s, tx.sender, give)) limit = std::min(limit, *a);
      if (limit <= 0) break;
      Fill f = s.books.fill_offer(h.key(), limit);
      if (f.paid.is_zero()) break;
      transfer(s, tx.sender, h.owner, f.paid, true);
      transfer(s, h.owner, tx.sender, f.received, true);
      give_left -= f.paid.value;
      want_left -= f.received.value;
      out.offers_consumed.push_back(std::move(f));
    }

    if (give_left > 0 && want_left > 0) {
      Rational rest_gets = want_left * own_quality;
      if (own.taker_gets.is_native()) rest_gets = detail::floor_to_drops(rest_gets);
      rest_gets = std::min(rest_gets, give_left);
      if (rest_gets > 0) {
        Rational rest_pays = own.taker_pays.value == want_left ? want_left : rest_gets / own_quality;
        if (own.taker_pays.is_native()) rest_pays = detail::floor_to_drops(rest_pays);
        if (rest_pays > 0) {
          own.taker_pays.value = rest_pays;
          own.taker_gets.value = rest_gets;
          s.books.apply_offer_create(std::move(own));
        }
      }
    }
  }

  void trust_set(State& s, const Transaction& tx, TxOutcome&) {
    const auto& ts = std::get<TrustSetTx>(tx.payload);
    const CurrencyId& c = ts.limit.currency;
    if (c.is_native()) throw TxError(TxResultCode::MalformedTx, "XRP needs no trustline");
    if (is_issuer(tx.sender, c)) throw TxError(TxResultCode::MalformedTx, "issuer cannot trust itself");
    auto& line = s.lines[{tx.sender, c}];
    line.limit = ts.limit.value;
  }

  void payment(State& s, const Transaction& tx, TxOutcome& out) {
    const auto& p = std::get<PaymentTx>(tx.payload);
    const AccountId& payer = tx.sender;
    const CurrencyId& dst = p.amount.currency;
    const CurrencyId src = p.send_max ? p.send_max->currency : dst;
    if (p.amount.value <= 0) throw TxError(TxResultCode::MalformedTx, "payment amount must be positive");
    if (!s.accounts.contains(p.destination))
      throw TxError(TxResultCode::MalformedTx, "no such destination: " + p.destination.str());

    std::vector<DirectedPair> path = p.paths;
    if (src.is_native() && dst.is_native() && !path.empty())
      throw TxError(TxResultCode::MalformedTx, "XRP to XRP payment cannot cross currencies");
    if (path.empty() && src != dst) {
      if (tx.flags.no_direct_ripple) throw TxError(TxResultCode::MalformedTx, "tfNoDirectRipple requires a path");
      path.push_back({src, dst});
    }
    if (!path.empty()) {
      if (!p.send_max) throw TxError(TxResultCode::MalformedTx, "cross-currency payment needs SendMax");
      if (path.front().pay != src || path.back().get != dst)
        throw TxError(TxResultCode::MalformedTx, "path endpoints do not match amounts");
      for (std::size_t i = 0; i + 1 < path.size(); ++i)
        if (path[i].get != path[i + 1].pay) throw TxError(TxResultCode::MalformedTx, "path does not chain");
      for (const auto& hop : path)
        if (hop.pay == hop.get) throw TxError(TxResultCode::MalformedTx, "path hop exchanges a currency for itself");
    }

    if (!can_receive(s, p.destination, dst))
      throw TxError(TxResultCode::PathDry, "destination has no trustline for " + dst.to_string());
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      if (!can_receive(s, payer, path[i].get))
        throw TxError(TxResultCode::PathDry, "sender has no trustline for " + path[i].get.to_string());

    auto funds = available(s, payer, src);
    if (funds && *funds <= 0) throw TxError(TxResultCode::Unfunded, "sender holds no " + src.to_string());

    Rational delivered = 0;
    if (path.empty()) {
      Rational want = p.amount.value;
      if (p.send_max) want = std::min(want, p.send_max->value);
      if (funds) want = std::min(want, *funds);
      if (auto r = room(s, p.destination, dst)) want = std::min(want, *r);
      delivered = want;
      if (delivered > 0) transfer(s, payer, p.destination, Amount(delivered, dst), false);
    } else {
      delivered = run_strand(s, payer, p, path, tx.flags.partial_payment, out);
    }

    if (delivered < p.amount.value && !tx.flags.partial_payment)
      throw TxError(TxResultCode::PartialityNotAllowed, "delivered " + detail::render_decimal(delivered) + " of " +
                                                            p.amount.render() + " " + dst.to_string());
    out.delivered = Amount(delivered, dst);
  }

  // Pushes value through the current heads of each hop, one chunk at a
  // time, until the strand is dry, the budget is spent, or (partial
  // payments) the strand's quality falls below amount/send_max.
  Rational run_strand(State& s, const AccountId& payer, const PaymentTx& p, const std::vector<DirectedPair>& path,
                      bool partial, TxOutcome& out) {
    const std::size_t L = path.size();
    const Rational limit_quality = p.amount.value / p.send_max->value;
    Rational send_left = p.send_max->value;
    Rational deliver_left = p.amount.value;
    Rational delivered = 0;

    for (int guard = 0; guard < 100000 && send_left > 0 && deliver_left > 0; ++guard) {
      std::vector<std::pair<Offer, Rational>> heads;
      for (const auto& hop : path) {
        auto h = funded_head(s, hop);
        if (!h) break;
        heads.push_back(std::move(*h));
      }
      if (heads.size() != L) break;

      Rational composite = 1;
      Rational chunk = send_left;
      for (const auto& [h, cap] : heads) {
        chunk = std::min(chunk, cap / composite);
        composite *= h.quality();
      }
      if (partial && composite < limit_quality) break;
      chunk = std::min(chunk, deliver_left / composite);
      if (auto f = available(s, payer, path.front().pay)) chunk = std::min(chunk, *f);
      if (auto r = room(s, p.destination, path.back().get)) chunk = std::min(chunk, *r / composite);
      if (chunk <= 0) break;

      // Keep the first native node whole drops by rescaling the chunk.
      if (path.front().pay.is_native()) {
        chunk = detail::floor_to_drops(chunk);
      } else {
        Rational amt = chunk;
        for (std::size_t i = 0; i < L; ++i) {
          amt *= heads[i].first.quality();
          if (path[i].get.is_native()) {
            if (amt > 0) chunk *= detail::floor_to_drops(amt) / amt;
            break;
          }
        }
      }
      if (chunk <= 0) break;

      Rational in_hand = chunk;
      Rational spent = 0;
      Rational got = 0;
      for (std::size_t i = 0; i < L; ++i) {
        const Offer& h = heads[i].first;
        Fill f = s.books.fill_offer(h.key(), in_hand);
        if (f.paid.is_zero()) break;
        const bool last = i + 1 == L;
        transfer(s, payer, h.owner, f.paid, true);
        transfer(s, h.owner, last ? p.destination : payer, f.received, false);
        if (i == 0) spent = f.paid.value;
        in_hand = f.received.value;
        if (last) got = f.received.value;
        out.offers_consumed.push_back(std::move(f));
      }
      if (got <= 0) break;
      send_left -= spent;
      deliver_left -= got;
      delivered += got;
    }
    return delivered;
  }

  State state_;
  std::vector<Transaction> queue_;
  Amount fee_;
  int interval_ms_;
  LedgerIndex index_ = 0;
  LedgerIndex placing_at_ = 1;
  Rational burned_ = 0;
  Rational genesis_ = 0;
};

}  // namespace dexarb

#endif
