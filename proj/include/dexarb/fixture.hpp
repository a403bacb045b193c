#ifndef DEXARB_FIXTURE_HPP
#define DEXARB_FIXTURE_HPP

#include "dexarb/ledger.hpp"

#include <json.hpp>

#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dexarb {

/// One fixture line: a transaction tagged with the ledger it lands in.
struct LedgerEvent {
  LedgerIndex ledger = 0;
  Transaction tx;
};

class FixtureError : public std::runtime_error {
 public:
  FixtureError(std::size_t line, std::size_t offset, const std::string& reason)
      : std::runtime_error("line " + std::to_string(line) + ", byte " + std::to_string(offset) + ": " + reason),
        line_(line),
        offset_(offset),
        reason_(reason) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t offset() const noexcept { return offset_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::size_t offset_;
  std::string reason_;
};

namespace detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct FieldError {
  std::string field;
  std::string reason;
};

inline const json& require(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end()) throw FieldError{field, std::string("missing field '") + field + "'"};
  return *it;
}

inline std::string require_string(const json& obj, const char* field) {
  const json& v = require(obj, field);
  if (!v.is_string()) throw FieldError{field, std::string("field '") + field + "' must be a string"};
  return v.get<std::string>();
}

inline std::uint64_t require_uint(const json& obj, const char* field) {
  const json& v = require(obj, field);
  if (!v.is_number_unsigned()) throw FieldError{field, std::string("field '") + field + "' must be a non-negative integer"};
  return v.get<std::uint64_t>();
}

inline Amount amount_from_json(const json& obj, const char* field) {
  const json& v = require(obj, field);
  if (!v.is_object()) throw FieldError{field, std::string("field '") + field + "' must be an amount object"};
  try {
    const std::string cur = require_string(v, "currency");
    CurrencyId c = cur == "XRP" ? CurrencyId::xrp() : CurrencyId::issued(cur, AccountId(require_string(v, "issuer")));
    return make_amount(require_string(v, "value"), c);
  } catch (const FieldError& e) {
    throw FieldError{field, std::string("field '") + field + "': " + e.reason};
  } catch (const TxError& e) {
    throw FieldError{field, std::string("field '") + field + "': " + e.what()};
  }
}

inline ordered_json amount_to_json(const Amount& a) {
  ordered_json j;
  j["value"] = a.render();
  if (a.is_native()) {
    j["currency"] = "XRP";
  } else {
    j["currency"] = a.currency.code();
    j["issuer"] = a.currency.issuer().str();
  }
  return j;
}

}  // namespace detail

/// Parses one fixture line. Blank lines yield nothing. Unknown fields are
/// ignored.
inline std::optional<LedgerEvent> parse_event(std::string_view line, std::size_t lineno = 1) {
  if (line.find_first_not_of(" \t\r") == std::string_view::npos) return std::nullopt;
  detail::json j;
  try {
    j = detail::json::parse(line);
  } catch (const detail::json::parse_error& e) {
    throw FixtureError(lineno, e.byte, "invalid JSON");
  }
  if (!j.is_object()) throw FixtureError(lineno, 0, "record must be a JSON object");

  try {
    LedgerEvent ev;
    ev.ledger = detail::require_uint(j, "ledger");
    const std::string type = detail::require_string(j, "type");
    try {
      ev.tx.sender = AccountId(detail::require_string(j, "account"));
    } catch (const TxError& e) {
      throw detail::FieldError{"account", e.what()};
    }
    if (auto f = j.find("flags"); f != j.end()) {
      if (!f->is_array()) throw detail::FieldError{"flags", "field 'flags' must be a list"};
      for (const auto& flag : *f) {
        const auto name = flag.is_string() ? flag.get<std::string>() : std::string();
        if (name == "tfPartialPayment") ev.tx.flags.partial_payment = true;
        else if (name == "tfNoDirectRipple") ev.tx.flags.no_direct_ripple = true;
        else throw detail::FieldError{"flags", "unknown flag '" + name + "'"};
      }
    }
    if (auto s = j.find("signature"); s != j.end() && s->is_string()) ev.tx.signature = s->get<std::string>();

    if (type == "OfferCreate") {
      OfferCreateTx oc;
      if (j.contains("sequence")) oc.sequence = detail::require_uint(j, "sequence");
      oc.taker_pays = detail::amount_from_json(j, "taker_pays");
      oc.taker_gets = detail::amount_from_json(j, "taker_gets");
      ev.tx.payload = std::move(oc);
    } else if (type == "OfferCancel") {
      ev.tx.payload = OfferCancelTx{detail::require_uint(j, "offer_sequence")};
    } else if (type == "Payment") {
      PaymentTx p;
      try {
        p.destination = AccountId(detail::require_string(j, "destination"));
      } catch (const TxError& e) {
        throw detail::FieldError{"destination", e.what()};
      }
      p.amount = detail::amount_from_json(j, "amount");
      if (j.contains("send_max")) p.send_max = detail::amount_from_json(j, "send_max");
      if (auto paths = j.find("paths"); paths != j.end()) {
        if (!paths->is_array()) throw detail::FieldError{"paths", "field 'paths' must be a list"};
        for (const auto& hop : *paths) {
          if (!hop.is_array() || hop.size() != 2 || !hop[0].is_string() || !hop[1].is_string())
            throw detail::FieldError{"paths", "each path hop must be [pay, get]"};
          try {
            p.paths.push_back({CurrencyId::parse(hop[0].get<std::string>()), CurrencyId::parse(hop[1].get<std::string>())});
          } catch (const TxError& e) {
            throw detail::FieldError{"paths", e.what()};
          }
        }
      }
      ev.tx.payload = std::move(p);
    } else if (type == "TrustSet") {
      ev.tx.payload = TrustSetTx{detail::amount_from_json(j, "limit")};
    } else if (type == "Fund") {
      Amount a = detail::amount_from_json(j, "amount");
      if (!a.is_native()) throw detail::FieldError{"amount", "Fund amount must be XRP"};
      ev.tx.payload = FundTx{std::move(a)};
    } else {
      throw detail::FieldError{"type", "unknown transaction type '" + type + "'"};
    }
    return ev;
  } catch (const detail::FieldError& e) {
    const auto pos = line.find("\"" + e.field + "\"");
    throw FixtureError(lineno, pos == std::string_view::npos ? 0 : pos, e.reason);
  }
}

inline std::string serialize_event(const LedgerEvent& ev) {
  detail::ordered_json j;
  j["ledger"] = ev.ledger;
  j["type"] = std::string(to_string(ev.tx.kind()));
  j["account"] = ev.tx.sender.str();
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, OfferCreateTx>) {
          if (p.sequence) j["sequence"] = p.sequence;
          j["taker_pays"] = detail::amount_to_json(p.taker_pays);
          j["taker_gets"] = detail::amount_to_json(p.taker_gets);
        } else if constexpr (std::is_same_v<T, OfferCancelTx>) {
          j["offer_sequence"] = p.offer_sequence;
        } else if constexpr (std::is_same_v<T, PaymentTx>) {
          j["destination"] = p.destination.str();
          j["amount"] = detail::amount_to_json(p.amount);
          if (p.send_max) j["send_max"] = detail::amount_to_json(*p.send_max);
          if (!p.paths.empty()) {
            auto paths = detail::ordered_json::array();
            for (const auto& hop : p.paths) paths.push_back({hop.pay.to_string(), hop.get.to_string()});
            j["paths"] = std::move(paths);
          }
        } else if constexpr (std::is_same_v<T, TrustSetTx>) {
          j["limit"] = detail::amount_to_json(p.limit);
        } else {
          j["amount"] = detail::amount_to_json(p.amount);
        }
      },
      ev.tx.payload);
  if (ev.tx.flags.partial_payment || ev.tx.flags.no_direct_ripple) {
    auto flags = detail::ordered_json::array();
    if (ev.tx.flags.partial_payment) flags.push_back("tfPartialPayment");
    if (ev.tx.flags.no_direct_ripple) flags.push_back("tfNoDirectRipple");
    j["flags"] = std::move(flags);
  }
  if (!ev.tx.signature.empty()) j["signature"] = ev.tx.signature;
  return j.dump();
}

struct FixtureReadResult {
  std::vector<LedgerEvent> events;
  std::vector<FixtureError> skipped;  // malformed lines tolerated in lenient mode
};

/// Reads a whole stream. Malformed lines abort in strict mode and are
/// skipped otherwise; a decreasing ledger index always aborts.
inline FixtureReadResult read_fixture(std::istream& in, bool strict) {
  FixtureReadResult r;
  std::string line;
  std::size_t lineno = 0;
  LedgerIndex last = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::optional<LedgerEvent> ev;
    try {
      ev = parse_event(line, lineno);
    } catch (const FixtureError& e) {
      if (strict) throw;
      r.skipped.push_back(e);
      continue;
    }
    if (!ev) continue;
    if (ev->ledger < last)
      throw FixtureError(lineno, 0,
                         "ledger index " + std::to_string(ev->ledger) + " decreases (previous " + std::to_string(last) + ")");
    if (ev->ledger == 0) throw FixtureError(lineno, 0, "ledger index must be >= 1");
    last = ev->ledger;
    r.events.push_back(std::move(*ev));
  }
  return r;
}

inline void write_fixture(std::ostream& out, const std::vector<LedgerEvent>& events) {
  for (const auto& ev : events) out << serialize_event(ev) << '\n';
}

}  // namespace dexarb

#endif
