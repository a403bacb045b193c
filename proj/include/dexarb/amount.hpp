#ifndef DEXARB_AMOUNT_HPP
#define DEXARB_AMOUNT_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace dexarb {

// Expression templates off: values are plain regular types.
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                             boost::multiprecision::et_off>;
using LedgerIndex = std::uint64_t;

inline constexpr std::int64_t kDropsPerXrp = 1'000'000;
inline constexpr int kMaxSignificantDigits = 15;

enum class TxResultCode {
  Success,
  PathDry,
  PartialityNotAllowed,
  Unfunded,
  NoSuchOffer,
  InsufficientFee,
  MalformedTx,
};

inline std::string_view to_string(TxResultCode code) {
  switch (code) {
    case TxResultCode::Success: return "tesSUCCESS";
    case TxResultCode::PathDry: return "tecPATH_DRY";
    case TxResultCode::PartialityNotAllowed: return "tecPATH_PARTIAL";
    case TxResultCode::Unfunded: return "tecUNFUNDED";
    case TxResultCode::NoSuchOffer: return "tecNO_ENTRY";
    case TxResultCode::InsufficientFee: return "telINSUF_FEE_P";
    case TxResultCode::MalformedTx: return "temMALFORMED";
  }
  return "unknown";
}

/// Error carrying a ledger result code. Thrown by constructors and parsers
/// that reject input; the ledger itself reports codes through TxOutcome.
class TxError : public std::runtime_error {
 public:
  TxError(TxResultCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  TxResultCode code() const noexcept { return code_; }

 private:
  TxResultCode code_;
};

class AccountId {
 public:
  AccountId() = default;
  explicit AccountId(std::string id) : id_(std::move(id)) {
    if (id_.empty()) throw TxError(TxResultCode::MalformedTx, "empty account id");
  }

  const std::string& str() const noexcept { return id_; }
  bool empty() const noexcept { return id_.empty(); }

  auto operator<=>(const AccountId&) const = default;

 private:
  std::string id_;
};

inline std::ostream& operator<<(std::ostream& os, const AccountId& a) { return os << a.str(); }

/// Either the native asset or an (issuer, code) IOU. Equal tickers from
/// different issuers are distinct assets.
class CurrencyId {
 public:
  /// Default-constructed value is the native asset.
  CurrencyId() = default;

  static CurrencyId xrp() { return CurrencyId{}; }

  static CurrencyId issued(std::string code, AccountId issuer) {
    if (code.size() < 3 || code.size() > 20)
      throw TxError(TxResultCode::MalformedTx, "currency code must be 3-20 characters: " + code);
    for (char c : code) {
      const auto u = static_cast<unsigned char>(c);
      if (u < 0x21 || u > 0x7e || c == '@')
        throw TxError(TxResultCode::MalformedTx, "currency code must be printable ASCII: " + code);
    }
    if (code == "XRP")
      throw TxError(TxResultCode::MalformedTx, "XRP cannot be issued");
    if (issuer.empty())
      throw TxError(TxResultCode::MalformedTx, "issued currency needs an issuer");
    CurrencyId c;
    c.code_ = std::move(code);
    c.issuer_ = std::move(issuer);
    return c;
  }

  /// Accepts "XRP" or "CODE@issuer".
  static CurrencyId parse(std::string_view text) {
    if (text == "XRP") return xrp();
    const auto at = text.find('@');
    if (at == std::string_view::npos || at + 1 >= text.size())
      throw TxError(TxResultCode::MalformedTx, "bad currency: " + std::string(text));
    return issued(std::string(text.substr(0, at)), AccountId(std::string(text.substr(at + 1))));
  }

  bool is_native() const noexcept { return issuer_.empty(); }
  const std::string& code() const noexcept { return code_; }
  const AccountId& issuer() const noexcept { return issuer_; }

  std::string to_string() const {
    return is_native() ? std::string("XRP") : code_ + "@" + issuer_.str();
  }

  // Native sorts first (empty issuer, empty code).
  auto operator<=>(const CurrencyId& o) const {
    if (auto c = is_native() <=> o.is_native(); c != 0) return 0 <=> c;
    if (auto c = code_ <=> o.code_; c != 0) return c;
    return issuer_ <=> o.issuer_;
  }
  bool operator==(const CurrencyId&) const = default;

 private:
  std::string code_;
  AccountId issuer_;
};

inline std::ostream& operator<<(std::ostream& os, const CurrencyId& c) { return os << c.to_string(); }

namespace detail {

inline BigInt pow10(int n) {
  BigInt r = 1;
  for (int i = 0; i < n; ++i) r *= 10;
  return r;
}

inline Rational floor_to_drops(const Rational& xrp) {
  const Rational scaled = xrp * kDropsPerXrp;
  BigInt q = boost::multiprecision::numerator(scaled) / boost::multiprecision::denominator(scaled);
  if (scaled < 0 && Rational(q) != scaled) q -= 1;
  return Rational(q, kDropsPerXrp);
}

inline bool is_whole_drops(const Rational& xrp) {
  return boost::multiprecision::denominator(Rational(xrp * kDropsPerXrp)) == 1;
}

// Parses a plain non-negative decimal ("12", "0.5", ".5", "1e3" is rejected).
inline std::optional<Rational> parse_decimal(std::string_view s, std::string& why) {
  if (s.empty()) { why = "empty value"; return std::nullopt; }
  if (s.front() == '-') { why = "negative value"; return std::nullopt; }
  if (s.front() == '+') s.remove_prefix(1);
  std::string digits;
  int frac_digits = 0;
  bool seen_dot = false;
  for (char c : s) {
    if (c == '.') {
      if (seen_dot) { why = "multiple decimal points"; return std::nullopt; }
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_dot) ++frac_digits;
    } else {
      why = std::string("non-numeric character '") + c + "'";
      return std::nullopt;
    }
  }
  if (digits.empty()) { why = "no digits"; return std::nullopt; }
  const auto first = digits.find_first_not_of('0');
  if (first != std::string::npos) {
    const auto last = digits.find_last_not_of('0');
    if (static_cast<int>(last - first + 1) > kMaxSignificantDigits) {
      why = "more than 15 significant digits";
      return std::nullopt;
    }
  }
  // A leading zero would make the BigInt string constructor read octal.
  if (first == std::string::npos) return Rational(0);
  return Rational(BigInt(digits.substr(first)), pow10(frac_digits));
}

// Renders a non-negative rational with at most 15 significant digits,
// rounding half-up when the value is not exactly representable.
inline std::string render_decimal(const Rational& v) {
  if (v == 0) return "0";
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  // Find exponent k such that 10^14 <= v * 10^k < 10^15.
  int k = 0;
  const Rational lo(pow10(kMaxSignificantDigits - 1));
  const Rational hi(pow10(kMaxSignificantDigits));
  Rational scaled = v;
  while (scaled < lo) { scaled *= 10; ++k; }
  while (scaled >= hi) { scaled /= 10; --k; }
  BigInt n = numerator(scaled) / denominator(scaled);
  const Rational rem = scaled - Rational(n);
  if (rem * 2 >= 1) ++n;
  // Rounding up may spill into 16 digits (9.99..→10.0..).
  if (n >= pow10(kMaxSignificantDigits)) { n /= 10; --k; }
  while (k > 0 && n % 10 == 0) { n /= 10; --k; }
  std::string digits = n.str();
  if (k <= 0) return digits + std::string(static_cast<std::size_t>(-k), '0');
  const auto len = static_cast<int>(digits.size());
  if (len > k) return digits.substr(0, len - k) + "." + digits.substr(len - k);
  return "0." + std::string(static_cast<std::size_t>(k - len), '0') + digits;
}

}  // namespace detail

/// Exact non-negative quantity of one currency. Native values are held in
/// XRP units and are always whole drops.
struct Amount {
  Rational value;
  CurrencyId currency;

  Amount() = default;
  Amount(Rational v, CurrencyId c) : value(std::move(v)), currency(std::move(c)) {}

  static Amount zero(const CurrencyId& c) { return Amount(Rational(0), c); }
  static Amount drops(std::int64_t d) { return Amount(Rational(d, kDropsPerXrp), CurrencyId::xrp()); }

  bool is_native() const noexcept { return currency.is_native(); }
  bool is_zero() const { return value == 0; }

  /// Whole drops; only meaningful for native amounts.
  BigInt to_drops() const {
    const Rational d = value * kDropsPerXrp;
    return boost::multiprecision::numerator(d) / boost::multiprecision::denominator(d);
  }

  std::string render() const { return detail::render_decimal(value); }
  std::string to_string() const { return render() + " " + currency.to_string(); }

  bool operator==(const Amount&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const Amount& a) { return os << a.to_string(); }

inline Amount make_amount(std::string_view value, const CurrencyId& currency) {
  std::string why;
  auto parsed = detail::parse_decimal(value, why);
  if (!parsed) throw TxError(TxResultCode::MalformedTx, "bad amount '" + std::string(value) + "': " + why);
  if (currency.is_native() && !detail::is_whole_drops(*parsed))
    throw TxError(TxResultCode::MalformedTx, "fractional drops in XRP amount: " + std::string(value));
  return Amount(std::move(*parsed), currency);
}

/// value * r exactly; native results floor to whole drops.
inline Amount amount_mul(const Amount& a, const Rational& r) {
  if (r < 0) throw TxError(TxResultCode::MalformedTx, "negative multiplier");
  Rational v = a.value * r;
  if (a.is_native()) v = detail::floor_to_drops(v);
  return Amount(std::move(v), a.currency);
}

inline void require_same_currency(const Amount& a, const Amount& b) {
  if (a.currency != b.currency)
    throw TxError(TxResultCode::MalformedTx,
                  "currency mismatch: " + a.currency.to_string() + " vs " + b.currency.to_string());
}

inline Amount operator+(const Amount& a, const Amount& b) {
  require_same_currency(a, b);
  return Amount(a.value + b.value, a.currency);
}

inline Amount operator-(const Amount& a, const Amount& b) {
  require_same_currency(a, b);
  if (b.value > a.value) throw TxError(TxResultCode::MalformedTx, "amount would go negative");
  return Amount(a.value - b.value, a.currency);
}

inline std::strong_ordering compare(const Amount& a, const Amount& b) {
  require_same_currency(a, b);
  if (a.value < b.value) return std::strong_ordering::less;
  if (a.value > b.value) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

inline Amount min(const Amount& a, const Amount& b) { return compare(a, b) <= 0 ? a : b; }

inline Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    Rational num = parse_rational(text.substr(0, slash));
    Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) throw TxError(TxResultCode::MalformedTx, "zero denominator");
    return num / den;
  }
  std::string why;
  auto r = detail::parse_decimal(text, why);
  if (!r) throw TxError(TxResultCode::MalformedTx, "bad number '" + std::string(text) + "': " + why);
  return *r;
}

inline std::string rational_to_string(const Rational& r) {
  return boost::multiprecision::denominator(r) == 1
             ? boost::multiprecision::numerator(r).str()
             : boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

/// Signed XRP quantity, rendered with up to 6 decimals.
inline std::string render_signed_xrp(const Rational& v) {
  return v < 0 ? "-" + detail::render_decimal(-v) : detail::render_decimal(v);
}

}  // namespace dexarb

#endif
