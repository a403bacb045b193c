// Operator CLI: replay fixtures, generate scenarios, run the two-account
// round trip.

#include "dexarb/dexarb.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitFixture = 2;

struct ReplayArgs {
  std::string fixtures;
  std::int64_t fee_drops = 10;
  std::string allowlist;
  std::string report = "-";
  std::string bot = "bot";
  std::string partner;
  bool strict = false;
  bool timed = false;
  bool latency = false;
};

struct GenArgs {
  std::uint64_t seed = 0;
  std::size_t currencies = 0;
  std::size_t offers = 0;
  std::size_t ledgers = 0;
  std::vector<std::string> plant;
  std::string out;
  std::string truth;
};

struct RoundTripArgs {
  std::string x;
  std::string x_prime;
  std::int64_t fee_drops = 10;
};

int run_replay(const ReplayArgs& a) {
  using namespace dexarb;
  std::ifstream file;
  std::istream* in = &std::cin;
  if (a.fixtures != "-") {
    file.open(a.fixtures);
    if (!file) {
      std::cerr << "error: cannot open fixture file " << a.fixtures << "\n";
      return kExitFixture;
    }
    in = &file;
  }

  ReplayConfig cfg;
  cfg.fee_per_tx = Amount::drops(a.fee_drops);
  cfg.bot = AccountId(a.bot);
  cfg.timed = a.timed;
  cfg.record_latency = a.latency;
  if (!a.partner.empty()) cfg.round_trip_partner = AccountId(a.partner);
  if (!a.allowlist.empty()) {
    std::ifstream al(a.allowlist);
    if (!al) {
      std::cerr << "error: cannot open allow-list " << a.allowlist << "\n";
      return kExitUsage;
    }
    try {
      cfg.allowlist = IssuerAllowlist::parse(al);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitUsage;
    }
  }

  RunReport report;
  try {
    FixtureReadResult fx = read_fixture(*in, a.strict);
    for (const auto& e : fx.skipped) std::cerr << "warning: skipped " << e.what() << "\n";
    report = replay(fx.events, cfg);
  } catch (const FixtureError& e) {
    std::cerr << "fixture error: " << e.what() << "\n";
    return kExitFixture;
  }

  const std::string text = to_json(report, a.latency);
  if (a.report == "-") {
    std::cout << text;
  } else {
    std::ofstream out(a.report);
    if (!out) {
      std::cerr << "error: cannot write report " << a.report << "\n";
      return kExitUsage;
    }
    out << text;
  }
  std::cerr << "ledgers=" << report.ledgers.size() << " detections_run=" << report.totals.detections_run
            << " skipped=" << report.totals.detections_skipped << " completed=" << report.totals.completed
            << " incomplete=" << report.totals.incomplete << " net_pnl=" << render_signed_xrp(report.totals.net_pnl)
            << " XRP\n";
  return 0;
}

int run_gen(const GenArgs& a) {
  using namespace dexarb;
  ScenarioConfig cfg;
  cfg.seed = a.seed;
  cfg.currencies = a.currencies;
  cfg.offers = a.offers;
  cfg.ledgers = a.ledgers;
  Scenario sc;
  try {
    if (!a.plant.empty()) {
      cfg.plant = PlantedCycle{parse_rational(a.plant.at(0)), std::stoul(a.plant.at(1))};
    }
    sc = generate_scenario(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (a.out == "-") {
    write_fixture(std::cout, sc.events);
  } else {
    std::ofstream out(a.out);
    if (!out) {
      std::cerr << "error: cannot write " << a.out << "\n";
      return kExitUsage;
    }
    write_fixture(out, sc.events);
  }
  if (sc.truth) {
    const std::string truth_path = !a.truth.empty() ? a.truth : (a.out == "-" ? "" : a.out + ".truth.json");
    if (!truth_path.empty()) {
      std::ofstream t(truth_path);
      t << sc.truth->to_json() << "\n";
    }
  }
  return 0;
}

int run_roundtrip(const RoundTripArgs& a) {
  using namespace dexarb;
  try {
    const Amount x = make_amount(a.x, CurrencyId::xrp());
    const Amount xp = make_amount(a.x_prime, CurrencyId::xrp());
    const RoundTripResult r = run_round_trip(x, xp, Amount::drops(a.fee_drops));
    if (r.plan.rejected) {
      std::cout << "rejected: " << r.plan.reason << "\n";
      std::cout << "expected gain: " << render_signed_xrp(r.plan.aggregate_gain()) << " XRP\n";
      return 0;
    }
    for (std::size_t i = 0; i < r.outcomes.size(); ++i)
      std::cout << "tx " << i + 1 << " " << to_string(r.plan.transactions[i].kind()) << ": "
                << to_string(r.outcomes[i].code) << "\n";
    std::cout << "x = " << x.render() << " XRP, x' = " << xp.render() << " XRP, e = " << r.plan.e.render() << " XRP\n";
    std::cout << "expected gain (x' - x - e): " << render_signed_xrp(r.plan.aggregate_gain()) << " XRP\n";
    std::cout << "gain: " << render_signed_xrp(r.gain) << " XRP\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arbitrage detection and ledger simulation for an XRPL-style DEX"};
  app.require_subcommand(1);

  ReplayArgs replay_args;
  auto* replay = app.add_subcommand("replay", "Replay a fixture through the detect-and-take loop");
  replay->add_option("--fixtures", replay_args.fixtures, "Fixture file (JSON lines), or - for stdin")->required();
  replay->add_option("--fee-drops", replay_args.fee_drops, "Fee per transaction in drops")->check(CLI::NonNegativeNumber);
  replay->add_option("--allowlist", replay_args.allowlist, "Issuer allow-list file");
  replay->add_option("--report", replay_args.report, "Report output path, - for stdout");
  replay->add_option("--bot", replay_args.bot, "Account the strategy trades from");
  replay->add_option("--round-trip-partner", replay_args.partner,
                     "Take XRP cycles as a two-account round trip with this receiving account");
  replay->add_flag("--strict", replay_args.strict, "Abort on the first malformed line");
  replay->add_flag("--timed", replay_args.timed, "Pace ledger closes at the ledger interval");
  replay->add_flag("--latency", replay_args.latency, "Include detection latency in the report");

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Generate a seeded scenario fixture");
  gen->add_option("--seed", gen_args.seed)->required();
  gen->add_option("--currencies", gen_args.currencies)->required();
  gen->add_option("--offers", gen_args.offers)->required();
  gen->add_option("--ledgers", gen_args.ledgers)->required();
  gen->add_option("--plant", gen_args.plant, "Plant a cycle: PI LENGTH")->expected(2);
  gen->add_option("--out", gen_args.out, "Output path, - for stdout")->required();
  gen->add_option("--truth", gen_args.truth, "Sidecar truth path (default OUT.truth.json)");

  RoundTripArgs rt_args;
  auto* rt = app.add_subcommand("roundtrip", "Run the two-account XRP round trip and print the gain");
  rt->add_option("--x", rt_args.x, "XRP paid by A")->required();
  rt->add_option("--x-prime", rt_args.x_prime, "XRP bought by A's offer")->required();
  rt->add_option("--fee-drops", rt_args.fee_drops, "Fee per transaction in drops")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*replay) return run_replay(replay_args);
  if (*gen) return run_gen(gen_args);
  return run_roundtrip(rt_args);
}
