#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "edcafair/errors.hpp"
#include "edcafair/scenario/builtin.hpp"
#include "edcafair/scenario/config.hpp"
#include "edcafair/scenario/output.hpp"
#include "edcafair/scenario/runner.hpp"

namespace es = edcafair::scenario;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> duration_s;
  std::optional<std::string> scheme;
};

es::ScenarioConfig load(const std::string& source, const Overrides& o) {
  es::ScenarioConfig cfg = es::load_scenario(source);
  if (o.seed) cfg.seed = *o.seed;
  if (o.scheme) es::apply_scheme(cfg, *o.scheme);
  if (o.duration_s) {
    if (!(*o.duration_s >= 0.0)) throw edcafair::ConfigError("--duration must be >= 0");
    es::set_duration(cfg, static_cast<edcafair::SimTime>(std::llround(*o.duration_s * 1e6)));
  }
  cfg.validate();
  return cfg;
}

std::string cell(const std::optional<double>& v, const char* fmt) {
  if (!v) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, *v);
  return buf;
}

int cmd_run(const std::string& source, const Overrides& o, const std::string& out_dir, const std::string& emit_name) {
  const es::Emit emit = es::parse_emit(emit_name);
  const es::ScenarioConfig cfg = load(source, o);
  es::RunOptions opts;
  opts.keep_trace = emit != es::Emit::Metrics;
  const es::RunReport rep = es::run_scenario(cfg, opts);
  for (const auto& path : es::write_outputs(rep, out_dir, emit)) std::cout << path.string() << '\n';
  for (const auto& a : rep.acs) {
    std::cout << "AC" << a.ac << ": f=" << cell(a.fairness.jain_f, "%.4f")
              << " plr_nonsat=" << cell(a.fairness.mean_plr_nonsat, "%.4f") << " saturated=" << a.fairness.n_saturated
              << "/" << a.fairness.stations.size() << '\n';
  }
  return 0;
}

int cmd_compare(const std::string& source, const Overrides& o) {
  static const std::vector<std::string> schemes{"default", "txop-diff", "cw-diff", "wfa"};
  std::printf("%-10s %-4s %8s %12s %14s %14s\n", "scheme", "ac", "f", "total_Mbps", "qos_delay_ms", "qos_jitter_ms");
  for (const auto& scheme : schemes) {
    Overrides with = o;
    with.scheme = scheme;
    const es::ScenarioConfig cfg = load(source, with);
    es::RunOptions opts;
    opts.keep_trace = false;
    const es::RunReport rep = es::run_scenario(cfg, opts);

    double total = 0.0;
    int top_ac = -1;
    for (const auto& f : rep.flows) {
      total += f.throughput_bps;
      top_ac = std::max(top_ac, f.spec.ac);
    }
    // Delay and jitter of the highest-priority class in use, averaged over its flows.
    std::optional<double> delay;
    std::optional<double> jitter;
    if (rep.acs.size() > 1) {
      double d = 0.0;
      double j = 0.0;
      int n = 0;
      for (const auto& f : rep.flows) {
        if (f.spec.ac != top_ac || !f.delay.mean_delay_us) continue;
        d += *f.delay.mean_delay_us / 1e3;
        j += f.delay.jitter_us.value_or(0.0) / 1e3;
        ++n;
      }
      if (n > 0) {
        delay = d / n;
        jitter = j / n;
      }
    }
    for (const auto& a : rep.acs) {
      std::printf("%-10s %-4d %8s %12.3f %14s %14s\n", scheme.c_str(), a.ac, cell(a.fairness.jain_f, "%.4f").c_str(),
                  total / 1e6, cell(delay, "%.3f").c_str(), cell(jitter, "%.3f").c_str());
    }
  }
  return 0;
}

int cmd_list() {
  for (const auto& b : es::builtin_catalog()) {
    std::cout << b.name << "  " << b.summary;
    if (!b.keys.empty()) {
      std::cout << "  [keys:";
      for (const auto& k : b.keys) std::cout << ' ' << k;
      std::cout << ']';
    }
    std::cout << '\n';
  }
  return 0;
}

int cmd_show(const std::string& source, const Overrides& o) {
  std::cout << es::serialize(load(source, o));
  return 0;
}

void add_overrides(CLI::App* sub, Overrides& o, bool with_scheme) {
  sub->add_option("--seed", o.seed, "RNG seed");
  sub->add_option("--duration", o.duration_s, "Simulated seconds");
  if (with_scheme) {
    sub->add_option("--scheme", o.scheme, "default|wfa|epda|txop-diff|cw-diff");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"802.11e EDCA fairness simulator"};
  app.set_version_flag("--version", es::kToolVersion);
  app.require_subcommand(1);

  std::string source;
  Overrides o;
  std::string out_dir = "out";
  std::string emit = "metrics";

  auto* run = app.add_subcommand("run", "Run one scenario and write its outputs");
  run->add_option("scenario", source, "Scenario file or builtin id")->required();
  add_overrides(run, o, true);
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--emit", emit, "metrics|trace|all");

  auto* compare = app.add_subcommand("compare", "Run Default, TXOP-diff, CW-diff and WFA side by side");
  compare->add_option("scenario", source, "Scenario file or builtin id")->required();
  add_overrides(compare, o, false);

  auto* list = app.add_subcommand("list", "List builtin scenarios");

  auto* show = app.add_subcommand("show", "Print the expanded scenario file");
  show->add_option("scenario", source, "Scenario file or builtin id")->required();
  add_overrides(show, o, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) return cmd_run(source, o, out_dir, emit);
    if (*compare) return cmd_compare(source, o);
    if (*list) return cmd_list();
    if (*show) return cmd_show(source, o);
  } catch (const edcafair::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const edcafair::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const edcafair::ContractViolation& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 4;
  }
  return 1;
}
