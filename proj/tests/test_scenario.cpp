#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "edcafair/errors.hpp"
#include "edcafair/scenario/builtin.hpp"
#include "edcafair/scenario/config.hpp"
#include "edcafair/scenario/output.hpp"
#include "edcafair/scenario/runner.hpp"

using namespace edcafair;
using namespace edcafair::scenario;

namespace {

const char* kMinimal = R"(edcafair-scenario 1
# one uplink flow
[station]
id = 1
[flow]
id = 1
station = 1
direction = uplink
transport = udp
rate = 1M
)";

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("minimal config gets the defaults") {
  const auto c = parse_scenario(kMinimal);
  CHECK(c.duration == 30 * kMicrosPerSecond);
  CHECK(c.beacon_interval == 100 * kMicrosPerMilli);
  CHECK(c.ap_buffer == 100);
  CHECK(c.controller.beta == 10);
  CHECK(c.controller.delta == doctest::Approx(0.25));
  CHECK(c.controller.theta == 4);
  CHECK(c.controller.n_txop_thresh == 8);
  REQUIRE(c.flows.size() == 1);
  CHECK(c.flows[0].rate_bps == doctest::Approx(1e6));
  CHECK(c.flows[0].stop == c.duration);
  CHECK(c.flows[0].adv_window == 42);
}

TEST_CASE("station windows must be exponent form") {
  const std::string text = "edcafair-scenario 1\n[edca.sta]\nac1 = 3 32 511 0\n";
  CHECK_THROWS_AS(parse_scenario(text), ConfigError);
}

TEST_CASE("parse errors name the line") {
  try {
    parse_scenario("edcafair-scenario 1\n[run]\nduration = abc\n");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_scenario("edcafair-scenario 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("[run]\n"), ConfigError);
}

TEST_CASE("rates") {
  CHECK(parse_rate("10M") == doctest::Approx(10e6));
  CHECK(parse_rate("150k") == doctest::Approx(150e3));
  CHECK(parse_rate("2500") == doctest::Approx(2500));
  CHECK_THROWS_AS(parse_rate("fast"), ConfigError);
}

TEST_CASE("every builtin expands, validates and round-trips") {
  for (const auto& b : builtin_catalog()) {
    CAPTURE(b.name);
    const auto c = expand_builtin(b.name);
    CHECK_NOTHROW(c.validate());
    const auto back = parse_scenario(serialize(c));
    CHECK(back == c);
    CHECK(config_hash(back) == config_hash(c));
  }
}

TEST_CASE("scenario-1 population") {
  const auto c = expand_builtin("scenario-1");
  int up = 0;
  int down = 0;
  for (const auto& s : c.stations) {
    bool is_up = false;
    for (const auto& f : c.flows) {
      if (f.station_id == s.id && f.direction == Direction::Uplink) is_up = true;
    }
    ++(is_up ? up : down);
  }
  CHECK(up == 12);
  CHECK(down == 12);
}

TEST_CASE("builtin keys") {
  const auto c = expand_builtin("scenario-3:n=8,transport=tcp,per=0.001,dack=2");
  CHECK(c.phy.per == doctest::Approx(0.001));
  for (const auto& f : c.flows) CHECK(f.delack == 2);
  CHECK_THROWS_AS(expand_builtin("scenario-3:bogus=1"), ConfigError);
  CHECK_THROWS_AS(expand_builtin("scenario-99"), ConfigError);
}

TEST_CASE("schemes") {
  auto c = expand_builtin("scenario-3:n=4");
  apply_scheme(c, "wfa");
  CHECK(c.controller.scheme == control::Scheme::Wfa);
  apply_scheme(c, "txop-diff");
  CHECK(c.controller.scheme == control::Scheme::Default);
  CHECK_THROWS_AS(apply_scheme(c, "magic"), ConfigError);
}

TEST_CASE("set_duration clips flows") {
  auto c = expand_builtin("scenario-2");
  set_duration(c, 20 * kMicrosPerSecond);
  CHECK_NOTHROW(c.validate());
  for (const auto& f : c.flows) {
    CHECK(f.start < 20 * kMicrosPerSecond);
    CHECK(f.stop <= 20 * kMicrosPerSecond);
  }
}

TEST_CASE("zero duration gives an empty report") {
  auto c = expand_builtin("fra-pair");
  set_duration(c, 0);
  const auto r = run_scenario(c);
  CHECK(r.acs.empty());
  CHECK(r.flows.empty());
  CHECK(r.throughput.empty());
  CHECK_FALSE(report_json(r).empty());
}

TEST_CASE("a short run produces consistent outputs") {
  auto c = expand_builtin("scenario-3:n=4,duration=4,warmup=1");
  apply_scheme(c, "wfa");
  const auto r = run_scenario(c);
  CHECK_FALSE(r.controller.empty());
  CHECK(r.mac.delivered > 0);
  const auto csv = throughput_csv(r);
  CHECK(csv.rfind("time_s,station_id,bits_per_s,direction\n", 0) == 0);
  const auto ctl = controller_csv(r);
  CHECK(std::count(ctl.begin(), ctl.end(), '\n') == static_cast<long>(r.controller.size()) + 1);
  CHECK(report_json(r).find("\"jain_f\"") != std::string::npos);
}

TEST_CASE("write_outputs") {
  auto c = expand_builtin("fra-pair:duration=2,warmup=0");
  const auto r = run_scenario(c);
  const auto dir = std::filesystem::temp_directory_path() / "edcafair_unit_out";
  std::filesystem::remove_all(dir);
  const auto files = write_outputs(r, dir, Emit::All);
  CHECK(files.size() == 6);
  for (const auto& f : files) CHECK(std::filesystem::exists(f));
  CHECK(slurp(dir / "trace.csv").rfind("time_us,", 0) == 0);
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(parse_emit("everything"), ConfigError);
}

TEST_CASE("format_double") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(3) == "3");
}
