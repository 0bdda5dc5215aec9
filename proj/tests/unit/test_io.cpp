#include "doctest.h"
#include "support.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "yflow/app.hpp"
#include "yflow/errors.hpp"
#include "yflow/io.hpp"
#include "yflow/scenario.hpp"

using namespace testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "yflow_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<unsigned char> bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

bool same_bits(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

const char* kConstant = R"(
[scenario]
name = tiny
seed = 3
[grid]
n = 3
sizes = 6
lengths = 2
[R0]
constant = -2
[f]
constant = -1
noise = 0.1
[u0]
constant = 1
[flow]
t_max = 5
record_every = 2
lp_orders = 2 3
)";

}  // namespace

TEST_CASE("snapshot round trip and layout") {
  auto g = GridSpec::make({4, 5, 6}, {1.0, 2.5, 3.0});
  auto w = random_field(g, -1e3, 1e3, 8);
  const auto p = scratch("w.yflo");
  save_snapshot(p, w);
  const auto back = load_snapshot(p);
  CHECK(back.grid().same_shape(*g));
  CHECK(same_bits(back.values(), w.values()));

  const auto b = bytes(p);
  REQUIRE(b.size() == 4 + 4 + 4 + 3 * 4 + 3 * 8 + g->size() * 8);
  CHECK(std::string(b.begin(), b.begin() + 4) == "YFLO");
  CHECK(b[4] == 1);
  CHECK(b[8] == 3);
  CHECK(b[12] == 4);
  CHECK(b[16] == 5);
  CHECK(b[20] == 6);
  double first = 0.0;
  std::memcpy(&first, b.data() + 48, 8);
  CHECK(first == w[0]);

  CHECK_THROWS_AS(load_snapshot(p, cube(4, 1.0)), GridMismatch);
  std::ofstream(scratch("bad.yflo"), std::ios::binary) << "NOPE";
  CHECK_THROWS_AS(load_snapshot(scratch("bad.yflo")), ScenarioError);
}

TEST_CASE("checkpoint and CSV round trips") {
  auto g = cube(6, 2.0);
  auto bg = Background(constant(g, -1.0), smooth_field(g, -1.0, 0.4, 2));
  FlowConfig cfg;
  cfg.t_max = 0.5;
  cfg.lp_orders = {2.0, 2.5};
  std::optional<RunCursor> saved;
  RunHooks hooks;
  hooks.checkpoint_every = 10;
  hooks.on_checkpoint = [&](const RunCursor& c) {
    if (!saved) saved = c;
  };
  const auto traj = run(bg, smooth_field(g, 1.4, 0.3, 3), cfg, hooks);
  REQUIRE(saved);

  const auto stem = scratch("ck");
  save_checkpoint(stem, *saved, cfg.lp_orders);
  const auto back = load_checkpoint(stem, g);
  CHECK(same_bits(back.state.u.values(), saved->state.u.values()));
  CHECK(back.state.t == saved->state.t);
  CHECK(back.state.step == saved->state.step);
  CHECK(back.dissipation_cum == saved->dissipation_cum);
  CHECK(back.last_record_step == saved->last_record_step);
  REQUIRE(back.records.size() == saved->records.size());
  CHECK(back.records.back().residual_lp == saved->records.back().residual_lp);
  const auto resumed = resume(bg, back, cfg);
  CHECK(same_bits(resumed.final_state.u.values(), traj.final_state.u.values()));

  CHECK(csv_columns({2.0, 2.5}) == std::vector<std::string>{"t", "dt", "energy", "min_u", "max_u", "volume_g",
                                                           "residual_sup", "residual_l2", "residual_l2.5",
                                                           "dissipation_cum"});
  const auto csv = scratch("traj.csv");
  write_csv(csv, traj);
  const auto read = read_csv(csv, 3);
  CHECK(read.lp_orders == traj.lp_orders);
  REQUIRE(read.records.size() == traj.records.size());
  for (std::size_t i = 0; i < read.records.size(); ++i) {
    REQUIRE(read.records[i].t == traj.records[i].t);
    REQUIRE(read.records[i].energy == traj.records[i].energy);
    REQUIRE(read.records[i].residual_lp == traj.records[i].residual_lp);
    REQUIRE(read.records[i].dissipation_cum == traj.records[i].dissipation_cum);
  }
}

TEST_CASE("scenario parsing") {
  const auto sc = parse_scenario(kConstant);
  CHECK(sc.name == "tiny");
  CHECK(sc.grid->size() == 216);
  CHECK(sc.flow.record_every == 2);
  CHECK(sc.flow.lp_orders == std::vector<double>{2.0, 3.0});
  for (double v : sc.bg().R0().values()) CHECK(v == -2.0);
  for (double v : sc.bg().f().values()) REQUIRE(std::abs(v + 1.0) <= 0.1);
  CHECK(sc.bg().f().max() > sc.bg().f().min());
  CHECK(same_bits(parse_scenario(kConstant).bg().f().values(), sc.bg().f().values()));

  std::string positive = kConstant;
  positive.replace(positive.find("constant = -2"), 13, "constant = 0.5");
  try {
    parse_scenario(positive);
    FAIL("positive R0 accepted");
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find("R0 not negative at index 0") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_scenario(std::string(kConstant) + "speed = 2\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(std::string(kConstant) + "[extra]\nx = 1\n"), ScenarioError);

  // u0 read back from a snapshot, bit for bit.
  auto g = cube(6, 2.0);
  auto u = smooth_field(g, 1.5, 0.4, 9);
  save_snapshot(scratch("u0.yflo"), u);
  std::string snap = kConstant;
  snap.replace(snap.find("[u0]\nconstant = 1"), 17, "[u0]\nsnapshot = u0.yflo");
  const auto sc2 = parse_scenario(snap, scratch(""));
  CHECK(same_bits(sc2.u0.values(), u.values()));
}

TEST_CASE("until parsing") {
  CHECK(parse_until("t:2.5").t == 2.5);
  CHECK(parse_until("3").t == 3.0);
  CHECK(parse_until("steps:40").steps == 40);
  CHECK_FALSE(parse_until("").t);
  CHECK_THROWS_AS(parse_until("steps:x"), InvalidArgument);
  CHECK_THROWS_AS(parse_until("t:-1"), InvalidArgument);
}
