#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "flatnf/commands.hpp"
#include "flatnf/errors.hpp"
#include "flatnf/sysfile.hpp"

using namespace flatnf;

namespace {

const std::string kFixtures = FLATNF_FIXTURE_DIR;

std::string write_temp(const std::string& stem, const std::string& content) {
  std::filesystem::path p = std::filesystem::temp_directory_path() / (stem + ".dtsys");
  std::ofstream out(p);
  out << content;
  return p.string();
}

struct RunResult {
  int code;
  std::string out, err;
};

template <typename Cmd>
RunResult run(Cmd cmd, const std::string& path, CommandOptions opt = {}) {
  std::ostringstream out, err;
  int code = cmd(path, opt, out, err);
  return {code, out.str(), err.str()};
}

int line_of(const std::string& text, const std::string& needle) {
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find(needle) != std::string::npos) return n;
  }
  return -1;
}

}  // namespace

TEST_CASE("the line format round-trips through the printer") {
  DiscreteSystem a = load_system(kFixtures + "/four_state.dtsys");
  DiscreteSystem b = parse_system_text(system_to_text(a), "roundtrip");
  CHECK(a.states() == b.states());
  CHECK(a.inputs() == b.inputs());
  for (const Var& s : a.states()) CHECK(a.rhs(s) == b.rhs(s));
}

TEST_CASE("line format errors carry the offending line") {
  std::string text =
      "system bad\n"
      "states: x1\n"
      "inputs: u1\n"
      "x1+ = u1\n"
      "x1+ = 2*u1\n";
  try {
    parse_system_text(text, "bad");
    FAIL("expected FileFormatError");
  } catch (const FileFormatError& e) {
    CHECK(e.line == 5);
    CHECK(std::string(e.what()).find("duplicate update for x1") != std::string::npos);
    CHECK(std::string(e.what()).find("first at line 4") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_system_text("states: x1\ninputs: u1\n", "none"), FileFormatError);
  CHECK_THROWS_AS(
      parse_system_text("states: x1\ninputs: u1\nx1+ = u1 + w\n", "undeclared"),
      FileFormatError);
  CHECK_THROWS_AS(
      parse_system_text("states: x1_p\ninputs: u1\nx1_p+ = u1\n", "reserved"),
      FileFormatError);
  CHECK_THROWS_AS(
      parse_system_text("states: y1\ninputs: u1\ny1+ = u1\n", "reserved"),
      FileFormatError);
  try {
    parse_system_text("system a\nstates: x1\ninputs: u1\nx2+ = u1\n", "x");
    FAIL("expected FileFormatError");
  } catch (const FileFormatError& e) {
    CHECK(e.line == line_of("system a\nstates: x1\ninputs: u1\nx2+ = u1\n", "x2+"));
  }
}

TEST_CASE("JSON input describes the same system as the line format") {
  std::string json_path = write_temp("json_twin", R"({
    "system": "twin",
    "states": ["x1", "x2"],
    "inputs": ["u1", "u2"],
    "updates": {"x1": "u1 + x2^2", "x2": "u2/3"},
    "equilibrium": {"x1": 0, "x2": "1/2"}
  })");
  std::string line_path = write_temp("line_twin",
                                     "system twin\n"
                                     "states: x1, x2\n"
                                     "inputs: u1, u2\n"
                                     "equilibrium: x1=0, x2=1/2\n"
                                     "x1+ = u1 + x2^2\n"
                                     "x2+ = u2/3\n");
  DiscreteSystem a = load_system(json_path);
  DiscreteSystem b = load_system(line_path);
  CHECK(system_to_text(a) == system_to_text(b));
  CHECK(a.equilibrium().at(Var::state("x2")) == Rat(1, 2));
  std::remove(json_path.c_str());
  std::remove(line_path.c_str());
}

TEST_CASE("exit codes separate verdicts from failures") {
  CHECK(run(cmd_check, kFixtures + "/five_state.dtsys").code == 0);
  CHECK(run(cmd_check, kFixtures + "/decoupled.dtsys").code == 1);

  RunResult missing = run(cmd_check, kFixtures + "/no_such_file.dtsys");
  CHECK(missing.code == 2);
  CHECK(missing.err.find("error:") != std::string::npos);

  std::string bad = write_temp("cli_bad", "states: x1\n");
  CHECK(run(cmd_check, bad).code == 2);
  std::remove(bad.c_str());
}

TEST_CASE("reports are byte-deterministic") {
  for (bool json : {false, true}) {
    CommandOptions opt;
    opt.json = json;
    RunResult a = run(cmd_normalform, kFixtures + "/four_state.dtsys", opt);
    RunResult b = run(cmd_normalform, kFixtures + "/four_state.dtsys", opt);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("the construction refuses input counts other than two") {
  std::string single = write_temp("cli_single",
                                  "states: x1, x2\ninputs: u1\nx1+ = x2\nx2+ = u1\n");
  std::string triple = write_temp(
      "cli_triple",
      "states: x1, x2, x3\ninputs: u1, u2, u3\nx1+ = u1\nx2+ = u2\nx3+ = u3\n");

  // The decision procedure itself has no input-count restriction.
  CHECK(run(cmd_check, single).code == 0);
  CHECK(run(cmd_check, triple).code == 0);

  RunResult refused = run(cmd_normalform, single);
  CHECK(refused.code == 2);
  CHECK(refused.err.find("--force-multi") != std::string::npos);
  CHECK(run(cmd_parameterize, triple).code == 2);

  CommandOptions forced;
  forced.core.force_multi = true;
  CHECK(run(cmd_normalform, single, forced).code == 0);
  CHECK(run(cmd_parameterize, triple, forced).code == 0);
  CHECK(run(cmd_verify, triple, forced).code == 0);

  std::remove(single.c_str());
  std::remove(triple.c_str());
}

TEST_CASE("verify reports each failed residual instead of aborting") {
  RunResult r = run(cmd_verify, kFixtures + "/five_state.dtsys");
  CHECK(r.code == 0);
  CHECK(r.out.find("pass") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("ill-posed systems are rejected up front") {
  // x2 never reaches an input: the update map is not a submersion.
  std::string rank = write_temp("cli_rank",
                                "states: x1, x2\ninputs: u1, u2\nx1+ = u1 + u2\nx2+ = x1\n");
  RunResult r = run(cmd_check, rank);
  CHECK(r.code == 2);
  CHECK(r.err.find("error:") != std::string::npos);
  std::remove(rank.c_str());
}
