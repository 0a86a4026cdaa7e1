#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "sparse_ocp/config.hpp"
#include "sparse_ocp/field_io.hpp"
#include "sparse_ocp/run.hpp"

using namespace sparse_ocp;

namespace {

const std::string kGrid = R"("grid": {"dim": 1, "nx": 10, "nt": 8, "T": 1.0})";

std::string doc(const std::string& body) { return "{\"mode\": \"solve\", " + kGrid + ", " + body + "}"; }

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal configuration") {
  const RunConfig c = parse_config(doc(R"("alpha": -1, "beta": 1)"));
  CHECK(c.mode == Mode::Solve);
  CHECK(c.spec.grid.nx() == 10);
  CHECK(std::holds_alternative<ZeroNonlinearity>(c.spec.f));
  CHECK(c.spec.mu == 0.0);
  CHECK_FALSE(c.instance.has_value());
}

TEST_CASE("diagnostics name the offending field") {
  CHECK(error_of(R"({"mode": "solve", "alpha": -1, "beta": 1})").find("grid") != std::string::npos);
  CHECK(error_of(doc(R"("alpha": -1, "beta": 1, "mode2": 3)")).find("mode2: unknown field") != std::string::npos);
  CHECK(error_of(R"({"mode": "fly", )" + kGrid + R"(, "alpha": -1, "beta": 1})").find("mode") != std::string::npos);
  CHECK(error_of(doc(R"("alpha": 1, "beta": -1)")).find("alpha") != std::string::npos);
  CHECK(error_of(doc(R"("alpha": -1, "beta": 1, "nu_omega": 1)")).find("y_omega") != std::string::npos);
  CHECK(error_of(doc(R"("alpha": -1, "beta": 1, "nonlinearity": {"kind": "cosh"})")).find("nonlinearity.kind") !=
        std::string::npos);
  CHECK(error_of(doc(R"("alpha": -1, "beta": "one")")).find("beta: expected a number") != std::string::npos);
  CHECK(error_of("{\"mode\": \"solve\",\n  \"grid\": }").find("line 2") != std::string::npos);
  CHECK(error_of(doc(R"("alpha": -1, "beta": 1, "nonlinearity": {"kind": "polynomial", "coefficients": [0, 1]})"))
            .find("validation") != std::string::npos);
}

TEST_CASE("targets from csv and from a control's state") {
  const auto dir = std::filesystem::temp_directory_path() / "sparse_ocp_cli_test";
  std::filesystem::create_directories(dir);
  const SpaceTimeGrid g(1, 10, 8, 1.0);
  write_csv(Field::space_time(g, 0.25), (dir / "yd.csv").string());
  std::ofstream(dir / "cfg.json") << doc(R"("alpha": -1, "beta": 1, "y_d": {"kind": "csv", "path": "yd.csv"})");
  const RunConfig a = load_config((dir / "cfg.json").string());
  CHECK(a.spec.cost.y_d[5] == 0.25);

  const RunConfig b = parse_config(doc(
      R"("alpha": -1, "beta": 1, "y_d": {"kind": "state_of_control", "control": {"kind": "constant", "value": 1}})"));
  CHECK(b.spec.cost.y_d[5] > 0.0);
  CHECK(norm(b.spec.cost.y_d - solve_state(b.spec, Field::space_time(g, 1.0)), NormKind::Linf) == 0.0);
}

TEST_CASE("manufactured block builds a stationary instance") {
  const RunConfig c = parse_config(doc(R"("alpha": -1, "beta": 1, "mu": 0.1,
      "manufactured": {"phi_bar": {"kind": "sine", "amplitude": 0.3}})"));
  REQUIRE(c.instance.has_value());
  CHECK(stationarity_residual(c.spec, c.instance->u_bar, 1.0) <= 1e-10);
  CHECK(error_of(doc(R"("alpha": -1, "beta": 1, "mu": 0.1,
      "manufactured": {"phi_bar": {"kind": "sine", "amplitude": 0.01}})"))
            .find("manufactured.phi_bar") != std::string::npos);
}

TEST_CASE("solve pipeline writes its files") {
  const auto dir = std::filesystem::temp_directory_path() / "sparse_ocp_cli_solve";
  std::filesystem::remove_all(dir);
  const RunConfig c = parse_config(doc(R"("alpha": -1, "beta": 1,
      "y_d": {"kind": "sine", "amplitude": 0.1}, "optimizer": {"s0": 50, "stop_tol": 1e-8})"));
  CHECK(run_pipeline(c, {.out_dir = dir.string(), .dump_fields = true}) == kExitPass);
  for (const char* f : {"summary.txt", "report.csv", "trace.csv", "u.csv", "y.csv", "phi.csv"})
    CHECK(std::filesystem::exists(dir / f));
  std::ifstream in(dir / "summary.txt");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("final_J = ") != std::string::npos);
  CHECK(text.find("converged = yes") != std::string::npos);
}

TEST_CASE("run maps errors to exit code 1") {
  CHECK(run("/nonexistent/config.json", {}) == kExitError);
}
