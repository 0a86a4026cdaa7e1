#include "sparse_ocp/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sparse_ocp/field_io.hpp"

namespace sparse_ocp {

using nlohmann::json;

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::Solve: return "solve";
    case Mode::VerifyFoc: return "verify-foc";
    case Mode::VerifySoc: return "verify-soc";
    case Mode::Growth: return "growth";
    case Mode::Bounds: return "bounds";
    case Mode::Cones: return "cones";
  }
  return "?";
}

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

[[noreturn]] void fail(const std::string& path, const std::string& msg) { throw ConfigError(path + ": " + msg); }

void allow_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) fail(join(path, k), "unknown field");
}

double number(const json& obj, const std::string& path, const char* key, std::optional<double> fallback = {}) {
  const std::string where = join(path, key);
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    fail(where, "missing required number");
  }
  const json& v = obj.at(key);
  if (!v.is_number()) fail(where, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(where, "expected a finite number");
  return x;
}

long integer(const json& obj, const std::string& path, const char* key, std::optional<long> fallback = {},
             long min = std::numeric_limits<long>::min()) {
  const std::string where = join(path, key);
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    fail(where, "missing required integer");
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(where, "expected an integer");
  const long x = v.get<long>();
  if (x < min) fail(where, "must be >= " + std::to_string(min));
  return x;
}

std::vector<double> numbers(const json& obj, const std::string& path, const char* key, std::vector<double> fallback) {
  const std::string where = join(path, key);
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array() || v.empty()) fail(where, "expected a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(where + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

const json& object(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) fail(join(path, key), "missing required object");
  const json& v = obj.at(key);
  if (!v.is_object()) fail(join(path, key), "expected an object");
  return v;
}

std::string text(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) fail(join(path, key), "missing required string");
  const json& v = obj.at(key);
  if (!v.is_string()) fail(join(path, key), "expected a string");
  return v.get<std::string>();
}

Mode parse_mode(const std::string& name) {
  for (Mode m : {Mode::Solve, Mode::VerifyFoc, Mode::VerifySoc, Mode::Growth, Mode::Bounds, Mode::Cones})
    if (name == to_string(m)) return m;
  fail("mode", "unknown pipeline '" + name + "' (solve | verify-foc | verify-soc | growth | bounds | cones)");
}

FieldRecipe parse_recipe(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected a field recipe object");
  const std::string kind = text(v, path, "kind");
  FieldRecipe r;
  if (kind == "zero") {
    allow_keys(v, path, {"kind"});
    r.kind = FieldRecipe::Kind::Zero;
  } else if (kind == "constant") {
    allow_keys(v, path, {"kind", "value"});
    r.kind = FieldRecipe::Kind::Constant;
    r.value = number(v, path, "value");
  } else if (kind == "sine") {
    allow_keys(v, path, {"kind", "amplitude", "mode", "time_poly"});
    r.kind = FieldRecipe::Kind::Sine;
    r.amplitude = number(v, path, "amplitude", 1.0);
    r.mode = static_cast<int>(integer(v, path, "mode", 1, 1));
    r.time_poly = numbers(v, path, "time_poly", {1.0});
  } else {
    fail(join(path, "kind"), "unknown recipe kind '" + kind + "' (zero | constant | sine | csv | state_of_control)");
  }
  return r;
}

struct Source {
  enum class Kind { Recipe, Csv, StateOfControl } kind = Kind::Recipe;
  FieldRecipe recipe;
  std::string csv;
  FieldRecipe control;
};

Source parse_source(const json& v, const std::string& path, const std::string& base_dir) {
  Source s;
  if (v.is_object() && v.contains("kind") && v.at("kind").is_string()) {
    const std::string kind = v.at("kind").get<std::string>();
    if (kind == "csv") {
      allow_keys(v, path, {"kind", "path"});
      s.kind = Source::Kind::Csv;
      std::filesystem::path p = text(v, path, "path");
      s.csv = (p.is_absolute() ? p : std::filesystem::path(base_dir) / p).string();
      return s;
    }
    if (kind == "state_of_control") {
      allow_keys(v, path, {"kind", "control"});
      s.kind = Source::Kind::StateOfControl;
      s.control = parse_recipe(object(v, path, "control"), join(path, "control"));
      return s;
    }
  }
  s.recipe = parse_recipe(v, path);
  return s;
}

Field load_csv(const Source& s, const SpaceTimeGrid& grid, FieldKind kind, const std::string& path) {
  try {
    return read_csv(grid, kind, s.csv);
  } catch (const InvalidInput& e) {
    fail(path, e.what());
  }
}

Nonlinearity parse_nonlinearity(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object");
  const std::string kind = text(v, path, "kind");
  if (kind == "zero") {
    allow_keys(v, path, {"kind"});
    return ZeroNonlinearity{};
  }
  if (kind == "polynomial") {
    allow_keys(v, path, {"kind", "coefficients"});
    if (!v.contains("coefficients")) fail(join(path, "coefficients"), "missing required array");
    return OddPolynomial{numbers(v, path, "coefficients", {})};
  }
  if (kind == "exponential") {
    allow_keys(v, path, {"kind", "gain"});
    return Exponential{number(v, path, "gain", 1.0)};
  }
  fail(join(path, "kind"), "unknown nonlinearity '" + kind + "' (zero | polynomial | exponential)");
}

OperatorA parse_operator(const json& root, int dim) {
  if (!root.contains("operator")) return OperatorA::laplacian(dim);
  const json& v = object(root, "", "operator");
  allow_keys(v, "operator", {"a", "b"});
  OperatorA op = OperatorA::laplacian(dim);
  if (v.contains("a")) {
    const json& a = v.at("a");
    if (!a.is_array() || a.size() != static_cast<std::size_t>(dim))
      fail("operator.a", "expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " array");
    op.a.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_array() || a[i].size() != static_cast<std::size_t>(dim))
        fail("operator.a[" + std::to_string(i) + "]", "expected a row of length " + std::to_string(dim));
      for (const json& x : a[i]) {
        if (!x.is_number()) fail("operator.a[" + std::to_string(i) + "]", "expected numbers");
        op.a.push_back(x.get<double>());
      }
    }
  }
  if (v.contains("b")) {
    op.b = numbers(v, "operator", "b", {});
    if (op.b.size() != static_cast<std::size_t>(dim)) fail("operator.b", "expected length " + std::to_string(dim));
  }
  return op;
}

}  // namespace

RunConfig parse_config(const std::string& doc, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(doc);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  allow_keys(root, "", {"mode", "seed", "grid", "operator", "nonlinearity", "alpha", "beta", "mu", "nu_omega", "y0",
                        "y_d", "y_omega", "manufactured", "optimizer", "solver", "cones", "growth", "bounds"});
  const Mode mode = parse_mode(text(root, "", "mode"));
  const auto seed = static_cast<std::uint64_t>(integer(root, "", "seed", 0, 0));

  const json& g = object(root, "", "grid");
  allow_keys(g, "grid", {"dim", "nx", "nt", "T"});
  const int dim = static_cast<int>(integer(g, "grid", "dim", 1));
  if (dim != 1 && dim != 2) fail("grid.dim", "must be 1 or 2");
  const int nx = static_cast<int>(integer(g, "grid", "nx", {}, 1));
  const int nt = static_cast<int>(integer(g, "grid", "nt", {}, 1));
  const double T = number(g, "grid", "T", 1.0);
  if (!(T > 0.0)) fail("grid.T", "must be positive");
  const SpaceTimeGrid grid(dim, nx, nt, T);

  const OperatorA op = parse_operator(root, dim);
  const Nonlinearity f =
      root.contains("nonlinearity") ? parse_nonlinearity(root.at("nonlinearity"), "nonlinearity") : Nonlinearity{};
  const double alpha = number(root, "", "alpha");
  const double beta = number(root, "", "beta");
  const double mu = number(root, "", "mu", 0.0);
  const int nu = static_cast<int>(integer(root, "", "nu_omega", 0, 0));
  if (nu > 1) fail("nu_omega", "must be 0 or 1");
  if (mu < 0.0) fail("mu", "must be >= 0");
  if (!(alpha < beta)) fail("alpha", "alpha < beta required");

  SolverOptions solver;
  if (root.contains("solver")) {
    const json& s = object(root, "", "solver");
    allow_keys(s, "solver", {"newton_tol", "newton_max_iter"});
    solver.newton_tol = number(s, "solver", "newton_tol", solver.newton_tol);
    solver.newton_max_iter = static_cast<int>(integer(s, "solver", "newton_max_iter", 50, 1));
    if (!(solver.newton_tol > 0.0)) fail("solver.newton_tol", "must be positive");
  }

  std::optional<StationaryInstance> instance;
  std::optional<ProblemSpec> built;

  if (root.contains("manufactured")) {
    for (const char* key : {"y_d", "y_omega", "y0"})
      if (root.contains(key)) fail(key, "not allowed together with 'manufactured'");
    const json& m = object(root, "", "manufactured");
    allow_keys(m, "manufactured", {"phi_bar", "y0", "band"});
    InstanceRecipe recipe{.grid = grid, .op = op, .f = f, .mu = mu, .alpha = alpha, .beta = beta, .nu_omega = nu};
    if (!m.contains("phi_bar")) fail("manufactured.phi_bar", "missing required recipe");
    recipe.phi_bar = parse_recipe(m.at("phi_bar"), "manufactured.phi_bar");
    if (m.contains("y0")) recipe.y0 = parse_recipe(m.at("y0"), "manufactured.y0");
    recipe.band = number(m, "manufactured", "band", -1.0);
    try {
      instance = build_stationary_instance(recipe, solver);
    } catch (const DegenerateInstance& e) {
      fail("manufactured.phi_bar", e.what());
    }
    built = instance->spec;
  } else {
    ProblemSpec spec{.grid = grid,
                     .op = op,
                     .f = f,
                     .cost = {.y_d = Field::space_time(grid), .nu_omega = nu, .y_omega = std::nullopt},
                     .alpha = alpha,
                     .beta = beta,
                     .mu = mu,
                     .y0 = Field::terminal_slice(grid)};
    if (root.contains("y0")) {
      const Source s = parse_source(root.at("y0"), "y0", base_dir);
      if (s.kind == Source::Kind::StateOfControl) fail("y0", "state_of_control is only valid for targets");
      spec.y0 = s.kind == Source::Kind::Csv ? load_csv(s, grid, FieldKind::TerminalSlice, "y0")
                                            : evaluate_slice(s.recipe, grid, 0.0);
    }
    auto target = [&](const char* key, FieldKind kind) -> Field {
      const Source s = parse_source(root.at(key), key, base_dir);
      if (s.kind == Source::Kind::Csv) return load_csv(s, grid, kind, key);
      if (s.kind == Source::Kind::StateOfControl) {
        const Field y = solve_state(spec, evaluate_space_time(s.control, grid), solver);
        return kind == FieldKind::SpaceTime ? y : y.terminal();
      }
      return kind == FieldKind::SpaceTime ? evaluate_space_time(s.recipe, grid)
                                          : evaluate_slice(s.recipe, grid, grid.final_time());
    };
    if (root.contains("y_d")) spec.cost.y_d = target("y_d", FieldKind::SpaceTime);
    if (nu == 1) {
      if (!root.contains("y_omega")) fail("y_omega", "required when nu_omega = 1");
      spec.cost.y_omega = target("y_omega", FieldKind::TerminalSlice);
    } else if (root.contains("y_omega")) {
      fail("y_omega", "given but nu_omega = 0");
    }
    built = std::move(spec);
  }
  RunConfig cfg{.mode = mode, .seed = seed, .spec = std::move(*built), .instance = std::move(instance)};
  cfg.solver = solver;

  const ValidationReport report = validate(cfg.spec);
  if (!report.passed) {
    std::string msg = "problem validation failed:";
    for (const std::string& s : report.failures) msg += " " + s + ";";
    throw ConfigError(msg);
  }
  cfg.warnings = report.warnings;

  if (root.contains("optimizer")) {
    const json& o = object(root, "", "optimizer");
    allow_keys(o, "optimizer", {"s0", "backtrack", "sufficient_decrease", "max_iters", "stop_tol", "starts"});
    cfg.optimizer.s0 = number(o, "optimizer", "s0", cfg.optimizer.s0);
    cfg.optimizer.backtrack = number(o, "optimizer", "backtrack", cfg.optimizer.backtrack);
    cfg.optimizer.sufficient_decrease = number(o, "optimizer", "sufficient_decrease", cfg.optimizer.sufficient_decrease);
    cfg.optimizer.max_iters = static_cast<int>(integer(o, "optimizer", "max_iters", cfg.optimizer.max_iters, 1));
    cfg.optimizer.stop_tol = number(o, "optimizer", "stop_tol", cfg.optimizer.stop_tol);
    cfg.starts = static_cast<int>(integer(o, "optimizer", "starts", 1, 1));
    if (!(cfg.optimizer.s0 > 0.0)) fail("optimizer.s0", "must be positive");
    if (!(cfg.optimizer.backtrack > 0.0 && cfg.optimizer.backtrack < 1.0))
      fail("optimizer.backtrack", "must lie in (0, 1)");
    if (!(cfg.optimizer.stop_tol > 0.0)) fail("optimizer.stop_tol", "must be positive");
  }
  cfg.optimizer.seed = cfg.seed;
  cfg.optimizer.solver = cfg.solver;

  if (root.contains("cones")) {
    const json& c = object(root, "", "cones");
    allow_keys(c, "cones", {"tau", "samples", "tol_active", "tol_J", "band", "min_ratio"});
    cfg.cones.tau = numbers(c, "cones", "tau", cfg.cones.tau);
    for (double t : cfg.cones.tau)
      if (!(t > 0.0)) fail("cones.tau", "entries must be positive");
    cfg.cones.samples = static_cast<std::size_t>(integer(c, "cones", "samples", 200, 1));
    cfg.cones.tol_active = number(c, "cones", "tol_active", cfg.cones.tol_active);
    cfg.cones.tol_J = number(c, "cones", "tol_J", cfg.cones.tol_J);
    cfg.cones.band = number(c, "cones", "band", cfg.cones.band);
    cfg.cones.min_ratio = number(c, "cones", "min_ratio", cfg.cones.min_ratio);
  }
  if (root.contains("growth")) {
    const json& c = object(root, "", "growth");
    allow_keys(c, "growth", {"epsilon", "samples", "rho"});
    cfg.growth.epsilon = number(c, "growth", "epsilon", cfg.growth.epsilon);
    if (!(cfg.growth.epsilon > 0.0)) fail("growth.epsilon", "must be positive");
    cfg.growth.samples = static_cast<std::size_t>(integer(c, "growth", "samples", 500, 1));
    cfg.growth.rho = numbers(c, "growth", "rho", cfg.growth.rho);
  }
  if (root.contains("bounds")) {
    const json& c = object(root, "", "bounds");
    allow_keys(c, "bounds", {"samples", "near_rho", "stabilized"});
    cfg.bounds.samples = static_cast<std::size_t>(integer(c, "bounds", "samples", 200, 1));
    cfg.bounds.near_rho = numbers(c, "bounds", "near_rho", cfg.bounds.near_rho);
    cfg.bounds.stabilized = number(c, "bounds", "stabilized", cfg.bounds.stabilized);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(buf.str(), dir.empty() ? "." : dir.string());
}

}  // namespace sparse_ocp
