#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fracop/fracop.h"

using json = nlohmann::json;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitEngine = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EngineError : std::runtime_error {
  EngineError(fracop_status s, const std::string& what) : std::runtime_error(what), status(s) {}
  fracop_status status;
};

const char* status_name(fracop_status s) {
  switch (s) {
    case FRACOP_ERR_PARAM: return "param";
    case FRACOP_ERR_DOMAIN: return "domain";
    case FRACOP_ERR_NUMERIC: return "numeric";
    case FRACOP_ERR_CONVERGENCE: return "convergence";
    case FRACOP_ERR_IO: return "io";
    default: return "internal";
  }
}

void check(fracop_status s) {
  if (s != FRACOP_OK) throw EngineError(s, fracop_last_error());
}

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

// Owned string returned by the library.
struct LibString {
  char* p = nullptr;
  LibString() = default;
  LibString(const LibString&) = delete;
  LibString& operator=(const LibString&) = delete;
  ~LibString() { fracop_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct FieldHandle {
  fracop_field* p = nullptr;
  FieldHandle() = default;
  FieldHandle(FieldHandle&& o) noexcept : p(std::exchange(o.p, nullptr)) {}
  FieldHandle& operator=(FieldHandle&& o) noexcept {
    std::swap(p, o.p);
    return *this;
  }
  ~FieldHandle() { fracop_field_free(p); }
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot open '" + path + "' for writing");
  os << text;
  if (!os) throw UsageError("cannot write '" + path + "'");
}

FieldHandle read_field(const std::string& path) {
  FieldHandle h;
  check(fracop_field_read(path.c_str(), &h.p));
  return h;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("malformed number list '" + text + "'");
    }
  }
  if (v.empty()) throw UsageError("empty number list");
  return v;
}

// Flags shared by every subcommand; unset flags leave the config untouched.
struct Common {
  std::string config_path;
  std::string json_out;
  std::string csv_out;
  std::optional<int> n;
  std::optional<double> s, s1;
  std::optional<std::string> kernel;
  std::optional<std::uint64_t> seed;
  std::optional<double> trunc_radius, excision, ring_growth;
  std::optional<int> base_cells, refine_depth, order;
  std::optional<double> extent;
  std::optional<std::size_t> points;

  void add(CLI::App* app, bool with_params) {
    app->add_option("--config", config_path, "JSON config file; flags override its values")->check(CLI::ExistingFile);
    app->add_option("--json", json_out, "write the JSON report to this path (default stdout)");
    app->add_option("--csv", csv_out, "write the CSV table to this path");
    app->add_option("--seed", seed, "seed for randomized sweeps");
    if (with_params) {
      app->add_option("--n", n, "dimension (1-3)");
      app->add_option("--s", s, "order s");
      app->add_option("--s1", s1, "order s1 (s2 = 2s - s1)");
      app->add_option("--K", kernel, "coefficient kernel, e.g. constant:1, checkerboard:1,2");
    }
    app->add_option("--trunc-radius", trunc_radius, "quadrature truncation radius");
    app->add_option("--excision", excision, "quadrature excision radius");
    app->add_option("--ring-growth", ring_growth, "cell growth factor outside the core box");
    app->add_option("--base-cells", base_cells, "uniform cells per axis across the core box");
    app->add_option("--refine-depth", refine_depth, "dyadic refinement levels");
    app->add_option("--order", order, "Gauss points per cell and axis");
    app->add_option("--extent", extent, "grid half-width L");
    app->add_option("--points", points, "grid points per axis");
  }

  json load() const {
    json cfg = json::object();
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      try {
        cfg = json::parse(is);
      } catch (const json::exception& e) {
        throw UsageError("config file: " + std::string(e.what()));
      }
      if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
    }
    if (n) cfg["n"] = *n;
    if (s) cfg["s"] = *s;
    if (s1) cfg["s1"] = *s1;
    if (kernel) cfg["K"] = *kernel;
    if (seed) cfg["seed"] = *seed;
    auto quad = [&](const char* key, auto& v) {
      if (v) cfg["quad"][key] = *v;
    };
    quad("trunc_radius", trunc_radius);
    quad("excision", excision);
    quad("ring_growth", ring_growth);
    quad("base_cells", base_cells);
    quad("refine_depth", refine_depth);
    quad("order", order);
    if (extent) cfg["grid"]["extent"] = *extent;
    if (points) cfg["grid"]["points"] = *points;
    return cfg;
  }
};

void set_sweep(json& cfg, const std::string& text) {
  auto c1 = text.find(':'), c2 = text.rfind(':');
  if (c1 == std::string::npos || c1 == c2) throw UsageError("--sweep expects min:max:count");
  try {
    cfg["sweep"] = {{"min", std::stod(text.substr(0, c1))},
                    {"max", std::stod(text.substr(c1 + 1, c2 - c1 - 1))},
                    {"count", std::stoi(text.substr(c2 + 1))}};
  } catch (const std::exception&) {
    throw UsageError("--sweep expects min:max:count");
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Fractional operators with coefficient kernels"};
  app.require_subcommand(1, 1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);

  // apply-op
  Common c_apply;
  std::string op, in_path, out_path, out_csv;
  std::optional<int> op_axis;
  auto* apply = app.add_subcommand("apply-op", "apply an operator to a field file");
  c_apply.add(apply, true);
  apply->add_option("--op", op, "laps | riesz-pot | riesz-tr | pv-laps | LK | T")
      ->required()
      ->check(CLI::IsMember({"laps", "riesz-pot", "riesz-tr", "pv-laps", "LK", "T"}));
  apply->add_option("--axis", op_axis, "Riesz transform component");
  apply->add_option("--in", in_path, "input field file")->required();
  apply->add_option("--out", out_path, "output field file")->required();
  apply->add_option("--out-csv", out_csv, "also write the output field as CSV");

  // eval-kernel
  Common c_eval;
  std::string z1, z2, sweep_eval;
  bool no_center = false, tail_study = false;
  auto* eval = app.add_subcommand("eval-kernel", "evaluate A_{K,s1,s2}(z1, z2)");
  c_eval.add(eval, true);
  eval->add_option("--z1", z1, "comma-separated coordinates");
  eval->add_option("--z2", z2, "comma-separated coordinates");
  eval->add_option("--sweep", sweep_eval, "delta sweep min:max:count along the first axis");
  eval->add_flag("--no-center", no_center, "integrate K itself rather than K minus its midpoint");
  eval->add_flag("--tail-study", tail_study, "also evaluate with the truncation radius doubled");

  // verify-estimates
  Common c_verify;
  std::string check_name, sweep_verify;
  std::optional<std::size_t> draws;
  std::optional<double> delta, theta, alpha, sigma;
  std::optional<int> iters;
  auto* verify = app.add_subcommand("verify-estimates", "run one quantitative check and emit a verdict");
  c_verify.add(verify, true);
  verify->add_option("--check", check_name, "size | hoelder | M-decay | opnorm | bmo | lemmas")
      ->required()
      ->check(CLI::IsMember({"size", "hoelder", "M-decay", "opnorm", "bmo", "lemmas"}));
  verify->add_option("--sweep", sweep_verify, "delta sweep min:max:count");
  verify->add_option("--draws", draws, "lemma sampler draws");
  verify->add_option("--delta", delta, "separation for the hoelder check");
  verify->add_option("--theta", theta, "estimate parameter theta");
  verify->add_option("--alpha", alpha, "estimate parameter alpha");
  verify->add_option("--sigma", sigma, "estimate parameter sigma");
  verify->add_option("--iters", iters, "power iterations for opnorm");

  // quad-selftest
  Common c_self;
  std::optional<std::size_t> self_draws;
  auto* self = app.add_subcommand("quad-selftest", "reference integrals and lemma samplers");
  c_self.add(self, false);
  self->add_option("--draws", self_draws, "lemma sampler draws");

  // solve
  Common c_solve;
  std::string rhs_path, u_out;
  std::vector<std::string> rhs_laps;
  std::optional<double> tol;
  std::optional<int> max_iter;
  auto* solve = app.add_subcommand("solve", "Neumann-series solve of L_K u = g");
  c_solve.add(solve, true);
  auto* rhs_opt = solve->add_option("--rhs", rhs_path, "right-hand side field g (mean-zero)");
  solve->add_option("--rhs-laps", rhs_laps, "s f.bin: use g = (-Delta)^{s/2} f")->expected(2)->excludes(rhs_opt);
  solve->add_option("--tol", tol, "relative step tolerance");
  solve->add_option("--max-iter", max_iter, "iteration cap");
  solve->add_option("--out", u_out, "write u as a field file");

  // seminorm
  Common c_semi;
  std::string kind = "gagliardo", semi_in;
  std::optional<double> semi_s, semi_p;
  auto* semi = app.add_subcommand("seminorm", "seminorm or quasinorm of a field");
  c_semi.add(semi, false);
  semi->add_option("--kind", kind, "gagliardo | bmo | weak_l1 | lp")
      ->check(CLI::IsMember({"gagliardo", "bmo", "weak_l1", "lp"}));
  semi->add_option("--s", semi_s, "smoothness for gagliardo");
  semi->add_option("--p", semi_p, "integrability exponent");
  semi->add_option("--in", semi_in, "input field file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << "\n";
    return kExitUsage;
  }
  fracop_set_threads(threads);

  if (*apply) {
    json cfg = c_apply.load();
    cfg["op"] = op;
    if (op_axis) cfg["axis"] = *op_axis;
    FieldHandle f = read_field(in_path);
    FieldHandle out;
    LibString report;
    check(fracop_apply_op(cfg.dump().c_str(), f.p, &out.p, &report.p));
    check(fracop_field_write(out.p, out_path.c_str()));
    if (!out_csv.empty()) check(fracop_field_write_csv(out.p, out_csv.c_str()));
    write_text(c_apply.json_out, report.str());
    return 0;
  }
  if (*eval) {
    json cfg = c_eval.load();
    if (!sweep_eval.empty()) {
      set_sweep(cfg, sweep_eval);
    } else if (!z1.empty() || !z2.empty()) {
      if (z1.empty() || z2.empty()) throw UsageError("--z1 and --z2 must be given together");
      cfg["z1"] = parse_list(z1);
      cfg["z2"] = parse_list(z2);
    } else if (!cfg.contains("sweep") && !cfg.contains("z1")) {
      throw UsageError("eval-kernel needs --z1/--z2 or --sweep");
    }
    if (no_center) cfg["center"] = false;
    if (tail_study) cfg["tail_study"] = true;
    LibString report, csv;
    check(fracop_eval_kernel(cfg.dump().c_str(), &report.p, &csv.p));
    write_text(c_eval.json_out, report.str());
    if (!c_eval.csv_out.empty()) write_text(c_eval.csv_out, csv.str());
    return 0;
  }
  if (*verify) {
    json cfg = c_verify.load();
    if (!sweep_verify.empty()) set_sweep(cfg, sweep_verify);
    if (draws) cfg["draws"] = *draws;
    if (delta) cfg["delta"] = *delta;
    if (iters) cfg["iters"] = *iters;
    if (theta) cfg["estimate"]["theta"] = *theta;
    if (alpha) cfg["estimate"]["alpha"] = *alpha;
    if (sigma) cfg["estimate"]["sigma"] = *sigma;
    LibString verdict, csv;
    int pass = 0;
    check(fracop_verify(check_name.c_str(), cfg.dump().c_str(), &verdict.p, &csv.p, &pass));
    write_text(c_verify.json_out, verdict.str());
    if (!c_verify.csv_out.empty()) write_text(c_verify.csv_out, csv.str());
    return pass ? 0 : kExitFail;
  }
  if (*self) {
    json cfg = c_self.load();
    if (self_draws) cfg["draws"] = *self_draws;
    LibString report, csv;
    int pass = 0;
    check(fracop_quad_selftest(cfg.dump().c_str(), &report.p, &csv.p, &pass));
    write_text(c_self.json_out, report.str());
    if (!c_self.csv_out.empty()) write_text(c_self.csv_out, csv.str());
    return pass ? 0 : kExitFail;
  }
  if (*solve) {
    json cfg = c_solve.load();
    if (tol) cfg["tol"] = *tol;
    if (max_iter) cfg["max_iter"] = *max_iter;
    FieldHandle rhs;
    if (!rhs_laps.empty()) {
      cfg["rhs_laps"] = parse_list(rhs_laps[0]).at(0);
      rhs = read_field(rhs_laps[1]);
    } else if (!rhs_path.empty()) {
      rhs = read_field(rhs_path);
    }
    FieldHandle u;
    LibString report, csv;
    int pass = 0;
    check(fracop_solve(cfg.dump().c_str(), rhs.p, &u.p, &report.p, &csv.p, &pass));
    if (!u_out.empty()) check(fracop_field_write(u.p, u_out.c_str()));
    write_text(c_solve.json_out, report.str());
    if (!c_solve.csv_out.empty()) write_text(c_solve.csv_out, csv.str());
    return pass ? 0 : kExitFail;
  }
  if (*semi) {
    json cfg = c_semi.load();
    cfg["kind"] = kind;
    if (semi_s) cfg["s"] = *semi_s;
    if (semi_p) cfg["p"] = *semi_p;
    FieldHandle f = read_field(semi_in);
    LibString report;
    double value = 0.0;
    check(fracop_seminorm(cfg.dump().c_str(), f.p, &value, &report.p));
    write_text(c_semi.json_out, report.str());
    return 0;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << "\n";
    return kExitUsage;
  } catch (const EngineError& e) {
    std::cerr << "error: " << status_name(e.status) << ": " << one_line(e.what()) << "\n";
    return e.status == FRACOP_ERR_PARAM || e.status == FRACOP_ERR_DOMAIN || e.status == FRACOP_ERR_IO ? kExitUsage
                                                                                                       : kExitEngine;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << one_line(e.what()) << "\n";
    return kExitEngine;
  }
}
