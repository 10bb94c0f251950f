// Command line driver: run single experiments, parameter sweeps, and slope
// reports over the recorded call counters.

#include <saddlekit/catalyst.hpp>
#include <saddlekit/problems.hpp>
#include <saddlekit/saddle.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace saddlekit;
using nlohmann::json;

namespace {

int log_level() {  // 0 off, 1 error, 2 warn, 3 info, 4 debug
  const char* e = std::getenv("SADDLEKIT_LOG");
  if (!e) return 2;
  const std::string v(e);
  if (v == "off") return 0;
  if (v == "error") return 1;
  if (v == "warn") return 2;
  if (v == "info") return 3;
  if (v == "debug") return 4;
  return 2;
}

void logmsg(int level, const char* tag, const std::string& msg) {
  if (log_level() >= level) std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}

struct RunConfig {
  GenerateTargets targets;
  std::optional<std::string> instance_file;
  std::string solver = "framework";
  double eps = 1e-4;
  double sigma = 0.1;
  std::uint64_t seed = 1;
  std::string order = "auto";
  std::string sliding_h = "auto";
  std::string sliding_f = "auto";
  // sweep section
  std::string sweep_param;
  std::vector<double> sweep_values;
};

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  RunConfig c;
  if (j.contains("problem")) {
    const auto& p = j["problem"];
    auto& t = c.targets;
    t.dx = p.value("dx", t.dx);
    t.dy = p.value("dy", t.dy);
    t.L_f = p.value("L_f", t.L_f);
    t.mu_x = p.value("mu_x", t.mu_x);
    t.L_G = p.value("L_G", t.L_G);
    t.L_h = p.value("L_h", t.L_h);
    t.mu_y = p.value("mu_y", t.mu_y);
    t.m_h = p.value("m_h", t.m_h);
    t.m_G = p.value("m_G", t.m_G);
  }
  if (j.contains("instance_file"))
    c.instance_file = j["instance_file"].get<std::string>();
  c.solver = j.value("solver", c.solver);
  c.eps = j.value("eps", c.eps);
  c.sigma = j.value("sigma", c.sigma);
  c.seed = j.value("seed", c.seed);
  c.order = j.value("order", c.order);
  c.sliding_h = j.value("sliding_h", c.sliding_h);
  c.sliding_f = j.value("sliding_f", c.sliding_f);
  if (j.contains("sweep")) {
    c.sweep_param = j["sweep"].value("param", "");
    c.sweep_values = j["sweep"].value("values", std::vector<double>{});
  }
  return c;
}

QuadraticSaddleInstance make_instance(const RunConfig& c) {
  if (c.instance_file) {
    std::ifstream in(*c.instance_file);
    if (!in) throw ConfigError("instance file not found: " + *c.instance_file);
    std::stringstream ss;
    ss << in.rdbuf();
    return instance_from_json(ss.str());
  }
  return generate(c.targets, c.seed);
}

std::optional<LoopOrder> parse_order(const std::string& s) {
  if (s == "auto") return {};
  if (s == "standard") return LoopOrder::Standard;
  if (s == "inverse") return LoopOrder::Inverse;
  throw ConfigError("unknown order: " + s);
}

std::optional<SlidingH> parse_sliding_h(const std::string& s) {
  if (s == "auto") return {};
  if (s == "hgeg") return SlidingH::HgeG;
  if (s == "hleg") return SlidingH::HleG;
  if (s == "proxh") return SlidingH::ProxH;
  throw ConfigError("unknown sliding_h: " + s);
}

std::optional<SlidingF> parse_sliding_f(const std::string& s) {
  if (s == "auto") return {};
  if (s == "fgeg") return SlidingF::FgeG;
  if (s == "fleg") return SlidingF::FleG;
  throw ConfigError("unknown sliding_f: " + s);
}

constexpr const char* kCsvHeader =
    "iter,gap,grad_f,grad_h,grad_xg,grad_yg,prox_f,prox_h\n";

void csv_row(std::FILE* f, long iter, double gap, const Counts& c) {
  std::fprintf(f, "%ld,%.17g,%llu,%llu,%llu,%llu,%llu,%llu\n", iter, gap,
               (unsigned long long)c[OracleClass::GradF],
               (unsigned long long)c[OracleClass::GradH],
               (unsigned long long)c[OracleClass::GradXG],
               (unsigned long long)c[OracleClass::GradYG],
               (unsigned long long)c[OracleClass::ProxF],
               (unsigned long long)c[OracleClass::ProxH]);
}

struct RunResult {
  double gap = 0.0;
  Counts counts;
};

// Primal max-function oracle with the closed-form inner maximizer.
CountedOracle primal_oracle(const QuadraticSaddleInstance& inst,
                            const SaddleProblem& p) {
  auto C = inst.C;
  auto cvec = inst.c;
  auto Bt = inst.B.transpose();
  InnerMaxSolver inner = [C, cvec, Bt](const Vec& x, double, double) {
    return Vec(C.ldlt().solve(Bt * x - cvec));
  };
  auto hv = p.h_val;
  auto Gv = p.G_val;
  auto Gxf = p.Gx;
  return max_function_oracle(
      [Gv, hv](const Vec& x, const Vec& y) { return Gv(x, y) - hv(y); },
      [Gxf](const Vec& x, const Vec& y) { return Gxf(x, y); }, inst.L_G,
      inst.mu_y, inner, 1e-12, 0.0, OracleClass::GradXG, p.ledger, inst.m_G,
      inst.dx);
}

RunResult run_once(const RunConfig& c, const QuadraticSaddleInstance& inst,
                   const std::string& trace_path) {
  auto ledger = make_ledger();
  SaddleProblem p = make_saddle_problem(inst, ledger);
  std::FILE* f = std::fopen(trace_path.c_str(), "wb");
  if (!f) throw ConfigError("cannot open trace file: " + trace_path);
  std::fputs(kCsvHeader, f);
  RunResult res;
  try {
    if (c.solver == "framework") {
      auto plan = plan_framework(p, c.eps, parse_order(c.order),
                                 parse_sliding_h(c.sliding_h),
                                 parse_sliding_f(c.sliding_f));
      csv_row(f, 0, brute_force_gap(inst, Vec::Zero(p.dx), Vec::Zero(p.dy)),
              Counts{});
      auto sol = solve_saddle(p, c.eps, c.sigma, plan);
      res.gap = brute_force_gap(inst, sol.x_hat, sol.y_hat);
      res.counts = sol.ledger;
      csv_row(f, 1, res.gap, res.counts);
    } else if (c.solver == "pipeline") {
      PipelineConfig cfg;
      auto [xs, ys] = kkt_solve(inst);
      cfg.gap0 =
          std::max(1.0, brute_force_gap(inst, Vec::Zero(p.dx), ys));
      csv_row(f, 0, brute_force_gap(inst, Vec::Zero(p.dx), Vec::Zero(p.dy)),
              Counts{});
      auto pr = prox_pipeline_solve(p, c.eps, c.sigma, cfg, c.seed);
      res.gap = brute_force_gap(inst, pr.x, pr.y);
      res.counts = pr.ledger;
      csv_row(f, 1, res.gap, res.counts);
    } else if (c.solver == "am" || c.solver == "ram") {
      CountedOracle phi = primal_oracle(inst, p);
      CountedOracle psi(
          [fv = p.f_val, fg = p.f_grad](const Vec& x) {
            return Eval{fv(x), fg(x)};
          },
          OracleSpec::exact(inst.L_f, inst.mu_x), OracleClass::GradF, nullptr,
          0, inst.dx, inst.L_f);
      const double H = phi.spec().L;
      ProxSolver prox = [&](const Vec& g, const Vec& ctr, double HH, double,
                            double) {
        return quadratic_prox(g, inst.A, inst.a, HH, ctr);
      };
      auto inner_y = [&](const Vec& x) {
        return Vec(inst.C.ldlt().solve(inst.B.transpose() * x - inst.c));
      };
      auto gapf = [&](const Vec& x) {
        return brute_force_gap(inst, x, inner_y(x));
      };
      SolveReport rep;
      if (c.solver == "am") {
        AMConfig cfg;
        cfg.H = H;
        cfg.max_iter = 500;
        cfg.mu = inst.mu_x;
        cfg.target_gap = c.eps;
        rep = am_run(phi, psi, prox, cfg, Vec::Zero(inst.dx), gapf);
      } else {
        rep = restarted_am(phi, psi, prox, H, inst.mu_x, c.eps, c.sigma,
                           Vec::Zero(inst.dx), 10.0, gapf);
      }
      for (const auto& tp : rep.trace) csv_row(f, tp.k, tp.value, tp.counts);
      res.gap = rep.value_gap;
      res.counts = ledger->snapshot();
      if (!(res.gap <= c.eps)) {
        std::fclose(f);
        throw BudgetError("iteration budget exhausted before target gap");
      }
    } else {
      throw ConfigError("unknown solver: " + c.solver);
    }
  } catch (...) {
    std::fclose(f);
    throw;
  }
  std::fclose(f);
  return res;
}

void apply_sweep_value(RunConfig& c, double v) {
  auto& t = c.targets;
  if (c.sweep_param == "L_f") t.L_f = v;
  else if (c.sweep_param == "L_h") t.L_h = v;
  else if (c.sweep_param == "L_G") t.L_G = v;
  else if (c.sweep_param == "mu_x") t.mu_x = v;
  else if (c.sweep_param == "mu_y") t.mu_y = v;
  else if (c.sweep_param == "m_G") t.m_G = static_cast<int>(v);
  else if (c.sweep_param == "m_h") t.m_h = static_cast<int>(v);
  else if (c.sweep_param == "eps") c.eps = v;
  else throw ConfigError("unknown sweep param: " + c.sweep_param);
}

int cmd_run(const RunConfig& c, const std::string& out) {
  fs::create_directories(out);
  auto inst = make_instance(c);
  {
    std::ofstream o(out + "/instance.json", std::ios::binary);
    o << instance_to_json(inst);
  }
  RunResult r = run_once(c, inst, out + "/trace.csv");
  logmsg(3, "info", "run finished, gap " + std::to_string(r.gap));
  std::printf("solver=%s eps=%.17g gap=%.17g total_calls=%llu\n",
              c.solver.c_str(), c.eps, r.gap,
              (unsigned long long)r.counts.total());
  return 0;
}

int cmd_sweep(const RunConfig& base, const std::string& out) {
  if (base.sweep_param.empty() || base.sweep_values.empty())
    throw ConfigError("sweep requires a sweep section in the config");
  fs::create_directories(out);
  std::FILE* s = std::fopen((out + "/summary.csv").c_str(), "wb");
  if (!s) throw ConfigError("cannot open summary.csv");
  std::fprintf(s,
               "param,value,gap,grad_f,grad_h,grad_xg,grad_yg,prox_f,prox_h\n");
  for (double v : base.sweep_values) {
    RunConfig c = base;
    apply_sweep_value(c, v);
    std::ostringstream dir;
    dir << out << "/" << c.sweep_param << "_" << v;
    fs::create_directories(dir.str());
    auto inst = make_instance(c);
    RunResult r = run_once(c, inst, dir.str() + "/trace.csv");
    std::fprintf(s, "%s,%.17g,%.17g,%llu,%llu,%llu,%llu,%llu,%llu\n",
                 c.sweep_param.c_str(), v, r.gap,
                 (unsigned long long)r.counts[OracleClass::GradF],
                 (unsigned long long)r.counts[OracleClass::GradH],
                 (unsigned long long)r.counts[OracleClass::GradXG],
                 (unsigned long long)r.counts[OracleClass::GradYG],
                 (unsigned long long)r.counts[OracleClass::ProxF],
                 (unsigned long long)r.counts[OracleClass::ProxH]);
    logmsg(3, "info", "sweep point " + std::to_string(v) + " done");
  }
  std::fclose(s);
  return 0;
}

int cmd_report(const std::string& summary) {
  std::ifstream in(summary);
  if (!in) throw ConfigError("summary file not found: " + summary);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty summary");
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string t;
    while (std::getline(ss, t, ',')) cols.push_back(t);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string t;
    std::vector<double> row;
    std::getline(ss, t, ',');  // param name
    while (std::getline(ss, t, ',')) row.push_back(std::stod(t));
    rows.push_back(row);
  }
  if (rows.size() < 2) throw ConfigError("need at least two sweep points");
  // column 0 (after param) is the swept value; fit log-log slopes
  for (std::size_t j = 2; j < cols.size(); ++j) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& r : rows) {
      if (r[j - 1] <= 0 || r[0] <= 0) continue;
      const double X = std::log(r[0]), Y = std::log(r[j - 1]);
      sx += X; sy += Y; sxx += X * X; sxy += X * Y;
      ++n;
    }
    if (n < 2) {
      std::printf("%s exponent=nan\n", cols[j].c_str());
      continue;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    std::printf("%s exponent=%.6f\n", cols[j].c_str(), slope);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"composite saddle-point solver toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", solver, summary_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> eps, sigma;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--seed", seed, "instance / sampling seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--eps", eps, "target accuracy");
    sub->add_option("--sigma", sigma, "failure probability budget");
    sub->add_option("--solver", solver,
                    "framework | pipeline | am | ram (overrides config)");
  };
  auto* run = app.add_subcommand("run", "solve one instance");
  add_common(run);
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  add_common(sweep);
  auto* report =
      app.add_subcommand("report", "fit call-count scaling exponents");
  report->add_option("--summary", summary_path, "summary.csv from a sweep")
      ->required();

  try {
    app.parse(argc, argv);
    if (report->parsed()) return cmd_report(summary_path);
    RunConfig c = load_config(config_path);
    if (seed) c.seed = *seed;
    if (eps) c.eps = *eps;
    if (sigma) c.sigma = *sigma;
    if (!solver.empty()) c.solver = solver;
    if (run->parsed()) return cmd_run(c, out_dir);
    return cmd_sweep(c, out_dir);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  } catch (const BudgetError& e) {
    logmsg(1, "error", e.what());
    return 3;
  } catch (const ConfigError& e) {
    logmsg(1, "error", e.what());
    return 2;
  } catch (const std::exception& e) {
    logmsg(1, "error", e.what());
    return 1;
  }
}
