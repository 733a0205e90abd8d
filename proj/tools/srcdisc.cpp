// Command-line front end: single-point bound queries, parameter sweeps over
// the figure grids, Chernoff/SLIVER exponent tables, and Monte Carlo runs.
// All tables are emitted in deterministic grid order with fixed column
// schemas (CSV or a mirroring JSON records array).

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "srcdisc/asymptotics.hpp"
#include "srcdisc/discrimination.hpp"
#include "srcdisc/model.hpp"
#include "srcdisc/parallel.hpp"
#include "srcdisc/simulate.hpp"
#include "srcdisc/sliver.hpp"
#include "srcdisc/table.hpp"

namespace {

using srcdisc::Scenario;
using srcdisc::ScenarioParams;

struct Axis {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  int count = 1;

  double value(int i) const {
    if (count == 1) return lo;
    return lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  }
};

Axis parse_axis(const std::string& spec) {
  Axis axis;
  std::stringstream ss(spec);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.size() != 4)
    throw std::invalid_argument("axis must be name:min:max:count, got '" + spec + "'");
  axis.name = parts[0];
  try {
    axis.lo = std::stod(parts[1]);
    axis.hi = std::stod(parts[2]);
    axis.count = std::stoi(parts[3]);
  } catch (const std::exception&) {
    throw std::invalid_argument("axis must be name:min:max:count, got '" + spec + "'");
  }
  if (axis.count < 1) throw std::invalid_argument("axis count must be >= 1");
  return axis;
}

// Optional JSON config with the same field names as the long flags
// (without dashes). Flags win on conflict.
struct ConfigFile {
  nlohmann::json data = nlohmann::json::object();

  static ConfigFile load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
    ConfigFile cfg;
    in >> cfg.data;
    if (!cfg.data.is_object())
      throw std::invalid_argument("config file must hold a JSON object");
    return cfg;
  }

  template <typename T>
  void fill(const CLI::Option* opt, const std::string& key, T& value) const {
    if (opt->count() > 0) return;
    if (auto it = data.find(key); it != data.end()) value = it->get<T>();
  }

  void fill_axes(const CLI::Option* opt, std::vector<std::string>& specs) const {
    if (opt->count() > 0) return;
    if (auto it = data.find("axis"); it != data.end()) {
      specs.clear();
      if (it->is_string()) {
        specs.push_back(it->get<std::string>());
      } else {
        for (const auto& v : *it) specs.push_back(v.get<std::string>());
      }
    }
  }
};

ConfigFile preload_config(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return ConfigFile::load(argv[i + 1]);
    if (arg.rfind("--config=", 0) == 0) return ConfigFile::load(arg.substr(9));
  }
  return {};
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("failed writing output file '" + path + "'");
}

// Shared per-subcommand state: every flag plus its CLI11 handle so config
// values only apply when the flag is absent.
struct CommonOpts {
  std::string scenario = "asymmetric";
  double k = 1.0;
  double q = 0.5;
  double p1 = 0.5;
  long m = 1;
  long m_cap = 64;
  long trials = 1000;
  std::uint64_t seed = 0;
  int workers = 0;
  std::string format = "csv";
  std::string output;
  std::string config_path;
  std::vector<std::string> axis_specs;

  CLI::Option* scenario_opt = nullptr;
  CLI::Option* k_opt = nullptr;
  CLI::Option* q_opt = nullptr;
  CLI::Option* p1_opt = nullptr;
  CLI::Option* m_opt = nullptr;
  CLI::Option* m_cap_opt = nullptr;
  CLI::Option* trials_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* workers_opt = nullptr;
  CLI::Option* format_opt = nullptr;
  CLI::Option* output_opt = nullptr;
  CLI::Option* axis_opt = nullptr;

  void add_common(CLI::App* cmd) {
    scenario_opt = cmd->add_option("--scenario", scenario, "asymmetric or symmetric");
    format_opt = cmd->add_option("--format", format, "csv or json");
    output_opt = cmd->add_option("--output,-o", output, "output path (default stdout)");
    workers_opt = cmd->add_option("--workers", workers,
                                  "worker threads (default: SRCDISC_WORKERS or hardware)");
    cmd->add_option("--config", config_path, "JSON config file; flags win on conflict");
  }

  void merge(const ConfigFile& cfg) {
    if (scenario_opt) cfg.fill(scenario_opt, "scenario", scenario);
    if (k_opt) cfg.fill(k_opt, "k", k);
    if (q_opt) cfg.fill(q_opt, "q", q);
    if (p1_opt) cfg.fill(p1_opt, "p1", p1);
    if (m_opt) cfg.fill(m_opt, "m", m);
    if (m_cap_opt) cfg.fill(m_cap_opt, "m-cap", m_cap);
    if (trials_opt) cfg.fill(trials_opt, "trials", trials);
    if (seed_opt) cfg.fill(seed_opt, "seed", seed);
    if (workers_opt) cfg.fill(workers_opt, "workers", workers);
    if (format_opt) cfg.fill(format_opt, "format", format);
    if (output_opt) cfg.fill(output_opt, "output", output);
    if (axis_opt) cfg.fill_axes(axis_opt, axis_specs);
  }

  int resolved_workers() const {
    return workers > 0 ? workers : srcdisc::default_worker_count();
  }

  Scenario kind() const { return srcdisc::scenario_from_string(scenario); }

  std::vector<Axis> axes(std::initializer_list<const char*> allowed,
                         std::size_t expected) const {
    std::vector<Axis> out;
    for (const std::string& spec : axis_specs) {
      Axis axis = parse_axis(spec);
      bool ok = false;
      for (const char* name : allowed)
        if (axis.name == name) ok = true;
      if (!ok)
        throw std::invalid_argument("axis '" + axis.name + "' is not valid here");
      out.push_back(axis);
    }
    if (out.size() != expected)
      throw std::invalid_argument("expected " + std::to_string(expected) +
                                  " --axis option(s)");
    return out;
  }

  std::string table_text(const srcdisc::Table& table) const {
    if (format == "csv") return table.to_csv();
    if (format == "json") return table.to_json();
    throw std::invalid_argument("format must be 'csv' or 'json'");
  }
};

std::string join_doubles(const std::vector<double>& vals) {
  std::string out;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i) out += ',';
    out += srcdisc::format_double(vals[i]);
  }
  return out;
}

int run_bound(const CommonOpts& opts) {
  ScenarioParams params{opts.kind(), opts.k, opts.q, opts.p1};
  params.validate();
  if (opts.m < 1) throw std::invalid_argument("m must be >= 1");
  const srcdisc::BoundReport rep =
      opts.m == 1 ? srcdisc::helstrom_one_shot(params)
                  : srcdisc::helstrom_m_shot(params, opts.m);
  if (opts.format == "json") {
    nlohmann::ordered_json j;
    j["scenario"] = opts.scenario;
    j["k"] = params.k;
    j["q"] = params.q;
    j["p1"] = params.p1;
    j["m"] = opts.m;
    j["e_min"] = rep.e_min;
    j["e_guess"] = rep.e_guess;
    j["advantage"] = std::isinf(rep.advantage) ? nlohmann::ordered_json()
                                               : nlohmann::ordered_json(rep.advantage);
    j["forbidden"] = rep.forbidden;
    j["spectrum"] = rep.spectrum;
    j["multiplicity"] = rep.multiplicity;
    emit(j.dump(2) + "\n", opts.output);
    return 0;
  }
  std::string out;
  out += "scenario=" + opts.scenario + "\n";
  out += "k=" + srcdisc::format_double(params.k) + "\n";
  out += "q=" + srcdisc::format_double(params.q) + "\n";
  out += "p1=" + srcdisc::format_double(params.p1) + "\n";
  out += "m=" + std::to_string(opts.m) + "\n";
  out += "e_min=" + srcdisc::format_double(rep.e_min) + "\n";
  out += "e_guess=" + srcdisc::format_double(rep.e_guess) + "\n";
  out += "advantage=" + srcdisc::format_double(rep.advantage) + "\n";
  out += std::string("forbidden=") + (rep.forbidden ? "true" : "false") + "\n";
  out += "spectrum=" + join_doubles(rep.spectrum) + "\n";
  out += "multiplicity=" + join_doubles(rep.multiplicity) + "\n";
  emit(out, opts.output);
  return 0;
}

// Rectangular (outer x inner) grid over two of {k, q, p1}; the remaining
// parameter comes from its flag.
std::vector<ScenarioParams> build_grid(const CommonOpts& opts,
                                       const std::vector<Axis>& axes) {
  std::vector<ScenarioParams> grid;
  grid.reserve(static_cast<std::size_t>(axes[0].count) * axes[1].count);
  for (int i = 0; i < axes[0].count; ++i) {
    for (int j = 0; j < axes[1].count; ++j) {
      ScenarioParams p{opts.kind(), opts.k, opts.q, opts.p1};
      auto assign = [&](const Axis& axis, int idx) {
        const double v = axis.value(idx);
        if (axis.name == "k") p.k = v;
        if (axis.name == "q") p.q = v;
        if (axis.name == "p1") p.p1 = v;
      };
      assign(axes[0], i);
      assign(axes[1], j);
      p.validate();
      grid.push_back(p);
    }
  }
  return grid;
}

int run_advantage_sweep(const CommonOpts& opts) {
  const auto axes = opts.axes({"k", "q", "p1"}, 2);
  const auto grid = build_grid(opts, axes);
  const auto points = srcdisc::advantage_sweep(grid, opts.resolved_workers());
  srcdisc::Table table;
  table.columns = {"scenario", "q", "k", "p1", "e_guess", "e_min",
                   "advantage_pct", "forbidden"};
  for (const auto& pt : points) {
    const double pct = pt.bound.forbidden ? 0.0 : (pt.bound.advantage - 1.0) * 100.0;
    table.add_row({std::string(srcdisc::to_string(pt.params.kind)), pt.params.q,
                   pt.params.k, pt.params.p1, pt.bound.e_guess, pt.bound.e_min,
                   pct, pt.bound.forbidden});
  }
  emit(opts.table_text(table), opts.output);
  return 0;
}

int run_minimal_m(const CommonOpts& opts) {
  const auto axes = opts.axes({"k", "q", "p1"}, 2);
  const auto grid = build_grid(opts, axes);
  if (opts.m_cap < 1) throw std::invalid_argument("m-cap must be >= 1");
  std::vector<srcdisc::MinimalMReport> reports(grid.size());
  srcdisc::parallel_for(grid.size(), opts.resolved_workers(), [&](std::size_t i) {
    reports[i] = srcdisc::minimal_m(grid[i], opts.m_cap);
  });
  srcdisc::Table table;
  table.columns = {"scenario", "q", "k", "p1", "m_min"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const long long m_min = reports[i].exceeded ? -1 : reports[i].m_min;
    table.add_row({std::string(srcdisc::to_string(grid[i].kind)), grid[i].q,
                   grid[i].k, grid[i].p1, m_min});
  }
  emit(opts.table_text(table), opts.output);
  return 0;
}

int run_chernoff(const CommonOpts& opts) {
  std::vector<Axis> axes;
  for (const std::string& spec : opts.axis_specs) axes.push_back(parse_axis(spec));
  if (axes.empty() || axes.size() > 2)
    throw std::invalid_argument("expected one or two --axis options over k and q");
  for (const Axis& axis : axes)
    if (axis.name != "k" && axis.name != "q")
      throw std::invalid_argument("axis '" + axis.name + "' is not valid here");
  if (axes.size() == 1) axes.push_back(Axis{axes[0].name == "k" ? "q" : "k",
                                            axes[0].name == "k" ? opts.q : opts.k,
                                            axes[0].name == "k" ? opts.q : opts.k, 1});

  srcdisc::Table table;
  table.columns = {"scenario", "q", "k", "xi_numeric", "xi_analytic", "s_star",
                   "xi_sliver"};
  struct Row {
    double q, k, xin, xia, s, xis;
  };
  std::vector<Row> rows(static_cast<std::size_t>(axes[0].count) * axes[1].count);
  const Scenario kind = opts.kind();
  srcdisc::parallel_for(rows.size(), opts.resolved_workers(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx) / axes[1].count;
    const int j = static_cast<int>(idx) % axes[1].count;
    double k = opts.k, q = opts.q;
    auto assign = [&](const Axis& axis, int n) {
      if (axis.name == "k") k = axis.value(n);
      if (axis.name == "q") q = axis.value(n);
    };
    assign(axes[0], i);
    assign(axes[1], j);
    ScenarioParams params{kind, k, q, 0.5};
    params.validate();
    const auto pair = srcdisc::build_states(params);
    const auto rep = srcdisc::chernoff_numeric(pair);
    rows[idx] = {q, k, rep.xi, srcdisc::chernoff_analytic(kind, k, q), rep.s_star,
                 srcdisc::protocol_error(kind, k, 1).exponent};
  });
  for (const Row& r : rows)
    table.add_row({std::string(srcdisc::to_string(kind)), r.q, r.k, r.xin, r.xia,
                   r.s, r.xis});
  emit(opts.table_text(table), opts.output);
  return 0;
}

int run_sliver(const CommonOpts& opts) {
  const auto axes = opts.axes({"k"}, 1);
  srcdisc::Table table;
  table.columns = {"scenario", "k", "pr_even_h2", "pr_odd_h2", "p_err_1shot",
                   "e_min_1shot", "saturation", "xi_sliver", "xi_q"};
  const Scenario kind = opts.kind();
  struct Row {
    double k, pe, po, perr, emin, sat, xis, xiq;
  };
  std::vector<Row> rows(axes[0].count);
  srcdisc::parallel_for(rows.size(), opts.resolved_workers(), [&](std::size_t i) {
    const double k = axes[0].value(static_cast<int>(i));
    const auto probs = srcdisc::mode_probabilities(kind, k);
    const auto proto = srcdisc::protocol_error(kind, k, 1);
    const double emin = srcdisc::helstrom_one_shot({kind, k, 0.5, 0.5}).e_min;
    rows[i] = {k,           probs.pr_even_h2,
               probs.pr_odd_h2, proto.p_err,
               emin,        proto.saturation,
               proto.exponent,  srcdisc::chernoff_analytic(kind, k, 0.5)};
  });
  for (const Row& r : rows)
    table.add_row({std::string(srcdisc::to_string(kind)), r.k, r.pe, r.po, r.perr,
                   r.emin, r.sat, r.xis, r.xiq});
  emit(opts.table_text(table), opts.output);
  return 0;
}

int run_simulate(const CommonOpts& opts) {
  std::vector<Axis> axes;
  for (const std::string& spec : opts.axis_specs) axes.push_back(parse_axis(spec));
  if (axes.size() > 2)
    throw std::invalid_argument("expected at most two --axis options over k and m");
  for (const Axis& axis : axes)
    if (axis.name != "k" && axis.name != "m")
      throw std::invalid_argument("axis '" + axis.name + "' is not valid here");

  struct Point {
    double k;
    long m;
  };
  std::vector<Point> points;
  if (axes.empty()) {
    points.push_back({opts.k, opts.m});
  } else {
    const Axis& a = axes[0];
    const Axis b = axes.size() == 2 ? axes[1] : Axis{"", 0, 0, 1};
    for (int i = 0; i < a.count; ++i) {
      for (int j = 0; j < b.count; ++j) {
        Point pt{opts.k, opts.m};
        auto assign = [&](const Axis& axis, int n) {
          if (axis.name == "k") pt.k = axis.value(n);
          if (axis.name == "m") pt.m = std::lround(axis.value(n));
        };
        assign(a, i);
        if (axes.size() == 2) assign(b, j);
        points.push_back(pt);
      }
    }
  }

  srcdisc::Table table;
  table.columns = {"scenario", "k", "m", "trials", "seed", "wrong_h1",
                   "wrong_h2", "p_hat", "stderr", "p_theory"};
  const Scenario kind = opts.kind();
  for (const Point& pt : points) {
    srcdisc::SimConfig cfg{kind, pt.k, pt.m, opts.trials, opts.seed};
    const auto rep = srcdisc::run_experiment(cfg, opts.resolved_workers());
    table.add_row({std::string(srcdisc::to_string(kind)), pt.k,
                   static_cast<long long>(pt.m), static_cast<long long>(opts.trials),
                   static_cast<long long>(opts.seed),
                   static_cast<long long>(rep.wrong_h1),
                   static_cast<long long>(rep.wrong_h2), rep.p_hat, rep.std_err,
                   rep.p_theory});
  }
  emit(opts.table_text(table), opts.output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-optimal discrimination of one versus two faint point sources"};
  app.require_subcommand(1);

  CommonOpts bound, sweep, minm, chern, sliv, sim;

  CLI::App* bound_cmd = app.add_subcommand("bound", "One Helstrom bound record");
  bound.add_common(bound_cmd);
  bound.k_opt = bound_cmd->add_option("--k", bound.k, "separation d/sigma");
  bound.q_opt = bound_cmd->add_option("--q", bound.q, "brightness weighting");
  bound.p1_opt = bound_cmd->add_option("--p1", bound.p1, "prior of the one-source hypothesis");
  bound.m_opt = bound_cmd->add_option("--m", bound.m, "shots per decision");

  CLI::App* sweep_cmd = app.add_subcommand(
      "advantage-sweep", "One-shot performance-advantage table over a 2D grid");
  sweep.add_common(sweep_cmd);
  sweep.k_opt = sweep_cmd->add_option("--k", sweep.k, "fixed separation when not an axis");
  sweep.q_opt = sweep_cmd->add_option("--q", sweep.q, "fixed weighting when not an axis");
  sweep.p1_opt = sweep_cmd->add_option("--p1", sweep.p1, "fixed prior when not an axis");
  sweep.axis_opt = sweep_cmd->add_option("--axis", sweep.axis_specs,
                                         "grid axis name:min:max:count (two of k,q,p1)");

  CLI::App* minm_cmd = app.add_subcommand(
      "minimal-m", "Smallest shot count beating direct guess over a 2D grid");
  minm.add_common(minm_cmd);
  minm.k_opt = minm_cmd->add_option("--k", minm.k, "fixed separation when not an axis");
  minm.q_opt = minm_cmd->add_option("--q", minm.q, "fixed weighting when not an axis");
  minm.p1_opt = minm_cmd->add_option("--p1", minm.p1, "fixed prior when not an axis");
  minm.m_cap_opt = minm_cmd->add_option("--m-cap", minm.m_cap,
                                        "search cap; -1 in the output marks exceeded");
  minm.axis_opt = minm_cmd->add_option("--axis", minm.axis_specs,
                                       "grid axis name:min:max:count (two of k,q,p1)");

  CLI::App* chern_cmd = app.add_subcommand(
      "chernoff", "Quantum Chernoff and SLIVER error exponents");
  chern.add_common(chern_cmd);
  chern.k_opt = chern_cmd->add_option("--k", chern.k, "fixed separation when not an axis");
  chern.q_opt = chern_cmd->add_option("--q", chern.q, "fixed weighting when not an axis");
  chern.axis_opt = chern_cmd->add_option("--axis", chern.axis_specs,
                                         "grid axis name:min:max:count (k and/or q)");

  CLI::App* sliv_cmd = app.add_subcommand(
      "sliver", "SLIVER protocol probabilities, errors, and saturation");
  sliv.add_common(sliv_cmd);
  sliv.axis_opt = sliv_cmd->add_option("--axis", sliv.axis_specs,
                                       "grid axis k:min:max:count");

  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "Monte Carlo runs of the SLIVER decision protocol");
  sim.add_common(sim_cmd);
  sim.k_opt = sim_cmd->add_option("--k", sim.k, "separation when not an axis");
  sim.m_opt = sim_cmd->add_option("--m", sim.m, "shots per decision when not an axis");
  sim.trials_opt = sim_cmd->add_option("--trials", sim.trials, "decisions per hypothesis");
  sim.seed_opt = sim_cmd->add_option("--seed", sim.seed, "master seed");
  sim.axis_opt = sim_cmd->add_option("--axis", sim.axis_specs,
                                     "grid axis name:min:max:count (k and/or m)");

  try {
    const ConfigFile cfg = preload_config(argc, argv);
    app.parse(argc, argv);
    bound.merge(cfg);
    sweep.merge(cfg);
    minm.merge(cfg);
    chern.merge(cfg);
    sliv.merge(cfg);
    sim.merge(cfg);
    if (bound_cmd->parsed()) return run_bound(bound);
    if (sweep_cmd->parsed()) return run_advantage_sweep(sweep);
    if (minm_cmd->parsed()) return run_minimal_m(minm);
    if (chern_cmd->parsed()) return run_chernoff(chern);
    if (sliv_cmd->parsed()) return run_sliver(sliv);
    if (sim_cmd->parsed()) return run_simulate(sim);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
