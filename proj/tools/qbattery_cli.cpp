#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "qbattery/qbattery.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 2;

struct Config {
  std::string model = "xy";
  double gamma = 1.25;
  double delta0 = 0.3;
  double delta1 = 0.6;
  int dimers = 300;
  double h0 = 0.8;
  double h1 = 0.7;
  int sites = 600;

  double dt = 0.02;
  double t_end = 0.0;
  double window_min = 0.0;
  double window_max = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::string evaluator = "full";

  double grid_from = 0.0;
  double grid_to = 0.5;
  double grid_step = 0.005;
  std::vector<int> sizes{50, 100, 200, 300};
  double delta = 0.0;
  double time = 0.0;
  int spins = 4;
  double tolerance = 1e-8;

  std::string out = "-";
  std::string format = "csv";
  unsigned workers = 1;
};

// Which optional flags were given (on the command line or in the config file).
struct Given {
  const CLI::Option* dt;
  const CLI::Option* t_end;
  const CLI::Option* window_min;
  const CLI::Option* window_max;
  const CLI::Option* window_lo;
  const CLI::Option* window_hi;
  const CLI::Option* delta;
  const CLI::Option* time;

  static bool set(const CLI::Option* o) { return o->count() > 0; }
};

struct Failure {
  int code;
  std::string message;
};

void check(qb_status s) {
  if (s != QB_OK) throw Failure{static_cast<int>(s), qb_last_error()};
}

std::string num(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  return std::string(buf, r.ptr);
}

std::string json_num(double v) { return std::isfinite(v) ? num(v) : "null"; }

std::string json_str(const std::string& s) {
  std::string o = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') o += '\\';
    o += c;
  }
  return o + "\"";
}

// Minimal ordered JSON object writer; values are already serialised.
class JsonObject {
 public:
  JsonObject& add(const std::string& key, const std::string& raw) {
    fields_.emplace_back(key, raw);
    return *this;
  }
  JsonObject& num(const std::string& key, double v) { return add(key, json_num(v)); }

  std::string str() const {
    std::string o = "{";
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      if (i) o += ",";
      o += json_str(fields_[i].first) + ":" + fields_[i].second;
    }
    return o + "}";
  }

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

std::string json_array(const std::vector<std::string>& items) {
  std::string o = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) o += ",";
    o += items[i];
  }
  return o + "]";
}

// Single write per destination, after all computation is done.
void emit(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Failure{kExitBadInput, "cannot open output file " + path};
  f << text;
  if (!f.flush()) throw Failure{kExitBadInput, "cannot write output file " + path};
}

// Report next to a CSV: <out>.json, or stderr when writing to stdout.
void emit_sidecar(const std::string& out, const std::string& json) {
  if (out == "-") {
    std::cerr << json << "\n";
    return;
  }
  std::filesystem::path p(out);
  p.replace_extension(".json");
  if (p == std::filesystem::path(out)) p = out + ".report.json";
  emit(p.string(), json + "\n");
}

using EnginePtr = std::unique_ptr<qb_engine, decltype(&qb_engine_destroy)>;
using TracePtr = std::unique_ptr<qb_trace, decltype(&qb_trace_destroy)>;

qb_evaluator evaluator_of(const Config& c) { return c.evaluator == "simplified" ? QB_EVAL_SIMPLIFIED : QB_EVAL_FULL; }

bool is_xy(const Config& c) { return c.model == "xy"; }

EnginePtr make_engine(const Config& c, int xy_dimers, int ising_sites) {
  qb_engine* e = nullptr;
  if (is_xy(c))
    check(qb_engine_create_xy(c.gamma, c.delta0, c.delta1, xy_dimers, evaluator_of(c), c.workers, &e));
  else
    check(qb_engine_create_ising(c.h0, c.h1, ising_sites, &e));
  return {e, &qb_engine_destroy};
}

qb_regime_options regime_options(const Config& c, const Given& g) {
  qb_regime_options o;
  qb_regime_options_init(&o);
  o.dt = c.dt;
  if (Given::set(g.window_min) != Given::set(g.window_max))
    throw Failure{kExitBadInput, "--window-min and --window-max must be given together"};
  if (Given::set(g.window_lo) != Given::set(g.window_hi))
    throw Failure{kExitBadInput, "--window-lo and --window-hi must be given together"};
  if (Given::set(g.window_min)) {
    o.has_window = 1;
    o.window = {c.window_min, c.window_max};
  }
  if (Given::set(g.window_lo)) {
    o.has_window_scale = 1;
    o.window_scale_lo = c.window_lo;
    o.window_scale_hi = c.window_hi;
  }
  o.evaluator = evaluator_of(c);
  o.workers = c.workers;
  return o;
}

JsonObject report_json(const qb_regime_report& r) {
  JsonObject j;
  j.num("tau_s", r.tau_s).num("e_s", r.e_s).num("e_inf", r.e_inf).num("tau_r", r.tau_r).num("e_r", r.e_r);
  j.add("window_r", json_array({json_num(r.window.t_min), json_num(r.window.t_max)}));
  j.add("edge_warning", r.edge_warning ? "true" : "false");
  return j;
}

int cmd_trace(const Config& c, const Given& g) {
  const EnginePtr engine = make_engine(c, c.dimers, c.sites);
  const qb_regime_options opts = regime_options(c, g);
  qb_window window;
  check(qb_engine_window(engine.get(), &opts, &window));
  const double t_end = Given::set(g.t_end) ? c.t_end : window.t_max;

  qb_trace* raw = nullptr;
  check(qb_engine_trace(engine.get(), t_end, c.dt, c.workers, &raw));
  const TracePtr trace(raw, &qb_trace_destroy);
  const std::size_t n = qb_trace_size(trace.get());
  const double* t = qb_trace_times(trace.get());
  const double* v = qb_trace_values(trace.get());

  qb_regime_report report{};
  const qb_status s = qb_trace_regimes(engine.get(), trace.get(), &window, &report);
  const std::string failure = s == QB_OK ? "" : qb_last_error();

  if (c.format == "json") {
    std::vector<std::string> ts, vs;
    ts.reserve(n);
    vs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      ts.push_back(json_num(t[i]));
      vs.push_back(json_num(v[i]));
    }
    JsonObject j;
    j.add("t", json_array(ts)).add("delta_e", json_array(vs));
    if (s == QB_OK) j.add("report", report_json(report).str());
    emit(c.out, j.str() + "\n");
  } else {
    std::string csv = "t,delta_e\n";
    for (std::size_t i = 0; i < n; ++i) csv += num(t[i]) + "," + num(v[i]) + "\n";
    emit(c.out, csv);
    if (s == QB_OK) emit_sidecar(c.out, report_json(report).str());
  }
  if (s != QB_OK) throw Failure{static_cast<int>(s), failure};
  if (report.edge_warning) std::cerr << "warning: recurrence maximum sits on the window edge\n";
  return kExitOk;
}

int cmd_sweep(const Config& c, const Given& g) {
  std::size_t count = 0;
  check(qb_linear_grid(c.grid_from, c.grid_to, c.grid_step, nullptr, &count));
  std::vector<double> grid(count);
  check(qb_linear_grid(c.grid_from, c.grid_to, c.grid_step, grid.data(), &count));

  const qb_regime_options opts = regime_options(c, g);
  std::vector<qb_sweep_row> rows(count);
  if (is_xy(c))
    check(qb_sweep_delta0(c.gamma, c.delta1, c.dimers, grid.data(), count, &opts, rows.data()));
  else
    check(qb_sweep_h0(c.h1, c.sites, grid.data(), count, &opts, rows.data()));

  if (c.format == "json") {
    std::vector<std::string> items;
    for (const qb_sweep_row& r : rows) {
      JsonObject j;
      j.num("param", r.param).num("e_s_per", r.e_s_per).num("e_r_per", r.e_r_per).num("e_inf_per", r.e_inf_per);
      j.num("tau_s", r.tau_s).num("tau_r", r.tau_r);
      items.push_back(j.str());
    }
    emit(c.out, json_array(items) + "\n");
  } else {
    std::string csv = "param,e_s_per,e_r_per,e_inf_per,tau_s,tau_r\n";
    for (const qb_sweep_row& r : rows)
      csv += num(r.param) + "," + num(r.e_s_per) + "," + num(r.e_r_per) + "," + num(r.e_inf_per) + "," +
             num(r.tau_s) + "," + num(r.tau_r) + "\n";
    emit(c.out, csv);
  }
  return kExitOk;
}

int cmd_scaling(const Config& c, const Given& g) {
  if (!is_xy(c)) throw Failure{kExitBadInput, "scaling is defined for --model xy"};
  if (Given::set(g.window_min)) throw Failure{kExitBadInput, "scaling takes --window-lo/--window-hi, not absolute windows"};
  const qb_regime_options opts = regime_options(c, g);
  std::vector<qb_scaling_row> rows(c.sizes.size());
  qb_linear_fit fit{};
  check(qb_scaling_study(c.gamma, c.delta0, c.delta1, c.sizes.data(), c.sizes.size(), &opts, rows.data(), &fit));

  JsonObject fit_json;
  fit_json.num("slope", fit.slope).num("intercept", fit.intercept).num("r2", fit.r2);
  if (c.format == "json") {
    std::vector<std::string> items;
    for (const qb_scaling_row& r : rows) {
      JsonObject j;
      j.add("n_dimers", std::to_string(r.n_dimers));
      j.num("e_s_per", r.e_s_per).num("e_r_per", r.e_r_per).num("e_inf_per", r.e_inf_per);
      j.num("tau_s", r.tau_s).num("tau_r", r.tau_r);
      items.push_back(j.str());
    }
    JsonObject top;
    top.add("rows", json_array(items)).add("tau_r_fit", fit_json.str());
    emit(c.out, top.str() + "\n");
  } else {
    std::string csv = "n_dimers,e_s_per,e_r_per,e_inf_per,tau_s,tau_r\n";
    for (const qb_scaling_row& r : rows)
      csv += std::to_string(r.n_dimers) + "," + num(r.e_s_per) + "," + num(r.e_r_per) + "," + num(r.e_inf_per) +
             "," + num(r.tau_s) + "," + num(r.tau_r) + "\n";
    emit(c.out, csv);
    JsonObject side;
    side.add("tau_r_fit", fit_json.str());
    emit_sidecar(c.out, side.str());
  }
  return kExitOk;
}

int cmd_phase(const Config& c, const Given& g) {
  const double delta = Given::set(g.delta) ? c.delta : c.delta0;
  int region = 0;
  const char* label = nullptr;
  check(qb_classify_phase(c.gamma, delta, &region, &label));
  if (c.format == "json") {
    JsonObject j;
    j.add("region", std::to_string(region)).add("label", json_str(label));
    emit(c.out, j.str() + "\n");
  } else {
    emit(c.out, "region=" + std::to_string(region) + " " + label + "\n");
  }
  return kExitOk;
}

int cmd_snapshot(const Config& c, const Given& g) {
  if (!is_xy(c)) throw Failure{kExitBadInput, "snapshot is defined for --model xy"};
  const EnginePtr engine = make_engine(c, c.dimers, c.sites);
  double t = c.time;
  if (!Given::set(g.time)) {
    const qb_regime_options opts = regime_options(c, g);
    qb_regime_report r{};
    check(qb_engine_regimes(engine.get(), &opts, &r));
    t = r.tau_r;
  }
  std::vector<double> k(static_cast<std::size_t>(c.dimers));
  std::vector<double> n2(k.size());
  check(qb_occupation_snapshot(engine.get(), t, k.data(), n2.data()));

  if (c.format == "json") {
    std::vector<std::string> ks, ns;
    for (std::size_t i = 0; i < k.size(); ++i) {
      ks.push_back(json_num(k[i]));
      ns.push_back(json_num(n2[i]));
    }
    JsonObject j;
    j.num("t", t).add("k", json_array(ks)).add("n2", json_array(ns));
    emit(c.out, j.str() + "\n");
  } else {
    std::string csv = "k,n2\n";
    for (std::size_t i = 0; i < k.size(); ++i) csv += num(k[i]) + "," + num(n2[i]) + "\n";
    emit(c.out, csv);
  }
  return kExitOk;
}

int cmd_oracle_check(const Config& c, const Given& g) {
  if (is_xy(c) && c.spins % 2 != 0) throw Failure{kExitBadInput, "the XY chain needs an even --spins"};
  const EnginePtr engine = make_engine(c, c.spins / 2, c.spins);
  const double t_end = Given::set(g.t_end) ? c.t_end : 50.0;
  const double dt = Given::set(g.dt) ? c.dt : 0.1;
  double deviation = 0.0;
  const qb_status s = qb_oracle_check(engine.get(), t_end, dt, c.tolerance, &deviation);
  if (s != QB_OK && s != QB_ERR_ORACLE_MISMATCH) check(s);

  if (c.format == "json") {
    JsonObject j;
    j.add("spins", std::to_string(c.spins)).num("max_deviation", deviation).num("tolerance", c.tolerance);
    j.add("pass", s == QB_OK ? "true" : "false");
    emit(c.out, j.str() + "\n");
  } else {
    emit(c.out, "spins=" + std::to_string(c.spins) + " max_deviation=" + num(deviation) +
                    " tolerance=" + num(c.tolerance) + (s == QB_OK ? " pass\n" : " FAIL\n"));
  }
  return s == QB_OK ? kExitOk : static_cast<int>(QB_ERR_ORACLE_MISMATCH);
}

}  // namespace

int main(int argc, char** argv) {
  Config c;
  c.workers = std::max(1u, std::thread::hardware_concurrency());

  CLI::App app{"Free-fermion quantum battery simulator"};
  app.set_config("--config", "", "Flat key = value file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--model", c.model, "Battery model")->check(CLI::IsMember({"xy", "ising"}))->capture_default_str();
  app.add_option("--out", c.out, "Output path, - for stdout")->capture_default_str();
  app.add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--workers", c.workers, "Worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--evaluator", c.evaluator, "Occupation evaluator")
      ->check(CLI::IsMember({"full", "simplified"}))
      ->capture_default_str();

  const std::string xy = "XY model";
  app.add_option("--gamma", c.gamma, "Anisotropy")->group(xy)->capture_default_str();
  app.add_option("--delta0", c.delta0, "Battery dimerization")->group(xy)->capture_default_str();
  app.add_option("--delta1", c.delta1, "Charging step in dimerization")->group(xy)->capture_default_str();
  app.add_option("--dimers", c.dimers, "Number of dimers")->group(xy)->capture_default_str();

  const std::string ising = "Ising model";
  app.add_option("--h0", c.h0, "Battery field")->group(ising)->capture_default_str();
  app.add_option("--h1", c.h1, "Charging step in field")->group(ising)->capture_default_str();
  app.add_option("--sites", c.sites, "Number of sites")->group(ising)->capture_default_str();

  const std::string timing = "Time grid";
  Given g{};
  g.dt = app.add_option("--dt", c.dt, "Time step (oracle-check default 0.1)")->group(timing)->capture_default_str();
  g.t_end = app.add_option("--t-end", c.t_end, "Trace end (default: window end; oracle-check 50)")->group(timing);
  g.window_min = app.add_option("--window-min", c.window_min, "Recurrence window start")->group(timing);
  g.window_max = app.add_option("--window-max", c.window_max, "Recurrence window end")->group(timing);
  g.window_lo = app.add_option("--window-lo", c.window_lo, "Window start per unit size (XY 2, Ising 280/600)")->group(timing);
  g.window_hi = app.add_option("--window-hi", c.window_hi, "Window end per unit size (XY 8/3, Ising 350/600)")->group(timing);

  const std::string extra = "Command options";
  app.add_option("--from", c.grid_from, "sweep: first delta0 (or h0)")->group(extra)->capture_default_str();
  app.add_option("--to", c.grid_to, "sweep: last delta0 (or h0)")->group(extra)->capture_default_str();
  app.add_option("--step", c.grid_step, "sweep: grid step")->group(extra)->capture_default_str();
  app.add_option("--sizes", c.sizes, "scaling: dimer counts")->delimiter(',')->group(extra)->capture_default_str();
  g.delta = app.add_option("--delta", c.delta, "phase: dimerization (default --delta0)")->group(extra);
  g.time = app.add_option("--time", c.time, "snapshot: time (default tau_r)")->group(extra);
  app.add_option("--spins", c.spins, "oracle-check: chain length")->group(extra)->capture_default_str();
  app.add_option("--tolerance", c.tolerance, "oracle-check: allowed deviation")->group(extra)->capture_default_str();

  auto* trace = app.add_subcommand("trace", "Stored energy against time plus the regime report");
  auto* sweep = app.add_subcommand("sweep", "Regime energies over a delta0 (XY) or h0 (Ising) grid");
  auto* scaling = app.add_subcommand("scaling", "Regime energies per dimer over chain sizes");
  auto* phase = app.add_subcommand("phase", "Phase region of (gamma, delta)");
  auto* snapshot = app.add_subcommand("snapshot", "Upper-band occupation against k at one time");
  auto* oracle = app.add_subcommand("oracle-check", "Compare the engine with exact diagonalisation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadInput;
  }

  try {
    if (*trace) return cmd_trace(c, g);
    if (*sweep) return cmd_sweep(c, g);
    if (*scaling) return cmd_scaling(c, g);
    if (*phase) return cmd_phase(c, g);
    if (*snapshot) return cmd_snapshot(c, g);
    if (*oracle) return cmd_oracle_check(c, g);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  }
  return kExitBadInput;
}
