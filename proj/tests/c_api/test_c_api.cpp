#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include "qbattery/qbattery.h"

namespace {

struct Engine {
  qb_engine* h = nullptr;
  ~Engine() { qb_engine_destroy(h); }
};

struct Trace {
  qb_trace* h = nullptr;
  ~Trace() { qb_trace_destroy(h); }
};

}  // namespace

TEST_CASE("XY engine lifecycle and scalar queries") {
  Engine e;
  REQUIRE(qb_engine_create_xy(1.25, 0.3, 0.6, 300, QB_EVAL_FULL, 2, &e.h) == QB_OK);
  qb_model model;
  CHECK(qb_engine_model(e.h, &model) == QB_OK);
  CHECK(model == QB_MODEL_XY);
  int size = 0;
  CHECK(qb_engine_size(e.h, &size) == QB_OK);
  CHECK(size == 300);
  double v = -1.0;
  CHECK(qb_engine_energy(e.h, 0.0, &v) == QB_OK);
  CHECK(std::abs(v) < 1e-9);
  double e_inf = 0.0;
  CHECK(qb_engine_asymptotic_energy(e.h, &e_inf) == QB_OK);
  CHECK(e_inf / 300.0 == doctest::Approx(0.337684).epsilon(1e-4));
  double max_dt = 0.0;
  CHECK(qb_engine_max_dt(e.h, &max_dt) == QB_OK);
  CHECK(max_dt > 0.02);
  double n[2];
  CHECK(qb_engine_occupations(e.h, 1, 3.0, n) == QB_OK);
  CHECK(n[0] >= 0.0);
  CHECK(n[1] <= 1.0);
  CHECK(qb_engine_occupations(e.h, 2, 3.0, n) == QB_ERR_INVALID_ARGUMENT);
  CHECK(std::string(qb_last_error()).size() > 0);
}

TEST_CASE("invalid input maps to status codes") {
  qb_engine* e = reinterpret_cast<qb_engine*>(0x1);
  CHECK(qb_engine_create_xy(-1.0, 0.3, 0.6, 10, QB_EVAL_FULL, 1, &e) == QB_ERR_INVALID_ARGUMENT);
  CHECK(e == nullptr);
  CHECK(std::string(qb_last_error()).find("gamma") != std::string::npos);
  CHECK(qb_engine_create_ising(0.8, 0.7, 1, &e) == QB_ERR_INVALID_ARGUMENT);
  CHECK(qb_engine_create_xy(1.25, 0.3, 0.6, 10, QB_EVAL_FULL, 1, nullptr) == QB_ERR_INVALID_ARGUMENT);
  CHECK(qb_engine_energy(nullptr, 0.0, nullptr) == QB_ERR_INVALID_ARGUMENT);
  CHECK(qb_engine_create_xy(1.25, 0.3, 0.6, 10, static_cast<qb_evaluator>(7), 1, &e) == QB_ERR_INVALID_ARGUMENT);

  Engine ok;
  REQUIRE(qb_engine_create_xy(1.25, 0.3, 0.6, 10, QB_EVAL_FULL, 1, &ok.h) == QB_OK);
  CHECK(std::string(qb_last_error()).empty());
  double v;
  CHECK(qb_engine_energy(ok.h, -1.0, &v) == QB_ERR_INVALID_ARGUMENT);
  Trace t;
  CHECK(qb_engine_trace(ok.h, 10.0, 5.0, 1, &t.h) == QB_ERR_INVALID_ARGUMENT);
  CHECK(std::string(qb_last_error()).find("need dt <=") != std::string::npos);
  CHECK(t.h == nullptr);
  qb_engine_destroy(nullptr);
  qb_trace_destroy(nullptr);
}

TEST_CASE("error messages are per thread") {
  CHECK(qb_engine_create_ising(0.8, 0.7, 1, nullptr) == QB_ERR_INVALID_ARGUMENT);
  std::string other;
  std::thread th([&] { other = qb_last_error(); });
  th.join();
  CHECK(other.empty());
  CHECK_FALSE(std::string(qb_last_error()).empty());
}

TEST_CASE("trace and regime report") {
  Engine e;
  REQUIRE(qb_engine_create_xy(1.25, 0.3, 0.6, 300, QB_EVAL_FULL, 1, &e.h) == QB_OK);
  qb_regime_options o;
  qb_regime_options_init(&o);
  qb_window w;
  REQUIRE(qb_engine_window(e.h, &o, &w) == QB_OK);
  CHECK(w.t_min == doctest::Approx(600.0));
  CHECK(w.t_max == doctest::Approx(800.0));

  Trace t;
  REQUIRE(qb_engine_trace(e.h, w.t_max, 0.02, 2, &t.h) == QB_OK);
  CHECK(qb_trace_size(t.h) == 40001);
  CHECK(qb_trace_times(t.h)[100] == doctest::Approx(2.0));
  qb_regime_report a, b;
  REQUIRE(qb_trace_regimes(e.h, t.h, nullptr, &a) == QB_OK);
  REQUIRE(qb_engine_regimes(e.h, &o, &b) == QB_OK);
  CHECK(a.tau_s == b.tau_s);
  CHECK(a.tau_r == b.tau_r);
  CHECK(a.e_r == b.e_r);
  CHECK(a.tau_s == doctest::Approx(3.30).epsilon(0.01));
  CHECK(a.tau_r == doctest::Approx(679.14).epsilon(0.001));
  CHECK(a.edge_warning == 0);
}

TEST_CASE("no charge is an analysis failure") {
  Engine e;
  REQUIRE(qb_engine_create_xy(1.25, 0.3, 0.0, 20, QB_EVAL_FULL, 1, &e.h) == QB_OK);
  qb_regime_report r;
  CHECK(qb_engine_regimes(e.h, nullptr, &r) == QB_ERR_ANALYSIS);
  CHECK(std::string(qb_last_error()).find("no charging occurred") != std::string::npos);
}

TEST_CASE("Ising engine") {
  Engine e;
  REQUIRE(qb_engine_create_ising(0.75, 0.25, 600, &e.h) == QB_OK);
  qb_model model;
  qb_engine_model(e.h, &model);
  CHECK(model == QB_MODEL_ISING);
  double n[2];
  CHECK(qb_engine_occupations(e.h, 1, 0.0, n) == QB_ERR_INVALID_ARGUMENT);
  qb_window w;
  REQUIRE(qb_engine_window(e.h, nullptr, &w) == QB_OK);
  CHECK(w.t_min == doctest::Approx(280.0));
  qb_regime_report r;
  CHECK(qb_engine_regimes(e.h, nullptr, &r) == QB_OK);
  CHECK(r.e_inf > 0.0);
}

TEST_CASE("sweeps, grids and scaling") {
  size_t count = 0;
  REQUIRE(qb_linear_grid(0.1, 0.2, 0.05, nullptr, &count) == QB_OK);
  CHECK(count == 3);
  std::vector<double> grid(count);
  size_t small = 1;
  CHECK(qb_linear_grid(0.1, 0.2, 0.05, grid.data(), &small) == QB_ERR_INVALID_ARGUMENT);
  REQUIRE(qb_linear_grid(0.1, 0.2, 0.05, grid.data(), &count) == QB_OK);

  qb_regime_options o;
  qb_regime_options_init(&o);
  o.workers = 2;
  std::vector<qb_sweep_row> rows(count);
  REQUIRE(qb_sweep_delta0(1.1, 0.8, 40, grid.data(), count, &o, rows.data()) == QB_OK);
  CHECK(rows[2].param == grid[2]);
  CHECK(qb_sweep_delta0(1.1, 0.8, 40, grid.data(), 0, &o, rows.data()) == QB_ERR_INVALID_ARGUMENT);
  REQUIRE(qb_sweep_h0(0.25, 60, grid.data(), count, &o, rows.data()) == QB_OK);

  const int sizes[] = {20, 40};
  qb_scaling_row srows[2];
  qb_linear_fit fit;
  REQUIRE(qb_scaling_study(1.25, 0.3, 0.6, sizes, 2, &o, srows, &fit) == QB_OK);
  CHECK(srows[1].n_dimers == 40);
  CHECK(fit.slope > 0.0);
  o.has_window = 1;
  o.window = {1.0, 2.0};
  CHECK(qb_scaling_study(1.25, 0.3, 0.6, sizes, 2, &o, srows, &fit) == QB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("phase classification") {
  int region = -1;
  const char* label = nullptr;
  REQUIRE(qb_classify_phase(1.0, 0.5, &region, &label) == QB_OK);
  CHECK(region == 1);
  CHECK(std::strcmp(label, "ferromagnet-x") == 0);
  REQUIRE(qb_classify_phase(1.1, 1.1, &region, &label) == QB_OK);
  CHECK(region == 0);
  CHECK(std::strcmp(label, "critical-delta-gamma") == 0);
  CHECK(qb_classify_phase(-1.0, 0.5, &region, &label) == QB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("snapshot and oracle check") {
  Engine e;
  REQUIRE(qb_engine_create_xy(1.25, 0.3, 0.6, 2, QB_EVAL_FULL, 1, &e.h) == QB_OK);
  double k[2], n2[2];
  REQUIRE(qb_occupation_snapshot(e.h, 1.0, k, n2) == QB_OK);
  CHECK(k[0] < k[1]);
  double dev = -1.0;
  CHECK(qb_oracle_check(e.h, 50.0, 0.1, 1e-8, &dev) == QB_OK);
  CHECK(dev < 1e-8);
  CHECK(qb_oracle_check(e.h, 50.0, 0.1, 0.0, &dev) == QB_ERR_ORACLE_MISMATCH);
  CHECK(dev > 0.0);

  Engine big;
  REQUIRE(qb_engine_create_xy(1.25, 0.3, 0.6, 7, QB_EVAL_FULL, 1, &big.h) == QB_OK);
  CHECK(qb_oracle_check(big.h, 1.0, 0.1, 1e-8, &dev) == QB_ERR_INVALID_ARGUMENT);
}
