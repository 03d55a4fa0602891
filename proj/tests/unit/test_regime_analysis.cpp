#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "qbattery/error.hpp"
#include "qbattery/ising_model.hpp"
#include "qbattery/quench_engine.hpp"
#include "qbattery/regime_analysis.hpp"

using namespace qb;

namespace {

EnergyTrace sampled(double dt, std::size_t n, auto f) {
  EnergyTrace t;
  t.dt = dt;
  t.model = QuenchProtocol{1.0, 0.0, 0.0, 10};
  for (std::size_t i = 0; i < n; ++i) {
    t.times.push_back(static_cast<double>(i) * dt);
    t.values.push_back(f(static_cast<double>(i) * dt));
  }
  return t;
}

double mean_over(const QuenchEngine& e, double t0, double t1, double dt) {
  double sum = 0.0;
  long n = 0;
  for (double t = t0; t <= t1 + 1e-12; t += dt, ++n) sum += e.energy(t);
  return sum / static_cast<double>(n);
}

}  // namespace

TEST_SUITE("regime_analysis") {

TEST_CASE("quadratic refinement recovers an off-grid parabola vertex") {
  const EnergyTrace t = sampled(0.1, 50, [](double x) { return 2.0 - (x - 1.234) * (x - 1.234); });
  const Peak p = find_short_time_max(t);
  CHECK(p.time == doctest::Approx(1.234).epsilon(1e-12));
  CHECK(p.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("first local maximum, not the global one") {
  const EnergyTrace t = sampled(0.01, 2000, [](double x) { return x * (1.0 + std::sin(3.0 * x)); });
  const Peak p = find_short_time_max(t);
  CHECK(p.time < 1.0);
  CHECK(p.time > 0.4);
}

TEST_CASE("single cosine peaks at pi / (2 omega)") {
  // Two sites: both modes share omega = sqrt(1 + h^2), so the trace is A (1 - cos 2 omega t).
  const IsingParams p{0.8, 0.7, 2};
  const double omega = std::sqrt(1.0 + 1.5 * 1.5);
  const EnergyTrace t = ising_energy_trace(p, 10.0, 0.01);
  const Peak s = find_short_time_max(t);
  CHECK(s.time == doctest::Approx(std::numbers::pi / (2.0 * omega)).epsilon(1e-5));
}

TEST_CASE("a trace without charge has no short-time maximum") {
  const QuenchEngine engine({1.25, 0.3, 0.0, 20});
  const EnergyTrace t = engine.trace(60.0, 0.02);
  try {
    find_short_time_max(t);
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AnalysisFailure);
    CHECK(std::string(e.what()).find("no charging occurred") != std::string::npos);
  }
  const Peak r = find_recurrence(t, {40.0, 53.0});
  CHECK(r.on_edge);
}

TEST_CASE("monotone traces fail") {
  const EnergyTrace t = sampled(0.1, 100, [](double x) { return x; });
  CHECK_THROWS_AS(find_short_time_max(t), Error);
}

TEST_CASE("recurrence search stays inside its window") {
  const EnergyTrace t = sampled(0.05, 4001, [](double x) { return std::cos(0.05 * x) + 0.3 * std::sin(x); });
  const Peak r = find_recurrence(t, {120.0, 150.0});
  CHECK(r.time >= 120.0);
  CHECK(r.time <= 150.0);
  CHECK_THROWS_AS(find_recurrence(t, {150.0, 120.0}), Error);
  CHECK_THROWS_AS(find_recurrence(t, {150.0, 250.0}), Error);
}

TEST_CASE("default windows scale with size") {
  const TimeWindow xy = default_window(QuenchProtocol{1.25, 0.3, 0.6, 300});
  CHECK(xy.t_min == doctest::Approx(600.0));
  CHECK(xy.t_max == doctest::Approx(800.0));
  const TimeWindow is = default_window(IsingParams{0.75, 0.25, 600});
  CHECK(is.t_min == doctest::Approx(280.0));
  CHECK(is.t_max == doctest::Approx(350.0));
  RegimeOptions o;
  o.window_scale = WindowScale{1.0, 2.0};
  CHECK(resolve_window(QuenchProtocol{1.25, 0.3, 0.6, 50}, o).t_max == doctest::Approx(100.0));
  o.window = TimeWindow{5.0, 6.0};
  CHECK(resolve_window(QuenchProtocol{1.25, 0.3, 0.6, 50}, o).t_min == doctest::Approx(5.0));
}

TEST_CASE("chunked analysis equals analysis of the full trace") {
  const QuenchProtocol p{1.25, 0.3, 0.6, 60};
  const QuenchEngine engine(p);
  const TimeWindow w = default_window(p);
  const RegimeReport a = analyze_series(engine.series(), engine.max_dt(), w, 0.02, 1);
  const RegimeReport b = analyze_trace(engine.trace(w.t_max, 0.02), w, engine.asymptotic_energy());
  CHECK(a.tau_s == b.tau_s);
  CHECK(a.e_s == b.e_s);
  CHECK(a.tau_r == b.tau_r);
  CHECK(a.e_r == b.e_r);
  CHECK(a.e_inf == b.e_inf);
}

TEST_CASE("report invariants at the reference point") {
  const QuenchProtocol p{1.25, 0.3, 0.6, 300};
  const RegimeReport r = analyze_model(p, {});
  CHECK(r.tau_s < r.window_r.t_min);
  CHECK(r.window_r.t_min <= r.tau_r);
  CHECK(r.tau_r <= r.window_r.t_max);
  CHECK(r.e_s >= r.e_inf - 1e-9 * 300);
  CHECK(r.e_r >= r.e_inf - 1e-9 * 300);
  CHECK(r.tau_s > 0.0);
  CHECK(r.tau_s <= 50.0);
  CHECK_FALSE(r.edge_warning);
}

TEST_CASE("asymptotic energy equals the plateau average") {
  // Windows end before the first revival at about 2.26 n.
  for (auto [n, t1] : {std::pair{200, 300.0}, std::pair{300, 500.0}}) {
    const QuenchEngine engine({1.25, 0.3, 0.6, n});
    const double e_inf = engine.asymptotic_energy();
    CHECK(std::abs(mean_over(engine, 100.0, t1, 0.05) - e_inf) <= 0.005 * e_inf);
  }
}

TEST_CASE("short-time peak does not move with size while the revival does") {
  const RegimeReport a = analyze_model(QuenchProtocol{1.25, 0.3, 0.6, 100}, {});
  const RegimeReport b = analyze_model(QuenchProtocol{1.25, 0.3, 0.6, 200}, {});
  CHECK(std::abs(a.tau_s - b.tau_s) < 1e-6);
  CHECK(b.tau_r / a.tau_r == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("asymptotic energy per dimer converges quickly with size") {
  const double a = asymptotic_energy({1.25, 0.3, 0.6, 150}) / 150.0;
  const double b = asymptotic_energy({1.25, 0.3, 0.6, 300}) / 300.0;
  CHECK(std::abs(a - b) <= 1e-3 * b);
}

TEST_CASE("linear grid and line fit") {
  const auto g = linear_grid(0.0, 0.5, 0.005);
  CHECK(g.size() == 101);
  CHECK(g.back() == doctest::Approx(0.5));
  CHECK(linear_grid(0.2, 0.2, 0.1).size() == 1);
  CHECK_THROWS_AS(linear_grid(0.5, 0.1, 0.1), Error);
  CHECK_THROWS_AS(linear_grid(0.0, 1.0, 0.0), Error);

  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{3, 5, 7, 9};
  const LinearFit f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
}

TEST_CASE("sweep rows follow the grid and do not depend on workers") {
  const std::vector<double> grid{0.25, 0.1, 0.18};
  RegimeOptions o;
  o.workers = 1;
  const auto a = sweep_delta0(1.1, 0.8, 40, grid, o);
  o.workers = 3;
  const auto b = sweep_delta0(1.1, 0.8, 40, grid, o);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a[i].param == grid[i]);
    CHECK(a[i].e_s_per == b[i].e_s_per);
    CHECK(a[i].e_r_per == b[i].e_r_per);
    CHECK(a[i].tau_r == b[i].tau_r);
    CHECK(std::isfinite(a[i].e_inf_per));
  }
  CHECK_THROWS_AS(sweep_delta0(1.1, 0.8, 40, std::vector<double>{}, o), Error);
}

TEST_CASE("Ising sweep normalises by sites") {
  const std::vector<double> grid{0.75};
  const auto rows = sweep_h0(0.25, 600, grid, {});
  CHECK(rows[0].e_inf_per == doctest::Approx(ising_asymptotic_energy({0.75, 0.25, 600}) / 600.0));
}

TEST_CASE("occupation snapshots") {
  const auto idle = occupation_snapshot({1.1, 0.2, 0.0, 50}, 30.0);
  for (const SnapshotPoint& s : idle) CHECK(s.n2 == 0.0);

  auto peak_k = [](const std::vector<SnapshotPoint>& snap) {
    return std::max_element(snap.begin(), snap.end(), [](auto& a, auto& b) { return a.n2 < b.n2; })->k;
  };
  const QuenchProtocol flat{1.1, 0.2, 0.8, 300};
  const RegimeReport rf = analyze_model(flat, {});
  const auto sf = occupation_snapshot(flat, rf.tau_r);
  REQUIRE(sf.size() == 300);
  const double kf = peak_k(sf);
  CHECK(std::abs(std::min(kf, 2.0 * std::numbers::pi - kf) - std::numbers::pi / 2.0) < 0.35);

  const QuenchProtocol crit{1.1, 0.3, 0.8, 300};
  const RegimeReport rc = analyze_model(crit, {});
  const auto sc = occupation_snapshot(crit, rc.tau_r);
  const double kc = peak_k(sc);
  CHECK(std::abs(kc - std::numbers::pi) < 0.35);
  double n_max = 0.0;
  for (const SnapshotPoint& s : sc) n_max = std::max(n_max, s.n2);
  CHECK(n_max > 0.9);
  CHECK_THROWS_AS(occupation_snapshot(flat, -1.0), Error);
}

TEST_CASE("plateau is more robust than the short-time peak") {
  // For each delta1, delta0 moves the charger across exactly one critical line
  // (1 / gamma < delta0 + delta1 < gamma) while the battery stays in region 1.
  const double gamma = 1.1;
  auto spread = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return (*hi - *lo) / (std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()));
  };
  for (double d1 : {0.5, 0.6, 0.7, 0.8, 0.9}) {
    std::vector<double> e_inf, e_s;
    for (double total : {0.93, 0.97, 1.0, 1.03, 1.07}) {
      const RegimeReport r = analyze_model(QuenchProtocol{gamma, total - d1, d1, 300}, {});
      e_inf.push_back(r.e_inf / 300.0);
      e_s.push_back(r.e_s / 300.0);
    }
    CAPTURE(d1);
    CHECK(spread(e_inf) < 0.10);
    CHECK(spread(e_s) > spread(e_inf));
  }
}

TEST_CASE("recurrence spikes sit on the critical lines of the charger") {
  // gamma (delta0 + delta1) = 1 and delta0 + delta1 = gamma.
  const double gamma = 1.1;
  const double delta1 = 0.8;
  RegimeOptions o;
  o.workers = 2;
  for (double root : {1.0 / gamma - delta1, gamma - delta1}) {
    const double centre = 0.005 * std::round(root / 0.005);
    const std::vector<double> grid = linear_grid(centre - 0.025, centre + 0.025, 0.005);
    const auto rows = sweep_delta0(gamma, delta1, 300, grid, o);
    std::size_t best = 0;
    double best_value = -1.0;
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
      const bool local = rows[i].e_r_per > rows[i - 1].e_r_per && rows[i].e_r_per > rows[i + 1].e_r_per;
      if (local && rows[i].e_r_per > best_value) {
        best = i;
        best_value = rows[i].e_r_per;
      }
    }
    CAPTURE(root);
    REQUIRE(best_value > 0.0);
    CHECK(std::abs(rows[best].param - root) <= 0.005 + 1e-9);
  }
}

TEST_CASE("scaling study rejects bad input") {
  const std::vector<int> small{4, 50};
  CHECK_THROWS_AS(scaling_study(1.25, 0.3, 0.6, small, {}), Error);
  RegimeOptions o;
  o.window = TimeWindow{1.0, 2.0};
  const std::vector<int> ok{50, 100};
  CHECK_THROWS_AS(scaling_study(1.25, 0.3, 0.6, ok, o), Error);
}

}  // TEST_SUITE
