#include <catch_amalgamated.hpp>

#include <cmath>

#include "fixtures.hpp"

using namespace dcqr;

namespace {

/// Uniform density on a <= rho <= b, normalized with the grid weights.
EigenState annulus_state(const Grid& g, double a, double b) {
  EigenState s;
  s.envelope.assign(g.node_count(), 0.0);
  double norm = 0.0;
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    const double rho = g.rho_nodes[k / g.n_z];
    if (rho >= a && rho <= b) {
      s.envelope[k] = 1.0;
      norm += g.weight(k);
    }
  }
  for (auto& v : s.envelope) v /= std::sqrt(norm);
  return s;
}

/// Two levels of one l with an avoided crossing at B = 5 and minimum gap 2w.
FlowTable synthetic_anticrossing(double w, double first, double step, int count) {
  FlowTable t;
  t.l_values = {0};
  t.n_count = 2;
  for (int k = 0; k < count; ++k) {
    const double b = first + step * k;
    t.fields.push_back(b);
    const double half = std::sqrt((b - 5.0) * (b - 5.0) + w * w);
    for (int br = 0; br < 2; ++br) {
      FlowRow row;
      row.branch = br;
      row.state.n = br + 1;
      row.state.field = b;
      row.state.energy = br == 0 ? -half : half;
      row.state.p = Localization::outer;
      t.rows.push_back(row);
      t.overlaps.push_back(1.0);
    }
  }
  return t;
}

}  // namespace

TEST_CASE("rms radius of a uniform annulus", "[flow]") {
  const auto g = build_grid(40.0, -1.0, 1.0, 4001, 8);
  const double a = 10.0, b = 20.0;
  const double r = rms_radius(annulus_state(g, a, b), g);
  CHECK(r == Catch::Approx(std::sqrt((a * a + b * b) / 2.0)).epsilon(1e-3));
}

TEST_CASE("rms radius of a single node is its radius", "[flow]") {
  const auto g = build_grid(40.0, -1.0, 1.0, 81, 8);
  EigenState s;
  s.envelope.assign(g.node_count(), 0.0);
  const auto k = g.index(30, 3);
  s.envelope[k] = 1.0 / std::sqrt(g.weight(k));
  CHECK(rms_radius(s, g) == Catch::Approx(15.0).epsilon(1e-12));
}

TEST_CASE("region probabilities add up and drive the classification", "[flow]") {
  const auto spec = fixtures::two_rings();
  const auto g = build_grid_spacing(spec, 1.0);
  const auto st = lowest_eigenpairs(fixtures::two_ring_operator(1.0, 0, 0.0), 3);
  for (const auto& s : st) {
    const auto p = region_probabilities(s, spec, g);
    CHECK(std::abs(p.inner + p.outer + p.barrier - 1.0) <= 1e-9);
    const auto lab = label_state(s, spec, g, 1, 0.067);
    CHECK(std::abs(lab.prob_inner + lab.prob_outer + lab.prob_barrier - 1.0) <= 1e-12);
  }
  CHECK_THROWS_AS(classify(st[0], spec, g, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(classify(st[0], spec, g, 1.0), std::invalid_argument);
}

TEST_CASE("classification thresholds", "[flow]") {
  RegionProbabilities p{0.6, 0.3, 0.1, 0.65};
  CHECK(classify(p, 0.6) == Localization::inner);
  CHECK(classify(p, 0.7) == Localization::delocalized);
  p.inner_side = 0.2;
  CHECK(classify(p, 0.7) == Localization::outer);
  CHECK(parse_localization("delocalized") == Localization::delocalized);
}

TEST_CASE("ideal ring analytics", "[flow]") {
  CHECK(ideal_ring_energy(-1, 0.0, 39.6, 0.074) == Catch::Approx(0.328).margin(5e-4));
  CHECK(ideal_ring_energy(0, 0.0, 39.6, 0.074) == 0.0);
  // the l = 0 and l = -1 levels are degenerate at the half period
  const double b = ab_half_period(39.6);
  CHECK(ideal_ring_energy(0, b, 39.6, 0.074) == Catch::Approx(ideal_ring_energy(-1, b, 39.6, 0.074)));
  CHECK(ab_half_period(17.7) == Catch::Approx(2.1).margin(0.01));
  CHECK(ab_half_period(39.6) == Catch::Approx(0.42).margin(0.005));
  CHECK(ab_half_period(10.0) / ab_half_period(100.0) == Catch::Approx(100.0));
  CHECK_THROWS_AS(ab_half_period(0.0), std::invalid_argument);
}

TEST_CASE("synthetic avoided crossing is located exactly", "[flow][events]") {
  for (const double w : {0.1, 1.0}) {
    for (const double first : {0.0, 0.037}) {
      const auto events = detect_events(synthetic_anticrossing(w, first, 0.1, 100));
      REQUIRE(events.size() == 1);
      CHECK(events[0].kind == EventKind::anti_crossing);
      CHECK(std::abs(events[0].field - 5.0) <= 1e-3);
      CHECK(std::abs(events[0].gap - 2.0 * w) <= 1e-3);
    }
  }
}

TEST_CASE("gap minimum from three samples", "[flow][events]") {
  const auto g = [](double b) { return 2.0 * std::sqrt((b - 5.0) * (b - 5.0) + 0.25); };
  const auto [b, gap] = detail::gap_minimum(4.9, 5.03, 5.2, g(4.9), g(5.03), g(5.2));
  CHECK(b == Catch::Approx(5.0).margin(1e-12));
  CHECK(gap == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("branch assignment maximizes total overlap", "[flow]") {
  CHECK(detail::best_assignment({{0.1, 0.9}, {0.8, 0.2}}) == std::vector<int>{1, 0});
  CHECK(detail::best_assignment({{0.9, 0.1, 0.0}, {0.0, 0.2, 0.8}, {0.1, 0.7, 0.1}}) == std::vector<int>{0, 2, 1});
  std::vector<std::vector<double>> id(9, std::vector<double>(9, 0.0));
  for (std::size_t i = 0; i < 9; ++i) id[i][8 - i] = 1.0;
  const auto perm = detail::best_assignment(id);
  for (int i = 0; i < 9; ++i) CHECK(perm[static_cast<std::size_t>(i)] == 8 - i);
}

TEST_CASE("small sweep tracks branches and finds the AB crossing", "[flow][sweep]") {
  const auto spec = fixtures::two_rings();
  const auto g = build_grid_spacing(spec, 1.0);
  SweepOptions opt;
  opt.workers = 1;
  const auto flow = sweep(spec, g, {0, -1}, 2, 0.0, 2.0, 5, opt);
  CHECK(flow.fields.size() > 5);
  CHECK(std::is_sorted(flow.fields.begin(), flow.fields.end()));
  CHECK(flow.rows.size() == flow.fields.size() * 2 * 2);
  // tracked branches stay ordered within each l
  for (std::size_t f = 0; f < flow.fields.size(); ++f) {
    for (std::size_t li = 0; li < 2; ++li) CHECK(flow.at(f, li, 0).energy < flow.at(f, li, 1).energy);
  }
  const auto events = detect_events(flow);
  bool ab = false;
  for (const auto& e : events) {
    if (e.kind == EventKind::crossing && e.first.n == 1 && e.second.n == 1) {
      ab = true;
      const double radius = flow.branch(0, 1).front().rms_radius;
      CHECK(e.field == Catch::Approx(ab_half_period(radius)).epsilon(0.25));
    }
  }
  CHECK(ab);
  // a sweep is reproducible, also with several workers
  opt.workers = 2;
  CHECK(sweep(spec, g, {0, -1}, 2, 0.0, 2.0, 5, opt).same_content(flow));
}

TEST_CASE("sweep argument checks", "[flow][sweep]") {
  const auto spec = fixtures::two_rings();
  const auto g = build_grid_spacing(spec, 2.0);
  CHECK_THROWS_AS(sweep(spec, g, {0}, 2, 0.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(sweep(spec, g, {0}, 0, 0.0, 1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(sweep(spec, g, {0}, 2, 1.0, 1.0, 3), std::invalid_argument);
}

TEST_CASE("relative transition spacings", "[flow]") {
  std::vector<LabeledState> e(2), h(2);
  e[0].n = 1; e[0].energy = 70.0;
  e[1].n = 2; e[1].energy = 80.0;
  h[0].n = 1; h[0].energy = 10.0;
  h[1].n = 2; h[1].energy = 13.0;
  const auto s = relative_transition_spacing(e, h);
  REQUIRE(s.size() == 2);
  CHECK(s[0].spacing == 0.0);
  CHECK(s[1].spacing == 13.0);
  h.pop_back();
  CHECK_THROWS_AS(relative_transition_spacing(e, h), std::invalid_argument);
}
