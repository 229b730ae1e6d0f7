#include <catch_amalgamated.hpp>

#include <sstream>

#include <json.hpp>

#include "fixtures.hpp"

using namespace dcqr;

namespace {

FlowTable small_flow() {
  const auto spec = fixtures::two_rings();
  const auto g = build_grid_spacing(spec, 2.0);
  SweepOptions opt;
  opt.workers = 1;
  opt.refine = false;
  opt.pin_anticrossings = false;
  return sweep(spec, g, {0, 1}, 2, 0.0, 1.0 / 3.0, 3, opt);
}

}  // namespace

TEST_CASE("float formatting round-trips through quantize", "[io]") {
  CHECK(io::format_float(0.1) == "0.1");
  CHECK(io::format_float(1.0 / 3.0) == "0.333333333");
  CHECK(io::quantize(1.0 / 3.0) == 0.333333333);
  CHECK(io::quantize(io::quantize(2.0 / 3.0)) == io::quantize(2.0 / 3.0));
}

TEST_CASE("flow CSV round trip", "[io]") {
  const auto flow = small_flow();
  std::stringstream buf;
  io::write_flow_csv(flow, buf);
  const auto back = io::read_flow_csv(buf);
  CHECK(back.same_content(io::quantized(flow)));
  CHECK(back.l_values == std::vector<int>{0, 1});
  CHECK(back.n_count == 2);
  // writing the re-read table reproduces the bytes
  std::stringstream again;
  io::write_flow_csv(back, again);
  std::stringstream first;
  io::write_flow_csv(flow, first);
  CHECK(again.str() == first.str());
}

TEST_CASE("flow CSV header and shape are enforced", "[io]") {
  std::istringstream wrong_header("B,l,n\n0,0,1\n");
  CHECK_THROWS_AS(io::read_flow_csv(wrong_header), ConfigError);
  const auto flow = small_flow();
  std::stringstream buf;
  io::write_flow_csv(flow, buf);
  auto text = buf.str();
  text.erase(text.rfind('\n', text.size() - 2) + 1);  // drop the last row
  std::istringstream truncated(text);
  CHECK_THROWS_AS(io::read_flow_csv(truncated), ConfigError);
}

TEST_CASE("flow JSON lines carry every column", "[io]") {
  const auto flow = small_flow();
  std::stringstream buf;
  io::write_flow_jsonl(flow, buf);
  std::string line;
  std::size_t count = 0;
  while (std::getline(buf, line)) {
    const auto j = nlohmann::json::parse(line);
    for (const char* key : {"B", "l", "branch", "n", "p", "energy_meV", "rms_nm", "prob_inner", "prob_outer",
                            "prob_barrier", "mass"}) {
      CHECK(j.contains(key));
    }
    ++count;
  }
  CHECK(count == flow.rows.size());
}

TEST_CASE("states and events CSV round trip", "[io]") {
  const auto flow = small_flow();
  std::vector<LabeledState> states;
  for (const auto& r : flow.rows) states.push_back(r.state);
  std::stringstream sbuf;
  io::write_states_csv(states, sbuf);
  const auto sback = io::read_states_csv(sbuf);
  REQUIRE(sback.size() == states.size());
  for (std::size_t k = 0; k < states.size(); ++k) CHECK(sback[k] == io::quantized(flow).rows[k].state);

  std::vector<CrossingEvent> events(2);
  events[0] = {EventKind::crossing, 0.432, 0.0, {1, 0, Localization::outer, Localization::outer},
               {1, -1, Localization::outer, Localization::outer}};
  events[1] = {EventKind::anti_crossing, 5.18, 0.088, {1, -1, Localization::outer, Localization::inner},
               {2, -1, Localization::inner, Localization::outer}};
  std::stringstream ebuf;
  io::write_events_csv(events, ebuf);
  CHECK(ebuf.str().rfind("kind,B_star,gap_meV,n_a,l_a,p_a_before,p_a_after,n_b,l_b,p_b_before,p_b_after\n", 0) == 0);
  CHECK(io::read_events_csv(ebuf) == events);
}

TEST_CASE("density CSV covers the whole grid", "[io]") {
  const auto spec = fixtures::two_rings();
  const auto g = build_grid_spacing(spec, 2.0);
  const auto st = lowest_eigenpairs(fixtures::two_ring_operator(2.0, 0, 0.0), 1);
  std::stringstream buf;
  io::write_density_csv(st[0], g, buf);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(buf, line)) ++lines;
  CHECK(lines == g.node_count() + 1);
}

TEST_CASE("svg plots render series and markers", "[io]") {
  svg::Plot p{"levels", "B (T)", "E (meV)", {}, {}};
  p.series.push_back({"(1,0)", {0.0, 1.0, 2.0}, {70.0, 71.0, 73.0}, svg::palette()[0], false});
  p.markers.push_back({1.5, "AC 1.5", "#d62728"});
  const auto text = svg::render(p);
  CHECK(text.rfind("<svg", 0) == 0);
  CHECK(text.find("(1,0)") != std::string::npos);
  CHECK(text.find("AC 1.5") != std::string::npos);
  CHECK(text.find("</svg>") != std::string::npos);
}
