#include <catch_amalgamated.hpp>

#include "fixtures.hpp"

using namespace dcqr;
using Catch::Matchers::ContainsSubstring;

namespace {

const char* kDevice = R"(
particle = electron
box_rho_max = 50
box_z_min = -10
box_z_max = 15
region = inner 8 16 0 4
region = outer 22 32 0 4
)";

}  // namespace

TEST_CASE("device file parses into regions and preset material", "[device]") {
  const auto spec = fixtures::parse_device_text(kDevice);
  REQUIRE(spec.regions.size() == 2);
  CHECK(spec.particle == Particle::electron);
  CHECK(spec.material.m_well == 0.067);
  CHECK(spec.material.m_barrier == 0.093);
  CHECK(spec.material.band_offset == 262.0);
  CHECK(spec.regions[1].label == RegionLabel::outer);
  CHECK(spec.regions[1].rho_min == 22.0);
}

TEST_CASE("material keys override the preset", "[device]") {
  const auto spec = fixtures::parse_device_text(std::string(kDevice) + "m_well = 0.07\nband_offset = 200\n");
  CHECK(spec.material.m_well == 0.07);
  CHECK(spec.material.m_barrier == 0.093);
  CHECK(spec.material.band_offset == 200.0);
}

TEST_CASE("heavy-hole preset", "[device]") {
  const auto m = MaterialParams::preset(Particle::heavy_hole);
  CHECK(m.m_well == 0.51);
  CHECK(m.m_barrier == 0.57);
  CHECK(m.band_offset == 195.0);
  CHECK(parse_particle("heavy_hole") == Particle::heavy_hole);
  CHECK_THROWS_AS(parse_particle("proton"), ConfigError);
}

TEST_CASE("region membership uses closed intervals", "[device]") {
  const auto spec = fixtures::parse_device_text(kDevice);
  CHECK(region_of(spec, 8.0, 0.0) == RegionLabel::inner);
  CHECK(region_of(spec, 16.0, 4.0) == RegionLabel::inner);
  CHECK(region_of(spec, 12.0, 2.0) == RegionLabel::inner);
  CHECK(region_of(spec, 16.5, 2.0) == RegionLabel::barrier);
  CHECK(region_of(spec, 32.0, 2.0) == RegionLabel::outer);
  CHECK(region_of(spec, 25.0, 4.5) == RegionLabel::barrier);
  CHECK(potential_at(spec, 12.0, 2.0) == 0.0);
  CHECK(potential_at(spec, 40.0, 2.0) == 262.0);
  CHECK(inner_outer_divider(spec) == 19.0);
}

TEST_CASE("device validation rejects bad geometry", "[device]") {
  SECTION("unknown key") {
    CHECK_THROWS_WITH(fixtures::parse_device_text(std::string(kDevice) + "colour = red\n"),
                      ContainsSubstring("unknown key"));
  }
  SECTION("missing particle") {
    CHECK_THROWS_AS(fixtures::parse_device_text("box_rho_max = 50\nbox_z_min = -10\nbox_z_max = 15\n"), ConfigError);
  }
  SECTION("overlapping inner and outer regions") {
    CHECK_THROWS_WITH(fixtures::parse_device_text(std::string(kDevice) + "region = outer 15 18 0 4\n"),
                      ContainsSubstring("overlap"));
  }
  SECTION("insufficient padding") {
    CHECK_THROWS_WITH(fixtures::parse_device_text(std::string(kDevice) + "region = outer 35 45 0 4\n"),
                      ContainsSubstring("padding"));
  }
  SECTION("inverted region") {
    CHECK_THROWS_AS(fixtures::parse_device_text(std::string(kDevice) + "region = inner 6 4 0 4\n"), ConfigError);
  }
  SECTION("bad material") {
    CHECK_THROWS_AS(fixtures::parse_device_text(std::string(kDevice) + "m_well = -1\n"), ConfigError);
  }
  SECTION("malformed number reports the line") {
    CHECK_THROWS_WITH(fixtures::parse_device_text(std::string(kDevice) + "box_z_max = lots\n"),
                      ContainsSubstring("<test>:8"));
  }
}

TEST_CASE("missing device file is an I/O error", "[device]") {
  CHECK_THROWS_AS(load_device(fixtures::data_dir() / "does_not_exist.conf"), IoError);
}

TEST_CASE("shipped default geometry loads for both carriers", "[device]") {
  const auto e = default_geometry(Particle::electron);
  const auto h = default_geometry(Particle::heavy_hole);
  CHECK(e.regions.size() == 2);
  CHECK(h.material.m_well == 0.51);
  CHECK(e.regions == h.regions);
}

TEST_CASE("grid spacing and weights", "[grid]") {
  const auto spec = fixtures::two_rings();
  const auto g = build_grid_spacing(spec, 1.0);
  CHECK(g.n_rho == 51);
  CHECK(g.n_z == 26);
  CHECK(g.h_rho() == Catch::Approx(1.0));
  CHECK(g.weight(g.index(0, 3)) == Catch::Approx(1.0 / 8.0));
  CHECK(g.weight(g.index(10, 3)) == Catch::Approx(10.0));
  CHECK_THROWS_AS(build_grid(10.0, 0.0, 1.0, 4, 20), std::invalid_argument);
}
