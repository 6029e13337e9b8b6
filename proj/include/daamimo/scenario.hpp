#ifndef DAAMIMO_SCENARIO_HPP
#define DAAMIMO_SCENARIO_HPP

#include <iosfwd>
#include <numbers>
#include <string>
#include <vector>

namespace daamimo {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Ring-based cell layout. Cells are regular hexagons tiled around the origin;
// the hexagon apothem equals user_ring_m so the user ring is the inscribed
// circle (inter-site distance = 2 * user_ring_m). Only distances and angles
// enter the channel model, so the two radii fully determine the geometry.
struct GeometryParams {
  double array_ring_m = 300.0;
  double user_ring_m = 700.0;
};

// One-ring spatial correlation + power-law path loss. reference_gain_db is
// the gain at 1 m; the default normalizes beta(700 m) to 1, i.e. 0 dB SNR at
// the user ring for unit noise variance.
struct OneRingParams {
  double angular_spread_rad = 10.0 * std::numbers::pi / 180.0;
  double antenna_spacing_wavelengths = 0.5;
  double pathloss_exponent = 3.76;
  double reference_gain_db = 37.6 * 2.8450980400142567;  // 10*3.76*log10(700)

  void validate() const;
};

// Immutable after construction; shared read-only across workers.
struct NetworkScenario {
  int L = 0;        // cells
  int K = 0;        // users per cell
  int N = 0;        // arrays per cell
  int M = 0;        // antennas per array
  int tau_p = 0;    // pilot length, == K (orthogonal pilots reused per cell)
  int tau_c = 0;    // coherence interval in samples
  double rho_tr = 0.0;  // normalized total pilot power rho_p * tau_p
  double sigma2 = 0.0;  // downlink noise variance
  double cell_radius = 0.0;  // hexagon circumradius

  std::vector<Vec2> cell_centers;                 // [L]
  std::vector<std::vector<Vec2>> array_positions; // [L][N]
  std::vector<std::vector<Vec2>> user_positions;  // [L][K]

  // Throws std::invalid_argument naming the first violated field.
  void validate() const;
};

struct ScenarioScalars {
  int tau_c = 200;
  double rho_tr = 100.0;
  double sigma2 = 1.0;
};

// Deterministic layout: hexagonal cell tiling (spiral order from the center),
// N arrays equally spaced on the array ring starting at bearing 0 (+x axis,
// counterclockwise), K users equally spaced on the user ring likewise.
NetworkScenario build_ring_network(const GeometryParams& params, int L, int K, int N, int M,
                                    const ScenarioScalars& scalars = {});

struct ArrayUserGeometry {
  double distance;  // meters
  double azimuth;   // radians from the array broadside, in (-pi, pi], ccw positive
};

// Distance and azimuth from array (j,n) to user (l,i). Each array's broadside
// points at its own cell center.
ArrayUserGeometry geometry_of(const NetworkScenario& s, int j, int n, int l, int i);

// Scenario configuration file: INI-style sections [network], [geometry],
// [one_ring]. Loader validates all invariants and reports the first violated
// field by name.
struct ScenarioConfig {
  NetworkScenario scenario;
  GeometryParams geometry;
  OneRingParams one_ring;
};

ScenarioConfig load_scenario_file(const std::string& path);
ScenarioConfig parse_scenario_config(std::istream& in, const std::string& origin);

}  // namespace daamimo

#endif
