#include "daamimo/scenario.hpp"

#include <cmath>
#include <numbers>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace daamimo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  if (a > std::numbers::pi) a -= kTwoPi;
  return a;
}

// Hexagonal tiling centers in spiral order: origin first, then rings of
// 6, 12, ... cells. Axial hex coordinates with inter-site distance `pitch`.
std::vector<Vec2> hex_spiral(int count, double pitch) {
  std::vector<Vec2> centers;
  centers.push_back({0.0, 0.0});
  int ring = 1;
  while (static_cast<int>(centers.size()) < count) {
    // Walk the ring starting east of the previous ring, one edge at a time.
    double q = static_cast<double>(ring);
    double r = 0.0;
    const double dq[6] = {-1, -1, 0, 1, 1, 0};
    const double dr[6] = {1, 0, -1, -1, 0, 1};
    for (int side = 0; side < 6 && static_cast<int>(centers.size()) < count; ++side) {
      for (int step = 0; step < ring && static_cast<int>(centers.size()) < count; ++step) {
        const double x = pitch * (q + 0.5 * r);
        const double y = pitch * (std::sqrt(3.0) / 2.0) * r;
        centers.push_back({x, y});
        q += dq[side];
        r += dr[side];
      }
    }
    ++ring;
  }
  return centers;
}

}  // namespace

void OneRingParams::validate() const {
  if (!(angular_spread_rad > 0.0) || angular_spread_rad > std::numbers::pi / 2.0)
    throw std::invalid_argument("one_ring.angular_spread: must be in (0, pi/2]");
  if (!(antenna_spacing_wavelengths > 0.0))
    throw std::invalid_argument("one_ring.antenna_spacing: must be > 0");
  if (!(pathloss_exponent > 0.0))
    throw std::invalid_argument("one_ring.pathloss_exponent: must be > 0");
  if (!std::isfinite(reference_gain_db))
    throw std::invalid_argument("one_ring.reference_gain_db: must be finite");
}

void NetworkScenario::validate() const {
  if (L < 1) throw std::invalid_argument("network.cells: must be >= 1");
  if (K < 1) throw std::invalid_argument("network.users_per_cell: must be >= 1");
  if (N < 1) throw std::invalid_argument("network.arrays_per_cell: must be >= 1");
  if (M < 1) throw std::invalid_argument("network.antennas_per_array: must be >= 1");
  if (tau_p != K) throw std::invalid_argument("network.pilot_length: must equal users_per_cell");
  if (tau_c <= K) throw std::invalid_argument("network.coherence_samples: must be > users_per_cell");
  if (!(rho_tr > 0.0)) throw std::invalid_argument("network.pilot_power: must be > 0");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("network.noise_variance: must be > 0");
  if (!(cell_radius > 0.0)) throw std::invalid_argument("network.cell_radius: must be > 0");
  if (static_cast<int>(cell_centers.size()) != L)
    throw std::invalid_argument("network.cell_centers: size must equal cells");
  if (static_cast<int>(array_positions.size()) != L)
    throw std::invalid_argument("network.array_positions: outer size must equal cells");
  if (static_cast<int>(user_positions.size()) != L)
    throw std::invalid_argument("network.user_positions: outer size must equal cells");
  // Regular hexagon with apothem = cell_radius * sqrt(3)/2, flat sides facing
  // the neighbor bearings 0, 60, ..., 300 degrees.
  const double apothem = cell_radius * std::sqrt(3.0) / 2.0 * (1.0 + 1e-12);
  const auto in_cell = [&](const Vec2& p, const Vec2& c) {
    const double dx = p.x - c.x;
    const double dy = p.y - c.y;
    for (int a = 0; a < 3; ++a) {
      const double phi = a * std::numbers::pi / 3.0;
      if (std::abs(dx * std::cos(phi) + dy * std::sin(phi)) > apothem) return false;
    }
    return true;
  };
  for (int l = 0; l < L; ++l) {
    if (static_cast<int>(array_positions[l].size()) != N)
      throw std::invalid_argument("network.array_positions: inner size must equal arrays_per_cell");
    if (static_cast<int>(user_positions[l].size()) != K)
      throw std::invalid_argument("network.user_positions: inner size must equal users_per_cell");
    for (const Vec2& p : array_positions[l]) {
      if (!in_cell(p, cell_centers[l]))
        throw std::invalid_argument("network.array_positions: position outside its cell boundary");
    }
    for (const Vec2& p : user_positions[l]) {
      if (!in_cell(p, cell_centers[l]))
        throw std::invalid_argument("network.user_positions: position outside its cell boundary");
    }
  }
}

NetworkScenario build_ring_network(const GeometryParams& params, int L, int K, int N, int M,
                                    const ScenarioScalars& scalars) {
  if (!(params.array_ring_m > 0.0))
    throw std::invalid_argument("geometry.array_ring_m: must be > 0");
  if (!(params.user_ring_m > params.array_ring_m))
    throw std::invalid_argument("geometry.user_ring_m: must exceed array_ring_m");

  NetworkScenario s;
  s.L = L;
  s.K = K;
  s.N = N;
  s.M = M;
  s.tau_p = K;
  s.tau_c = scalars.tau_c;
  s.rho_tr = scalars.rho_tr;
  s.sigma2 = scalars.sigma2;
  // Apothem = user ring; tiles with inter-site distance 2 * user ring.
  s.cell_radius = params.user_ring_m * 2.0 / std::sqrt(3.0);
  s.cell_centers = hex_spiral(L, 2.0 * params.user_ring_m);

  s.array_positions.resize(L);
  s.user_positions.resize(L);
  for (int l = 0; l < L; ++l) {
    const Vec2 c = s.cell_centers[l];
    s.array_positions[l].resize(N);
    for (int n = 0; n < N; ++n) {
      const double a = kTwoPi * n / N;  // bearing 0 = +x, counterclockwise
      s.array_positions[l][n] = {c.x + params.array_ring_m * std::cos(a),
                                 c.y + params.array_ring_m * std::sin(a)};
    }
    s.user_positions[l].resize(K);
    for (int k = 0; k < K; ++k) {
      const double a = kTwoPi * k / K;
      s.user_positions[l][k] = {c.x + params.user_ring_m * std::cos(a),
                                c.y + params.user_ring_m * std::sin(a)};
    }
  }
  s.validate();
  return s;
}

ArrayUserGeometry geometry_of(const NetworkScenario& s, int j, int n, int l, int i) {
  if (j < 0 || j >= s.L || l < 0 || l >= s.L)
    throw std::out_of_range("geometry_of: cell index out of range");
  if (n < 0 || n >= static_cast<int>(s.array_positions[j].size()))
    throw std::out_of_range("geometry_of: array index out of range");
  if (i < 0 || i >= static_cast<int>(s.user_positions[l].size()))
    throw std::out_of_range("geometry_of: user index out of range");

  const Vec2 a = s.array_positions[j][n];
  const Vec2 u = s.user_positions[l][i];
  const double dx = u.x - a.x;
  const double dy = u.y - a.y;
  const double dist = std::hypot(dx, dy);
  // Broadside points from the array toward its own cell center.
  const Vec2 c = s.cell_centers[j];
  const double broadside = std::atan2(c.y - a.y, c.x - a.x);
  return {dist, wrap_angle(std::atan2(dy, dx) - broadside)};
}

namespace {

struct IniData {
  std::map<std::string, std::string> values;  // "section.key" -> value
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

IniData parse_ini(std::istream& in, const std::string& origin) {
  IniData ini;
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": empty key");
    ini.values[section + "." + key] = val;
  }
  return ini;
}

double get_double(const IniData& ini, const std::string& key, double fallback, bool* present = nullptr) {
  const auto it = ini.values.find(key);
  if (it == ini.values.end()) {
    if (present) *present = false;
    return fallback;
  }
  if (present) *present = true;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": not a valid number: '" + it->second + "'");
  }
}

int get_int(const IniData& ini, const std::string& key, int fallback) {
  const auto it = ini.values.find(key);
  if (it == ini.values.end()) return fallback;
  try {
    std::size_t pos = 0;
    const long v = std::stol(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": not a valid integer: '" + it->second + "'");
  }
}

int require_int(const IniData& ini, const std::string& key) {
  if (!ini.values.count(key)) throw std::invalid_argument(key + ": missing required field");
  return get_int(ini, key, 0);
}

}  // namespace

ScenarioConfig parse_scenario_config(std::istream& in, const std::string& origin) {
  const IniData ini = parse_ini(in, origin);

  ScenarioConfig cfg;
  cfg.geometry.array_ring_m = get_double(ini, "geometry.array_ring_m", cfg.geometry.array_ring_m);
  cfg.geometry.user_ring_m = get_double(ini, "geometry.user_ring_m", cfg.geometry.user_ring_m);

  const int L = require_int(ini, "network.cells");
  const int K = require_int(ini, "network.users_per_cell");
  const int N = require_int(ini, "network.arrays_per_cell");
  const int M = require_int(ini, "network.antennas_per_array");

  ScenarioScalars scalars;
  scalars.tau_c = get_int(ini, "network.coherence_samples", scalars.tau_c);
  scalars.rho_tr = get_double(ini, "network.pilot_power", scalars.rho_tr);
  scalars.sigma2 = get_double(ini, "network.noise_variance", scalars.sigma2);

  const int tau_p = get_int(ini, "network.pilot_length", K);
  if (tau_p != K) throw std::invalid_argument("network.pilot_length: must equal users_per_cell");

  cfg.one_ring.angular_spread_rad =
      get_double(ini, "one_ring.angular_spread_deg", cfg.one_ring.angular_spread_rad * 180.0 / std::numbers::pi) * std::numbers::pi / 180.0;
  cfg.one_ring.antenna_spacing_wavelengths =
      get_double(ini, "one_ring.antenna_spacing_wavelengths", cfg.one_ring.antenna_spacing_wavelengths);
  cfg.one_ring.pathloss_exponent = get_double(ini, "one_ring.pathloss_exponent", cfg.one_ring.pathloss_exponent);
  bool has_ref = false;
  const double ref = get_double(ini, "one_ring.reference_gain_db", 0.0, &has_ref);
  if (has_ref) {
    cfg.one_ring.reference_gain_db = ref;
  } else {
    // Normalize so beta(user_ring) / sigma2 = 0 dB.
    cfg.one_ring.reference_gain_db =
        10.0 * cfg.one_ring.pathloss_exponent * std::log10(cfg.geometry.user_ring_m) +
        10.0 * std::log10(scalars.sigma2);
  }
  cfg.one_ring.validate();

  if (!(cfg.geometry.array_ring_m > 0.0))
    throw std::invalid_argument("geometry.array_ring_m: must be > 0");
  if (!(cfg.geometry.user_ring_m > cfg.geometry.array_ring_m))
    throw std::invalid_argument("geometry.user_ring_m: must exceed array_ring_m");

  cfg.scenario = build_ring_network(cfg.geometry, L, K, N, M, scalars);
  return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("scenario file: cannot open '" + path + "'");
  return parse_scenario_config(in, path);
}

}  // namespace daamimo
