#include "mtc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace mtc::geometry {

double distance(Point a, Point b) { return std::sqrt(distance_sq(a, b)); }

Deployment deploy(double width, double length, double lambda, Rng& rng) {
  if (!(width > 0 && length > 0 && lambda > 0))
    throw std::invalid_argument("deploy: width, length and lambda must be positive");
  Deployment dep{width, length, lambda, {}};
  const auto count = std::poisson_distribution<std::int64_t>(width * length * lambda)(rng);
  std::uniform_real_distribution<double> ux(0.0, width), uy(0.0, length);
  dep.positions.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    const double x = ux(rng);
    const double y = uy(rng);
    dep.positions.push_back({x, y});
  }
  return dep;
}

Adjacency neighbors(const Deployment& dep, double r_c) {
  if (!(r_c > 0)) throw std::invalid_argument("neighbors: r_c must be positive");
  const std::size_t n = dep.size();
  const auto cols = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(dep.width / r_c)));
  const auto rows = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(dep.length / r_c)));
  auto cell_of = [&](Point p) {
    const auto cx = std::clamp<std::int64_t>(static_cast<std::int64_t>(p.x / r_c), 0, cols - 1);
    const auto cy = std::clamp<std::int64_t>(static_cast<std::int64_t>(p.y / r_c), 0, rows - 1);
    return std::pair{cx, cy};
  };

  // Counting sort of devices into cells.
  std::vector<std::uint32_t> cell_start(static_cast<std::size_t>(cols * rows) + 1, 0);
  std::vector<std::uint32_t> cell_index(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [cx, cy] = cell_of(dep.positions[i]);
    cell_index[i] = static_cast<std::uint32_t>(cy * cols + cx);
    ++cell_start[cell_index[i] + 1];
  }
  for (std::size_t c = 1; c < cell_start.size(); ++c) cell_start[c] += cell_start[c - 1];
  std::vector<DeviceId> bucket(n);
  {
    auto fill = cell_start;
    for (std::size_t i = 0; i < n; ++i) bucket[fill[cell_index[i]]++] = static_cast<DeviceId>(i);
  }

  const double r2 = r_c * r_c;
  std::vector<std::uint32_t> offsets(n + 1, 0);
  std::vector<DeviceId> targets;
  targets.reserve(n * 8);
  std::vector<DeviceId> row;
  for (std::size_t i = 0; i < n; ++i) {
    row.clear();
    const Point p = dep.positions[i];
    const auto [cx, cy] = cell_of(p);
    for (auto y = std::max<std::int64_t>(0, cy - 1); y <= std::min(rows - 1, cy + 1); ++y) {
      for (auto x = std::max<std::int64_t>(0, cx - 1); x <= std::min(cols - 1, cx + 1); ++x) {
        const auto c = static_cast<std::size_t>(y * cols + x);
        for (auto k = cell_start[c]; k < cell_start[c + 1]; ++k) {
          const DeviceId j = bucket[k];
          if (j != i && distance_sq(p, dep.positions[j]) <= r2) row.push_back(j);
        }
      }
    }
    std::sort(row.begin(), row.end());
    targets.insert(targets.end(), row.begin(), row.end());
    offsets[i + 1] = static_cast<std::uint32_t>(targets.size());
  }
  return Adjacency(std::move(offsets), std::move(targets));
}

std::vector<DeviceId> within(const Deployment& dep, Point site, double radius) {
  std::vector<DeviceId> out;
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < dep.size(); ++i)
    if (distance_sq(dep.positions[i], site) <= r2) out.push_back(static_cast<DeviceId>(i));
  return out;
}

EventPlacement place_event(const Deployment& dep, double trigger_radius, Rng& rng) {
  if (dep.size() == 0) throw std::invalid_argument("place_event: empty deployment");
  std::uniform_real_distribution<double> ux(0.0, dep.width), uy(0.0, dep.length);
  const double x = ux(rng);
  const double y = uy(rng);
  EventPlacement ev{{{x, y}, trigger_radius}, {}};
  ev.critical = within(dep, ev.site.position, trigger_radius);
  return ev;
}

void write_snapshot_csv(std::ostream& os, const Deployment& dep,
                        std::span<const DeviceId> critical) {
  std::vector<bool> is_critical(dep.size(), false);
  for (DeviceId id : critical) is_critical.at(id) = true;
  os << "id,x,y,role\n";
  for (std::size_t i = 0; i < dep.size(); ++i)
    os << i << ',' << dep.positions[i].x << ',' << dep.positions[i].y << ','
       << (is_critical[i] ? "critical" : "periodic") << '\n';
}

}  // namespace mtc::geometry
