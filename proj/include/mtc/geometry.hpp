#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "mtc/rng.hpp"

namespace mtc::geometry {

using DeviceId = std::uint32_t;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance_sq(Point a, Point b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}
double distance(Point a, Point b);

struct Deployment {
  double width = 0.0;
  double length = 0.0;
  double lambda = 0.0;
  std::vector<Point> positions;

  std::size_t size() const { return positions.size(); }
  double area() const { return width * length; }
};

/// Homogeneous Poisson point process on [0,w]x[0,l]: a Poisson(w l lambda)
/// count, then i.i.d. uniform positions.
Deployment deploy(double width, double length, double lambda, Rng& rng);

/// Compressed sparse adjacency; neighbor lists are sorted ascending.
class Adjacency {
public:
  Adjacency() = default;
  Adjacency(std::vector<std::uint32_t> offsets, std::vector<DeviceId> targets)
      : offsets_(std::move(offsets)), targets_(std::move(targets)) {}

  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::span<const DeviceId> of(DeviceId i) const {
    return {targets_.data() + offsets_[i], targets_.data() + offsets_[i + 1]};
  }
  std::size_t edge_count() const { return targets_.size(); }

private:
  std::vector<std::uint32_t> offsets_;
  std::vector<DeviceId> targets_;
};

/// Devices within r_c (inclusive) of each other, excluding self. Uses grid
/// buckets of side r_c.
Adjacency neighbors(const Deployment& dep, double r_c);

struct EventSite {
  Point position;
  double trigger_radius = 1.0;
};

struct EventPlacement {
  EventSite site;
  std::vector<DeviceId> critical;  // ascending
  int critical_count() const { return static_cast<int>(critical.size()); }
};

/// Uniform event location; devices within the trigger radius (inclusive)
/// hold critical messages.
EventPlacement place_event(const Deployment& dep, double trigger_radius, Rng& rng);

/// Devices within `radius` of `site` (inclusive), ascending.
std::vector<DeviceId> within(const Deployment& dep, Point site, double radius);

/// CSV snapshot: id,x,y,role with role in {periodic, critical}.
void write_snapshot_csv(std::ostream& os, const Deployment& dep,
                        std::span<const DeviceId> critical);

}  // namespace mtc::geometry
