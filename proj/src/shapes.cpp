#include "pw/shapes.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace pw::shapes {

namespace {

constexpr double kPi = std::numbers::pi;

struct Polyline {
  std::vector<Eigen::Vector2d> knots;
  double length() const {
    double total = 0.0;
    for (std::size_t i = 1; i < knots.size(); ++i)
      total += (knots[i] - knots[i - 1]).norm();
    return total;
  }
  Eigen::Vector2d at(double s) const {  // arc-length position
    for (std::size_t i = 1; i < knots.size(); ++i) {
      const double seg = (knots[i] - knots[i - 1]).norm();
      if (s <= seg || i + 1 == knots.size())
        return knots[i - 1] + (knots[i] - knots[i - 1]) * (seg > 0 ? s / seg : 0);
      s -= seg;
    }
    return knots.back();
  }
};

DiscreteMeasure sample_polylines(const std::vector<Polyline>& parts,
                                 int points, std::uint64_t seed,
                                 double jitter) {
  double total = 0.0;
  for (const auto& p : parts) total += p.length();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, jitter);

  Eigen::MatrixXd pts(points, 2);
  int row = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const double len = parts[k].length();
    int quota = static_cast<int>(std::lround(points * len / total));
    if (k + 1 == parts.size()) quota = points - row;  // absorb rounding
    for (int t = 0; t < quota && row < points; ++t, ++row) {
      const double s = len * (t + 0.5) / quota;
      const Eigen::Vector2d v = parts[k].at(s);
      pts(row, 0) = v.x() + gauss(rng);
      pts(row, 1) = v.y() + gauss(rng);
    }
  }
  while (row < points) {  // defensive; rounding already balanced
    pts.row(row) = pts.row(row % std::max(1, row));
    ++row;
  }
  return normalize(DiscreteMeasure::uniform(std::move(pts)));
}

}  // namespace

DiscreteMeasure dog2d(int points, std::uint64_t seed) {
  // Side view: long body, raised head with muzzle, four legs, upward tail.
  std::vector<Polyline> parts;
  parts.push_back({{{-1.0, 0.30}, {1.0, 0.30}}});    // back
  parts.push_back({{{-1.0, -0.15}, {1.0, -0.15}}});  // belly
  parts.push_back({{{1.0, 0.30}, {1.25, 0.75}, {1.65, 0.80}, {1.75, 0.55},
                    {1.45, 0.45}, {1.25, 0.05}, {1.0, -0.15}}});  // head+muzzle
  parts.push_back({{{1.30, 0.80}, {1.22, 1.00}}});                // ear
  parts.push_back({{{-0.92, -0.15}, {-0.95, -0.85}}});            // hind leg
  parts.push_back({{{-0.55, -0.15}, {-0.58, -0.80}}});            // hind leg
  parts.push_back({{{0.55, -0.15}, {0.58, -0.82}}});              // front leg
  parts.push_back({{{0.92, -0.15}, {0.95, -0.85}}});              // front leg
  parts.push_back({{{-1.0, 0.30}, {-1.35, 0.75}, {-1.55, 1.05}}}); // tail
  return sample_polylines(parts, points, seed, 0.012);
}

DiscreteMeasure torus3d(int points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * kPi);
  std::normal_distribution<double> gauss(0.0, 0.02);
  const double ring = 1.0, tube = 0.35;
  Eigen::MatrixXd pts(points, 3);
  for (int i = 0; i < points; ++i) {
    const double theta = unif(rng);
    const double phi = unif(rng);
    const double w = ring + tube * std::cos(phi);
    // Stretched along x so the principal axes stay distinct.
    pts(i, 0) = 1.45 * w * std::cos(theta) + gauss(rng);
    pts(i, 1) = w * std::sin(theta) + gauss(rng);
    pts(i, 2) = tube * std::sin(phi) + gauss(rng);
  }
  return normalize(DiscreteMeasure::uniform(std::move(pts)));
}

DiscreteMeasure ring2d(int points, std::uint64_t seed, double squash) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * kPi);
  std::normal_distribution<double> gauss(0.0, 0.03);
  Eigen::MatrixXd pts(points, 2);
  for (int i = 0; i < points; ++i) {
    const double t = unif(rng);
    pts(i, 0) = std::cos(t) + gauss(rng);
    pts(i, 1) = squash * std::sin(t) + gauss(rng);
  }
  return normalize(DiscreteMeasure::uniform(std::move(pts)));
}

DiscreteMeasure bar2d(int points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 0.05);
  Eigen::MatrixXd pts(points, 2);
  for (int i = 0; i < points; ++i) {
    pts(i, 0) = unif(rng);
    pts(i, 1) = 0.12 * unif(rng) + gauss(rng);
  }
  return normalize(DiscreteMeasure::uniform(std::move(pts)));
}

DiscreteMeasure cross2d(int points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 0.04);
  Eigen::MatrixXd pts(points, 2);
  for (int i = 0; i < points; ++i) {
    const double t = unif(rng);
    if (i % 2 == 0) {
      pts(i, 0) = t + gauss(rng);
      pts(i, 1) = gauss(rng);
    } else {
      pts(i, 0) = gauss(rng);
      pts(i, 1) = t + gauss(rng);
    }
  }
  return normalize(DiscreteMeasure::uniform(std::move(pts)));
}

DiscreteMeasure vee2d(int points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 0.04);
  Eigen::MatrixXd pts(points, 2);
  for (int i = 0; i < points; ++i) {
    const double t = unif(rng);
    const double side = i % 2 == 0 ? -1.0 : 1.0;
    pts(i, 0) = side * t * 0.8 + gauss(rng);
    pts(i, 1) = t + gauss(rng);
  }
  return normalize(DiscreteMeasure::uniform(std::move(pts)));
}

DiscreteMeasure scurve2d(int points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 0.03);
  Eigen::MatrixXd pts(points, 2);
  for (int i = 0; i < points; ++i) {
    const double t = 2.0 * kPi * unif(rng) * 0.75;
    const double flip = unif(rng) < 0.5 ? 1.0 : -1.0;
    pts(i, 0) = 0.5 * std::cos(t + kPi / 2 * (flip < 0)) * flip + gauss(rng);
    pts(i, 1) = 0.5 * std::sin(t) * flip + (flip > 0 ? 0.5 : -0.5) + gauss(rng);
  }
  return normalize(DiscreteMeasure::uniform(std::move(pts)));
}

}  // namespace pw::shapes
