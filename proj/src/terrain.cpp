#include "legfunnel/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "legfunnel/errors.hpp"

namespace legfunnel {

namespace {

// Trapezoid 0 -> 1 -> 1 -> 0 with knots at the given abscissae.
double trapezoid(double s, double k0, double k1, double k2, double k3)
{
    if (s <= k0 || s >= k3) {
        return 0.0;
    }
    if (s < k1) {
        return (s - k0) / (k1 - k0);
    }
    if (s <= k2) {
        return 1.0;
    }
    return (k3 - s) / (k3 - k2);
}

constexpr double kLeftBandMin = 0.1;
constexpr double kBandMax = 1.5;

}  // namespace

double TerrainFeature::height_at(double x, double y) const
{
    const double x1 = x_start + ramp_up;
    const double x2 = x1 + plateau;
    const double along = trapezoid(x, x_start, x1, x2, x2 + ramp_down);
    const double across = trapezoid(y, y_min - edge, y_min, y_max, y_max + edge);
    return height * std::min(along, across);
}

TerrainProfile::TerrainProfile(std::vector<TerrainFeature> features, double x_min, double x_max)
    : features_(std::move(features)), x_min_(x_min), x_max_(x_max)
{
    if (!(x_max > x_min)) {
        throw ParameterError("terrain domain must have x_max > x_min");
    }
    for (const auto& f : features_) {
        if (!(f.ramp_up > 0.0) || !(f.ramp_down > 0.0) || f.plateau < 0.0 || !(f.edge > 0.0) ||
            !(f.y_max > f.y_min) || !std::isfinite(f.height)) {
            throw ParameterError("terrain feature needs positive ramps and edges and finite height");
        }
    }
}

TerrainProfile TerrainProfile::flat(double x_min, double x_max)
{
    return TerrainProfile({}, x_min, x_max);
}

TerrainProfile TerrainProfile::parallel_slopes()
{
    TerrainFeature left{0.050, 1.0, 0.25, 1.0, 0.25, kLeftBandMin, kBandMax, 0.05};
    TerrainFeature right{0.110, 1.0, 0.55, 1.0, 0.55, -kBandMax, -kLeftBandMin, 0.05};
    return TerrainProfile({left, right}, -5.0, 20.0);
}

TerrainProfile TerrainProfile::separated_slopes()
{
    TerrainFeature left{0.050, 1.0, 0.25, 1.0, 0.25, kLeftBandMin, kBandMax, 0.05};
    TerrainFeature right{0.110, 2.8, 0.55, 1.0, 0.55, -kBandMax, -kLeftBandMin, 0.05};
    return TerrainProfile({left, right}, -5.0, 20.0);
}

TerrainProfile TerrainProfile::preset(const std::string& name)
{
    if (name == "flat") {
        return flat();
    }
    if (name == "parallel_slopes") {
        return parallel_slopes();
    }
    if (name == "separated_slopes") {
        return separated_slopes();
    }
    throw ConfigError("unknown terrain preset '" + name + "'");
}

void TerrainProfile::add_noise(double amplitude, std::uint64_t seed, int count)
{
    if (amplitude <= 0.0 || count <= 0) {
        return;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double span = std::max(0.0, (x_max_ - 3.0) - 0.5);
    for (int side = 0; side < 2; ++side) {
        for (int n = 0; n < count; ++n) {
            TerrainFeature f;
            f.height = amplitude * (0.2 + 0.8 * unit(rng));
            f.x_start = 0.5 + span * unit(rng);
            f.ramp_up = 0.1 + 0.2 * unit(rng);
            f.plateau = 0.1 + 0.4 * unit(rng);
            f.ramp_down = 0.1 + 0.2 * unit(rng);
            f.y_min = side == 0 ? kLeftBandMin : -kBandMax;
            f.y_max = side == 0 ? kBandMax : -kLeftBandMin;
            f.edge = 0.05;
            features_.push_back(f);
        }
    }
}

void TerrainProfile::check_domain(double x) const
{
    if (!(x >= x_min_ && x <= x_max_)) {
        std::ostringstream os;
        os << "position x = " << x << " m outside terrain domain [" << x_min_ << ", " << x_max_ << "]";
        throw DomainError(os.str());
    }
}

double TerrainProfile::height(double x, double y) const
{
    check_domain(x);
    double h = 0.0;
    for (const auto& f : features_) {
        h = std::max(h, f.height_at(x, y));
    }
    return h;
}

double TerrainProfile::patch_height(double x, double y, double patch) const
{
    if (patch <= 0.0) {
        return height(x, y);
    }
    const double lo = x - 0.5 * patch;
    const double hi = x + 0.5 * patch;
    check_domain(lo);
    check_domain(hi);

    // h is piecewise linear; between feature knots the only remaining kinks come from overlapping
    // features and the lateral edges, which the bisection below isolates
    std::vector<double> knots{lo, hi};
    for (const auto& f : features_) {
        const double k[4] = {f.x_start, f.x_start + f.ramp_up, f.x_start + f.ramp_up + f.plateau, f.x_end()};
        for (double v : k) {
            if (v > lo && v < hi) {
                knots.push_back(v);
            }
        }
    }
    std::sort(knots.begin(), knots.end());
    double area = 0.0;
    for (std::size_t i = 1; i < knots.size(); ++i) {
        area += linear_area(knots[i - 1], knots[i], height(knots[i - 1], y), height(knots[i], y), y, 0);
    }
    return area / patch;
}

double TerrainProfile::linear_area(double a, double b, double ha, double hb, double y, int depth) const
{
    const double m = 0.5 * (a + b);
    const double hm = height(m, y);
    if (depth >= 40 || std::abs(hm - 0.5 * (ha + hb)) <= 1e-15) {
        return 0.5 * (b - a) * (ha + hb);
    }
    return linear_area(a, m, ha, hm, y, depth + 1) + linear_area(m, b, hm, hb, y, depth + 1);
}

double TerrainProfile::patch_slope(double x, double y, double patch) const
{
    if (patch <= 0.0) {
        constexpr double kStep = 1e-7;
        return (height(x + kStep, y) - height(x - kStep, y)) / (2.0 * kStep);
    }
    return (height(x + 0.5 * patch, y) - height(x - 0.5 * patch, y)) / patch;
}

}  // namespace legfunnel
