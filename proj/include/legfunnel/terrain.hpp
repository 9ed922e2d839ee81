#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace legfunnel {

/// Trapezoidal bump: ramp up, plateau, ramp down along x, limited laterally to a band with
/// linear edges. All lengths in metres.
struct TerrainFeature {
    double height = 0.0;
    double x_start = 0.0;
    double ramp_up = 0.25;
    double plateau = 1.0;
    double ramp_down = 0.25;
    double y_min = -1.0;
    double y_max = 1.0;
    double edge = 0.05;

    double x_end() const { return x_start + ramp_up + plateau + ramp_down; }
    /// Height of this feature alone at (x, y).
    double height_at(double x, double y) const;
};

/// Piecewise-linear height field h(x, y) = max(0, max_i feature_i(x, y)) over [x_min, x_max].
class TerrainProfile {
public:
    TerrainProfile() = default;
    TerrainProfile(std::vector<TerrainFeature> features, double x_min, double x_max);

    static TerrainProfile flat(double x_min = -5.0, double x_max = 20.0);
    /// 50 mm slope under the left wheel track and 110 mm slope under the right track, side by side.
    static TerrainProfile parallel_slopes();
    /// Same two slopes, the 110 mm one placed behind the 50 mm one along the driving direction.
    static TerrainProfile separated_slopes();
    /// Named preset lookup; throws ConfigError for unknown names.
    static TerrainProfile preset(const std::string& name);

    /// Adds `count` random bumps of height up to `amplitude` on each track, deterministic in `seed`.
    void add_noise(double amplitude, std::uint64_t seed, int count = 12);

    /// Throws DomainError outside [x_min, x_max].
    double height(double x, double y) const;
    /// Mean height over a contact patch [x - w/2, x + w/2] at lateral position y.
    double patch_height(double x, double y, double patch) const;
    /// d/dx of patch_height.
    double patch_slope(double x, double y, double patch) const;

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    const std::vector<TerrainFeature>& features() const { return features_; }

private:
    void check_domain(double x) const;
    /// Trapezoid area over [a, b], bisecting until h is linear on each piece.
    double linear_area(double a, double b, double ha, double hb, double y, int depth) const;

    std::vector<TerrainFeature> features_;
    double x_min_ = -5.0;
    double x_max_ = 20.0;
};

}  // namespace legfunnel
