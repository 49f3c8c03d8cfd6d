#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace keyhole {

/// Domain coordinates. y is the axial coordinate: the holes sit on the wall
/// y = 0 and the opposite parallel wall is y = h. x (and z in 3D) run along
/// the walls.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

enum class HoleShape { circular, square };

/// A hole of width w (2D) or diameter / side w (3D) and depth d in the wall
/// y = 0. The external node sits at the wedge apex, idealised onto the wall
/// line, looking along +y.
struct KeyholeSpec {
    double position = 0.0;    // x of the hole centre
    double position_z = 0.0;  // z of the hole centre (3D)
    double width = 0.0;
    double depth = 0.0;
    HoleShape shape = HoleShape::circular;

    /// 2D hole with full LOS angle phi: w = 2 d tan(phi / 2).
    static KeyholeSpec with_angle(double position, double phi, double depth);
    /// 3D hole with polar LOS half-angle psi.
    static KeyholeSpec with_half_angle_3d(double x, double z, double psi, double depth,
                                          HoleShape shape = HoleShape::circular);

    /// arctan(w / 2d): phi/2 in 2D, psi (or the square's half apex angle) in 3D.
    double half_angle() const;
    void validate() const;
    /// Non-fatal notes for geometries outside the regime w << d << 1.
    std::vector<std::string> validity_warnings() const;
};

struct LosAngle {
    double half_angle = 0.0;   // phi/2 in 2D, psi in 3D
    double full_angle = 0.0;   // phi = 2 arctan(w / 2d) in 2D
    double solid_angle = 0.0;  // 3D only
};

LosAngle los_angle(const KeyholeSpec& hole, int dimension);

/// Polar half-angle of the circular cone whose solid angle equals `solid_angle`.
double equivalent_cone_half_angle(double solid_angle);

struct KeyholeDomain {
    int dimension = 2;
    double height = 1.0;  // h, distance between the parallel walls
    double length = 1.0;  // L, extent along x
    double width = 1.0;   // L_y, extent along z (3D)
    std::vector<KeyholeSpec> holes;

    double volume() const;
    bool contains(const Vec3& p) const;
    void validate() const;
    std::vector<std::string> warnings() const;
};

/// Pairs of holes whose LOS wedges (cones) overlap inside the domain.
std::vector<std::pair<std::size_t, std::size_t>> overlapping_wedges(const KeyholeDomain& domain);

struct Image {
    int reflections = 0;
    Vec3 position;  // apex-centred: transverse offsets in x/z, axial in y
};

/// Unfolded images of `point` across the two parallel walls, c = 0..max_c.
std::vector<Image> unfold_images(const Vec3& point, const KeyholeDomain& domain,
                                 const KeyholeSpec& hole, int max_c);

struct PathClass {
    std::optional<int> reflections;  // empty when no path with <= C reflections exists
    double distance = 0.0;           // apex to image distance

    bool connected() const { return reflections.has_value(); }
};

PathClass classify_path(const Vec3& point, const KeyholeDomain& domain, const KeyholeSpec& hole,
                        int max_c);

enum class MeasureMethod { analytic_approx, montecarlo };

struct RegionMeasure {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;
};

/// |D_c|: area (2D) or volume (3D) of the points whose minimal path uses c
/// reflections. The analytic branch returns the small-angle estimates; the
/// Monte Carlo branch counts hits of classify_path in a bounding box.
RegionMeasure region_measure(int c, const KeyholeDomain& domain, const KeyholeSpec& hole,
                             MeasureMethod method, std::int64_t samples = 1'000'000,
                             std::uint64_t seed = 1);

}  // namespace keyhole
