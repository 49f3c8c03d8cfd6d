#include "keyhole/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "keyhole/random.hpp"

namespace keyhole {

namespace {

constexpr double kPi = std::numbers::pi;

// Regime of the small-angle idealisation (w << d << 1).
constexpr double kMaxWidthToDepth = 0.25;
constexpr double kMaxDepth = 0.25;

double axial_image(int c, double y, double h) {
    const int pairs = (c + 1) / 2;  // ceil(c / 2)
    return 2.0 * pairs * h + ((c % 2 == 0) ? y : -y);
}

bool inside_los(const KeyholeSpec& hole, int dimension, double dx, double dz, double axial,
                double tan_half) {
    const double reach = axial * tan_half;
    if (dimension == 2) return std::abs(dx) <= reach;
    if (hole.shape == HoleShape::square) return std::max(std::abs(dx), std::abs(dz)) <= reach;
    return dx * dx + dz * dz <= reach * reach;
}

// The unfolded chord runs from the apex to the image; its transverse
// coordinates interpolate linearly between the two endpoints, so it stays
// between the side walls exactly when both endpoints do.
bool chord_inside_side_walls(const KeyholeDomain& domain, const KeyholeSpec& hole, const Vec3& p) {
    auto within = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
    bool ok = within(hole.position, 0.0, domain.length) && within(p.x, 0.0, domain.length);
    if (domain.dimension == 3) {
        ok = ok && within(hole.position_z, 0.0, domain.width) && within(p.z, 0.0, domain.width);
    }
    return ok;
}

void require_inside(const Vec3& point, const KeyholeDomain& domain) {
    if (!domain.contains(point)) throw std::invalid_argument("point lies outside the domain");
}

double box_distance(double dx, double dz, double half) {
    const double ex = std::max(std::abs(dx) - half, 0.0);
    const double ez = std::max(std::abs(dz) - half, 0.0);
    return std::hypot(ex, ez);
}

}  // namespace

KeyholeSpec KeyholeSpec::with_angle(double position, double phi, double depth) {
    KeyholeSpec hole;
    hole.position = position;
    hole.depth = depth;
    hole.width = 2.0 * depth * std::tan(0.5 * phi);
    return hole;
}

KeyholeSpec KeyholeSpec::with_half_angle_3d(double x, double z, double psi, double depth,
                                            HoleShape shape) {
    KeyholeSpec hole;
    hole.position = x;
    hole.position_z = z;
    hole.depth = depth;
    hole.width = 2.0 * depth * std::tan(psi);
    hole.shape = shape;
    return hole;
}

double KeyholeSpec::half_angle() const { return std::atan(width / (2.0 * depth)); }

void KeyholeSpec::validate() const {
    if (!(width > 0.0)) throw std::invalid_argument("hole.width must be positive");
    if (!(depth > 0.0)) throw std::invalid_argument("hole.depth must be positive");
    const double half = half_angle();
    if (!(half > 0.0 && half < kPi / 2)) throw std::invalid_argument("hole half angle outside (0, pi/2)");
}

std::vector<std::string> KeyholeSpec::validity_warnings() const {
    std::vector<std::string> notes;
    if (width > kMaxWidthToDepth * depth) {
        notes.push_back("hole width is not small compared with its depth (w/d = " +
                        std::to_string(width / depth) + "); sector approximation degrades");
    }
    if (depth > kMaxDepth) {
        notes.push_back("hole depth " + std::to_string(depth) +
                        " is not small compared with the wavelength; apex-on-wall idealisation degrades");
    }
    return notes;
}

LosAngle los_angle(const KeyholeSpec& hole, int dimension) {
    LosAngle out;
    out.half_angle = hole.half_angle();
    out.full_angle = 2.0 * out.half_angle;
    if (dimension == 3) {
        if (hole.shape == HoleShape::square) {
            const double s = std::sin(out.half_angle);
            out.solid_angle = 4.0 * std::asin(s * s);
        } else {
            out.solid_angle = 2.0 * kPi * (1.0 - std::cos(out.half_angle));
        }
    }
    return out;
}

double equivalent_cone_half_angle(double solid_angle) {
    return std::acos(1.0 - solid_angle / (2.0 * kPi));
}

double KeyholeDomain::volume() const {
    return dimension == 3 ? height * length * width : height * length;
}

bool KeyholeDomain::contains(const Vec3& p) const {
    bool inside = p.x >= 0.0 && p.x <= length && p.y >= 0.0 && p.y <= height;
    if (dimension == 3) inside = inside && p.z >= 0.0 && p.z <= width;
    return inside;
}

void KeyholeDomain::validate() const {
    if (dimension != 2 && dimension != 3) throw std::invalid_argument("domain.dimension must be 2 or 3");
    if (!(height > 0.0)) throw std::invalid_argument("domain.height must be positive");
    if (!(length > 0.0)) throw std::invalid_argument("domain.length must be positive");
    if (dimension == 3 && !(width > 0.0)) throw std::invalid_argument("domain.width must be positive");
    for (const KeyholeSpec& hole : holes) {
        hole.validate();
        if (!(hole.position > 0.0 && hole.position < length)) {
            throw std::invalid_argument("hole.position must lie strictly inside the wall");
        }
        if (dimension == 3 && !(hole.position_z > 0.0 && hole.position_z < width)) {
            throw std::invalid_argument("hole.position_z must lie strictly inside the wall");
        }
    }
}

std::vector<std::string> KeyholeDomain::warnings() const {
    std::vector<std::string> notes;
    for (const KeyholeSpec& hole : holes) {
        for (std::string& note : hole.validity_warnings()) notes.push_back(std::move(note));
    }
    for (auto [i, j] : overlapping_wedges(*this)) {
        notes.push_back("LOS regions of holes " + std::to_string(i) + " and " + std::to_string(j) +
                        " overlap; the multi-hole product formula assumes they do not");
    }
    return notes;
}

std::vector<std::pair<std::size_t, std::size_t>> overlapping_wedges(const KeyholeDomain& domain) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    const auto& holes = domain.holes;
    // Each wedge (cone) is widest where it meets the opposite wall.
    auto reach = [&](const KeyholeSpec& hole) { return domain.height * std::tan(hole.half_angle()); };
    for (std::size_t i = 0; i < holes.size(); ++i) {
        for (std::size_t j = i + 1; j < holes.size(); ++j) {
            const KeyholeSpec& a = holes[i];
            const KeyholeSpec& b = holes[j];
            const double ra = reach(a);
            const double rb = reach(b);
            const double dx = a.position - b.position;
            bool overlap = false;
            if (domain.dimension == 2) {
                overlap = std::abs(dx) < ra + rb;
            } else {
                const double dz = a.position_z - b.position_z;
                const bool sq_a = a.shape == HoleShape::square;
                const bool sq_b = b.shape == HoleShape::square;
                if (sq_a && sq_b) {
                    overlap = std::abs(dx) < ra + rb && std::abs(dz) < ra + rb;
                } else if (!sq_a && !sq_b) {
                    overlap = std::hypot(dx, dz) < ra + rb;
                } else {
                    const double disc = sq_a ? rb : ra;
                    const double half = sq_a ? ra : rb;
                    overlap = box_distance(dx, dz, half) < disc;
                }
            }
            if (overlap) out.emplace_back(i, j);
        }
    }
    return out;
}

std::vector<Image> unfold_images(const Vec3& point, const KeyholeDomain& domain,
                                 const KeyholeSpec& hole, int max_c) {
    require_inside(point, domain);
    if (max_c < 0) throw std::invalid_argument("max reflections must be non-negative");
    std::vector<Image> images;
    images.reserve(static_cast<std::size_t>(max_c) + 1);
    const double dx = point.x - hole.position;
    const double dz = domain.dimension == 3 ? point.z - hole.position_z : 0.0;
    for (int c = 0; c <= max_c; ++c) {
        images.push_back({c, {dx, axial_image(c, point.y, domain.height), dz}});
    }
    return images;
}

PathClass classify_path(const Vec3& point, const KeyholeDomain& domain, const KeyholeSpec& hole,
                        int max_c) {
    require_inside(point, domain);
    if (max_c < 0) throw std::invalid_argument("max reflections must be non-negative");
    const double tan_half = std::tan(hole.half_angle());
    const double dx = point.x - hole.position;
    const double dz = domain.dimension == 3 ? point.z - hole.position_z : 0.0;
    if (!chord_inside_side_walls(domain, hole, point)) return {};
    for (int c = 0; c <= max_c; ++c) {
        const double axial = axial_image(c, point.y, domain.height);
        if (inside_los(hole, domain.dimension, dx, dz, axial, tan_half)) {
            return {c, std::sqrt(dx * dx + dz * dz + axial * axial)};
        }
    }
    return {};
}

RegionMeasure region_measure(int c, const KeyholeDomain& domain, const KeyholeSpec& hole,
                             MeasureMethod method, std::int64_t samples, std::uint64_t seed) {
    if (c < 0) throw std::invalid_argument("region_measure: c must be non-negative");
    const LosAngle angle = los_angle(hole, domain.dimension);
    const double h = domain.height;
    if (method == MeasureMethod::analytic_approx) {
        RegionMeasure out;
        if (domain.dimension == 2) {
            const double d0 = 0.5 * angle.full_angle * h * h;
            out.value = c == 0 ? d0 : 2.0 * d0;
        } else {
            out.value = c == 0 ? angle.solid_angle * h * h * h / 3.0
                               : 2.0 * c * h * h * h * angle.solid_angle;
        }
        return out;
    }

    if (samples < 1) throw std::invalid_argument("region_measure: samples must be >= 1");
    // D_c lies within transverse distance (c+1) h tan(half) of the hole axis.
    const double reach = (c + 1) * h * std::tan(angle.half_angle);
    const double x_lo = std::max(0.0, hole.position - reach);
    const double x_hi = std::min(domain.length, hole.position + reach);
    double z_lo = 0.0;
    double z_hi = 1.0;
    if (domain.dimension == 3) {
        z_lo = std::max(0.0, hole.position_z - reach);
        z_hi = std::min(domain.width, hole.position_z + reach);
    }
    const double box = (x_hi - x_lo) * h * (z_hi - z_lo);

    Rng rng = Rng::stream(seed, 0);
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < samples; ++i) {
        Vec3 p;
        p.x = rng.uniform(x_lo, x_hi);
        p.y = rng.uniform(0.0, h);
        if (domain.dimension == 3) p.z = rng.uniform(z_lo, z_hi);
        const PathClass pc = classify_path(p, domain, hole, c);
        if (pc.reflections == c) ++hits;
    }
    const double n = static_cast<double>(samples);
    const double frac = static_cast<double>(hits) / n;
    RegionMeasure out;
    out.value = box * frac;
    out.std_error = box * std::sqrt(frac * (1.0 - frac) / n);
    out.samples = samples;
    return out;
}

}  // namespace keyhole
