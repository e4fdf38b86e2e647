#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tomokl/image.hpp"
#include "tomokl/volume.hpp"

namespace tomokl {

/// Position and partial derivatives of a parametric surface at one (u, v).
struct PatchPoint {
    Vec3 p, pu, pv, puu, puv, pvv;
};

struct ParamDomain {
    double u0, u1, v0, v1;
    bool periodic_u = false;
    bool periodic_v = false;
};

/// Immersed parametric surface p(u, v) over a rectangle.
class SurfacePatch {
public:
    using Evaluator = std::function<PatchPoint(double, double)>;

    SurfacePatch(std::string name, Evaluator eval, ParamDomain domain);

    /// Partials by central finite differences of `map` with step `h`.
    static SurfacePatch from_map(std::string name, std::function<Vec3(double, double)> map, ParamDomain domain,
                                 double h = 1e-3);

    const std::string& name() const noexcept { return name_; }
    const ParamDomain& domain() const noexcept { return domain_; }
    bool contains(double u, double v) const noexcept;
    PatchPoint evaluate(double u, double v) const;

    /// Wraps periodic parameters and clamps the others into the domain.
    void normalize(double& u, double& v) const noexcept;

private:
    std::string name_;
    Evaluator eval_;
    ParamDomain domain_;
};

SurfacePatch sphere_patch(double radius = 1.0);
SurfacePatch cylinder_patch(double radius = 1.0, double half_height = 1.0);
SurfacePatch plane_patch(double half_width = 1.0);
/// z = x y over [-1, 1]^2 (doubly ruled).
SurfacePatch saddle_patch();
/// z = x^2 - y^2 over [-1, 1]^2.
SurfacePatch hyperbolic_paraboloid_patch();
SurfacePatch torus_patch(double major = 2.0, double minor = 1.0);
/// sphere, cylinder, plane, saddle, paraboloid, torus
SurfacePatch shipped_surface(const std::string& name);

/// Curvature class of a point: II positive/negative definite (Positive),
/// II = 0 (Flat), rank one (Parabolic) or indefinite (Negative).
enum class CurvatureClass { Positive, Flat, Parabolic, Negative };
std::string to_string(CurvatureClass c);

struct CurvatureData {
    double E = 0, F = 0, G = 0;  // first fundamental form
    double L = 0, M = 0, N = 0;  // second fundamental form
    double k1 = 0, k2 = 0;       // principal curvatures, k1 >= k2
    double K = 0;                // Gauss curvature k1 k2
    double H = 0;                // k1 + k2
    CurvatureClass cls = CurvatureClass::Flat;
    Vec3 point{}, pu{}, pv{}, normal{};
    Vec3 dir1{}, dir2{};  // unit principal directions for k1 and k2
};

constexpr double kCurvatureTolerance = 1e-8;

CurvatureData second_fundamental_form(const SurfacePatch& patch, double u, double v,
                                      double tau = kCurvatureTolerance);

/// II(W, W) / <W, W> for the tangential part of W.
double directional_curvature(const CurvatureData& cd, Vec3 w);

struct ZeroCurvatureDirections {
    bool all_directions = false;  // Flat points: every tangent direction
    std::vector<Vec3> directions;  // unit representatives of each line (sign free)
};

/// Asymptotic directions: none on Positive points, the null direction on
/// Parabolic points and the two lines built from sqrt|k2| V1 +- sqrt|k1| V2
/// on Negative points.
ZeroCurvatureDirections zero_curvature_directions(const CurvatureData& cd, double tau = kCurvatureTolerance);

struct SingularityOptions {
    double eps0 = 0.1;              // ray length tested for lying on the surface
    std::size_t ray_samples = 32;
    std::size_t grid_u = 128;       // surface sample grid (cell centers)
    std::size_t grid_v = 128;
    double tau = kCurvatureTolerance;
};

/// Distance from x to the patch, by projected Gauss-Newton from (u, v).
/// On return (u, v) hold the foot point parameters.
double distance_to_patch(const SurfacePatch& patch, const Vec3& x, double& u, double& v);

/// Fraction of `n_samples` seeded uniform directions on S^2 that lie within
/// angle tol of a zero-curvature direction W' at some sampled surface point p
/// whose ray p + t W' stays within distance tol of the patch for t in (0, eps0].
double singular_direction_fraction(const SurfacePatch& patch, std::size_t n_samples, double tol, std::uint64_t seed,
                                   const SingularityOptions& opts = {});

/// The same estimate along a tolerance ladder with one shared direction sample.
std::vector<double> singular_direction_ladder(const SurfacePatch& patch, std::size_t n_samples,
                                              const std::vector<double>& tols, std::uint64_t seed,
                                              const SingularityOptions& opts = {});

/// Uniform direction on S^2 for sample index k of a seeded stream.
Vec3 sample_direction(std::uint64_t seed, std::uint32_t k);

struct JumpStats {
    std::size_t count = 0;  // 4-neighbor pairs with |difference| > threshold
    double max_jump = 0.0;
};

JumpStats detect_jumps(const Image2D& img, double threshold);

/// Max jump of the projection of `vol` along `direction` at each detector
/// resolution (same physical detector width).
std::vector<double> jump_refinement(const Volume3D& vol, Vec3 direction, const std::vector<std::size_t>& detectors,
                                    double width);

}  // namespace tomokl
