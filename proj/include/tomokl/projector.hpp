#pragma once

#include <cstddef>
#include <filesystem>
#include <variant>
#include <vector>

#include "tomokl/image.hpp"
#include "tomokl/io.hpp"
#include "tomokl/phantom.hpp"

namespace tomokl {

/// Parallel-beam geometry. A ray at angle theta and detector offset s is the
/// line {x cos(theta) + y sin(theta) = s}, traversed along (-sin, cos).
struct ParallelGeometry {
    std::vector<double> angles;  // radians in [0, pi), strictly increasing
    std::size_t n_detectors = 0;
    double detector_spacing = 0.0;

    /// n_angles equispaced angles k*pi/n_angles.
    static ParallelGeometry uniform(std::size_t n_angles, std::size_t n_detectors, double spacing);

    double detector_offset(std::size_t k) const noexcept {
        return (double(k) - 0.5 * (double(n_detectors) - 1.0)) * detector_spacing;
    }
    void validate() const;
};

/// Fan-beam geometry with a flat virtual detector through the rotation center.
///
/// For source angle beta the source sits at q = R (sin beta, -cos beta), the
/// central ray points along (-sin beta, cos beta) and the detector line is
/// {u (cos beta, sin beta)}; the central ray coincides with the parallel ray
/// at angle beta and offset 0.
struct FanGeometry {
    double source_radius = 0.0;
    std::vector<double> angles;  // radians in [0, 2 pi), strictly increasing
    std::size_t n_detectors = 0;
    double detector_spacing = 0.0;

    static FanGeometry uniform(std::size_t n_angles, std::size_t n_detectors, double spacing, double source_radius);

    double detector_offset(std::size_t k) const noexcept {
        return (double(k) - 0.5 * (double(n_detectors) - 1.0)) * detector_spacing;
    }
    Vec2 source(double beta) const noexcept;
    Vec2 detector_point(double beta, double u) const noexcept;
    void validate() const;
};

/// Rows are angles, columns are detectors.
struct Sinogram {
    ParallelGeometry geometry;
    Image2D data;
};

struct FanSinogram {
    FanGeometry geometry;
    Image2D data;
};

/// Experiment defaults: the detector line covers the (projected) support
/// circle of radius `support_radius` with 10% margin.
ParallelGeometry default_parallel_geometry(double support_radius, std::size_t n_angles = 360,
                                           std::size_t n_detectors = 509);
FanGeometry default_fan_geometry(double support_radius, std::size_t n_angles = 360, std::size_t n_detectors = 509,
                                 double source_radius = 3.0);

/// Joseph-style ray marching through the bilinearly interpolated image with
/// step at most pixel_spacing / 2 (midpoint rule).
Sinogram parallel_project(const Image2D& img, const ParallelGeometry& geom);
FanSinogram fan_project(const Image2D& img, const FanGeometry& geom);

/// Exact ellipse-chord sinograms.
Sinogram analytic_parallel_sinogram(const EllipsePhantom& phantom, const ParallelGeometry& geom);
FanSinogram analytic_fan_sinogram(const EllipsePhantom& phantom, const FanGeometry& geom);

/// Line integral of the bilinear interpolant of `img` along {origin + t dir,
/// t in [t_min, t_max]}; `dir` must be unit length.
double march_ray(const Image2D& img, Vec2 origin, Vec2 dir, double t_min, double t_max);

// Sidecar serialization: RM2 matrix plus "<path>.hdr" with key=value lines
// kind, n_angles, n_detectors, spacing, source_radius (fan only) and angles.
KeyValues geometry_keys(const ParallelGeometry& g);
KeyValues geometry_keys(const FanGeometry& g);

void write_sinogram(const std::filesystem::path& path, const Sinogram& s);
void write_sinogram(const std::filesystem::path& path, const FanSinogram& s);

using AnySinogram = std::variant<Sinogram, FanSinogram>;
AnySinogram read_sinogram(const std::filesystem::path& path);

}  // namespace tomokl
