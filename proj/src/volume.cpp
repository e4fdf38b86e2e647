#include "tomokl/volume.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tomokl {

namespace {

Vec3 normalized(Vec3 v) {
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (!(n > 0.0)) throw std::invalid_argument("project_volume: direction must be nonzero");
    return {v[0] / n, v[1] / n, v[2] / n};
}

Vec3 cross(Vec3 a, Vec3 b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Orthonormal detector axes (e1, e2) perpendicular to d.
void detector_basis(const Vec3& d, Vec3& e1, Vec3& e2) {
    int least = 0;
    for (int k = 1; k < 3; ++k)
        if (std::abs(d[k]) < std::abs(d[least])) least = k;
    Vec3 axis{0.0, 0.0, 0.0};
    axis[least] = 1.0;
    e1 = normalized(cross(d, axis));
    e2 = cross(d, e1);
}

double overlap_1d(double lo, double hi, double a, double b) {
    return std::max(0.0, std::min(hi, b) - std::max(lo, a));
}

}  // namespace

Volume3D::Volume3D(std::size_t n) : n_(n), data_(n * n * n, 0.0) {
    if (n < 1) throw std::invalid_argument("Volume3D: n must be positive");
}

Volume3D voxelize_cube(std::size_t n, double half_side) {
    Volume3D vol(n);
    const double h = vol.voxel_size();
    std::vector<double> frac(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = -1.0 + double(i) * h;
        frac[i] = overlap_1d(lo, lo + h, -half_side, half_side) / h;
    }
    for (std::size_t z = 0; z < n; ++z)
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t x = 0; x < n; ++x) vol.at(x, y, z) = frac[x] * frac[y] * frac[z];
    return vol;
}

Volume3D voxelize_ball(std::size_t n, double radius, std::size_t supersample) {
    if (supersample < 1) throw std::invalid_argument("voxelize_ball: supersample must be positive");
    Volume3D vol(n);
    const double h = vol.voxel_size();
    const double sub = h / double(supersample);
    const double r2 = radius * radius;
    const double inv = 1.0 / double(supersample * supersample * supersample);
    for (std::size_t z = 0; z < n; ++z)
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t x = 0; x < n; ++x) {
                std::size_t inside = 0;
                for (std::size_t c = 0; c < supersample; ++c)
                    for (std::size_t b = 0; b < supersample; ++b)
                        for (std::size_t a = 0; a < supersample; ++a) {
                            const double px = -1.0 + double(x) * h + (double(a) + 0.5) * sub;
                            const double py = -1.0 + double(y) * h + (double(b) + 0.5) * sub;
                            const double pz = -1.0 + double(z) * h + (double(c) + 0.5) * sub;
                            if (px * px + py * py + pz * pz <= r2) ++inside;
                        }
                vol.at(x, y, z) = double(inside) * inv;
            }
    return vol;
}

Image2D project_volume(const Volume3D& vol, Vec3 direction, std::size_t n_det, double width) {
    if (n_det < 1 || !(width > 0.0)) throw std::invalid_argument("project_volume: invalid detector");
    const Vec3 d = normalized(direction);
    Vec3 e1, e2;
    detector_basis(d, e1, e2);
    const double pitch = width / double(n_det);
    const double h = vol.voxel_size();
    const long n = long(vol.n());
    Image2D out(n_det, n_det, pitch);
    for (std::size_t r = 0; r < n_det; ++r) {
        const double b = out.y_of(double(r));
        for (std::size_t c = 0; c < n_det; ++c) {
            const double a = out.x_of(double(c));
            Vec3 o;
            for (int k = 0; k < 3; ++k) o[k] = a * e1[k] + b * e2[k];
            double t0 = -std::numeric_limits<double>::infinity();
            double t1 = std::numeric_limits<double>::infinity();
            bool miss = false;
            for (int k = 0; k < 3 && !miss; ++k) {
                if (d[k] == 0.0) {
                    miss = o[k] <= -1.0 || o[k] >= 1.0;
                    continue;
                }
                double ta = (-1.0 - o[k]) / d[k];
                double tb = (1.0 - o[k]) / d[k];
                if (ta > tb) std::swap(ta, tb);
                t0 = std::max(t0, ta);
                t1 = std::min(t1, tb);
            }
            if (miss || !(t1 > t0)) continue;
            // Voxel traversal from the entry point.
            long idx[3];
            int step[3];
            double t_next[3], t_delta[3];
            for (int k = 0; k < 3; ++k) {
                const double p = o[k] + t0 * d[k];
                idx[k] = std::clamp(long(std::floor((p + 1.0) / h)), 0L, n - 1);
                if (d[k] > 0.0) {
                    step[k] = 1;
                    t_next[k] = (-1.0 + double(idx[k] + 1) * h - o[k]) / d[k];
                    t_delta[k] = h / d[k];
                } else if (d[k] < 0.0) {
                    step[k] = -1;
                    t_next[k] = (-1.0 + double(idx[k]) * h - o[k]) / d[k];
                    t_delta[k] = -h / d[k];
                } else {
                    step[k] = 0;
                    t_next[k] = std::numeric_limits<double>::infinity();
                    t_delta[k] = 0.0;
                }
            }
            double t = t0;
            double acc = 0.0;
            while (t < t1) {
                int axis = 0;
                if (t_next[1] < t_next[axis]) axis = 1;
                if (t_next[2] < t_next[axis]) axis = 2;
                const double end = std::min(t_next[axis], t1);
                if (end > t) acc += (end - t) * vol.at(std::size_t(idx[0]), std::size_t(idx[1]), std::size_t(idx[2]));
                t = std::max(t, end);
                idx[axis] += step[axis];
                t_next[axis] += t_delta[axis];
                if (idx[axis] < 0 || idx[axis] >= n) break;
            }
            out(r, c) = acc;
        }
    }
    return out;
}

}  // namespace tomokl
