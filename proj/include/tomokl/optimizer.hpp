#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tomokl/framelet.hpp"
#include "tomokl/image.hpp"

namespace tomokl {

/// Regularizer choice for the KL denoising models.
enum class Model { TV, Haar, Linear, Cubic };

Model parse_model(std::string_view name);
std::string to_string(Model m);
FrameletKind framelet_of(Model m);

struct SolverConfig {
    double alpha = 0.0;                // TV weight
    double lambda = 0.0;               // uniform weight on every high-pass band
    std::vector<double> band_weights;  // optional per-band override, levels * (r+1)^2 entries
    double penalty = 1.0;              // augmented-Lagrangian r
    std::size_t max_iters = 2000;
    double rel_tol = 5e-5;
    double floor = 1e-12;  // lower bound for pixels whose data is positive
    std::size_t levels = 1;
    bool record_trace = true;

    void validate(Model model) const;
};

struct SolveReport {
    std::size_t iterations = 0;
    double final_rel_change = 0.0;
    bool converged = false;
    std::vector<double> objective_trace;  // objective after each iteration
    double initial_objective = 0.0;
    double final_objective = 0.0;
    double wall_seconds = 0.0;
};

struct DenoiseResult {
    Image2D image;
    SolveReport report;
};

/// Forward differences with periodic wrap: dx along columns, dy along rows.
struct VectorField {
    Image2D dx;
    Image2D dy;
};

VectorField grad(const Image2D& u);
/// Negative adjoint of `grad`: <grad u, p> = -<u, div p>.
Image2D divergence(const VectorField& p);

/// Isotropic total variation, sum of per-pixel gradient norms.
double tv(const Image2D& u);

/// sum(u - f log u). Pixels with u <= 0 contribute 0 when f = 0 and make the
/// sum +infinity otherwise.
double kl_objective(const Image2D& u, const Image2D& f);

double shrink(double x, double t);
std::array<double, 2> shrink(std::array<double, 2> x, double t);

/// argmin_u beta (u - f log u) + (u - z)^2 / 2 over u > 0 (u >= 0 when f = 0).
double kl_prox(double z, double f, double beta);

/// E_TVKL(u) = alpha TV(u) + KL(u, f).
double objective_tv(const Image2D& u, const Image2D& f, double alpha);
/// E_WFKL(u) = sum_b w_b |W_b u|_1 + KL(u, f).
double objective_framelet(const Image2D& u, const Image2D& f, const FilterBank& bank, const SolverConfig& cfg);
double objective(const Image2D& u, const Image2D& f, Model model, const SolverConfig& cfg);

/// Per-band weights actually used by the framelet solver.
std::vector<double> band_weights(const FilterBank& bank, const SolverConfig& cfg);

/// Augmented-Lagrangian splitting with one inner iteration: u carries the
/// regularizer, v the KL term, u = v enforced by scaled multipliers. Starts
/// from u = v = f with zero split variables, stops once
/// |u_k - u_{k-1}| / |u_k| <= rel_tol and returns v, which is nonnegative by
/// construction (floored at cfg.floor where f > 0).
DenoiseResult denoise_tv(const Image2D& f, const SolverConfig& cfg);
DenoiseResult denoise_framelet(const Image2D& f, const FilterBank& bank, const SolverConfig& cfg);
DenoiseResult denoise(const Image2D& f, Model model, const SolverConfig& cfg);

}  // namespace tomokl
