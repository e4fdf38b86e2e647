#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tomokl/config.hpp"
#include "tomokl/geometry.hpp"
#include "tomokl/metrics.hpp"
#include "tomokl/optimizer.hpp"
#include "tomokl/phantom.hpp"
#include "tomokl/recon.hpp"

namespace tomokl {

/// "shepp-logan" (modified densities), "shepp-logan-original" or "disk".
EllipsePhantom phantom_by_name(const std::string& name);

/// One CSV row of an experiment table.
struct CsvRow {
    std::string experiment, item, metric, value;
};

std::string render_csv(const std::vector<CsvRow>& rows, const std::string& config_hash);

struct TuningPoint {
    double weight;
    double snr_db;
};

/// Log-grid search of the model weight (alpha for TV, lambda otherwise)
/// maximizing SNR(denoise(noisy), clean), followed by two refinements around
/// the best grid point at the square and fourth root of the grid ratio.
struct TuningResult {
    double best_weight = 0.0;
    double best_snr = 0.0;
    std::vector<TuningPoint> trace;
};

TuningResult tune_weight(const Image2D& noisy, const Image2D& clean, Model model, const SolverConfig& base,
                         const std::vector<double>& grid);

SolverConfig with_weight(SolverConfig cfg, Model model, double weight);

struct Denoise2dSpec {
    std::string phantom = "shepp-logan";
    std::size_t image_size = 256;
    std::size_t angles = 360;
    std::size_t detectors = 509;
    double source_radius = 3.0;
    double dose = 128.0;  // infinite dose disables the noise step
    std::uint64_t seed = 1;
    std::vector<Model> models{Model::TV, Model::Linear, Model::Cubic};
    std::map<Model, double> weights;  // fixed weights; other models are tuned
    std::vector<double> tune_grid{0.02, 0.04, 0.08, 0.16, 0.32, 0.64};
    SolverConfig solver;              // penalty, iteration limits and levels
    std::vector<std::size_t> projections{100, 200, 300};
    FbpConfig fbp;
    std::filesystem::path out;        // empty: compute only, write nothing
    bool write_images = true;

    static Denoise2dSpec from_config(const Config& cfg);
    void validate() const;
};

struct ModelOutcome {
    Model model = Model::TV;
    double weight = 0.0;
    bool tuned = false;
    SolveReport report;
    MetricReport sinogram;                  // whole fan sinogram
    std::vector<MetricReport> projections;  // one per requested view
    double recon_error = 0.0;
    Image2D denoised;
    Image2D recon;
};

struct Denoise2dResult {
    MetricReport noisy;
    std::vector<MetricReport> noisy_projections;
    double clean_recon_error = 0.0;
    double noisy_recon_error = 0.0;
    std::vector<ModelOutcome> models;
    std::vector<CsvRow> rows;
    bool all_converged = true;
    int exit_code() const noexcept { return all_converged ? 0 : 2; }
};

/// Phantom -> fan sinogram -> Poisson noise -> denoising per model -> fan
/// reconstruction. Writes RM2/PGM artifacts and results.csv when spec.out is set.
Denoise2dResult run_denoise2d(const Denoise2dSpec& spec, const std::string& config_hash, std::ostream* log = nullptr);

struct TheorySpec {
    std::vector<std::string> surfaces{"sphere", "cylinder", "saddle", "torus"};
    std::vector<double> tols{0.1, 0.05, 0.025, 0.0125};
    std::size_t samples = 20000;
    std::uint64_t seed = 1;
    SingularityOptions singular;
    std::size_t volume_n = 64;
    double cube_half_side = 0.5;
    double ball_radius = 0.5;
    std::vector<std::size_t> detectors{128, 256, 512};
    double detector_width = 3.8;
    Vec3 generic_direction{1.0, 0.41, 0.73};
    Vec3 axis_direction{0.0, 0.0, 1.0};
    std::filesystem::path out;

    static TheorySpec from_config(const Config& cfg);
    void validate() const;
};

struct TheoryResult {
    std::map<std::string, std::vector<double>> fractions;  // per surface, along tols
    std::vector<double> cube_generic, cube_axis, ball;     // max jump per detector count
    std::vector<CsvRow> rows;
};

TheoryResult run_theory(const TheorySpec& spec, const std::string& config_hash, std::ostream* log = nullptr);

}  // namespace tomokl
