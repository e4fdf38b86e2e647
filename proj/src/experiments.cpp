#include "tomokl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "tomokl/io.hpp"
#include "tomokl/noise.hpp"
#include "tomokl/projector.hpp"
#include "tomokl/volume.hpp"

namespace tomokl {

namespace {

void note(std::ostream* log, const std::string& msg) {
    if (log) *log << msg << '\n' << std::flush;
}

Image2D row_image(const Image2D& img, std::size_t row) {
    Image2D out(1, img.cols(), img.spacing());
    auto src = img.row(row);
    std::copy(src.begin(), src.end(), out.data().begin());
    return out;
}

std::vector<MetricReport> projection_reports(const Image2D& u, const Image2D& u0, const std::vector<std::size_t>& rows) {
    std::vector<MetricReport> out;
    for (std::size_t r : rows) out.push_back(evaluate(row_image(u, r), row_image(u0, r), "projection " + std::to_string(r)));
    return out;
}

void write_image(const std::filesystem::path& dir, const std::string& stem, const Image2D& img, bool pgm) {
    write_rm2(dir / (stem + ".rm2"), img);
    if (pgm) write_pgm(dir / (stem + ".pgm"), img);
}

void write_fan(const std::filesystem::path& dir, const std::string& stem, const FanSinogram& s, bool pgm) {
    write_sinogram(dir / (stem + ".rm2"), s);
    if (pgm) write_pgm(dir / (stem + ".pgm"), s.data);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << text;
    if (!os) throw std::runtime_error("write failed for " + path.string());
}

std::string weight_key(Model m) { return m == Model::TV ? "alpha" : "lambda"; }

Vec3 parse_vec3(const Config& cfg, const std::string& key, Vec3 fallback) {
    if (!cfg.has(key)) return fallback;
    const std::vector<double> v = cfg.get_doubles(key, {});
    if (v.size() != 3) throw std::invalid_argument(key + ": expected three comma-separated numbers");
    return {v[0], v[1], v[2]};
}

void add_metric_rows(std::vector<CsvRow>& rows, const std::string& item, const MetricReport& whole,
                     const std::vector<MetricReport>& per_projection, const std::vector<std::size_t>& which) {
    rows.push_back({"denoise2d", item, "snr_db", whole.snr_text()});
    for (std::size_t k = 0; k < which.size(); ++k)
        rows.push_back({"denoise2d", item, "snr_db_projection_" + std::to_string(which[k]), per_projection[k].snr_text()});
}

}  // namespace

EllipsePhantom phantom_by_name(const std::string& name) {
    if (name == "shepp-logan") return standard_shepp_logan();
    if (name == "shepp-logan-original") return original_shepp_logan();
    if (name == "disk") return disk_phantom(0.8, 1.0);
    throw std::invalid_argument("unknown phantom '" + name + "' (expected shepp-logan, shepp-logan-original or disk)");
}

std::string render_csv(const std::vector<CsvRow>& rows, const std::string& config_hash) {
    std::ostringstream os;
    write_csv_header(os);
    for (const CsvRow& r : rows) write_csv_row(os, r.experiment, r.item, r.metric, r.value, config_hash);
    return os.str();
}

SolverConfig with_weight(SolverConfig cfg, Model model, double weight) {
    if (model == Model::TV)
        cfg.alpha = weight;
    else
        cfg.lambda = weight;
    return cfg;
}

TuningResult tune_weight(const Image2D& noisy, const Image2D& clean, Model model, const SolverConfig& base,
                         const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("tune_weight: empty grid");
    for (double w : grid)
        if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("tune_weight: grid weights must be positive");
    std::vector<double> sorted = grid;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    TuningResult res;
    auto score = [&](double w) {
        SolverConfig c = with_weight(base, model, w);
        c.record_trace = false;
        const double s = snr(denoise(noisy, model, c).image, clean);
        res.trace.push_back({w, s});
        if (res.trace.size() == 1 || s > res.best_snr) {
            res.best_snr = s;
            res.best_weight = w;
        }
    };
    for (double w : sorted) score(w);
    if (sorted.size() < 2) return res;

    double ratio = std::exp(std::log(sorted.back() / sorted.front()) / double(sorted.size() - 1));
    for (int refine = 0; refine < 2; ++refine) {
        ratio = std::sqrt(ratio);
        const double center = res.best_weight;
        score(center / ratio);
        score(center * ratio);
    }
    return res;
}

Denoise2dSpec Denoise2dSpec::from_config(const Config& cfg) {
    Denoise2dSpec s;
    s.phantom = cfg.get("experiment.phantom", s.phantom);
    s.image_size = cfg.get_size("experiment.image_size", s.image_size);
    s.out = cfg.get("experiment.out", "");
    s.write_images = cfg.get_bool("experiment.write_images", s.write_images);
    s.angles = cfg.get_size("geometry.angles", s.angles);
    s.detectors = cfg.get_size("geometry.detectors", s.detectors);
    s.source_radius = cfg.get_double("geometry.source_radius", s.source_radius);
    s.dose = cfg.get_double("noise.dose", s.dose);
    s.seed = cfg.get_u64("noise.seed", s.seed);
    if (cfg.has("solver.models")) {
        s.models.clear();
        for (const std::string& m : cfg.get_list("solver.models", {})) s.models.push_back(parse_model(m));
    }
    // A single alpha/lambda applies to every model of that family; the
    // per-model keys (solver.tv, solver.cubic, ...) take precedence.
    for (Model m : s.models) {
        const std::string family = "solver." + weight_key(m);
        const std::string own = "solver." + to_string(m);
        if (cfg.has(own))
            s.weights[m] = cfg.get_double(own, 0.0);
        else if (cfg.has(family))
            s.weights[m] = cfg.get_double(family, 0.0);
    }
    s.tune_grid = cfg.get_doubles("solver.tune_grid", s.tune_grid);
    s.solver.penalty = cfg.get_double("solver.penalty", s.solver.penalty);
    s.solver.max_iters = cfg.get_size("solver.max_iters", s.solver.max_iters);
    s.solver.rel_tol = cfg.get_double("solver.rel_tol", s.solver.rel_tol);
    s.solver.levels = cfg.get_size("solver.levels", s.solver.levels);
    s.solver.record_trace = false;
    s.projections = cfg.get_sizes("experiment.projections", s.projections);
    s.fbp.window = parse_window(cfg.get("recon.window", to_string(s.fbp.window)));
    s.fbp.rows = s.fbp.cols = s.image_size;
    s.fbp.circle_mask = cfg.get_bool("recon.circle_mask", s.fbp.circle_mask);
    return s;
}

void Denoise2dSpec::validate() const {
    phantom_by_name(phantom);
    if (image_size < 2) throw std::invalid_argument("denoise2d: image size must be at least 2");
    if (angles < 4 || detectors < 2) throw std::invalid_argument("denoise2d: need at least 4 angles and 2 detectors");
    if (!(dose > 0.0)) throw std::invalid_argument("denoise2d: dose must be positive");
    if (models.empty()) throw std::invalid_argument("denoise2d: no models selected");
    for (std::size_t p : projections)
        if (p >= angles) throw std::invalid_argument("denoise2d: projection index " + std::to_string(p) + " out of range");
    for (const auto& [m, w] : weights) with_weight(solver, m, w).validate(m);
    fbp.validate();
}

Denoise2dResult run_denoise2d(const Denoise2dSpec& spec, const std::string& config_hash, std::ostream* log) {
    spec.validate();
    const bool noisy_run = std::isfinite(spec.dose);
    const bool write = !spec.out.empty();
    if (write) std::filesystem::create_directories(spec.out);

    const EllipsePhantom shape = phantom_by_name(spec.phantom);
    const Image2D phantom = rasterize(shape, spec.image_size, spec.image_size);
    const FanGeometry geom = default_fan_geometry(phantom.support_radius(), spec.angles, spec.detectors,
                                                  spec.source_radius);
    note(log, "projecting " + std::to_string(spec.angles) + "x" + std::to_string(spec.detectors) + " fan sinogram");
    const FanSinogram clean = fan_project(phantom, geom);
    const FanSinogram noisy = noisy_run ? add_poisson(clean, {spec.dose, spec.seed}) : clean;

    FbpConfig fbp = spec.fbp;
    fbp.pixel_spacing = phantom.spacing();
    Denoise2dResult res;
    res.noisy = evaluate(noisy.data, clean.data, "noisy");
    res.noisy_projections = projection_reports(noisy.data, clean.data, spec.projections);
    const Image2D recon_clean = reconstruct_fan(clean, fbp);
    const Image2D recon_noisy = reconstruct_fan(noisy, fbp);
    res.clean_recon_error = frobenius_error(recon_clean, phantom);
    res.noisy_recon_error = frobenius_error(recon_noisy, phantom);

    add_metric_rows(res.rows, "noisy", res.noisy, res.noisy_projections, spec.projections);
    res.rows.push_back({"denoise2d", "clean", "recon_frobenius", format_real(res.clean_recon_error)});
    res.rows.push_back({"denoise2d", "noisy", "recon_frobenius", format_real(res.noisy_recon_error)});

    if (write) {
        write_image(spec.out, "phantom", phantom, spec.write_images);
        write_fan(spec.out, "sinogram_clean", clean, spec.write_images);
        write_fan(spec.out, "sinogram_noisy", noisy, spec.write_images);
        write_image(spec.out, "recon_clean", recon_clean, spec.write_images);
        write_image(spec.out, "recon_noisy", recon_noisy, spec.write_images);
    }

    // Weights are tuned on an independent noise draw of the same sinogram so
    // the evaluation data never enters the parameter choice.
    const FanSinogram heldout = noisy_run ? add_poisson(clean, {spec.dose, spec.seed + 1}) : clean;

    for (Model model : spec.models) {
        ModelOutcome mo;
        mo.model = model;
        const std::string name = to_string(model);
        if (!noisy_run) {
            // Exact data: nothing to denoise, the sinogram passes through.
            mo.denoised = noisy.data;
            mo.report.converged = true;
        } else {
            const auto fixed = spec.weights.find(model);
            if (fixed != spec.weights.end()) {
                mo.weight = fixed->second;
            } else {
                note(log, "tuning " + name);
                const TuningResult t = tune_weight(heldout.data, clean.data, model, spec.solver, spec.tune_grid);
                mo.weight = t.best_weight;
                mo.tuned = true;
                for (const TuningPoint& p : t.trace)
                    res.rows.push_back({"tune", name, weight_key(model) + "=" + format_real(p.weight), format_real(p.snr_db)});
            }
            note(log, "denoising " + name + " with " + weight_key(model) + " = " + format_real(mo.weight));
            DenoiseResult d = denoise(noisy.data, model, with_weight(spec.solver, model, mo.weight));
            mo.report = std::move(d.report);
            mo.denoised = std::move(d.image);
        }
        mo.sinogram = evaluate(mo.denoised, clean.data, name);
        mo.projections = projection_reports(mo.denoised, clean.data, spec.projections);
        mo.recon = reconstruct_fan(FanSinogram{geom, mo.denoised}, fbp);
        mo.recon_error = frobenius_error(mo.recon, phantom);
        res.all_converged = res.all_converged && mo.report.converged;

        add_metric_rows(res.rows, name, mo.sinogram, mo.projections, spec.projections);
        res.rows.push_back({"denoise2d", name, "recon_frobenius", format_real(mo.recon_error)});
        res.rows.push_back({"denoise2d", name, weight_key(model), format_real(mo.weight)});
        res.rows.push_back({"denoise2d", name, "iterations", std::to_string(mo.report.iterations)});
        res.rows.push_back({"denoise2d", name, "final_rel_change", format_real(mo.report.final_rel_change)});
        res.rows.push_back({"denoise2d", name, "converged", mo.report.converged ? "1" : "0"});
        res.rows.push_back({"denoise2d", name, "objective_input", format_real(mo.report.initial_objective)});
        res.rows.push_back({"denoise2d", name, "objective_output", format_real(mo.report.final_objective)});
        if (write) {
            write_fan(spec.out, "sinogram_" + name, FanSinogram{geom, mo.denoised}, spec.write_images);
            write_image(spec.out, "recon_" + name, mo.recon, spec.write_images);
        }
        res.models.push_back(std::move(mo));
    }
    if (write) write_text(spec.out / "results.csv", render_csv(res.rows, config_hash));
    return res;
}

TheorySpec TheorySpec::from_config(const Config& cfg) {
    TheorySpec s;
    s.surfaces = cfg.get_list("theory.surfaces", s.surfaces);
    s.tols = cfg.get_doubles("theory.tols", s.tols);
    s.samples = cfg.get_size("theory.samples", s.samples);
    s.seed = cfg.get_u64("theory.seed", cfg.get_u64("noise.seed", s.seed));
    s.singular.eps0 = cfg.get_double("theory.eps0", s.singular.eps0);
    s.singular.ray_samples = cfg.get_size("theory.ray_samples", s.singular.ray_samples);
    s.singular.grid_u = cfg.get_size("theory.grid", s.singular.grid_u);
    s.singular.grid_v = s.singular.grid_u;
    s.volume_n = cfg.get_size("theory.volume_n", s.volume_n);
    s.cube_half_side = cfg.get_double("theory.cube_half_side", s.cube_half_side);
    s.ball_radius = cfg.get_double("theory.ball_radius", s.ball_radius);
    s.detectors = cfg.get_sizes("theory.detectors", s.detectors);
    s.detector_width = cfg.get_double("theory.detector_width", s.detector_width);
    s.generic_direction = parse_vec3(cfg, "theory.generic_direction", s.generic_direction);
    s.axis_direction = parse_vec3(cfg, "theory.axis_direction", s.axis_direction);
    s.out = cfg.get("experiment.out", "");
    return s;
}

void TheorySpec::validate() const {
    for (const std::string& name : surfaces) shipped_surface(name);
    if (tols.empty()) throw std::invalid_argument("theory: empty tolerance ladder");
    for (double t : tols)
        if (!(t > 0.0)) throw std::invalid_argument("theory: tolerances must be positive");
    if (samples == 0) throw std::invalid_argument("theory: need at least one direction sample");
    if (volume_n < 2) throw std::invalid_argument("theory: volume grid too small");
    if (detectors.empty()) throw std::invalid_argument("theory: empty detector ladder");
    if (!(detector_width > 0.0)) throw std::invalid_argument("theory: detector width must be positive");
}

TheoryResult run_theory(const TheorySpec& spec, const std::string& config_hash, std::ostream* log) {
    spec.validate();
    TheoryResult res;
    for (const std::string& name : spec.surfaces) {
        note(log, "singular directions: " + name);
        const std::vector<double> f =
            singular_direction_ladder(shipped_surface(name), spec.samples, spec.tols, spec.seed, spec.singular);
        for (std::size_t k = 0; k < f.size(); ++k)
            res.rows.push_back({"singular_fraction", name, "tol=" + format_real(spec.tols[k]), format_real(f[k])});
        res.fractions[name] = f;
    }

    auto ladder = [&](const std::string& item, const Volume3D& vol, Vec3 dir, std::vector<double>& out) {
        note(log, "jump refinement: " + item);
        out = jump_refinement(vol, dir, spec.detectors, spec.detector_width);
        for (std::size_t k = 0; k < out.size(); ++k)
            res.rows.push_back({"jump_refinement", item, "max_jump_n=" + std::to_string(spec.detectors[k]), format_real(out[k])});
        for (std::size_t k = 1; k < out.size(); ++k)
            res.rows.push_back({"jump_refinement", item,
                                "ratio_" + std::to_string(spec.detectors[k - 1]) + "_" + std::to_string(spec.detectors[k]),
                                out[k - 1] > 0.0 ? format_real(out[k] / out[k - 1]) : "undefined"});
    };
    const Volume3D cube = voxelize_cube(spec.volume_n, spec.cube_half_side);
    ladder("cube_generic", cube, spec.generic_direction, res.cube_generic);
    ladder("cube_axis", cube, spec.axis_direction, res.cube_axis);
    ladder("ball_generic", voxelize_ball(spec.volume_n, spec.ball_radius), spec.generic_direction, res.ball);

    if (!spec.out.empty()) {
        std::filesystem::create_directories(spec.out);
        write_text(spec.out / "theory.csv", render_csv(res.rows, config_hash));
    }
    return res;
}

}  // namespace tomokl
