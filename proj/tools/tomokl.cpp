// Command-line front end: one verb per pipeline stage plus the two batch
// experiments. Exit status 0 = success, 2 = a solver hit its iteration limit,
// 1 = any error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "tomokl/config.hpp"
#include "tomokl/experiments.hpp"
#include "tomokl/io.hpp"
#include "tomokl/metrics.hpp"
#include "tomokl/noise.hpp"
#include "tomokl/optimizer.hpp"
#include "tomokl/projector.hpp"
#include "tomokl/recon.hpp"

namespace fs = std::filesystem;
using namespace tomokl;

namespace {

struct Invocation {
    std::string config_file;
    std::vector<std::string> assignments;
    Config flags;
    bool quiet = false;

    Config effective() const {
        Config cfg;
        if (!config_file.empty()) cfg = Config::load(config_file);
        for (const std::string& a : assignments) cfg.set_assignment(a);
        cfg.merge(flags);
        return cfg;
    }
};

void flag(CLI::App* app, Invocation& inv, const std::string& name, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(name, [&inv, key](const std::string& v) { inv.flags.set(key, v); }, help);
}

void common_flags(CLI::App* app, Invocation& inv) {
    app->add_option("--config", inv.config_file, "key=value config file with [section] headers")->check(CLI::ExistingFile);
    app->add_option("--set", inv.assignments, "override any config key, e.g. --set solver.penalty=2");
    app->add_flag("--quiet", inv.quiet, "suppress progress messages");
    flag(app, inv, "--seed", "noise.seed", "noise / Monte-Carlo seed");
    flag(app, inv, "--dose", "noise.dose", "photon dose per unit line integral (inf disables noise)");
    flag(app, inv, "--model", "solver.models", "tv, haar, linear or cubic (bench: comma list)");
    flag(app, inv, "--alpha", "solver.alpha", "TV weight");
    flag(app, inv, "--lambda", "solver.lambda", "framelet weight");
    flag(app, inv, "--angles", "geometry.angles", "number of projection angles");
    flag(app, inv, "--detectors", "geometry.detectors", "number of detector cells");
    flag(app, inv, "--out", "experiment.out", "output file (stage verbs) or directory (bench, theory)");
}

std::string require(const Config& cfg, const std::string& key, const std::string& what) {
    if (!cfg.has(key)) throw std::invalid_argument("missing " + what + " (" + key + ")");
    return cfg.get(key, "");
}

fs::path pgm_preview(const fs::path& rm2) {
    fs::path p = rm2;
    p.replace_extension(".pgm");
    return p;
}

bool has_sidecar(const fs::path& p) { return fs::exists(sidecar_path(p)); }

int cmd_project(const Config& cfg) {
    const fs::path out = require(cfg, "experiment.out", "--out");
    const EllipsePhantom shape = phantom_by_name(cfg.get("experiment.phantom", "shepp-logan"));
    const std::size_t size = cfg.get_size("experiment.image_size", 256);
    const std::size_t angles = cfg.get_size("geometry.angles", 360);
    const std::size_t detectors = cfg.get_size("geometry.detectors", 509);
    const bool analytic = cfg.get_bool("geometry.analytic", false);
    const std::string kind = cfg.get("geometry.kind", "fan");
    const Image2D img = rasterize(shape, size, size);
    if (kind == "parallel") {
        const ParallelGeometry g = default_parallel_geometry(img.support_radius(), angles, detectors);
        const Sinogram s = analytic ? analytic_parallel_sinogram(shape, g) : parallel_project(img, g);
        write_sinogram(out, s);
        write_pgm(pgm_preview(out), s.data);
    } else if (kind == "fan") {
        const FanGeometry g = default_fan_geometry(img.support_radius(), angles, detectors,
                                                   cfg.get_double("geometry.source_radius", 3.0));
        const FanSinogram s = analytic ? analytic_fan_sinogram(shape, g) : fan_project(img, g);
        write_sinogram(out, s);
        write_pgm(pgm_preview(out), s.data);
    } else {
        throw std::invalid_argument("geometry.kind must be fan or parallel");
    }
    if (cfg.get_bool("experiment.write_phantom", true)) {
        fs::path ph = out;
        ph.replace_filename(out.stem().string() + "_phantom.rm2");
        write_rm2(ph, img);
    }
    return 0;
}

int cmd_noise(const Config& cfg) {
    const fs::path in = require(cfg, "io.in", "--in");
    const fs::path out = require(cfg, "experiment.out", "--out");
    const NoiseSpec spec{cfg.get_double("noise.dose", 128.0), cfg.get_u64("noise.seed", 1)};
    if (has_sidecar(in)) {
        std::visit([&](const auto& s) { write_sinogram(out, add_poisson(s, spec)); }, read_sinogram(in));
    } else {
        write_rm2(out, add_poisson(read_rm2(in), spec));
    }
    return 0;
}

int cmd_denoise(const Config& cfg, std::ostream& log) {
    const fs::path in = require(cfg, "io.in", "--in");
    const fs::path out = require(cfg, "experiment.out", "--out");
    const std::vector<std::string> models = cfg.get_list("solver.models", {"tv"});
    if (models.size() != 1) throw std::invalid_argument("denoise takes exactly one --model");
    const Model model = parse_model(models.front());
    SolverConfig sc;
    sc.alpha = cfg.get_double("solver.alpha", 0.15);
    sc.lambda = cfg.get_double("solver.lambda", 0.1);
    sc.penalty = cfg.get_double("solver.penalty", sc.penalty);
    sc.max_iters = cfg.get_size("solver.max_iters", sc.max_iters);
    sc.rel_tol = cfg.get_double("solver.rel_tol", sc.rel_tol);
    sc.levels = cfg.get_size("solver.levels", sc.levels);
    sc.record_trace = false;

    SolveReport report;
    if (has_sidecar(in)) {
        std::visit(
            [&](auto s) {
                DenoiseResult r = denoise(s.data, model, sc);
                report = r.report;
                s.data = std::move(r.image);
                write_sinogram(out, s);
            },
            read_sinogram(in));
    } else {
        DenoiseResult r = denoise(read_rm2(in), model, sc);
        report = r.report;
        write_rm2(out, r.image);
    }
    log << to_string(model) << ": " << report.iterations << " iterations, relative change "
        << format_real(report.final_rel_change) << (report.converged ? "" : " (not converged)") << '\n';
    return report.converged ? 0 : 2;
}

int cmd_recon(const Config& cfg) {
    const fs::path in = require(cfg, "io.in", "--in");
    const fs::path out = require(cfg, "experiment.out", "--out");
    FbpConfig fc;
    fc.window = parse_window(cfg.get("recon.window", "ram-lak"));
    fc.rows = fc.cols = cfg.get_size("experiment.image_size", 256);
    fc.circle_mask = cfg.get_bool("recon.circle_mask", false);
    const Image2D img = std::visit(
        [&](const auto& s) -> Image2D {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, FanSinogram>)
                return reconstruct_fan(s, fc);
            else
                return fbp_parallel(s, fc);
        },
        read_sinogram(in));
    write_rm2(out, img);
    write_pgm(pgm_preview(out), img);
    return 0;
}

int cmd_metrics(const Config& cfg) {
    const fs::path in = require(cfg, "io.in", "--in");
    const fs::path ref = require(cfg, "io.ref", "--ref");
    const MetricReport r = evaluate(read_rm2(in), read_rm2(ref), in.stem().string());
    const std::vector<CsvRow> rows{{"metrics", r.label, "snr_db", r.snr_text()},
                                   {"metrics", r.label, "frobenius", format_real(r.frobenius)}};
    const std::string csv = render_csv(rows, cfg.hash());
    const std::string out = cfg.get("experiment.out", "");
    if (out.empty()) {
        std::cout << csv;
    } else {
        std::ofstream os(out, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open " + out);
        os << csv;
    }
    return 0;
}

int cmd_bench(const Config& cfg, std::ostream& log) {
    const Denoise2dSpec spec = Denoise2dSpec::from_config(cfg);
    if (spec.out.empty()) throw std::invalid_argument("bench needs --out <directory>");
    fs::create_directories(spec.out);
    {
        std::ofstream os(spec.out / "config.txt", std::ios::binary);
        os << "# config_hash=" << cfg.hash() << '\n' << cfg.canonical();
    }
    const Denoise2dResult r = run_denoise2d(spec, cfg.hash(), &log);
    log << "noisy sinogram SNR " << r.noisy.snr_text() << " dB, reconstruction error " << format_real(r.noisy_recon_error)
        << '\n';
    for (const ModelOutcome& m : r.models)
        log << to_string(m.model) << ": sinogram SNR " << m.sinogram.snr_text() << " dB, reconstruction error "
            << format_real(m.recon_error) << '\n';
    if (r.exit_code() != 0) log << "warning: at least one solver stopped at its iteration limit\n";
    return r.exit_code();
}

int cmd_theory(const Config& cfg, std::ostream& log) {
    const TheorySpec spec = TheorySpec::from_config(cfg);
    if (spec.out.empty()) throw std::invalid_argument("theory needs --out <directory>");
    run_theory(spec, cfg.hash(), &log);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tomokl: transmission tomography denoising and reconstruction experiments"};
    app.require_subcommand(1);
    Invocation inv;

    auto* project = app.add_subcommand("project", "rasterize a phantom and compute its sinogram");
    auto* noise = app.add_subcommand("noise", "add seeded Poisson noise to a sinogram or image");
    auto* den = app.add_subcommand("denoise", "KL-TV or KL-framelet denoising");
    auto* recon = app.add_subcommand("recon", "filtered backprojection (fan data is rebinned)");
    auto* metrics = app.add_subcommand("metrics", "SNR and Frobenius error of an image against a reference");
    auto* theory = app.add_subcommand("theory", "singular-direction and jump-refinement experiments");
    auto* bench = app.add_subcommand("bench", "full fan-beam denoising benchmark");
    for (CLI::App* sub : {project, noise, den, recon, metrics, theory, bench}) common_flags(sub, inv);
    for (CLI::App* sub : {noise, den, recon, metrics}) flag(sub, inv, "--in", "io.in", "input RM2 file");
    flag(metrics, inv, "--ref", "io.ref", "reference RM2 file");
    for (CLI::App* sub : {project, bench}) flag(sub, inv, "--phantom", "experiment.phantom", "phantom name");
    for (CLI::App* sub : {project, recon, bench}) flag(sub, inv, "--size", "experiment.image_size", "image side length");
    flag(project, inv, "--geometry", "geometry.kind", "fan or parallel");
    for (CLI::App* sub : {project, bench})
        flag(sub, inv, "--source-radius", "geometry.source_radius", "fan source distance from the origin");
    for (CLI::App* sub : {recon, bench}) flag(sub, inv, "--window", "recon.window", "ram-lak or hamming");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const Config cfg = inv.effective();
        std::ostream null_stream(nullptr);
        std::ostream& log = inv.quiet ? null_stream : std::cerr;
        if (*project) return cmd_project(cfg);
        if (*noise) return cmd_noise(cfg);
        if (*den) return cmd_denoise(cfg, log);
        if (*recon) return cmd_recon(cfg);
        if (*metrics) return cmd_metrics(cfg);
        if (*theory) return cmd_theory(cfg, log);
        if (*bench) return cmd_bench(cfg, log);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
