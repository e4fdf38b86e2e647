#include "tomokl/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "tomokl/fft.hpp"

namespace tomokl {

Model parse_model(std::string_view name) {
    if (name == "tv") return Model::TV;
    if (name == "haar") return Model::Haar;
    if (name == "linear") return Model::Linear;
    if (name == "cubic") return Model::Cubic;
    throw std::invalid_argument("unknown model '" + std::string(name) + "' (expected tv, haar, linear or cubic)");
}

std::string to_string(Model m) {
    switch (m) {
        case Model::TV: return "tv";
        case Model::Haar: return "haar";
        case Model::Linear: return "linear";
        case Model::Cubic: return "cubic";
    }
    return "?";
}

FrameletKind framelet_of(Model m) {
    switch (m) {
        case Model::Haar: return FrameletKind::Haar;
        case Model::Linear: return FrameletKind::Linear;
        case Model::Cubic: return FrameletKind::Cubic;
        case Model::TV: break;
    }
    throw std::invalid_argument("framelet_of: TV has no filter bank");
}

void SolverConfig::validate(Model model) const {
    if (model == Model::TV) {
        if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("SolverConfig: alpha must be positive");
    } else {
        if (!(lambda >= 0.0) || !std::isfinite(lambda))
            throw std::invalid_argument("SolverConfig: lambda must be nonnegative");
        for (double w : band_weights)
            if (!(w >= 0.0) || !std::isfinite(w))
                throw std::invalid_argument("SolverConfig: band weights must be nonnegative");
    }
    if (!(penalty > 0.0) || !std::isfinite(penalty)) throw std::invalid_argument("SolverConfig: penalty must be positive");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("SolverConfig: rel_tol must be positive");
    if (!(floor > 0.0)) throw std::invalid_argument("SolverConfig: floor must be positive");
    if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be at least 1");
    if (levels < 1) throw std::invalid_argument("SolverConfig: levels must be at least 1");
}

VectorField grad(const Image2D& u) {
    const std::size_t m = u.rows(), n = u.cols();
    VectorField g{Image2D(m, n, u.spacing()), Image2D(m, n, u.spacing())};
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t ip = (i + 1) % m;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t jp = (j + 1) % n;
            g.dx(i, j) = u(i, jp) - u(i, j);
            g.dy(i, j) = u(ip, j) - u(i, j);
        }
    }
    return g;
}

Image2D divergence(const VectorField& p) {
    require_same_shape(p.dx, p.dy, "divergence");
    const std::size_t m = p.dx.rows(), n = p.dx.cols();
    Image2D out(m, n, p.dx.spacing());
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t im = (i + m - 1) % m;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t jm = (j + n - 1) % n;
            out(i, j) = p.dx(i, j) - p.dx(i, jm) + p.dy(i, j) - p.dy(im, j);
        }
    }
    return out;
}

double tv(const Image2D& u) {
    const VectorField g = grad(u);
    auto gx = g.dx.data();
    auto gy = g.dy.data();
    double acc = 0.0;
    for (std::size_t k = 0; k < gx.size(); ++k) acc += std::hypot(gx[k], gy[k]);
    return acc;
}

double kl_objective(const Image2D& u, const Image2D& f) {
    require_same_shape(u, f, "kl_objective");
    auto ud = u.data();
    auto fd = f.data();
    double acc = 0.0;
    for (std::size_t k = 0; k < ud.size(); ++k) {
        if (ud[k] > 0.0) {
            acc += ud[k] - (fd[k] > 0.0 ? fd[k] * std::log(ud[k]) : 0.0);
        } else if (fd[k] > 0.0) {
            return std::numeric_limits<double>::infinity();
        }
    }
    return acc;
}

double shrink(double x, double t) {
    const double mag = std::abs(x) - t;
    return mag > 0.0 ? std::copysign(mag, x) : 0.0;
}

std::array<double, 2> shrink(std::array<double, 2> x, double t) {
    const double n = std::hypot(x[0], x[1]);
    if (!(n > t)) return {0.0, 0.0};
    const double s = (n - t) / n;
    return {x[0] * s, x[1] * s};
}

namespace {

// Root of u^2 - (z - beta) u - beta f = 0, written without cancellation.
inline double kl_prox_unchecked(double z, double f, double beta) {
    const double w = z - beta;
    const double disc = std::sqrt(w * w + 4.0 * beta * f);
    if (w >= 0.0) return 0.5 * (w + disc);
    const double den = disc - w;
    return den > 0.0 ? 2.0 * beta * f / den : 0.0;
}

void require_valid_data(const Image2D& f, const char* who) {
    if (f.empty()) throw std::invalid_argument(std::string(who) + ": empty input");
    for (double v : f.data())
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument(std::string(who) + ": data must be finite and nonnegative");
}

double relative_change(std::span<const double> now, std::span<const double> before) {
    double diff = 0.0, ref = 0.0;
    for (std::size_t k = 0; k < now.size(); ++k) {
        const double d = now[k] - before[k];
        diff += d * d;
        ref += now[k] * now[k];
    }
    if (ref == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(diff / ref);
}

// Nonnegative output with positive-data pixels held off zero.
void apply_floor(Image2D& v, const Image2D& f, double eps) {
    auto vd = v.data();
    auto fd = f.data();
    for (std::size_t k = 0; k < vd.size(); ++k) vd[k] = fd[k] > 0.0 ? std::max(vd[k], eps) : std::max(vd[k], 0.0);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

double kl_prox(double z, double f, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("kl_prox: beta must be positive");
    if (!(f >= 0.0)) throw std::invalid_argument("kl_prox: f must be nonnegative");
    return kl_prox_unchecked(z, f, beta);
}

double objective_tv(const Image2D& u, const Image2D& f, double alpha) {
    require_same_shape(u, f, "objective_tv");
    return alpha * tv(u) + kl_objective(u, f);
}

std::vector<double> band_weights(const FilterBank& bank, const SolverConfig& cfg) {
    const std::size_t per_level = bank.size() * bank.size();
    const std::size_t total = per_level * cfg.levels;
    if (!cfg.band_weights.empty()) {
        if (cfg.band_weights.size() != total)
            throw std::invalid_argument("band_weights: expected " + std::to_string(total) + " entries");
        return cfg.band_weights;
    }
    std::vector<double> w(total, cfg.lambda);
    for (std::size_t level = 0; level < cfg.levels; ++level) w[level * per_level] = 0.0;
    return w;
}

double objective_framelet(const Image2D& u, const Image2D& f, const FilterBank& bank, const SolverConfig& cfg) {
    require_same_shape(u, f, "objective_framelet");
    const std::vector<double> w = band_weights(bank, cfg);
    const FrameCoefficients c = decompose(u, bank, cfg.levels);
    double reg = 0.0;
    std::size_t b = 0;
    for (const auto& level : c.bands)
        for (const auto& band : level) {
            const double wb = w[b++];
            if (wb == 0.0) continue;
            double l1 = 0.0;
            for (double x : band.data()) l1 += std::abs(x);
            reg += wb * l1;
        }
    return reg + kl_objective(u, f);
}

double objective(const Image2D& u, const Image2D& f, Model model, const SolverConfig& cfg) {
    if (model == Model::TV) return objective_tv(u, f, cfg.alpha);
    return objective_framelet(u, f, filter_bank(framelet_of(model)), cfg);
}

DenoiseResult denoise_tv(const Image2D& f, const SolverConfig& cfg) {
    cfg.validate(Model::TV);
    require_valid_data(f, "denoise_tv");
    const auto t_start = std::chrono::steady_clock::now();
    const std::size_t m = f.rows(), n = f.cols(), mn = m * n;
    const double r = cfg.penalty;
    const double beta = 1.0 / r;
    const double thresh = cfg.alpha / r;

    // Symbol of I + grad^T grad under periodic boundary conditions.
    RealFft fft(m, n);
    const std::size_t nc = fft.spectrum_cols();
    std::vector<double> inv_symbol(m * nc);
    for (std::size_t k = 0; k < m; ++k) {
        const double sk = std::sin(std::numbers::pi * double(k) / double(m));
        for (std::size_t l = 0; l < nc; ++l) {
            const double sl = std::sin(std::numbers::pi * double(l) / double(n));
            inv_symbol[k * nc + l] = 1.0 / ((1.0 + 4.0 * sk * sk + 4.0 * sl * sl) * double(mn));
        }
    }

    Image2D u = f;
    Image2D u_prev = f;
    Image2D v = f;
    Image2D bv(m, n, f.spacing());
    VectorField d{Image2D(m, n, f.spacing()), Image2D(m, n, f.spacing())};
    VectorField bd = d;
    VectorField tmp{Image2D(m, n, f.spacing()), Image2D(m, n, f.spacing())};
    auto fd = f.data();

    DenoiseResult res;
    res.report.initial_objective = objective_tv(f, f, cfg.alpha);
    double change = std::numeric_limits<double>::infinity();
    std::size_t it = 0;
    while (it < cfg.max_iters) {
        ++it;
        // u-step: (I + grad^T grad) u = -div(d - bd) + (v - bv)
        for (std::size_t k = 0; k < mn; ++k) {
            tmp.dx.data()[k] = d.dx.data()[k] - bd.dx.data()[k];
            tmp.dy.data()[k] = d.dy.data()[k] - bd.dy.data()[k];
        }
        const Image2D div = divergence(tmp);
        auto in = fft.real();
        for (std::size_t k = 0; k < mn; ++k) in[k] = -div.data()[k] + v.data()[k] - bv.data()[k];
        fft.forward();
        auto spec = fft.spectrum();
        for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= inv_symbol[k];
        fft.inverse();
        std::copy(u.data().begin(), u.data().end(), u_prev.data().begin());
        std::copy(in.begin(), in.end(), u.data().begin());

        // d-step: isotropic shrinkage of grad u + bd
        const VectorField gu = grad(u);
        for (std::size_t k = 0; k < mn; ++k) {
            const auto s = shrink({gu.dx.data()[k] + bd.dx.data()[k], gu.dy.data()[k] + bd.dy.data()[k]}, thresh);
            d.dx.data()[k] = s[0];
            d.dy.data()[k] = s[1];
        }
        // v-step: KL proximal map; then multiplier updates
        for (std::size_t k = 0; k < mn; ++k) {
            v.data()[k] = kl_prox_unchecked(u.data()[k] + bv.data()[k], fd[k], beta);
            bv.data()[k] += u.data()[k] - v.data()[k];
            bd.dx.data()[k] += gu.dx.data()[k] - d.dx.data()[k];
            bd.dy.data()[k] += gu.dy.data()[k] - d.dy.data()[k];
        }
        change = relative_change(u.data(), u_prev.data());
        if (cfg.record_trace) res.report.objective_trace.push_back(objective_tv(v, f, cfg.alpha));
        if (change <= cfg.rel_tol) break;
    }
    apply_floor(v, f, cfg.floor);
    res.report.iterations = it;
    res.report.final_rel_change = change;
    res.report.converged = change <= cfg.rel_tol;
    res.report.final_objective = objective_tv(v, f, cfg.alpha);
    res.report.wall_seconds = seconds_since(t_start);
    res.image = std::move(v);
    return res;
}

DenoiseResult denoise_framelet(const Image2D& f, const FilterBank& bank, const SolverConfig& cfg) {
    cfg.validate(Model::Haar);
    require_valid_data(f, "denoise_framelet");
    const auto t_start = std::chrono::steady_clock::now();
    const std::size_t mn = f.size();
    const double r = cfg.penalty;
    const double beta = 1.0 / r;
    const std::vector<double> w = band_weights(bank, cfg);

    Image2D u = f;
    Image2D u_prev = f;
    Image2D v = f;
    Image2D bv(f.rows(), f.cols(), f.spacing());
    FrameCoefficients d = decompose(f, bank, cfg.levels);
    for (auto& level : d.bands)
        for (auto& band : level) std::fill(band.data().begin(), band.data().end(), 0.0);
    FrameCoefficients bd = d;
    FrameCoefficients rhs = d;
    auto fd = f.data();

    DenoiseResult res;
    res.report.initial_objective = objective_framelet(f, f, bank, cfg);
    double change = std::numeric_limits<double>::infinity();
    std::size_t it = 0;
    while (it < cfg.max_iters) {
        ++it;
        // u-step: (W^T W + I) u = W^T (d - bd) + (v - bv), and W^T W = I.
        for (std::size_t l = 0; l < d.levels(); ++l)
            for (std::size_t b = 0; b < d.bands[l].size(); ++b) {
                auto dst = rhs.bands[l][b].data();
                auto dd = d.bands[l][b].data();
                auto bb = bd.bands[l][b].data();
                for (std::size_t k = 0; k < mn; ++k) dst[k] = dd[k] - bb[k];
            }
        std::swap(u, u_prev);
        u = reconstruct(rhs, bank);
        for (std::size_t k = 0; k < mn; ++k) u.data()[k] = 0.5 * (u.data()[k] + v.data()[k] - bv.data()[k]);

        // d-step: bandwise soft thresholding of W u + bd, then multipliers.
        const FrameCoefficients wu = decompose(u, bank, cfg.levels);
        std::size_t band_index = 0;
        for (std::size_t l = 0; l < d.levels(); ++l)
            for (std::size_t b = 0; b < d.bands[l].size(); ++b) {
                const double t = w[band_index++] / r;
                auto dd = d.bands[l][b].data();
                auto bb = bd.bands[l][b].data();
                auto ww = wu.bands[l][b].data();
                for (std::size_t k = 0; k < mn; ++k) {
                    dd[k] = shrink(ww[k] + bb[k], t);
                    bb[k] += ww[k] - dd[k];
                }
            }
        for (std::size_t k = 0; k < mn; ++k) {
            v.data()[k] = kl_prox_unchecked(u.data()[k] + bv.data()[k], fd[k], beta);
            bv.data()[k] += u.data()[k] - v.data()[k];
        }
        change = relative_change(u.data(), u_prev.data());
        if (cfg.record_trace) res.report.objective_trace.push_back(objective_framelet(v, f, bank, cfg));
        if (change <= cfg.rel_tol) break;
    }
    apply_floor(v, f, cfg.floor);
    res.report.iterations = it;
    res.report.final_rel_change = change;
    res.report.converged = change <= cfg.rel_tol;
    res.report.final_objective = objective_framelet(v, f, bank, cfg);
    res.report.wall_seconds = seconds_since(t_start);
    res.image = std::move(v);
    return res;
}

DenoiseResult denoise(const Image2D& f, Model model, const SolverConfig& cfg) {
    if (model == Model::TV) return denoise_tv(f, cfg);
    return denoise_framelet(f, filter_bank(framelet_of(model)), cfg);
}

}  // namespace tomokl
