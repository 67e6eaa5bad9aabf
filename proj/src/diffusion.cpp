#include "waterfill/diffusion.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "waterfill/errors.hpp"

namespace waterfill {

double validate_eta(double eta) {
    if (!(eta > 0.0 && eta <= 0.25)) {
        std::ostringstream msg;
        msg << "diffusion rate " << eta << " outside the stable range (0, 0.25]";
        throw UnstableRate(msg.str());
    }
    return eta;
}

DiffusionParams::DiffusionParams(double eta_, double delta_, int max_iters_, double limit_)
    : eta(validate_eta(eta_)), delta(delta_), max_iters(max_iters_), divergence_limit(limit_) {
    if (!(delta > 0.0))
        throw std::invalid_argument("convergence threshold must be positive");
    if (max_iters < 1)
        throw std::invalid_argument("iteration cap must be at least 1");
    if (!(divergence_limit > 0.0))
        throw std::invalid_argument("divergence limit must be positive");
}

void validate_params(const DiffusionParams& params) {
    // Re-checked at every entry point: the struct is mutable after construction.
    validate_eta(params.eta);
    if (!(params.delta > 0.0))
        throw std::invalid_argument("convergence threshold must be positive");
    if (params.max_iters < 1)
        throw std::invalid_argument("iteration cap must be at least 1");
    if (!(params.divergence_limit > 0.0))
        throw std::invalid_argument("divergence limit must be positive");
}

double peak_altitude(const ScalarField& h) {
    double peak = h.values().front();
    for (double v : h.values())
        if (v > peak) peak = v;
    return peak;
}

namespace {

struct StepStats {
    double max_update = 0.0;
    double max_abs_g = 0.0;
};

void check_terrain(const ScalarField& h) {
    if (h.width() < 3 || h.height() < 3)
        throw std::invalid_argument("water simulation needs at least a 3x3 field");
    for (double v : h.values())
        if (!std::isfinite(v))
            throw std::invalid_argument("terrain contains non-finite values");
}

// Clamp helpers written as conditionals (not std::max/min) so both the
// production passes and any reference reimplementation agree bit for bit,
// including on signed zeros.
inline double clamp_nonneg(double v) { return v > 0.0 ? v : 0.0; }
inline double neg_part(double v) { return v < 0.0 ? v : 0.0; }

void build_surface(const ScalarField& h, const ScalarField& w, ScalarField& g) {
    const double* hp = h.values().data();
    const double* wp = w.values().data();
    double* gp = g.values().data();
    const std::size_t n = h.size();
    for (std::size_t i = 0; i < n; ++i)
        gp[i] = hp[i] + wp[i];
}

// Zeroes the border ring of w_out and mirrors the terrain into g_out there;
// the border never holds water. Returns the largest |G| seen on the ring.
double apply_border(const ScalarField& h, ScalarField& w_out, ScalarField& g_out) {
    const int wd = h.width();
    const int ht = h.height();
    double max_abs = 0.0;
    auto ring = [&](int x, int y) {
        w_out.at(x, y) = 0.0;
        const double hv = h.at(x, y);
        g_out.at(x, y) = hv;
        const double a = std::fabs(hv);
        if (a > max_abs) max_abs = a;
    };
    for (int x = 0; x < wd; ++x) { ring(x, 0); ring(x, ht - 1); }
    for (int y = 1; y < ht - 1; ++y) { ring(0, y); ring(wd - 1, y); }
    return max_abs;
}

// One Jacobi step of incremental filling. For every interior pixel the
// water gains eta times the 4-neighbor Laplacian of the previous surface,
// evaluated as neighbor differences in a fixed order (+x, -x, +y, -y) so
// that raising the whole terrain by a constant changes nothing.
StepStats incremental_pass(const ScalarField& h, const ScalarField& g, const ScalarField& w,
                           double eta, ScalarField& w_out, ScalarField& g_out) {
    StepStats stats;
    stats.max_abs_g = apply_border(h, w_out, g_out);
    const int wd = h.width();
    const int ht = h.height();
    for (int y = 1; y < ht - 1; ++y) {
        const double* gu = g.row(y - 1);
        const double* gc = g.row(y);
        const double* gd = g.row(y + 1);
        const double* hr = h.row(y);
        const double* wr = w.row(y);
        double* wo = w_out.row(y);
        double* go = g_out.row(y);
        for (int x = 1; x < wd - 1; ++x) {
            const double c = gc[x];
            const double lap = ((gc[x + 1] - c) + (gc[x - 1] - c))
                             + ((gd[x] - c) + (gu[x] - c));
            const double nw = clamp_nonneg(wr[x] + eta * lap);
            wo[x] = nw;
            const double gn = hr[x] + nw;
            go[x] = gn;
            const double upd = std::fabs(gn - c);
            if (upd > stats.max_update) stats.max_update = upd;
            const double mag = std::fabs(gn);
            if (mag > stats.max_abs_g) stats.max_abs_g = mag;
        }
    }
    return stats;
}

// One flood-and-effuse step. Every interior pixel receives water towards
// the global peak at a rate decaying with the iteration count, and loses
// water along every strictly downhill neighbor difference.
StepStats flood_effuse_pass(const ScalarField& h, const ScalarField& g, const ScalarField& w,
                            double eta, double h_peak, double decay,
                            ScalarField& w_out, ScalarField& g_out) {
    StepStats stats;
    stats.max_abs_g = apply_border(h, w_out, g_out);
    const int wd = h.width();
    const int ht = h.height();
    for (int y = 1; y < ht - 1; ++y) {
        const double* gu = g.row(y - 1);
        const double* gc = g.row(y);
        const double* gd = g.row(y + 1);
        const double* hr = h.row(y);
        const double* wr = w.row(y);
        double* wo = w_out.row(y);
        double* go = g_out.row(y);
        for (int x = 1; x < wd - 1; ++x) {
            const double c = gc[x];
            const double flood = (h_peak - c) * decay;
            const double esum = (neg_part(gc[x + 1] - c) + neg_part(gc[x - 1] - c))
                              + (neg_part(gd[x] - c) + neg_part(gu[x] - c));
            const double nw = clamp_nonneg(wr[x] + flood + eta * esum);
            wo[x] = nw;
            const double gn = hr[x] + nw;
            go[x] = gn;
            const double upd = std::fabs(gn - c);
            if (upd > stats.max_update) stats.max_update = upd;
            const double mag = std::fabs(gn);
            if (mag > stats.max_abs_g) stats.max_abs_g = mag;
        }
    }
    return stats;
}

void sanitize_water(const ScalarField& h, ScalarField& w) {
    if (!w.same_size(h))
        throw DimensionMismatch("initial water plane does not match the terrain size");
    for (double& v : w.values()) {
        if (!std::isfinite(v))
            throw std::invalid_argument("initial water contains non-finite values");
        v = clamp_nonneg(v);
    }
    const int wd = w.width();
    const int ht = w.height();
    for (int x = 0; x < wd; ++x) { w.at(x, 0) = 0.0; w.at(x, ht - 1) = 0.0; }
    for (int y = 0; y < ht; ++y) { w.at(0, y) = 0.0; w.at(wd - 1, y) = 0.0; }
}

void check_divergence(const StepStats& stats, double limit, int iteration) {
    if (stats.max_abs_g > limit) {
        std::ostringstream msg;
        msg << "surface magnitude " << stats.max_abs_g << " exceeded guard " << limit
            << " at iteration " << iteration;
        throw Diverged(msg.str());
    }
}

} // namespace

WaterState incremental_step(const WaterState& state, const DiffusionParams& params) {
    validate_params(params);
    check_terrain(state.h);
    WaterState next;
    next.h = state.h;
    next.t = state.t + 1;
    next.w = ScalarField(state.h.width(), state.h.height(), 0.0);
    ScalarField w0 = state.w;
    sanitize_water(state.h, w0);
    ScalarField g(state.h.width(), state.h.height(), 0.0);
    build_surface(state.h, w0, g);
    ScalarField g_out(state.h.width(), state.h.height(), 0.0);
    StepStats stats = incremental_pass(state.h, g, w0, params.eta, next.w, g_out);
    check_divergence(stats, params.divergence_limit, state.t + 1);
    return next;
}

WaterState flood_effuse_step(const WaterState& state, double h_peak, const DiffusionParams& params) {
    validate_params(params);
    check_terrain(state.h);
    WaterState next;
    next.h = state.h;
    next.t = state.t + 1;
    next.w = ScalarField(state.h.width(), state.h.height(), 0.0);
    ScalarField w0 = state.w;
    sanitize_water(state.h, w0);
    ScalarField g(state.h.width(), state.h.height(), 0.0);
    build_surface(state.h, w0, g);
    ScalarField g_out(state.h.width(), state.h.height(), 0.0);
    const double decay = std::exp(-static_cast<double>(state.t));
    StepStats stats = flood_effuse_pass(state.h, g, w0, params.eta, h_peak, decay, next.w, g_out);
    check_divergence(stats, params.divergence_limit, state.t + 1);
    return next;
}

std::pair<ScalarField, ConvergenceReport> run_to_convergence(
    const ScalarField& h, Method method, const DiffusionParams& params,
    const ScalarField* w_init, const SnapshotHook* hook) {
    validate_params(params);
    check_terrain(h);

    const int wd = h.width();
    const int ht = h.height();
    ScalarField w_cur(wd, ht, 0.0);
    if (w_init) {
        w_cur = *w_init;
        sanitize_water(h, w_cur);
    }
    ScalarField w_next(wd, ht, 0.0);
    ScalarField g_cur(wd, ht, 0.0);
    ScalarField g_next(wd, ht, 0.0);
    build_surface(h, w_cur, g_cur);

    const double h_peak = (method == Method::flood_effuse) ? peak_altitude(h) : 0.0;
    const bool snapshots = hook && hook->every > 0 && hook->fn;
    if (snapshots)
        hook->fn(0, g_cur);

    ConvergenceReport report;
    int iter = 0;
    while (iter < params.max_iters) {
        StepStats stats;
        if (method == Method::incremental) {
            stats = incremental_pass(h, g_cur, w_cur, params.eta, w_next, g_next);
        } else {
            const double decay = std::exp(-static_cast<double>(iter));
            stats = flood_effuse_pass(h, g_cur, w_cur, params.eta, h_peak, decay, w_next, g_next);
        }
        ++iter;
        check_divergence(stats, params.divergence_limit, iter);
        std::swap(w_cur, w_next);
        std::swap(g_cur, g_next);
        report.max_update = stats.max_update;
        if (snapshots && iter % hook->every == 0)
            hook->fn(iter, g_cur);
        if (stats.max_update < params.delta) {
            report.converged = true;
            break;
        }
    }
    report.iterations = iter;
    return {std::move(g_cur), report};
}

} // namespace waterfill
