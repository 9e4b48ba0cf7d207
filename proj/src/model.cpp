#include "fdwlan/model.hpp"

#include <algorithm>
#include <cmath>

namespace fdwlan {

namespace {

struct Equations {
    const AnnulusLayout& layout;
    const HiddenCounts& hidden;
    const BackoffParams& bp;
    Regime regime;
    ApCoincidence ap;

    // F(x): map (tau_ap, tau_sta, p_ap, p_sta) to the re-substituted values.
    void eval(double tau_ap, const std::vector<double>& tau_sta, double p_ap,
              const std::vector<double>& p_sta, double& tau_ap_new,
              std::vector<double>& tau_new, double& p_ap_new,
              std::vector<double>& p_new) const {
        const int M = static_cast<int>(layout.distances.size());
        tau_ap_new = tau_of_p(p_ap, bp);
        for (int i = 0; i < M; ++i)
            tau_new[i] = tau_of_p(p_sta[i], bp);
        for (int i = 1; i <= M; ++i) {
            const double v = (regime == Regime::fd)
                                 ? p_sta_fd(i, tau_ap, tau_sta, layout, hidden, bp)
                                 : p_sta_hd(i, tau_ap, tau_sta, layout, hidden, bp);
            p_new[i - 1] = std::clamp(v, 0.0, 1.0);
        }
        const double v_ap = (regime == Regime::fd)
                                ? p_ap_fd(tau_sta, layout, hidden, ap)
                                : p_ap_hd(tau_sta, layout);
        p_ap_new = std::clamp(v_ap, 0.0, 1.0);
    }
};

} // namespace

void validate(const BackoffParams& bp) {
    if (bp.W < 1)
        throw std::invalid_argument("backoff: W must be at least 1");
    if (bp.m < 0)
        throw std::invalid_argument("backoff: m must be non-negative");
    if (bp.rho < 1)
        throw std::invalid_argument("backoff: rho must be at least 1");
}

double tau_of_p(double p, const BackoffParams& bp) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error("tau_of_p: p must lie in [0, 1]");
    double geo = 0.0; // sum_{k=0}^{m-1} (2p)^k
    double term = 1.0;
    for (int k = 0; k < bp.m; ++k) {
        geo += term;
        term *= 2.0 * p;
    }
    return 2.0 / (bp.W + 1.0 + p * bp.W * geo);
}

double pi_factor(int i, const std::vector<double>& tau_sta, const AnnulusLayout& layout) {
    const int M = static_cast<int>(layout.distances.size());
    double prod = 1.0;
    for (int j = 1; j <= M; ++j) {
        const double e = (j == i) ? std::max(layout.node_counts[j - 1] - 1.0, 0.0)
                                  : layout.node_counts[j - 1];
        prod *= std::pow(1.0 - tau_sta[j - 1], e);
    }
    return prod;
}

double window_factor(int i, const std::vector<double>& tau_sta,
                     const HiddenCounts& hidden, const BackoffParams& bp) {
    const int M = static_cast<int>(tau_sta.size());
    const double window = 2.0 * bp.rho - 1.0;
    double prod = 1.0;
    for (int j = 1; j <= M; ++j)
        prod *= std::pow(1.0 - tau_sta[j - 1], hidden.h_cond[i - 1][j - 1] * window);
    return prod;
}

double p_sta_fd(int i, double tau_ap, const std::vector<double>& tau_sta,
                const AnnulusLayout& layout, const HiddenCounts& hidden,
                const BackoffParams& bp) {
    const double pi_i = pi_factor(i, tau_sta, layout);
    const double beta_i = window_factor(i, tau_sta, hidden, bp);
    return 1.0 - pi_i * ((1.0 - tau_ap) * beta_i + tau_ap);
}

double p_sta_hd(int i, double tau_ap, const std::vector<double>& tau_sta,
                const AnnulusLayout& layout, const HiddenCounts& hidden,
                const BackoffParams& bp) {
    const double pi_i = pi_factor(i, tau_sta, layout);
    const double beta_i = window_factor(i, tau_sta, hidden, bp);
    return 1.0 - (1.0 - tau_ap) * pi_i * beta_i;
}

double p_ap_fd(const std::vector<double>& tau_sta, const AnnulusLayout& layout,
               const HiddenCounts& hidden, ApCoincidence ap) {
    const int M = static_cast<int>(layout.distances.size());
    double n = 0.0;
    double quiet = 1.0; // no station transmits
    for (int j = 0; j < M; ++j) {
        n += layout.node_counts[j];
        quiet *= std::pow(1.0 - tau_sta[j], layout.node_counts[j]);
    }
    double coincide = 0.0; // lone transmitter is (or hides) the AP destination
    for (int i = 1; i <= M; ++i) {
        const double w = (ap == ApCoincidence::physical) ? layout.node_counts[i - 1] : 1.0;
        coincide += w * (hidden.h[i - 1] + 1.0) / n * tau_sta[i - 1] * pi_factor(i, tau_sta, layout);
    }
    return 1.0 - (quiet + coincide);
}

double p_ap_hd(const std::vector<double>& tau_sta, const AnnulusLayout& layout) {
    const int M = static_cast<int>(layout.distances.size());
    double quiet = 1.0;
    for (int j = 0; j < M; ++j)
        quiet *= std::pow(1.0 - tau_sta[j], layout.node_counts[j]);
    return 1.0 - quiet;
}

FixedPointSolution solve(const GeometryConfig& cfg, const BackoffParams& bp,
                         Regime regime, const ModelOptions& opts) {
    validate(cfg);
    validate(bp);
    const int M = cfg.M;
    const double tau0 = 2.0 / (bp.W + 1.0);

    FixedPointSolution sol;
    sol.regime = regime;
    sol.tau_sta.assign(M, tau0);
    sol.p_sta.assign(M, 0.0);
    sol.tau_ap = tau0;
    sol.p_ap = 0.0;

    if (cfg.n == 1) {
        // Exact: a lone station never collides in either regime, so every
        // node keeps the initial window and p stays at zero.
        sol.converged = true;
        return sol;
    }

    const AnnulusLayout layout = annulus_layout(cfg);
    const HiddenCounts hidden = hidden_counts(cfg, opts.h_norm);
    const Equations eq{layout, hidden, bp, regime, opts.ap_coincidence};

    std::vector<double> tau_new(M), p_new(M);
    double tau_ap_new = 0.0, p_ap_new = 0.0;
    const double lam = opts.damping;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        eq.eval(sol.tau_ap, sol.tau_sta, sol.p_ap, sol.p_sta,
                tau_ap_new, tau_new, p_ap_new, p_new);
        double upd = std::abs(lam * (tau_ap_new - sol.tau_ap));
        sol.tau_ap += lam * (tau_ap_new - sol.tau_ap);
        upd = std::max(upd, std::abs(lam * (p_ap_new - sol.p_ap)));
        sol.p_ap += lam * (p_ap_new - sol.p_ap);
        for (int i = 0; i < M; ++i) {
            const double dt = lam * (tau_new[i] - sol.tau_sta[i]);
            const double dp = lam * (p_new[i] - sol.p_sta[i]);
            upd = std::max(upd, std::max(std::abs(dt), std::abs(dp)));
            sol.tau_sta[i] += dt;
            sol.p_sta[i] += dp;
        }
        sol.iterations = it;
        if (upd <= opts.tolerance) {
            sol.converged = true;
            break;
        }
    }
    sol.residual = solution_residual(sol, cfg, bp, opts);
    return sol;
}

double solution_residual(const FixedPointSolution& sol, const GeometryConfig& cfg,
                         const BackoffParams& bp, const ModelOptions& opts) {
    validate(cfg);
    validate(bp);
    if (cfg.n == 1)
        return 0.0; // exact by construction
    const AnnulusLayout layout = annulus_layout(cfg);
    const HiddenCounts hidden = hidden_counts(cfg, opts.h_norm);
    const Equations eq{layout, hidden, bp, sol.regime, opts.ap_coincidence};
    const int M = cfg.M;
    std::vector<double> tau_new(M), p_new(M);
    double tau_ap_new = 0.0, p_ap_new = 0.0;
    eq.eval(sol.tau_ap, sol.tau_sta, sol.p_ap, sol.p_sta,
            tau_ap_new, tau_new, p_ap_new, p_new);
    double res = std::max(std::abs(sol.tau_ap - tau_ap_new), std::abs(sol.p_ap - p_ap_new));
    for (int i = 0; i < M; ++i) {
        res = std::max(res, std::abs(sol.tau_sta[i] - tau_new[i]));
        res = std::max(res, std::abs(sol.p_sta[i] - p_new[i]));
    }
    return res;
}

} // namespace fdwlan
