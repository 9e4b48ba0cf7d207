#include "fdwlan/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace fdwlan {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Keep acos arguments in range; near-tangent configurations can drift a ulp out.
double clamped_acos(double x) { return std::acos(std::clamp(x, -1.0, 1.0)); }

// Part of the disk of radius rj centered at the AP that lies outside the
// coverage disk of radius r centered at distance d.
double outside_area(double r, double rj, double d) {
    return kPi * rj * rj - lens_area(r, rj, d);
}

} // namespace

void validate(const GeometryConfig& cfg) {
    if (!(cfg.r > 0.0))
        throw std::invalid_argument("geometry: r must be positive");
    if (cfg.M < 1)
        throw std::invalid_argument("geometry: M must be at least 1");
    if (cfg.n < 1)
        throw std::invalid_argument("geometry: n must be at least 1");
}

double lens_area(double r_a, double r_b, double d) {
    if (!(r_a > 0.0) || !(r_b > 0.0) || d < 0.0 || !std::isfinite(d))
        throw std::domain_error("lens_area: radii must be positive and distance non-negative");
    if (d >= r_a + r_b)
        return 0.0; // disjoint
    if (d <= std::abs(r_a - r_b)) {
        const double rm = std::min(r_a, r_b);
        return kPi * rm * rm; // smaller disk contained
    }
    const double a2 = r_a * r_a;
    const double b2 = r_b * r_b;
    const double d2 = d * d;
    const double alpha = clamped_acos((d2 + a2 - b2) / (2.0 * d * r_a));
    const double beta = clamped_acos((d2 + b2 - a2) / (2.0 * d * r_b));
    const double t = (-d + r_a + r_b) * (d + r_a - r_b) * (d - r_a + r_b) * (d + r_a + r_b);
    return a2 * alpha + b2 * beta - 0.5 * std::sqrt(std::max(t, 0.0));
}

double hidden_area(double r, double d) {
    if (!(r > 0.0))
        throw std::domain_error("hidden_area: r must be positive");
    if (d < 0.0 || d > r)
        throw std::domain_error("hidden_area: d must lie in [0, r]");
    return kPi * r * r - lens_area(r, r, d);
}

double hidden_prob(double r, double d) {
    return hidden_area(r, d) / (kPi * r * r);
}

AnnulusLayout annulus_layout(const GeometryConfig& cfg) {
    validate(cfg);
    const int M = cfg.M;
    AnnulusLayout layout;
    layout.radii.resize(M + 1);
    layout.distances.resize(M);
    layout.node_counts.resize(M);
    for (int i = 0; i <= M; ++i)
        layout.radii[i] = static_cast<double>(i) * cfg.r / M;
    for (int i = 1; i <= M; ++i) {
        layout.distances[i - 1] = (2.0 * i - 1.0) * cfg.r / (2.0 * M);
        layout.node_counts[i - 1] = static_cast<double>(cfg.n) * (2.0 * i - 1.0) / (static_cast<double>(M) * M);
    }
    return layout;
}

double cond_hidden_prob(const GeometryConfig& cfg, int i, int j) {
    validate(cfg);
    if (i < 1 || i > cfg.M || j < 1 || j > cfg.M)
        throw std::out_of_range("cond_hidden_prob: annulus index out of range");
    const double r = cfg.r;
    const double d_i = (2.0 * i - 1.0) * r / (2.0 * cfg.M);
    const double r_j = static_cast<double>(j) * r / cfg.M;
    const double r_jm = static_cast<double>(j - 1) * r / cfg.M;
    // Y_j: part of the centered disk of radius r_j the observer cannot hear.
    const double y_j = outside_area(r, r_j, d_i);
    const double y_jm = (j == 1) ? 0.0 : outside_area(r, r_jm, d_i);
    const double z_j = std::max(y_j - y_jm, 0.0); // slice of annulus j
    const double ring = kPi * (r_j * r_j - r_jm * r_jm);
    return std::clamp(z_j / ring, 0.0, 1.0);
}

HiddenCounts hidden_counts(const GeometryConfig& cfg, HNormalization norm) {
    validate(cfg);
    const AnnulusLayout layout = annulus_layout(cfg);
    const int M = cfg.M;
    const double n = cfg.n;
    HiddenCounts hc;
    hc.h.resize(M);
    hc.p_h_i.resize(M);
    hc.h_cond.assign(M, std::vector<double>(M, 0.0));
    hc.p_cond.assign(M, std::vector<double>(M, 0.0));
    const double scale = (norm == HNormalization::rescaled) ? (n - 1.0) / n : 1.0;
    for (int i = 1; i <= M; ++i) {
        hc.p_h_i[i - 1] = hidden_prob(cfg.r, layout.distances[i - 1]);
        hc.h[i - 1] = (n - 1.0) * hc.p_h_i[i - 1];
        for (int j = 1; j <= M; ++j) {
            hc.p_cond[i - 1][j - 1] = cond_hidden_prob(cfg, i, j);
            hc.h_cond[i - 1][j - 1] = scale * layout.node_counts[j - 1] * hc.p_cond[i - 1][j - 1];
        }
    }
    return hc;
}

} // namespace fdwlan
