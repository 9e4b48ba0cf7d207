#pragma once

#include <stdexcept>
#include <vector>

namespace fdwlan {

/// Cell geometry: an AP at the origin with transmission radius r, n stations
/// placed uniformly in the disk, analyzed over M evenly spaced concentric
/// annuli. All lengths are in the same (arbitrary) unit as r.
struct GeometryConfig {
    double r = 1.0;
    int M = 5;  // annulus count
    int n = 10; // station count, AP excluded
};

/// Throws std::invalid_argument when r <= 0, M < 1 or n < 1.
void validate(const GeometryConfig& cfg);

/// Annulus decomposition: boundary radii r_i = i*r/M, representative
/// (midpoint) distances d_i = (2i-1)*r/(2M), and expected fractional station
/// counts n_i = n*(2i-1)/M^2, which telescope to exactly n.
struct AnnulusLayout {
    std::vector<double> radii;       // M+1 boundaries, radii[0] = 0, radii[M] = r
    std::vector<double> distances;   // d_1..d_M (index 0 holds d_1)
    std::vector<double> node_counts; // n_1..n_M, fractional
};

/// Per-peer-annulus hidden counts h_{i|j} come in two flavors: the direct
/// product n_j * p_h(i|j) (whose row sums equal n * p_h(d_i)), or the same
/// rescaled by (n-1)/n so that row sums equal h_i = (n-1) * p_h(d_i).
enum class HNormalization { literal, rescaled };

/// Expected hidden-node statistics for each annulus.
struct HiddenCounts {
    std::vector<double> h;                    // h_i = (n-1) * p_h(d_i)
    std::vector<double> p_h_i;                // p_h evaluated at d_i
    std::vector<std::vector<double>> h_cond;  // h_{i|j}, M x M
    std::vector<std::vector<double>> p_cond;  // p_h(i|j), M x M
};

/// Area of the intersection (lens) of two disks with radii r_a, r_b whose
/// centers are d apart. Containment and disjoint branches handled explicitly.
/// Throws std::domain_error on non-positive radii or negative distance.
double lens_area(double r_a, double r_b, double d);

/// Area of the crescent of the coverage disk (radius r, centered at the AP)
/// that a station at distance d from the AP cannot hear: pi*r^2 minus the
/// lens of the two radius-r disks. Requires 0 <= d <= r.
double hidden_area(double r, double d);

/// Probability that another uniformly placed station is hidden from a station
/// at distance d: hidden_area / (pi*r^2). Strictly increasing in d, maximum
/// (pi/3 + sqrt(3)/2)/pi at d = r.
double hidden_prob(double r, double d);

AnnulusLayout annulus_layout(const GeometryConfig& cfg);

/// Probability that a station of annulus j is hidden from a station at d_i
/// (1-based i, j). Computed from the slice of annulus j lying outside the
/// coverage disk of the observer; slices tile the crescent, so
/// sum_j area_j * p_h(i|j) = pi*r^2 * p_h(d_i).
double cond_hidden_prob(const GeometryConfig& cfg, int i, int j);

HiddenCounts hidden_counts(const GeometryConfig& cfg,
                           HNormalization norm = HNormalization::literal);

} // namespace fdwlan
