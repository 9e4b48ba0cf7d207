#pragma once

#include "fdwlan/geometry.hpp"

#include <vector>

namespace fdwlan {

/// Binary exponential backoff: initial window W, m doubling stages, and the
/// vulnerability window length rho (in virtual slots) during which a hidden
/// node can collide with an ongoing RTS.
struct BackoffParams {
    int W = 16;
    int m = 6;
    int rho = 8;
};

void validate(const BackoffParams& bp);

enum class Regime { fd, hd };

/// Two readings of the AP conditional-failure term that accounts for the AP
/// picking, as destination, a station hidden from a simultaneous transmitter:
/// `literal` sums (h_i+1)/n * tau_i * pi(i) over annuli; `physical` weighs
/// each annulus by its population n_i, matching the per-station enumeration
/// used by the success probability.
enum class ApCoincidence { literal, physical };

struct ModelOptions {
    HNormalization h_norm = HNormalization::literal;
    ApCoincidence ap_coincidence = ApCoincidence::literal;
    double damping = 0.5;     // step factor on each fixed-point update
    double tolerance = 1e-10; // max damped update at which iteration stops
    int max_iterations = 100000;
};

struct FixedPointSolution {
    double tau_ap = 0.0;
    std::vector<double> tau_sta; // per annulus
    double p_ap = 0.0;
    std::vector<double> p_sta;   // per annulus
    int iterations = 0;
    double residual = 0.0;       // max |x - F(x)| at the returned point
    Regime regime = Regime::fd;
    bool converged = false;
};

/// Per-station transmission probability for a given conditional collision
/// probability p: tau = 2 / (W + 1 + p*W*sum_{k=0}^{m-1}(2p)^k).
/// tau(0) = 2/(W+1); throws std::domain_error unless p is in [0, 1].
double tau_of_p(double p, const BackoffParams& bp);

/// Probability that no station other than a tagged one in annulus i (1-based)
/// transmits in a slot: (1-tau_i)^max(n_i-1,0) * prod_{j != i} (1-tau_j)^n_j.
double pi_factor(int i, const std::vector<double>& tau_sta, const AnnulusLayout& layout);

/// Probability that no hidden node of a tagged station in annulus i transmits
/// during the 2*rho-1 slot vulnerability window:
/// prod_j (1-tau_j)^(h_{i|j} * (2*rho-1)).
double window_factor(int i, const std::vector<double>& tau_sta,
                     const HiddenCounts& hidden, const BackoffParams& bp);

/// Conditional collision probability of a station in annulus i when the AP
/// can transmit concurrently (full duplex):
/// 1 - pi(i) * ((1-tau_ap) * window(i) + tau_ap).
double p_sta_fd(int i, double tau_ap, const std::vector<double>& tau_sta,
                const AnnulusLayout& layout, const HiddenCounts& hidden,
                const BackoffParams& bp);

/// Half-duplex variant: 1 - (1-tau_ap) * pi(i) * window(i).
double p_sta_hd(int i, double tau_ap, const std::vector<double>& tau_sta,
                const AnnulusLayout& layout, const HiddenCounts& hidden,
                const BackoffParams& bp);

/// AP conditional collision probability under full duplex: the AP transmission
/// survives if no station transmits, or if exactly one does and the AP's
/// destination is that station or one of its hidden peers.
double p_ap_fd(const std::vector<double>& tau_sta, const AnnulusLayout& layout,
               const HiddenCounts& hidden,
               ApCoincidence ap = ApCoincidence::literal);

/// Half-duplex AP: survives only when no station transmits.
double p_ap_hd(const std::vector<double>& tau_sta, const AnnulusLayout& layout);

/// Damped fixed-point iteration over the 2M+2 unknowns (tau_ap, tau_i, p_ap,
/// p_i). Starts from tau = 2/(W+1), p = 0. n = 1 is solved exactly: a lone
/// station and the AP on a full-duplex link (or alternating on a half-duplex
/// one) never collide, so p = 0 and tau = 2/(W+1) for both regimes.
FixedPointSolution solve(const GeometryConfig& cfg, const BackoffParams& bp,
                         Regime regime, const ModelOptions& opts = {});

/// Max |x - F(x)| over all 2M+2 components when re-substituting a solution.
double solution_residual(const FixedPointSolution& sol, const GeometryConfig& cfg,
                         const BackoffParams& bp, const ModelOptions& opts = {});

} // namespace fdwlan
