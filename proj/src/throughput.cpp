#include "fdwlan/throughput.hpp"

#include <algorithm>
#include <cmath>

namespace fdwlan {

namespace {

std::int64_t to_ns(double seconds) { return std::llround(seconds * 1e9); }

std::int64_t frame_ns(double phy_header, int bytes, double rate) {
    return to_ns(phy_header + 8.0 * bytes / rate);
}

} // namespace

void validate(const MacPhyParams& mp) {
    if (!(mp.data_rate > 0.0) || !(mp.control_rate > 0.0))
        throw std::invalid_argument("mac_phy: rates must be positive");
    if (mp.phy_header < 0.0 || mp.sigma <= 0.0 || mp.delta < 0.0 || mp.difs < 0.0 || mp.sifs < 0.0)
        throw std::invalid_argument("mac_phy: invalid timing parameter");
    if (mp.mac_header < 0 || mp.fcs < 0 || mp.ack_len <= 0 || mp.rts_len <= 0 || mp.cts_len <= 0)
        throw std::invalid_argument("mac_phy: invalid frame length");
    if (mp.mpdu_len <= mp.mac_header + mp.fcs)
        throw std::invalid_argument("mac_phy: mpdu_len must exceed mac_header + fcs");
}

SlotDurations frame_durations(const MacPhyParams& mp, RhoMode rho_mode) {
    validate(mp);
    SlotDurations dur;
    dur.t_rts = frame_ns(mp.phy_header, mp.rts_len, mp.control_rate);
    dur.t_cts = frame_ns(mp.phy_header, mp.cts_len, mp.control_rate);
    dur.t_ack = frame_ns(mp.phy_header, mp.ack_len, mp.control_rate);
    dur.t_data = frame_ns(mp.phy_header, mp.mpdu_len, mp.data_rate);
    const std::int64_t difs = to_ns(mp.difs);
    const std::int64_t sifs = to_ns(mp.sifs);
    const std::int64_t delta = to_ns(mp.delta);
    dur.T_s = difs + dur.t_rts + dur.t_cts + dur.t_data + dur.t_ack + 3 * sifs + 4 * delta;
    dur.T_c = difs + dur.t_rts + delta;
    const std::int64_t unit = (rho_mode == RhoMode::sigma) ? to_ns(mp.sigma) : delta;
    if (unit <= 0)
        throw std::invalid_argument("mac_phy: rho unit must be positive");
    dur.rho = static_cast<int>((dur.t_rts + unit - 1) / unit);
    return dur;
}

std::int64_t payload_bits(const MacPhyParams& mp, PayloadMode mode) {
    validate(mp);
    const int bytes = (mode == PayloadMode::mpdu) ? mp.mpdu_len
                                                  : mp.mpdu_len - mp.mac_header - mp.fcs;
    return 8LL * bytes;
}

double p_transmit(const FixedPointSolution& sol, const AnnulusLayout& layout) {
    double quiet = 1.0 - sol.tau_ap;
    for (std::size_t j = 0; j < layout.node_counts.size(); ++j)
        quiet *= std::pow(1.0 - sol.tau_sta[j], layout.node_counts[j]);
    return 1.0 - quiet;
}

SuccessSplit p_success(const FixedPointSolution& sol, const AnnulusLayout& layout,
                       const HiddenCounts& hidden, int n) {
    const double p_t = p_transmit(sol, layout);
    if (!(p_t > 0.0))
        throw std::domain_error("p_success: conditional on a busy slot, needs p_transmit > 0");
    const int M = static_cast<int>(layout.distances.size());
    const double tau_ap = sol.tau_ap;

    double quiet_sta = 1.0; // no station transmits
    for (int j = 0; j < M; ++j)
        quiet_sta *= std::pow(1.0 - sol.tau_sta[j], layout.node_counts[j]);

    double lone = 0.0;     // expected lone-station transmissions per slot
    double pair_hit = 0.0; // lone station that is (or hides) the AP destination
    for (int i = 1; i <= M; ++i) {
        const double term = layout.node_counts[i - 1] * sol.tau_sta[i - 1] *
                            pi_factor(i, sol.tau_sta, layout);
        lone += term;
        pair_hit += (hidden.h[i - 1] + 1.0) / n * term;
    }

    SuccessSplit split;
    if (n == 1) {
        // A lone station and the AP cannot collide; every busy slot succeeds.
        split.total = 1.0;
        if (sol.regime == Regime::fd) {
            split.fd_part = std::min(tau_ap * pair_hit / p_t, 1.0);
            split.hd_part = 1.0 - split.fd_part;
        } else {
            split.hd_part = 1.0;
        }
        return split;
    }

    if (sol.regime == Regime::fd) {
        double pair_miss = 0.0; // pair slots where only the station's frame survives
        for (int i = 1; i <= M; ++i)
            pair_miss += (n - hidden.h[i - 1] - 1.0) / n * layout.node_counts[i - 1] *
                         sol.tau_sta[i - 1] * pi_factor(i, sol.tau_sta, layout);
        split.hd_part = (tau_ap * quiet_sta + (1.0 - tau_ap) * lone + tau_ap * pair_miss) / p_t;
        split.fd_part = tau_ap * pair_hit / p_t;
    } else {
        split.hd_part = (tau_ap * quiet_sta + (1.0 - tau_ap) * lone) / p_t;
        split.fd_part = 0.0;
    }
    split.total = split.hd_part + split.fd_part;
    return split;
}

double saturation_throughput(double p_t, double p_s, const SlotDurations& dur,
                             const MacPhyParams& mp, std::int64_t frame_bits) {
    const double sigma_ns = static_cast<double>(to_ns(mp.sigma));
    const double denom = (1.0 - p_t) * sigma_ns + p_t * p_s * static_cast<double>(dur.T_s) +
                         p_t * (1.0 - p_s) * static_cast<double>(dur.T_c);
    return p_t * p_s * static_cast<double>(frame_bits) * 1e9 / denom;
}

ThroughputReport throughput_report(const FixedPointSolution& sol,
                                   const GeometryConfig& cfg,
                                   const SlotDurations& dur, const MacPhyParams& mp,
                                   PayloadMode payload) {
    validate(cfg);
    const AnnulusLayout layout = annulus_layout(cfg);
    const HiddenCounts hidden = hidden_counts(cfg); // only h_i enters here
    ThroughputReport rep;
    rep.regime = sol.regime;
    rep.P_t = p_transmit(sol, layout);
    const SuccessSplit split = p_success(sol, layout, hidden, cfg.n);
    rep.P_s = split.total;
    rep.P_s_hd_part = split.hd_part;
    rep.P_s_fd_part = split.fd_part;
    rep.S = saturation_throughput(rep.P_t, rep.P_s, dur, mp, payload_bits(mp, payload));
    return rep;
}

RegimeComparison compare_regimes(const GeometryConfig& cfg, const BackoffParams& bp,
                                 const MacPhyParams& mp, const ModelOptions& opts,
                                 PayloadMode payload, RhoMode rho_mode) {
    const SlotDurations dur = frame_durations(mp, rho_mode);
    RegimeComparison cmp;
    cmp.fd = throughput_report(solve(cfg, bp, Regime::fd, opts), cfg, dur, mp, payload);
    cmp.hd = throughput_report(solve(cfg, bp, Regime::hd, opts), cfg, dur, mp, payload);
    cmp.gain = cmp.fd.S / cmp.hd.S;
    return cmp;
}

} // namespace fdwlan
