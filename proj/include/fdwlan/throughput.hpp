#pragma once

#include "fdwlan/model.hpp"

#include <cstdint>

namespace fdwlan {

/// MAC/PHY parameters of the RTS/CTS exchange. Rates in bit/s, times in
/// seconds, frame lengths in bytes.
struct MacPhyParams {
    double data_rate = 780e6;
    double control_rate = 6e6;
    double phy_header = 44e-6;
    int mac_header = 36;
    int fcs = 4;
    int ack_len = 14;
    int rts_len = 20;
    int cts_len = 14;
    int mpdu_len = 11454; // full MPDU including MAC header and FCS
    double sigma = 9e-6;  // idle slot
    double delta = 1e-6;  // propagation delay
    double difs = 34e-6;
    double sifs = 16e-6;
};

void validate(const MacPhyParams& mp);

/// Which bit count a delivered frame contributes to throughput: the payload
/// (MPDU minus MAC header and FCS) or the whole MPDU.
enum class PayloadMode { payload, mpdu };

/// Unit used to convert the RTS vulnerability time into the backoff slot
/// count rho: the idle slot sigma, or the propagation delay delta.
enum class RhoMode { sigma, delta };

/// Frame and slot durations in integer nanoseconds; rho in backoff slots.
struct SlotDurations {
    std::int64_t t_rts = 0;
    std::int64_t t_cts = 0;
    std::int64_t t_data = 0;
    std::int64_t t_ack = 0;
    std::int64_t T_s = 0; // successful virtual slot
    std::int64_t T_c = 0; // collision virtual slot
    int rho = 0;          // ceil(t_rts / unit)
};

/// Durations from the MAC/PHY parameters. Each frame time is the PHY header
/// plus serialization at the relevant rate, rounded to whole nanoseconds.
/// T_s = DIFS + RTS + CTS + DATA + ACK + 3*SIFS + 4*delta;
/// T_c = DIFS + RTS + delta.
SlotDurations frame_durations(const MacPhyParams& mp, RhoMode rho_mode = RhoMode::sigma);

/// Bits credited per delivered frame under the chosen accounting.
std::int64_t payload_bits(const MacPhyParams& mp, PayloadMode mode);

/// Probability that at least one node transmits in a virtual slot.
double p_transmit(const FixedPointSolution& sol, const AnnulusLayout& layout);

struct SuccessSplit {
    double total = 0.0;   // P_s
    double hd_part = 0.0; // slots delivering exactly one frame
    double fd_part = 0.0; // slots delivering an AP/station pair
};

/// Success probability conditioned on a busy slot. Full duplex counts, as
/// single-frame successes, a lone AP, a lone station, and an AP/station pair
/// whose AP destination is neither the station nor hidden from it; the pair
/// completing both frames is the fd_part. Half duplex counts a lone AP or a
/// lone station. Requires p_transmit > 0.
SuccessSplit p_success(const FixedPointSolution& sol, const AnnulusLayout& layout,
                       const HiddenCounts& hidden, int n);

/// Saturation throughput in bit/s:
/// P_t*P_s*L / ((1-P_t)*sigma + P_t*P_s*T_s + P_t*(1-P_s)*T_c),
/// with one delivered frame of L bits credited per successful virtual slot.
double saturation_throughput(double p_t, double p_s, const SlotDurations& dur,
                             const MacPhyParams& mp, std::int64_t frame_bits);

struct ThroughputReport {
    double P_t = 0.0;
    double P_s = 0.0;
    double P_s_hd_part = 0.0;
    double P_s_fd_part = 0.0;
    double S = 0.0; // bit/s
    Regime regime = Regime::fd;
};

/// Throughput for an already computed fixed point. n = 1 is exact in both
/// regimes: the only transmissions are the lone station's and the AP's reply
/// opportunities, and none of them can fail, so P_s = 1.
ThroughputReport throughput_report(const FixedPointSolution& sol,
                                   const GeometryConfig& cfg,
                                   const SlotDurations& dur, const MacPhyParams& mp,
                                   PayloadMode payload = PayloadMode::payload);

struct RegimeComparison {
    ThroughputReport fd;
    ThroughputReport hd;
    double gain = 0.0; // S_fd / S_hd; exactly 1 for n = 1
};

/// Solves both regimes on the same configuration and reports the ratio.
RegimeComparison compare_regimes(const GeometryConfig& cfg, const BackoffParams& bp,
                                 const MacPhyParams& mp, const ModelOptions& opts = {},
                                 PayloadMode payload = PayloadMode::payload,
                                 RhoMode rho_mode = RhoMode::sigma);

} // namespace fdwlan
