#pragma once

#include "fdwlan/geometry.hpp"
#include "fdwlan/model.hpp"
#include "fdwlan/throughput.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace fdwlan {

/// Station placement: `sampled` draws positions uniformly over the disk;
/// `pinned` puts the expected (largest-remainder rounded) number of stations
/// of each annulus exactly on its midpoint circle.
enum class TopologyMode { sampled, pinned };

/// How a hidden peer interferes with a lone uplink transmission: `expected`
/// draws the vulnerability-window events with the annulus-pair hidden
/// probabilities (mean-field, matches the analytic model); `realized` uses the
/// 0/1 hidden-pair matrix of the sampled positions.
enum class HiddenModel { expected, realized };

struct SimConfig {
    GeometryConfig geometry{};
    BackoffParams backoff{};
    MacPhyParams mac_phy{};
    Regime regime = Regime::fd;
    std::int64_t horizon = 1'000'000; // virtual slots per run
    std::uint64_t seed = 1;
    TopologyMode topology = TopologyMode::pinned;
    HiddenModel hidden_model = HiddenModel::expected;
    PayloadMode payload_mode = PayloadMode::payload;
    RhoMode rho_mode = RhoMode::sigma;
};

void validate(const SimConfig& cfg);

struct Topology {
    std::vector<double> x, y;               // station positions, AP at origin
    std::vector<int> annulus;                // 1-based annulus index per station
    std::vector<std::vector<char>> hidden;   // realized hidden pairs, symmetric
};

/// Deterministic in (cfg, seed). Pinned mode distributes the fractional
/// annulus populations by largest remainder (ties resolved inward) and draws
/// only the angles; sampled mode draws area-uniform positions.
Topology sample_topology(const SimConfig& cfg, std::uint64_t seed);

struct SimResult {
    // Estimates per annulus (index 0 = annulus 1); NaN where no station or no
    // attempt was observed. The *_sd / *_ci95 fields are zero for single runs
    // and carry the replication spread / 1.96*sd/sqrt(R) for estimate().
    std::vector<double> tau_hat, p_hat;
    std::vector<double> tau_hat_sd, p_hat_sd;
    std::vector<double> tau_hat_ci95, p_hat_ci95;
    std::vector<double> node_tau_hat, node_p_hat; // per station, single run only
    double tau_ap_hat = 0.0, p_ap_hat = 0.0;
    double tau_ap_sd = 0.0, p_ap_sd = 0.0, tau_ap_ci95 = 0.0, p_ap_ci95 = 0.0;
    double S_hat = 0.0; // bit/s
    double S_sd = 0.0, S_ci95 = 0.0;
    std::int64_t idle_slots = 0;
    std::int64_t hd_success_slots = 0;  // one frame delivered
    std::int64_t sfd_success_slots = 0; // AP/station pair, AP destined to the station
    std::int64_t afd_success_slots = 0; // AP/station pair, AP destined to a hidden peer
    std::int64_t collision_slots = 0;
    std::int64_t elapsed_ns = 0;
    int replications = 1;
    bool low_sample_warning = false; // an annulus saw < 100 pooled attempts
};

/// Slot-synchronized run over cfg.horizon virtual slots. Every node follows
/// the binary exponential backoff chain; a slot is classified from its
/// transmitter set exactly as the analytic model counts it (idle / success /
/// collision with one frame credited per success slot), while chain outcomes
/// additionally expose lone uplinks to hidden-peer interference over the
/// 2*rho-1 slot window. Optional trace: one line per slot.
SimResult run(const SimConfig& cfg, std::ostream* trace = nullptr);

/// Mean/SD/CI aggregation over independently seeded replications (>= 2) of
/// run(); counters are summed. Deterministic in (cfg, replications).
SimResult estimate(const SimConfig& cfg, int replications);

} // namespace fdwlan
