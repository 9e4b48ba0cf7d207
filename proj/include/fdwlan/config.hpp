#pragma once

#include "fdwlan/model.hpp"
#include "fdwlan/simulator.hpp"
#include "fdwlan/throughput.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdwlan {

enum class RegimeSelect { fd, hd, both };

struct SweepSpec {
    std::string variable = "n"; // "n", "M" or "d"
    std::vector<double> values; // explicit list, or expanded from/to/step
};

/// One run description, as read from a JSON config file. Every section is
/// optional; omitted fields keep their defaults. backoff.rho is derived from
/// the frame durations (ceil(t_rts / unit)) unless the config pins it.
struct RunConfig {
    std::string scenario = "default";
    GeometryConfig geometry{};
    BackoffParams backoff{};
    bool rho_explicit = false;
    MacPhyParams mac_phy{};
    ModelOptions model{};
    RegimeSelect regime = RegimeSelect::both;
    PayloadMode payload_mode = PayloadMode::payload;
    RhoMode rho_mode = RhoMode::sigma;
    std::int64_t horizon = 1'000'000;
    std::uint64_t seed = 1;
    int replications = 20;
    TopologyMode topology = TopologyMode::pinned;
    HiddenModel hidden_model = HiddenModel::expected;
    SweepSpec sweep{};
    std::string out_path; // empty = stdout
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Range checks over a complete RunConfig; raises ConfigError.
void validate(const RunConfig& rc);

/// Parses and validates a JSON config document. Unknown keys, type mismatches
/// and out-of-range values all raise ConfigError.
RunConfig parse_config(const std::string& json_text);

/// parse_config over the contents of a file.
RunConfig load_config(const std::string& path);

/// Backoff parameters with rho resolved: the configured value when pinned,
/// otherwise the one derived from the frame durations and rho_mode.
BackoffParams effective_backoff(const RunConfig& rc);

SimConfig to_sim_config(const RunConfig& rc, Regime regime);

const char* to_string(Regime v);
const char* to_string(HNormalization v);
const char* to_string(ApCoincidence v);
const char* to_string(PayloadMode v);
const char* to_string(RhoMode v);
const char* to_string(TopologyMode v);
const char* to_string(HiddenModel v);

} // namespace fdwlan
