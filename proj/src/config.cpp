#include "fdwlan/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace fdwlan {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

void check_keys(const json& obj, const char* section,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed)
            if (item.key() == key) {
                known = true;
                break;
            }
        if (!known)
            fail(std::string("unknown key '") + item.key() + "' in section '" + section + "'");
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
    if (obj.contains(key))
        out = obj.at(key).get<T>();
}

template <typename Enum>
void read_enum(const json& obj, const char* key, Enum& out,
               std::initializer_list<std::pair<const char*, Enum>> table) {
    if (!obj.contains(key))
        return;
    const std::string v = obj.at(key).get<std::string>();
    for (const auto& [name, value] : table)
        if (v == name) {
            out = value;
            return;
        }
    fail(std::string("invalid value '") + v + "' for '" + key + "'");
}

void parse_sweep(const json& obj, SweepSpec& sweep) {
    check_keys(obj, "sweep", {"variable", "values", "from", "to", "step"});
    read(obj, "variable", sweep.variable);
    if (sweep.variable != "n" && sweep.variable != "M" && sweep.variable != "d")
        fail("sweep.variable must be one of n, M, d");
    if (obj.contains("values")) {
        if (obj.contains("from") || obj.contains("to") || obj.contains("step"))
            fail("sweep: give either values or from/to/step, not both");
        sweep.values = obj.at("values").get<std::vector<double>>();
    } else if (obj.contains("from") || obj.contains("to") || obj.contains("step")) {
        if (!(obj.contains("from") && obj.contains("to") && obj.contains("step")))
            fail("sweep: from/to/step must be given together");
        const double from = obj.at("from").get<double>();
        const double to = obj.at("to").get<double>();
        const double step = obj.at("step").get<double>();
        if (!(step > 0.0) || to < from)
            fail("sweep: need step > 0 and to >= from");
        sweep.values.clear();
        for (double v = from; v <= to + 0.5 * step; v += step)
            sweep.values.push_back(v);
    }
    if (sweep.values.empty())
        fail("sweep: no values");
}

} // namespace

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        fail(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object())
        fail("top level must be a JSON object");

    RunConfig rc;
    try {
        check_keys(j, "top level",
                   {"scenario", "geometry", "backoff", "mac_phy", "model", "throughput",
                    "sim", "sweep", "regime", "out"});
        read(j, "scenario", rc.scenario);
        read(j, "out", rc.out_path);
        read_enum(j, "regime", rc.regime,
                  {{"fd", RegimeSelect::fd}, {"hd", RegimeSelect::hd}, {"both", RegimeSelect::both}});

        if (j.contains("geometry")) {
            const json& g = j.at("geometry");
            check_keys(g, "geometry", {"r", "M", "n"});
            read(g, "r", rc.geometry.r);
            read(g, "M", rc.geometry.M);
            read(g, "n", rc.geometry.n);
        }
        if (j.contains("backoff")) {
            const json& b = j.at("backoff");
            check_keys(b, "backoff", {"W", "m", "rho"});
            read(b, "W", rc.backoff.W);
            read(b, "m", rc.backoff.m);
            if (b.contains("rho")) {
                rc.backoff.rho = b.at("rho").get<int>();
                rc.rho_explicit = true;
            }
        }
        if (j.contains("mac_phy")) {
            const json& m = j.at("mac_phy");
            check_keys(m, "mac_phy",
                       {"data_rate", "control_rate", "phy_header", "mac_header", "fcs",
                        "ack_len", "rts_len", "cts_len", "mpdu_len", "sigma", "delta",
                        "difs", "sifs"});
            read(m, "data_rate", rc.mac_phy.data_rate);
            read(m, "control_rate", rc.mac_phy.control_rate);
            read(m, "phy_header", rc.mac_phy.phy_header);
            read(m, "mac_header", rc.mac_phy.mac_header);
            read(m, "fcs", rc.mac_phy.fcs);
            read(m, "ack_len", rc.mac_phy.ack_len);
            read(m, "rts_len", rc.mac_phy.rts_len);
            read(m, "cts_len", rc.mac_phy.cts_len);
            read(m, "mpdu_len", rc.mac_phy.mpdu_len);
            read(m, "sigma", rc.mac_phy.sigma);
            read(m, "delta", rc.mac_phy.delta);
            read(m, "difs", rc.mac_phy.difs);
            read(m, "sifs", rc.mac_phy.sifs);
        }
        if (j.contains("model")) {
            const json& m = j.at("model");
            check_keys(m, "model",
                       {"h_normalization", "ap_coincidence", "damping", "tolerance",
                        "max_iterations"});
            read_enum(m, "h_normalization", rc.model.h_norm,
                      {{"literal", HNormalization::literal}, {"rescaled", HNormalization::rescaled}});
            read_enum(m, "ap_coincidence", rc.model.ap_coincidence,
                      {{"literal", ApCoincidence::literal}, {"physical", ApCoincidence::physical}});
            read(m, "damping", rc.model.damping);
            read(m, "tolerance", rc.model.tolerance);
            read(m, "max_iterations", rc.model.max_iterations);
        }
        if (j.contains("throughput")) {
            const json& t = j.at("throughput");
            check_keys(t, "throughput", {"payload_mode", "rho_mode"});
            read_enum(t, "payload_mode", rc.payload_mode,
                      {{"payload", PayloadMode::payload}, {"mpdu", PayloadMode::mpdu}});
            read_enum(t, "rho_mode", rc.rho_mode,
                      {{"sigma", RhoMode::sigma}, {"delta", RhoMode::delta}});
        }
        if (j.contains("sim")) {
            const json& s = j.at("sim");
            check_keys(s, "sim", {"horizon", "seed", "replications", "topology", "hidden_model"});
            read(s, "horizon", rc.horizon);
            read(s, "seed", rc.seed);
            read(s, "replications", rc.replications);
            read_enum(s, "topology", rc.topology,
                      {{"pinned", TopologyMode::pinned}, {"sampled", TopologyMode::sampled}});
            read_enum(s, "hidden_model", rc.hidden_model,
                      {{"expected", HiddenModel::expected}, {"realized", HiddenModel::realized}});
        }
        if (j.contains("sweep"))
            parse_sweep(j.at("sweep"), rc.sweep);
    } catch (const json::exception& e) {
        fail(std::string("bad value: ") + e.what());
    }

    validate(rc);
    return rc;
}

void validate(const RunConfig& rc) {
    try {
        validate(rc.geometry);
        validate(rc.backoff);
        validate(rc.mac_phy);
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
    if (!(rc.model.damping > 0.0 && rc.model.damping <= 1.0))
        fail("model.damping must lie in (0, 1]");
    if (!(rc.model.tolerance > 0.0))
        fail("model.tolerance must be positive");
    if (rc.model.max_iterations < 1)
        fail("model.max_iterations must be at least 1");
    if (rc.horizon < 10000)
        fail("sim.horizon must be at least 10000");
    if (rc.replications < 2)
        fail("sim.replications must be at least 2");
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        fail("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

BackoffParams effective_backoff(const RunConfig& rc) {
    BackoffParams bp = rc.backoff;
    if (!rc.rho_explicit)
        bp.rho = frame_durations(rc.mac_phy, rc.rho_mode).rho;
    return bp;
}

SimConfig to_sim_config(const RunConfig& rc, Regime regime) {
    SimConfig sc;
    sc.geometry = rc.geometry;
    sc.backoff = effective_backoff(rc);
    sc.mac_phy = rc.mac_phy;
    sc.regime = regime;
    sc.horizon = rc.horizon;
    sc.seed = rc.seed;
    sc.topology = rc.topology;
    sc.hidden_model = rc.hidden_model;
    sc.payload_mode = rc.payload_mode;
    sc.rho_mode = rc.rho_mode;
    return sc;
}

const char* to_string(Regime v) { return v == Regime::fd ? "fd" : "hd"; }
const char* to_string(HNormalization v) {
    return v == HNormalization::literal ? "literal" : "rescaled";
}
const char* to_string(ApCoincidence v) {
    return v == ApCoincidence::literal ? "literal" : "physical";
}
const char* to_string(PayloadMode v) { return v == PayloadMode::payload ? "payload" : "mpdu"; }
const char* to_string(RhoMode v) { return v == RhoMode::sigma ? "sigma" : "delta"; }
const char* to_string(TopologyMode v) { return v == TopologyMode::pinned ? "pinned" : "sampled"; }
const char* to_string(HiddenModel v) { return v == HiddenModel::expected ? "expected" : "realized"; }

} // namespace fdwlan
