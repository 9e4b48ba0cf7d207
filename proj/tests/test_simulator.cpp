#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fdwlan/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace fdwlan;

namespace {

SimConfig base_cfg(int n, int M, Regime reg, std::int64_t horizon, std::uint64_t seed) {
    SimConfig cfg;
    cfg.geometry = GeometryConfig{1.0, M, n};
    cfg.regime = reg;
    cfg.horizon = horizon;
    cfg.seed = seed;
    return cfg;
}

std::int64_t total_slots(const SimResult& r) {
    return r.idle_slots + r.hd_success_slots + r.sfd_success_slots + r.afd_success_slots +
           r.collision_slots;
}

} // namespace

TEST_CASE("pinned topology: largest-remainder apportionment") {
    // M=5, n=10: expected populations [0.4, 1.2, 2.0, 2.8, 3.6] -> [0, 1, 2, 3, 4]
    const SimConfig cfg = base_cfg(10, 5, Regime::fd, 10000, 7);
    const Topology topo = sample_topology(cfg, cfg.seed);
    std::vector<int> cnt(5, 0);
    for (int s = 0; s < 10; ++s) {
        ++cnt[topo.annulus[s] - 1];
        const double dist = std::hypot(topo.x[s], topo.y[s]);
        // pinned stations sit exactly on their annulus midpoint circle
        CHECK(dist == doctest::Approx((2.0 * topo.annulus[s] - 1.0) / 10.0).epsilon(1e-12));
    }
    CHECK(cnt == std::vector<int>{0, 1, 2, 3, 4});

    // fractional ties resolve toward the inner annulus: [0.5, 1.5] -> [1, 1]
    const Topology tie = sample_topology(base_cfg(2, 2, Regime::fd, 10000, 3), 3);
    std::vector<int> cnt2(2, 0);
    for (int s = 0; s < 2; ++s)
        ++cnt2[tie.annulus[s] - 1];
    CHECK(cnt2 == std::vector<int>{1, 1});

    // n=1: single station, no hidden pairs
    const Topology lone = sample_topology(base_cfg(1, 1, Regime::fd, 10000, 1), 1);
    CHECK(lone.hidden[0][0] == 0);

    // deterministic in (cfg, seed)
    const Topology again = sample_topology(cfg, cfg.seed);
    CHECK(again.x == topo.x);
    CHECK(again.y == topo.y);
    CHECK(again.annulus == topo.annulus);
}

TEST_CASE("sampled topology: positions and realized hidden fractions") {
    SimConfig cfg = base_cfg(2000, 5, Regime::fd, 10000, 42);
    cfg.topology = TopologyMode::sampled;
    const Topology topo = sample_topology(cfg, cfg.seed);

    double band_frac = 0.0, band_ref = 0.0;
    int band_cnt = 0;
    for (int s = 0; s < 2000; ++s) {
        const double dist = std::hypot(topo.x[s], topo.y[s]);
        CHECK(dist <= 1.0);
        // annulus index reflects the drawn distance
        CHECK(topo.annulus[s] == std::min(static_cast<int>(dist * 5.0), 4) + 1);
        // hidden matrix is symmetric and zero on the diagonal
        CHECK(topo.hidden[s][s] == 0);
        if (dist >= 0.85 && dist <= 0.95) {
            int hid = 0;
            for (int q = 0; q < 2000; ++q)
                hid += topo.hidden[s][q];
            band_frac += static_cast<double>(hid) / 1999.0;
            band_ref += hidden_prob(1.0, dist);
            ++band_cnt;
        }
    }
    REQUIRE(band_cnt > 100);
    // realized hidden fraction tracks hidden_prob at the station's distance
    CHECK(std::abs(band_frac / band_cnt - band_ref / band_cnt) <= 0.006);
}

TEST_CASE("run: single station cell never collides under full duplex") {
    const SimConfig cfg = base_cfg(1, 1, Regime::fd, 200000, 11);
    const SimResult res = run(cfg);
    CHECK(total_slots(res) == cfg.horizon);
    CHECK(res.collision_slots == 0);
    CHECK(res.p_ap_hat == 0.0);
    CHECK(res.node_p_hat[0] == 0.0);
    CHECK(res.sfd_success_slots > 0); // pair slots resolve to the lone destination
    CHECK(res.afd_success_slots == 0);
    CHECK(res.tau_ap_hat == doctest::Approx(2.0 / 17.0).epsilon(0.03));
    CHECK(res.tau_hat[0] == doctest::Approx(2.0 / 17.0).epsilon(0.03));
    CHECK(res.S_hat == doctest::Approx(192.187793101e6).epsilon(0.10));
}

TEST_CASE("run: single station cell under half duplex") {
    const SimConfig cfg = base_cfg(1, 1, Regime::hd, 200000, 12);
    const SimResult res = run(cfg);
    CHECK(total_slots(res) == cfg.horizon);
    CHECK(res.sfd_success_slots == 0);
    CHECK(res.afd_success_slots == 0);
    CHECK(res.collision_slots > 0); // AP/station overlaps now collide
    // each node fails exactly when the peer transmits with it, so the
    // empirical p tracks the peer's attempt rate
    CHECK(std::abs(res.node_p_hat[0] - res.tau_ap_hat) <= 0.02);
    CHECK(std::abs(res.p_ap_hat - res.tau_hat[0]) <= 0.02);
}

TEST_CASE("run: determinism and counter conservation") {
    for (Regime reg : {Regime::fd, Regime::hd}) {
        const SimConfig cfg = base_cfg(5, 1, reg, 50000, 99);
        const SimResult a = run(cfg);
        const SimResult b = run(cfg);
        CHECK(total_slots(a) == cfg.horizon);
        CHECK(a.idle_slots == b.idle_slots);
        CHECK(a.hd_success_slots == b.hd_success_slots);
        CHECK(a.sfd_success_slots == b.sfd_success_slots);
        CHECK(a.afd_success_slots == b.afd_success_slots);
        CHECK(a.collision_slots == b.collision_slots);
        CHECK(a.S_hat == b.S_hat);
        CHECK(a.tau_ap_hat == b.tau_ap_hat);
        CHECK(a.node_tau_hat == b.node_tau_hat);
        // AP pair successes cannot outnumber AP attempts
        const auto att_ap = static_cast<std::int64_t>(std::llround(a.tau_ap_hat * cfg.horizon));
        CHECK(a.sfd_success_slots + a.afd_success_slots <= att_ap);
        // half duplex has no pair successes at all
        if (reg == Regime::hd) {
            CHECK(a.sfd_success_slots == 0);
            CHECK(a.afd_success_slots == 0);
        }
    }
}

TEST_CASE("run: hidden interference raises station failure rates") {
    // same contention, more hidden exposure: outer-annulus stations fail more
    SimConfig cfg = base_cfg(10, 5, Regime::fd, 200000, 5);
    const SimResult res = run(cfg);
    CHECK(total_slots(res) == cfg.horizon);
    // annulus 1 is empty under pinned apportionment at n=10
    CHECK(std::isnan(res.tau_hat[0]));
    CHECK(res.low_sample_warning);
    // occupied annuli: failure probability grows outward
    for (int i = 2; i < 5; ++i)
        CHECK(res.p_hat[i] > res.p_hat[i - 1]);
}

TEST_CASE("run: realized hidden model on a sampled topology") {
    SimConfig cfg = base_cfg(20, 1, Regime::fd, 100000, 321);
    cfg.topology = TopologyMode::sampled;
    cfg.hidden_model = HiddenModel::realized;
    const SimResult res = run(cfg);
    CHECK(total_slots(res) == cfg.horizon);
    CHECK(res.p_hat[0] > 0.0);
    CHECK(res.S_hat > 0.0);
}

TEST_CASE("run: simulated throughput matches the solved model") {
    // station-weighted mid-size cell; loose 10% envelope
    SimConfig cfg = base_cfg(10, 5, Regime::fd, 200000, 2024);
    SimResult res = estimate(cfg, 5);
    const FixedPointSolution sol = solve(cfg.geometry, cfg.backoff, Regime::fd);
    const ThroughputReport rep = throughput_report(
        sol, cfg.geometry, frame_durations(cfg.mac_phy), cfg.mac_phy);
    CHECK(std::abs(res.S_hat - rep.S) / rep.S <= 0.10);

    // and the measured full-duplex edge over half duplex is positive
    cfg.geometry.n = 5;
    cfg.geometry.M = 1;
    const SimResult fd = estimate(cfg, 5);
    cfg.regime = Regime::hd;
    const SimResult hd = estimate(cfg, 5);
    CHECK(fd.S_hat > hd.S_hat);
}

TEST_CASE("estimate: aggregation and replication spread") {
    const SimConfig cfg = base_cfg(5, 1, Regime::fd, 20000, 77);
    CHECK_THROWS_AS(estimate(cfg, 1), std::invalid_argument);

    const SimResult a = estimate(cfg, 4);
    const SimResult b = estimate(cfg, 4);
    CHECK(a.tau_ap_hat == b.tau_ap_hat); // deterministic
    CHECK(a.S_hat == b.S_hat);
    CHECK(a.replications == 4);
    CHECK(total_slots(a) == 4 * cfg.horizon);
    CHECK(a.tau_ap_sd > 0.0);
    CHECK(a.tau_ap_ci95 == doctest::Approx(1.96 * a.tau_ap_sd / 2.0).epsilon(1e-12));

    // more replications tighten the interval
    const SimResult wide = estimate(cfg, 16);
    CHECK(wide.tau_ap_ci95 < a.tau_ap_ci95);
}

TEST_CASE("run: slot trace") {
    SimConfig cfg = base_cfg(2, 1, Regime::fd, 10000, 8);
    std::ostringstream trace;
    const SimResult res = run(cfg, &trace);
    CHECK(total_slots(res) == cfg.horizon);
    const std::string text = trace.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == cfg.horizon);
    // first record: slot 0, kind, transmitter set, outcome
    std::istringstream first(text.substr(0, text.find('\n')));
    std::string slot, kind, who, outcome;
    first >> slot >> kind >> who >> outcome;
    CHECK(slot == "0");
    CHECK((kind == "idle" || kind == "success" || kind == "collision"));
    CHECK(!who.empty());
    CHECK(!outcome.empty());
}

TEST_CASE("config validation") {
    SimConfig cfg = base_cfg(5, 1, Regime::fd, 100, 1);
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument); // horizon too short
    cfg.horizon = 10000;
    CHECK_NOTHROW(validate(cfg));
    cfg.geometry.n = 0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}
