#include "fdwlan/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>

namespace fdwlan {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// splitmix64 finalizer; used to derive decorrelated per-node / per-replication
// seeds from the master seed.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint64_t substream(std::uint64_t master, std::uint64_t lane, std::uint64_t idx) {
    return mix64(mix64(master + 0x9e3779b97f4a7c15ull * (lane + 1)) + idx);
}

double uniform01(std::mt19937_64& g) { return (g() >> 11) * 0x1.0p-53; }

// Uniform integer in [0, bound), rejection-sampled to avoid modulo bias and
// keep the draw sequence identical across platforms.
std::int64_t bounded_int(std::mt19937_64& g, std::int64_t bound) {
    const std::uint64_t span = static_cast<std::uint64_t>(bound);
    const std::uint64_t max64 = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t reject = (max64 % span + 1) % span; // 2^64 mod span
    const std::uint64_t limit = max64 - reject;
    std::uint64_t x = g();
    while (x > limit)
        x = g();
    return static_cast<std::int64_t>(x % span);
}

// Largest-remainder rounding of the fractional annulus populations; ties go
// to the inner annulus.
std::vector<int> apportion(const AnnulusLayout& layout, int n) {
    const int M = static_cast<int>(layout.node_counts.size());
    std::vector<int> cnt(M);
    std::vector<std::pair<double, int>> frac(M);
    int assigned = 0;
    for (int i = 0; i < M; ++i) {
        cnt[i] = static_cast<int>(std::floor(layout.node_counts[i]));
        assigned += cnt[i];
        frac[i] = {layout.node_counts[i] - cnt[i], i};
    }
    std::stable_sort(frac.begin(), frac.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (int k = 0; k < n - assigned; ++k)
        ++cnt[frac[k].second];
    return cnt;
}

int annulus_of(double dist, double r, int M) {
    const int idx = static_cast<int>(std::floor(dist / r * M));
    return std::min(idx, M - 1) + 1;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    int c = 0;
    for (double x : v)
        if (!std::isnan(x)) {
            s += x;
            ++c;
        }
    return c > 0 ? s / c : kNaN;
}

double sd_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    if (std::isnan(m))
        return kNaN;
    double s = 0.0;
    int c = 0;
    for (double x : v)
        if (!std::isnan(x)) {
            s += (x - m) * (x - m);
            ++c;
        }
    return c > 1 ? std::sqrt(s / (c - 1)) : 0.0;
}

int count_of(const std::vector<double>& v) {
    int c = 0;
    for (double x : v)
        if (!std::isnan(x))
            ++c;
    return c;
}

} // namespace

void validate(const SimConfig& cfg) {
    validate(cfg.geometry);
    validate(cfg.backoff);
    validate(cfg.mac_phy);
    if (cfg.horizon < 10000)
        throw std::invalid_argument("sim: horizon must be at least 10000 virtual slots");
}

Topology sample_topology(const SimConfig& cfg, std::uint64_t seed) {
    validate(cfg.geometry);
    const int n = cfg.geometry.n;
    const int M = cfg.geometry.M;
    const double r = cfg.geometry.r;
    const AnnulusLayout layout = annulus_layout(cfg.geometry);

    Topology topo;
    topo.x.resize(n);
    topo.y.resize(n);
    topo.annulus.resize(n);

    std::vector<int> pinned_annulus;
    if (cfg.topology == TopologyMode::pinned) {
        const std::vector<int> cnt = apportion(layout, n);
        for (int i = 0; i < M; ++i)
            pinned_annulus.insert(pinned_annulus.end(), cnt[i], i + 1);
    }

    for (int s = 0; s < n; ++s) {
        std::mt19937_64 g(substream(seed, 2, static_cast<std::uint64_t>(s)));
        double dist, theta;
        if (cfg.topology == TopologyMode::pinned) {
            topo.annulus[s] = pinned_annulus[s];
            dist = layout.distances[topo.annulus[s] - 1];
            theta = 2.0 * kPi * uniform01(g);
        } else {
            dist = r * std::sqrt(uniform01(g)); // area-uniform radius
            theta = 2.0 * kPi * uniform01(g);
            topo.annulus[s] = annulus_of(dist, r, M);
        }
        topo.x[s] = dist * std::cos(theta);
        topo.y[s] = dist * std::sin(theta);
    }

    topo.hidden.assign(n, std::vector<char>(n, 0));
    for (int s = 0; s < n; ++s)
        for (int q = s + 1; q < n; ++q) {
            const double dx = topo.x[s] - topo.x[q];
            const double dy = topo.y[s] - topo.y[q];
            const char hid = std::hypot(dx, dy) > r ? 1 : 0;
            topo.hidden[s][q] = hid;
            topo.hidden[q][s] = hid;
        }
    return topo;
}

SimResult run(const SimConfig& cfg, std::ostream* trace) {
    validate(cfg);
    const int n = cfg.geometry.n;
    const int M = cfg.geometry.M;
    const int W = cfg.backoff.W;
    const int m = cfg.backoff.m;
    const double window = 2.0 * cfg.backoff.rho - 1.0;
    const bool fd = cfg.regime == Regime::fd;

    const SlotDurations dur = frame_durations(cfg.mac_phy, cfg.rho_mode);
    const std::int64_t sigma_ns = std::llround(cfg.mac_phy.sigma * 1e9);
    const std::int64_t frame_bits = payload_bits(cfg.mac_phy, cfg.payload_mode);

    const Topology topo = sample_topology(cfg, cfg.seed);

    // Pairwise interference weight: probability that q can collide with a
    // lone uplink of s via the hidden-terminal window.
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    if (cfg.hidden_model == HiddenModel::expected) {
        const HiddenCounts hc = hidden_counts(cfg.geometry);
        for (int s = 0; s < n; ++s)
            for (int q = 0; q < n; ++q)
                if (q != s)
                    w[s][q] = hc.p_cond[topo.annulus[s] - 1][topo.annulus[q] - 1];
    } else {
        for (int s = 0; s < n; ++s)
            for (int q = 0; q < n; ++q)
                w[s][q] = topo.hidden[s][q] ? 1.0 : 0.0;
    }

    std::mt19937_64 ap_rng(substream(cfg.seed, 0, 0));
    std::vector<std::mt19937_64> rng;
    rng.reserve(n);
    for (int q = 0; q < n; ++q)
        rng.emplace_back(substream(cfg.seed, 1, static_cast<std::uint64_t>(q)));

    int k_ap = 0;
    std::int64_t c_ap = bounded_int(ap_rng, W);
    std::vector<int> k(n, 0);
    std::vector<std::int64_t> c(n);
    for (int q = 0; q < n; ++q)
        c[q] = bounded_int(rng[q], W);

    std::int64_t att_ap = 0, coll_ap = 0;
    std::vector<std::int64_t> att(n, 0), coll(n, 0);

    SimResult res;
    std::int64_t time_ns = 0;

    // Prior pseudo-counts stabilize the peer attempt-rate estimate used for
    // hidden-window draws before enough slots have elapsed.
    const double tau0 = 2.0 / (W + 1.0);
    const double kprior = 128.0;

    std::vector<int> tx;
    tx.reserve(n);

    for (std::int64_t t = 0; t < cfg.horizon; ++t) {
        const bool ap_tx = (c_ap == 0);
        tx.clear();
        for (int q = 0; q < n; ++q)
            if (c[q] == 0)
                tx.push_back(q);
        const int nsta = static_cast<int>(tx.size());

        if (ap_tx)
            ++att_ap;
        for (int q : tx)
            ++att[q];

        bool ap_ok = false;
        int ok_station = -1; // at most one station chain can succeed per slot
        const char* kind = "collision";
        const char* outcome = "multi";

        if (!ap_tx && nsta == 0) {
            ++res.idle_slots;
            time_ns += sigma_ns;
            kind = "idle";
            outcome = "idle";
        } else if (ap_tx && nsta == 0) {
            ++res.hd_success_slots;
            time_ns += dur.T_s;
            ap_ok = true;
            kind = "success";
            outcome = "lone_ap";
        } else if (!ap_tx && nsta == 1) {
            // Lone uplink: the slot delivers its frame; the station's chain
            // additionally survives only if no hidden peer hits the window.
            const int s = tx[0];
            ++res.hd_success_slots;
            time_ns += dur.T_s;
            kind = "success";
            double psurv = 1.0;
            for (int q = 0; q < n; ++q) {
                if (q == s || w[s][q] == 0.0)
                    continue;
                const double tau_q = (att[q] + tau0 * kprior) / (t + 1.0 + kprior);
                psurv *= std::pow(1.0 - tau_q, w[s][q] * window);
            }
            if (uniform01(rng[s]) < psurv) {
                ok_station = s;
                outcome = "lone_sta";
            } else {
                outcome = "lone_sta_hidden";
            }
        } else if (ap_tx && nsta == 1 && fd) {
            // AP/station pair: the uplink always lands; the AP frame lands
            // iff its destination is the transmitter or hidden from it.
            const int s = tx[0];
            ok_station = s;
            time_ns += dur.T_s;
            kind = "success";
            const int dest = static_cast<int>(bounded_int(ap_rng, n));
            if (dest == s) {
                ++res.sfd_success_slots;
                ap_ok = true;
                outcome = "sfd";
            } else if (uniform01(ap_rng) < w[s][dest]) {
                ++res.afd_success_slots;
                ap_ok = true;
                outcome = "afd";
            } else {
                ++res.hd_success_slots;
                outcome = "pair_miss";
            }
        } else {
            ++res.collision_slots;
            time_ns += dur.T_c;
            outcome = (ap_tx && nsta == 1) ? "hd_pair" : "multi";
        }

        if (trace) {
            *trace << t << '\t' << kind << '\t';
            bool first = true;
            if (ap_tx) {
                *trace << "ap";
                first = false;
            }
            for (int q : tx) {
                if (!first)
                    *trace << '+';
                *trace << 's' << q;
                first = false;
            }
            if (first)
                *trace << '-';
            *trace << '\t' << outcome << '\n';
        }

        // Backoff chain updates: transmitters resolve their outcome and
        // redraw, everyone else counts down.
        if (ap_tx) {
            if (ap_ok)
                k_ap = 0;
            else {
                ++coll_ap;
                k_ap = std::min(k_ap + 1, m);
            }
            c_ap = bounded_int(ap_rng, static_cast<std::int64_t>(W) << k_ap);
        } else {
            --c_ap;
        }
        std::size_t ti = 0;
        for (int q = 0; q < n; ++q) {
            if (ti < tx.size() && tx[ti] == q) {
                ++ti;
                if (q == ok_station)
                    k[q] = 0;
                else {
                    ++coll[q];
                    k[q] = std::min(k[q] + 1, m);
                }
                c[q] = bounded_int(rng[q], static_cast<std::int64_t>(W) << k[q]);
            } else {
                --c[q];
            }
        }
    }

    res.elapsed_ns = time_ns;
    res.node_tau_hat.resize(n);
    res.node_p_hat.resize(n);
    for (int q = 0; q < n; ++q) {
        res.node_tau_hat[q] = static_cast<double>(att[q]) / cfg.horizon;
        res.node_p_hat[q] = att[q] > 0 ? static_cast<double>(coll[q]) / att[q] : kNaN;
    }
    res.tau_ap_hat = static_cast<double>(att_ap) / cfg.horizon;
    res.p_ap_hat = att_ap > 0 ? static_cast<double>(coll_ap) / att_ap : kNaN;

    res.tau_hat.assign(M, kNaN);
    res.p_hat.assign(M, kNaN);
    res.tau_hat_sd.assign(M, 0.0);
    res.p_hat_sd.assign(M, 0.0);
    res.tau_hat_ci95.assign(M, 0.0);
    res.p_hat_ci95.assign(M, 0.0);
    std::vector<std::int64_t> att_i(M, 0), coll_i(M, 0), members(M, 0);
    for (int q = 0; q < n; ++q) {
        const int i = topo.annulus[q] - 1;
        ++members[i];
        att_i[i] += att[q];
        coll_i[i] += coll[q];
    }
    for (int i = 0; i < M; ++i) {
        if (members[i] == 0) {
            res.low_sample_warning = true;
            continue;
        }
        res.tau_hat[i] = static_cast<double>(att_i[i]) / (static_cast<double>(members[i]) * cfg.horizon);
        res.p_hat[i] = att_i[i] > 0 ? static_cast<double>(coll_i[i]) / att_i[i] : kNaN;
        if (att_i[i] < 100)
            res.low_sample_warning = true;
    }

    const std::int64_t success = res.hd_success_slots + res.sfd_success_slots + res.afd_success_slots;
    res.S_hat = static_cast<double>(frame_bits) * success * 1e9 / static_cast<double>(time_ns);
    return res;
}

SimResult estimate(const SimConfig& cfg, int replications) {
    if (replications < 2)
        throw std::invalid_argument("sim: estimate needs at least 2 replications");
    validate(cfg);
    const int M = cfg.geometry.M;

    std::vector<SimResult> runs;
    runs.reserve(replications);
    for (int rep = 0; rep < replications; ++rep) {
        SimConfig c = cfg;
        c.seed = substream(cfg.seed, 3, static_cast<std::uint64_t>(rep));
        runs.push_back(run(c));
    }

    SimResult agg;
    agg.replications = replications;
    auto collect = [&](auto getter) {
        std::vector<double> v(replications);
        for (int rep = 0; rep < replications; ++rep)
            v[rep] = getter(runs[rep]);
        return v;
    };
    auto summarize = [&](const std::vector<double>& v, double& mean, double& sd, double& ci) {
        mean = mean_of(v);
        sd = sd_of(v);
        const int cnt = count_of(v);
        ci = cnt > 0 ? 1.96 * sd / std::sqrt(static_cast<double>(cnt)) : kNaN;
    };

    summarize(collect([](const SimResult& r) { return r.tau_ap_hat; }),
              agg.tau_ap_hat, agg.tau_ap_sd, agg.tau_ap_ci95);
    summarize(collect([](const SimResult& r) { return r.p_ap_hat; }),
              agg.p_ap_hat, agg.p_ap_sd, agg.p_ap_ci95);
    summarize(collect([](const SimResult& r) { return r.S_hat; }),
              agg.S_hat, agg.S_sd, agg.S_ci95);

    agg.tau_hat.assign(M, kNaN);
    agg.p_hat.assign(M, kNaN);
    agg.tau_hat_sd.assign(M, kNaN);
    agg.p_hat_sd.assign(M, kNaN);
    agg.tau_hat_ci95.assign(M, kNaN);
    agg.p_hat_ci95.assign(M, kNaN);
    for (int i = 0; i < M; ++i) {
        summarize(collect([i](const SimResult& r) { return r.tau_hat[i]; }),
                  agg.tau_hat[i], agg.tau_hat_sd[i], agg.tau_hat_ci95[i]);
        summarize(collect([i](const SimResult& r) { return r.p_hat[i]; }),
                  agg.p_hat[i], agg.p_hat_sd[i], agg.p_hat_ci95[i]);
    }

    for (const SimResult& r : runs) {
        agg.idle_slots += r.idle_slots;
        agg.hd_success_slots += r.hd_success_slots;
        agg.sfd_success_slots += r.sfd_success_slots;
        agg.afd_success_slots += r.afd_success_slots;
        agg.collision_slots += r.collision_slots;
        agg.elapsed_ns += r.elapsed_ns;
        agg.low_sample_warning = agg.low_sample_warning || r.low_sample_warning;
    }
    return agg;
}

} // namespace fdwlan
