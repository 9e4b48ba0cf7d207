#include "fdwlan/cli.hpp"

#include "fdwlan/simulator.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <vector>

namespace fdwlan {

namespace {

struct RegimeRun {
    FixedPointSolution sol;
    ThroughputReport rep;
};

std::vector<Regime> selected_regimes(RegimeSelect sel) {
    switch (sel) {
    case RegimeSelect::fd: return {Regime::fd};
    case RegimeSelect::hd: return {Regime::hd};
    default: return {Regime::fd, Regime::hd};
    }
}

void write_header(std::ostream& os, const char* cmd, const RunConfig& rc, int rho) {
    os << "# fdwlan " << cmd << " scenario=" << rc.scenario
       << " h_normalization=" << to_string(rc.model.h_norm)
       << " ap_coincidence=" << to_string(rc.model.ap_coincidence)
       << " payload_mode=" << to_string(rc.payload_mode)
       << " rho_mode=" << to_string(rc.rho_mode) << " rho=" << rho << "\n";
}

// Cells of one CSV row; empty strings stay empty between the commas.
void write_row(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0)
            os << ',';
        os << cells[i];
    }
    os << '\n';
}

int require_integer(double v, const char* what) {
    if (!(v >= 1.0) || std::floor(v) != v)
        throw ConfigError(std::string("sweep: ") + what + " values must be positive integers");
    return static_cast<int>(v);
}

} // namespace

std::string csv_num(double v) {
    if (std::isnan(v))
        return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

int cmd_solve(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    try {
        const BackoffParams bp = effective_backoff(rc);
        const SlotDurations dur = frame_durations(rc.mac_phy, rc.rho_mode);
        const AnnulusLayout layout = annulus_layout(rc.geometry);
        const HiddenCounts hidden = hidden_counts(rc.geometry, rc.model.h_norm);
        const std::vector<Regime> regimes = selected_regimes(rc.regime);

        std::vector<RegimeRun> runs;
        for (Regime reg : regimes) {
            RegimeRun run;
            run.sol = solve(rc.geometry, bp, reg, rc.model);
            run.rep = throughput_report(run.sol, rc.geometry, dur, rc.mac_phy, rc.payload_mode);
            runs.push_back(std::move(run));
        }
        std::string gain;
        if (runs.size() == 2)
            gain = csv_num(runs[0].rep.S / runs[1].rep.S);

        std::ostringstream buf;
        write_header(buf, "solve", rc, bp.rho);
        buf << "regime,row,i,d_i,n_i,h_i,tau,p,P_t,P_s,P_s_hd,P_s_fd,S_mbps,gain,"
               "converged,iterations,residual\n";
        for (const RegimeRun& run : runs) {
            const std::string reg = to_string(run.sol.regime);
            for (int i = 1; i <= rc.geometry.M; ++i)
                write_row(buf, {reg, "annulus", std::to_string(i),
                                csv_num(layout.distances[i - 1]),
                                csv_num(layout.node_counts[i - 1]), csv_num(hidden.h[i - 1]),
                                csv_num(run.sol.tau_sta[i - 1]), csv_num(run.sol.p_sta[i - 1]),
                                "", "", "", "", "", "", "", "", ""});
            write_row(buf, {reg, "ap", "", "", "", "", csv_num(run.sol.tau_ap),
                            csv_num(run.sol.p_ap), "", "", "", "", "", "", "", "", ""});
            write_row(buf, {reg, "summary", "", "", "", "", "", "", csv_num(run.rep.P_t),
                            csv_num(run.rep.P_s), csv_num(run.rep.P_s_hd_part),
                            csv_num(run.rep.P_s_fd_part), csv_num(run.rep.S / 1e6), gain,
                            run.sol.converged ? "1" : "0", std::to_string(run.sol.iterations),
                            csv_num(run.sol.residual)});
        }
        out << buf.str();
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_sweep(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    try {
        if (rc.sweep.values.empty())
            throw ConfigError("sweep: no values configured (set sweep.variable and values)");
        std::ostringstream buf;

        if (rc.sweep.variable == "d") {
            write_header(buf, "sweep", rc, effective_backoff(rc).rho);
            buf << "variable,value,p_h\n";
            for (double d : rc.sweep.values)
                write_row(buf, {"d", csv_num(d), csv_num(hidden_prob(rc.geometry.r, d))});
            out << buf.str();
            return 0;
        }

        const bool sweep_n = rc.sweep.variable == "n";
        const BackoffParams bp = effective_backoff(rc);
        const SlotDurations dur = frame_durations(rc.mac_phy, rc.rho_mode);
        const std::vector<Regime> regimes = selected_regimes(rc.regime);
        const bool both = regimes.size() == 2;

        write_header(buf, "sweep", rc, bp.rho);
        buf << "variable,value,r,M,n,rho,p_h_max,status,S_fd_mbps,S_hd_mbps,gain,"
               "P_t_fd,P_s_fd,P_t_hd,P_s_hd,tau_ap_fd,p_ap_fd,tau_ap_hd,p_ap_hd";
        if (sweep_n) {
            // M is fixed across rows, so per-annulus columns are well defined
            for (const char* reg : {"fd", "hd"}) {
                for (int i = 1; i <= rc.geometry.M; ++i)
                    buf << ",tau_" << reg << "_" << i;
                for (int i = 1; i <= rc.geometry.M; ++i)
                    buf << ",p_" << reg << "_" << i;
            }
        }
        buf << "\n";

        for (double value : rc.sweep.values) {
            GeometryConfig g = rc.geometry;
            if (sweep_n)
                g.n = require_integer(value, "n");
            else
                g.M = require_integer(value, "M");
            const double d_max = (2.0 * g.M - 1.0) * g.r / (2.0 * g.M);

            std::optional<RegimeRun> fd, hd;
            bool ok = true;
            for (Regime reg : regimes) {
                RegimeRun run;
                run.sol = solve(g, bp, reg, rc.model);
                run.rep = throughput_report(run.sol, g, dur, rc.mac_phy, rc.payload_mode);
                ok = ok && run.sol.converged;
                (reg == Regime::fd ? fd : hd) = std::move(run);
            }

            std::vector<std::string> cells{
                rc.sweep.variable, csv_num(value), csv_num(g.r), std::to_string(g.M),
                std::to_string(g.n), std::to_string(bp.rho),
                csv_num(hidden_prob(g.r, d_max)), ok ? "ok" : "no_convergence",
                fd ? csv_num(fd->rep.S / 1e6) : "", hd ? csv_num(hd->rep.S / 1e6) : "",
                (both && fd && hd) ? csv_num(fd->rep.S / hd->rep.S) : "",
                fd ? csv_num(fd->rep.P_t) : "", fd ? csv_num(fd->rep.P_s) : "",
                hd ? csv_num(hd->rep.P_t) : "", hd ? csv_num(hd->rep.P_s) : "",
                fd ? csv_num(fd->sol.tau_ap) : "", fd ? csv_num(fd->sol.p_ap) : "",
                hd ? csv_num(hd->sol.tau_ap) : "", hd ? csv_num(hd->sol.p_ap) : ""};
            if (sweep_n) {
                for (const std::optional<RegimeRun>* run : {&fd, &hd}) {
                    for (int i = 0; i < g.M; ++i)
                        cells.push_back(*run ? csv_num((*run)->sol.tau_sta[i]) : "");
                    for (int i = 0; i < g.M; ++i)
                        cells.push_back(*run ? csv_num((*run)->sol.p_sta[i]) : "");
                }
            }
            write_row(buf, cells);
        }
        out << buf.str();
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_simulate(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    try {
        const BackoffParams bp = effective_backoff(rc);
        const SlotDurations dur = frame_durations(rc.mac_phy, rc.rho_mode);
        std::ostringstream buf;
        write_header(buf, "simulate", rc, bp.rho);
        buf << "regime,quantity,scope,analytic,estimate,sd,ci95,rel_err\n";

        auto rel = [](double an, double est) {
            return (an != 0.0 && !std::isnan(an) && !std::isnan(est))
                       ? csv_num((est - an) / an)
                       : std::string();
        };

        for (Regime reg : selected_regimes(rc.regime)) {
            const FixedPointSolution sol = solve(rc.geometry, bp, reg, rc.model);
            const ThroughputReport rep =
                throughput_report(sol, rc.geometry, dur, rc.mac_phy, rc.payload_mode);
            const SimResult res = estimate(to_sim_config(rc, reg), rc.replications);
            const std::string r = to_string(reg);

            write_row(buf, {r, "tau", "ap", csv_num(sol.tau_ap), csv_num(res.tau_ap_hat),
                            csv_num(res.tau_ap_sd), csv_num(res.tau_ap_ci95),
                            rel(sol.tau_ap, res.tau_ap_hat)});
            write_row(buf, {r, "p", "ap", csv_num(sol.p_ap), csv_num(res.p_ap_hat),
                            csv_num(res.p_ap_sd), csv_num(res.p_ap_ci95),
                            rel(sol.p_ap, res.p_ap_hat)});
            for (int i = 0; i < rc.geometry.M; ++i) {
                const std::string scope = "annulus_" + std::to_string(i + 1);
                write_row(buf, {r, "tau", scope, csv_num(sol.tau_sta[i]),
                                csv_num(res.tau_hat[i]), csv_num(res.tau_hat_sd[i]),
                                csv_num(res.tau_hat_ci95[i]),
                                rel(sol.tau_sta[i], res.tau_hat[i])});
                write_row(buf, {r, "p", scope, csv_num(sol.p_sta[i]), csv_num(res.p_hat[i]),
                                csv_num(res.p_hat_sd[i]), csv_num(res.p_hat_ci95[i]),
                                rel(sol.p_sta[i], res.p_hat[i])});
            }
            write_row(buf, {r, "S_mbps", "total", csv_num(rep.S / 1e6),
                            csv_num(res.S_hat / 1e6), csv_num(res.S_sd / 1e6),
                            csv_num(res.S_ci95 / 1e6), rel(rep.S, res.S_hat)});
            write_row(buf, {r, "slots", "idle", "", std::to_string(res.idle_slots), "", "", ""});
            write_row(buf, {r, "slots", "success_hd", "",
                            std::to_string(res.hd_success_slots), "", "", ""});
            write_row(buf, {r, "slots", "success_sfd", "",
                            std::to_string(res.sfd_success_slots), "", "", ""});
            write_row(buf, {r, "slots", "success_afd", "",
                            std::to_string(res.afd_success_slots), "", "", ""});
            write_row(buf, {r, "slots", "collision", "",
                            std::to_string(res.collision_slots), "", "", ""});
            write_row(buf, {r, "flag", "low_sample_warning", "",
                            res.low_sample_warning ? "1" : "0", "", "", ""});
        }
        out << buf.str();
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_figures(const std::string& preset, const RunConfig& rc, std::ostream& out,
                std::ostream& err) {
    try {
        if (preset == "fig4") {
            // Hidden probability at the outermost midpoint distance vs. the
            // annulus count; pure geometry, no fixed point involved.
            std::ostringstream buf;
            write_header(buf, "figures fig4", rc, effective_backoff(rc).rho);
            buf << "M,d_M,p_h_max\n";
            for (int M = 1; M <= 50; ++M) {
                const double d = (2.0 * M - 1.0) * rc.geometry.r / (2.0 * M);
                write_row(buf, {std::to_string(M), csv_num(d),
                                csv_num(hidden_prob(rc.geometry.r, d))});
            }
            out << buf.str();
            return 0;
        }

        RunConfig d = rc;
        d.regime = RegimeSelect::both;
        d.sweep.variable = "n";
        d.sweep.values.clear();
        if (preset == "fig5" || preset == "fig6") {
            for (int n = 5; n <= 50; n += 5)
                d.sweep.values.push_back(n);
        } else if (preset == "fig7") {
            for (int n = 5; n <= 50; n += 5)
                d.sweep.values.push_back(n);
            for (int n : {100, 200, 500, 1000})
                d.sweep.values.push_back(n);
        } else {
            err << "error: unknown figures preset '" << preset << "'\n";
            return 1;
        }
        return cmd_sweep(d, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Saturation throughput of an infrastructure WLAN whose nodes are "
                 "full-duplex capable, with hidden terminals"};
    app.require_subcommand(1);

    std::string config_path, out_path, preset;
    std::string regime_s, h_norm_s, ap_s, payload_s, rho_mode_s, topo_s, hidden_s;
    std::uint64_t seed = 0;
    long long horizon = 0;
    int replications = 0, n = 0, M = 0;
    double r = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--out", out_path, "output CSV path (default: stdout)");
        sub->add_option("--n", n, "station count");
        sub->add_option("--M", M, "annulus count");
        sub->add_option("--r", r, "cell radius");
        sub->add_option("--seed", seed, "master RNG seed");
        sub->add_option("--regime", regime_s, "fd | hd | both")
            ->check(CLI::IsMember({"fd", "hd", "both"}));
        sub->add_option("--h-normalization", h_norm_s, "literal | rescaled")
            ->check(CLI::IsMember({"literal", "rescaled"}));
        sub->add_option("--ap-coincidence", ap_s, "literal | physical")
            ->check(CLI::IsMember({"literal", "physical"}));
        sub->add_option("--payload-mode", payload_s, "payload | mpdu")
            ->check(CLI::IsMember({"payload", "mpdu"}));
        sub->add_option("--rho-mode", rho_mode_s, "sigma | delta")
            ->check(CLI::IsMember({"sigma", "delta"}));
        sub->add_option("--horizon", horizon, "virtual slots per replication");
        sub->add_option("--replications", replications, "simulation replications");
        sub->add_option("--topology", topo_s, "pinned | sampled")
            ->check(CLI::IsMember({"pinned", "sampled"}));
        sub->add_option("--hidden-model", hidden_s, "expected | realized")
            ->check(CLI::IsMember({"expected", "realized"}));
    };

    CLI::App* s_solve = app.add_subcommand("solve", "fixed point and throughput for one setup");
    CLI::App* s_sweep = app.add_subcommand("sweep", "fixed point and throughput over a swept parameter");
    CLI::App* s_sim = app.add_subcommand("simulate", "Monte Carlo validation against the model");
    CLI::App* s_fig = app.add_subcommand("figures", "canned datasets (fig4..fig7)");
    for (CLI::App* sub : {s_solve, s_sweep, s_sim, s_fig})
        add_common(sub);
    s_fig->add_option("preset", preset, "fig4 | fig5 | fig6 | fig7")
        ->required()
        ->check(CLI::IsMember({"fig4", "fig5", "fig6", "fig7"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    CLI::App* sub = app.get_subcommands().front();

    try {
        RunConfig rc = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (sub->count("--out"))
            rc.out_path = out_path;
        if (sub->count("--n"))
            rc.geometry.n = n;
        if (sub->count("--M"))
            rc.geometry.M = M;
        if (sub->count("--r"))
            rc.geometry.r = r;
        if (sub->count("--seed"))
            rc.seed = seed;
        if (sub->count("--horizon"))
            rc.horizon = horizon;
        if (sub->count("--replications"))
            rc.replications = replications;
        if (!regime_s.empty())
            rc.regime = regime_s == "fd"   ? RegimeSelect::fd
                        : regime_s == "hd" ? RegimeSelect::hd
                                           : RegimeSelect::both;
        if (!h_norm_s.empty())
            rc.model.h_norm = h_norm_s == "rescaled" ? HNormalization::rescaled
                                                     : HNormalization::literal;
        if (!ap_s.empty())
            rc.model.ap_coincidence = ap_s == "physical" ? ApCoincidence::physical
                                                         : ApCoincidence::literal;
        if (!payload_s.empty())
            rc.payload_mode = payload_s == "mpdu" ? PayloadMode::mpdu : PayloadMode::payload;
        if (!rho_mode_s.empty())
            rc.rho_mode = rho_mode_s == "delta" ? RhoMode::delta : RhoMode::sigma;
        if (!topo_s.empty())
            rc.topology = topo_s == "sampled" ? TopologyMode::sampled : TopologyMode::pinned;
        if (!hidden_s.empty())
            rc.hidden_model = hidden_s == "realized" ? HiddenModel::realized
                                                     : HiddenModel::expected;
        validate(rc);

        std::ostringstream buf;
        int code = 1;
        if (sub == s_solve)
            code = cmd_solve(rc, buf, std::cerr);
        else if (sub == s_sweep)
            code = cmd_sweep(rc, buf, std::cerr);
        else if (sub == s_sim)
            code = cmd_simulate(rc, buf, std::cerr);
        else if (sub == s_fig)
            code = cmd_figures(preset, rc, buf, std::cerr);
        if (code != 0)
            return code;

        if (rc.out_path.empty()) {
            std::cout << buf.str();
        } else {
            std::ofstream f(rc.out_path, std::ios::binary);
            if (!f) {
                std::cerr << "error: cannot open output file '" << rc.out_path << "'\n";
                return 1;
            }
            f << buf.str();
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace fdwlan
