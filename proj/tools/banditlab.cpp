// banditlab command-line driver. Exit codes: 0 ok, 2 invalid input, 3 file errors.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "banditlab/analysis.hpp"
#include "banditlab/concentration.hpp"
#include "banditlab/io.hpp"
#include "banditlab/simulator.hpp"
#include "banditlab/transfer.hpp"

#ifndef BANDITLAB_VERSION
#define BANDITLAB_VERSION "0.1.0"
#endif

using namespace banditlab;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

std::string fixed(double x, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<PolicyKind> parse_policies(const std::string& list, double eps, double gamma) {
    std::vector<PolicyKind> out;
    for (const std::string& name : split(list, ',')) out.push_back(PolicyKind::parse(name, eps, gamma));
    if (out.empty()) throw ValidationError("no policies given");
    return out;
}

// Bounds files written from logs name contexts "0", "1", ...; accept either.
TransferredBounds load_bounds_for(const std::string& path, const LatentInstance& latent) {
    const std::string text = read_text(path);
    try {
        return parse_transferred(text, latent.visible);
    } catch (const ValidationError&) {
        std::vector<std::string> ids;
        for (std::size_t z = 0; z < latent.num_visible(); ++z) ids.push_back(std::to_string(z));
        return parse_transferred(text, ids);
    }
}

void print_transferred(const TransferredBounds& tb, const std::vector<std::string>& names) {
    std::cout << "context  arm  lower       upper       failure_prob\n";
    for (std::size_t z = 0; z < tb.num_contexts(); ++z) {
        for (std::size_t k = 0; k < tb.num_arms(); ++k) {
            const ArmInterval& iv = tb.at(k, z);
            std::printf("%-8s %-4zu %-11s %-11s %s\n", names[z].c_str(), k + 1, fixed(iv.lower, 8).c_str(),
                        fixed(iv.upper, 8).c_str(), format_double(iv.failure_prob).c_str());
        }
    }
}

int cmd_bounds(const std::string& path, const std::string& out) {
    const BanditInstance inst = load_instance(path);
    require_valid(inst);
    const MeanBounds bounds = inst.bounds();
    const PruneResult pruned = prune(bounds);
    const VarianceProfile profile = variance_profile(inst.support, pruned.bounds);
    std::printf("support [%s, %s], l_max = %s, global_underexplore = %s\n", format_double(inst.support.a).c_str(),
                format_double(inst.support.b).c_str(), format_double(profile.l_max).c_str(),
                profile.global_underexplore ? "true" : "false");
    std::cout << "arm  lower     upper     status    sigma2     c          branch\n";
    nlohmann::ordered_json doc;
    doc["l_max"] = profile.l_max;
    doc["global_underexplore"] = profile.global_underexplore;
    doc["arms"] = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < inst.num_arms(); ++k) {
        const auto idx = pruned.original_to_new[k];
        nlohmann::ordered_json arm = {{"arm", k + 1}, {"lower", bounds.lower[k]}, {"upper", bounds.upper[k]},
                                      {"pruned", !idx.has_value()}};
        if (idx) {
            arm["sigma_sq"] = profile.sigma_sq[*idx];
            arm["c"] = profile.pseudo_var[*idx];
            arm["branch"] = to_string(profile.regime[*idx]);
            std::printf("%-4zu %-9s %-9s retained  %-10s %-10s %s\n", k + 1, format_double(bounds.lower[k]).c_str(),
                        format_double(bounds.upper[k]).c_str(), fixed(profile.sigma_sq[*idx]).c_str(),
                        fixed(profile.pseudo_var[*idx]).c_str(), to_string(profile.regime[*idx]).c_str());
        } else {
            std::printf("%-4zu %-9s %-9s pruned\n", k + 1, format_double(bounds.lower[k]).c_str(),
                        format_double(bounds.upper[k]).c_str());
        }
        doc["arms"].push_back(arm);
    }
    for (std::size_t k = 0; k < inst.num_arms(); ++k) {
        if (pruned.was_pruned(k)) std::printf("arm %zu pruned\n", k + 1);
    }
    if (!out.empty()) write_text(out, doc.dump(2) + "\n");
    return 0;
}

struct SimulateFlags {
    std::string instance;
    std::string latent;
    std::string bounds;
    std::string policies = "glue,ucb";
    std::size_t horizon = 10000;
    std::size_t seeds = 100;
    std::uint64_t root_seed = 0;
    std::size_t checkpoints = 50;
    double ossb_eps = 0.0;
    double ossb_gamma = 0.0;
    std::string out = "run";
};

int cmd_simulate(const SimulateFlags& f) {
    const auto policies = parse_policies(f.policies, f.ossb_eps, f.ossb_gamma);
    if (f.horizon == 0) throw ValidationError("--horizon must be >= 1");
    if (f.seeds == 0) throw ValidationError("--seeds must be >= 1");
    const auto checkpoints = default_checkpoints(f.horizon, f.checkpoints);

    if (!f.latent.empty()) {
        ContextualConfig cfg;
        cfg.latent = load_latent(f.latent);
        require_valid(cfg.latent);
        if (f.bounds.empty()) {
            cfg.bounds = transfer_bounds(oracle_statistics(cfg.latent));
        } else {
            cfg.bounds = load_bounds_for(f.bounds, cfg.latent);
        }
        cfg.policies = policies;
        cfg.horizon = f.horizon;
        cfg.seeds = seed_range(f.seeds);
        cfg.root_seed = f.root_seed;
        cfg.checkpoints = checkpoints;
        const ContextualResult res = run_contextual_batch(cfg);
        write_text(f.out + "_traces.csv", trace_csv(res.traces, true));
        write_text(f.out + "_aggregate.csv", aggregate_csv(res.aggregates, res.contexts));
        std::cout << "context  policy     final_mean   stderr\n";
        for (std::size_t i = 0; i < res.aggregates.size(); ++i) {
            const auto& agg = res.aggregates[i];
            std::printf("%-8s %-10s %-12s %s\n", cfg.latent.visible[res.contexts[i]].c_str(), agg.policy.c_str(),
                        fixed(agg.final_mean(), 4).c_str(), fixed(agg.final_stderr(), 4).c_str());
        }
        return 0;
    }

    RunConfig cfg;
    cfg.instance = load_instance(f.instance);
    require_valid(cfg.instance);
    cfg.policies = policies;
    cfg.horizon = f.horizon;
    cfg.seeds = seed_range(f.seeds);
    cfg.root_seed = f.root_seed;
    cfg.checkpoints = checkpoints;
    const BatchResult res = run_batch(cfg);
    write_text(f.out + "_traces.csv", trace_csv(res.traces));
    write_text(f.out + "_aggregate.csv", aggregate_csv(res.aggregates));
    std::cout << "policy     final_mean   stderr\n";
    for (const auto& agg : res.aggregates) {
        std::printf("%-10s %-12s %s\n", agg.policy.c_str(), fixed(agg.final_mean(), 4).c_str(),
                    fixed(agg.final_stderr(), 4).c_str());
    }
    return 0;
}

struct TransferFlags {
    std::string latent;
    std::string log;
    std::size_t arms = 0;
    std::string gaps;
    double gap_lo = NAN;
    double gap_hi = NAN;
    double confidence = 0.95;
    std::string out;
};

int cmd_transfer(const TransferFlags& f) {
    if (f.latent.empty() == f.log.empty()) throw ValidationError("give exactly one of --latent or --log");
    TransferredBounds tb;
    std::vector<std::string> names;
    if (!f.latent.empty()) {
        const LatentInstance latent = load_latent(f.latent);
        require_valid(latent);
        tb = transfer_bounds(oracle_statistics(latent));
        names = latent.visible;
    } else {
        const auto records = parse_log_csv(read_text(f.log));
        if (f.arms < 2) throw ValidationError("--arms (>= 2) is required with --log");
        std::size_t nz = 0;
        for (const auto& r : records) nz = std::max(nz, r.z + 1);
        std::vector<std::pair<double, double>> gaps;
        if (!f.gaps.empty()) {
            const auto doc = nlohmann::json::parse(read_text(f.gaps), nullptr, false);
            if (doc.is_discarded() || !doc.is_array()) throw ValidationError("gaps file must be a JSON array of [lo, hi]");
            for (const auto& g : doc) gaps.emplace_back(g.at(0).get<double>(), g.at(1).get<double>());
            if (gaps.size() < nz) throw ValidationError("gaps file has fewer entries than logged contexts");
        } else {
            if (std::isnan(f.gap_lo) || std::isnan(f.gap_hi)) {
                throw ValidationError("--gaps or both --gap-lo and --gap-hi are required with --log");
            }
            gaps.assign(nz, {f.gap_lo, f.gap_hi});
        }
        const LogStatistics est = empirical_statistics(records, f.arms, gaps);
        tb = finite_log_bounds(est, f.confidence);
        for (std::size_t z = 0; z < gaps.size(); ++z) names.push_back(std::to_string(z));
    }
    print_transferred(tb, names);
    if (!f.out.empty()) write_text(f.out, dump_transferred(tb, names));
    return 0;
}

int cmd_sample_log(const std::string& latent_path, std::size_t rows, std::uint64_t seed, const std::string& out) {
    const LatentInstance latent = load_latent(latent_path);
    require_valid(latent);
    write_text(out, dump_log_csv(sample_log(latent, rows, seed)));
    std::printf("wrote %zu records to %s\n", rows, out.c_str());
    return 0;
}

int cmd_analyze(const std::string& path, const std::string& n_list, const std::string& out) {
    const BanditInstance inst = load_instance(path);
    require_valid(inst);
    std::vector<std::size_t> horizons;
    for (const std::string& s : split(n_list, ',')) {
        const double v = std::stod(s);
        if (!(v >= 1.0)) throw ValidationError("--n entries must be >= 1");
        horizons.push_back(static_cast<std::size_t>(std::llround(v)));
    }
    const auto reports = bound_report(inst, horizons);
    std::cout << "algorithm  asymptotic (R_n / ln n)\n";
    for (const auto& r : reports) std::printf("%-10s %s\n", r.algorithm.c_str(), fixed(r.asymptotic, 5).c_str());
    for (const auto& r : reports) {
        for (std::size_t i = 0; i < r.horizons.size(); ++i) {
            std::printf("%s finite-time bound at n = %zu: %s\n", r.algorithm.c_str(), r.horizons[i],
                        fixed(r.finite_time[i], 4).c_str());
        }
    }
    if (!out.empty()) write_text(out, bound_report_json(reports));
    return 0;
}

int cmd_heatmap(double l, std::size_t grid, const std::string& out) {
    const auto [mu1, mu2] = heatmap_grid(l, grid);
    const auto cells = heatmap(mu1, mu2, MeanBounds({l, 0.0}, {1.0, 1.0}));
    std::size_t below = 0, valid = 0;
    for (const auto& c : cells) {
        if (!c.ratio) continue;
        ++valid;
        if (*c.ratio < 1.0) ++below;
    }
    write_text(out, heatmap_csv(cells));
    std::printf("%zu cells, %zu evaluated, %zu with GLUE below B-kl-UCB\n", cells.size(), valid, below);
    return 0;
}

int cmd_tightness(const std::string& path) {
    const LatentInstance latent = load_latent(path);
    require_valid(latent);
    const TransferredBounds tb = transfer_bounds(oracle_statistics(latent));
    constexpr double tol = 1e-12;
    bool all = true;

    const LatentInstance upper = tight_upper_instance(latent);
    AdmissibilityReport rep = admissible_check(upper, latent, 1e-9);
    bool hit = true;
    for (std::size_t z = 0; z < latent.num_visible(); ++z) {
        for (std::size_t k = 0; k < latent.num_arms; ++k) {
            if (std::abs(upper.agent_mean(k, z) - tb.at(k, z).upper) > tol) hit = false;
        }
    }
    bool pass = rep.ok() && hit;
    all = all && pass;
    std::printf("upper witness: %s\n", pass ? "PASS" : "FAIL");
    for (const auto& v : rep.violations) std::printf("  %s\n", v.c_str());
    if (!hit) std::printf("  agent means do not reach the upper bounds\n");

    for (std::size_t k = 0; k < latent.num_arms; ++k) {
        const LatentInstance lower = tight_lower_instance(latent, k);
        rep = admissible_check(lower, latent, 1e-9);
        hit = true;
        for (std::size_t z = 0; z < latent.num_visible(); ++z) {
            if (std::abs(lower.agent_mean(k, z) - tb.at(k, z).lower) > tol) hit = false;
        }
        pass = rep.ok() && hit;
        all = all && pass;
        std::printf("lower witness arm %zu: %s\n", k + 1, pass ? "PASS" : "FAIL");
        for (const auto& v : rep.violations) std::printf("  %s\n", v.c_str());
        if (!hit) std::printf("  agent mean does not reach the lower bound\n");
    }
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bandits with mean bounds: bounds, simulation, transfer and analysis"};
    app.set_version_flag("--version", std::string("banditlab ") + BANDITLAB_VERSION);
    app.require_subcommand(1, 1);

    std::string instance_path, out_path;
    std::string heat_out = "heatmap.csv";

    auto* bounds = app.add_subcommand("bounds", "per-arm variance, pseudo-variance and pruning report");
    bounds->add_option("instance", instance_path, "instance JSON")->required();
    bounds->add_option("--json", out_path, "also write the report as JSON");

    SimulateFlags sim;
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo regret of one or more policies");
    simulate->add_option("instance", sim.instance, "instance JSON");
    simulate->add_option("--latent", sim.latent, "latent instance JSON (per-context learning)");
    simulate->add_option("--bounds", sim.bounds, "transferred bounds JSON for --latent");
    simulate->add_option("--policies", sim.policies, "comma list of glue,ucb,b-ucb,kl-ucb,b-kl-ucb,ossb");
    simulate->add_option("--horizon", sim.horizon, "steps per run");
    simulate->add_option("--seeds", sim.seeds, "number of runs per policy");
    simulate->add_option("--root-seed", sim.root_seed, "root seed");
    simulate->add_option("--checkpoints", sim.checkpoints, "geometric checkpoint count");
    simulate->add_option("--ossb-eps", sim.ossb_eps, "OSSB forced-exploration rate");
    simulate->add_option("--ossb-gamma", sim.ossb_gamma, "OSSB exploitation slack");
    simulate->add_option("--out", sim.out, "output prefix; writes <out>_traces.csv and <out>_aggregate.csv");

    TransferFlags tr;
    auto* transfer = app.add_subcommand("transfer", "mean bounds from a latent instance or a confounded log");
    transfer->add_option("--latent", tr.latent, "latent instance JSON (exact statistics)");
    transfer->add_option("--log", tr.log, "log CSV with columns z,k,y");
    transfer->add_option("--arms", tr.arms, "number of arms (with --log)");
    transfer->add_option("--gaps", tr.gaps, "JSON array of [gap_lo, gap_hi] per context (with --log)");
    transfer->add_option("--gap-lo", tr.gap_lo, "lower separation gap for every context");
    transfer->add_option("--gap-hi", tr.gap_hi, "upper separation gap for every context");
    transfer->add_option("--confidence", tr.confidence, "joint confidence for log bounds");
    transfer->add_option("--out", tr.out, "bounds JSON output");

    std::string latent_path;
    std::size_t rows = 10000;
    std::uint64_t log_seed = 0;
    auto* sample = app.add_subcommand("sample-log", "draw a confounded oracle log from a latent instance");
    sample->add_option("latent", latent_path, "latent instance JSON")->required();
    sample->add_option("--rows", rows, "number of records");
    sample->add_option("--seed", log_seed, "seed");
    sample->add_option("--out", out_path, "log CSV output")->required();

    std::string n_list = "1000,1000000";
    auto* analyze = app.add_subcommand("analyze", "asymptotic and finite-time regret bounds");
    analyze->add_option("instance", instance_path, "instance JSON")->required();
    analyze->add_option("--n", n_list, "comma list of horizons for the finite-time bound");
    analyze->add_option("--out", out_path, "bound report JSON");

    double l = 0.95;
    std::size_t grid = 50;
    auto* heat = app.add_subcommand("heatmap", "GLUE / B-kl-UCB asymptotic ratio grid");
    heat->add_option("--l", l, "lower bound of the best arm");
    heat->add_option("--grid", grid, "cells per axis");
    heat->add_option("--out", heat_out, "CSV output")->capture_default_str();

    auto* tight = app.add_subcommand("tightness", "build and check the tightness witnesses of a latent instance");
    tight->add_option("latent", latent_path, "latent instance JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*bounds) return cmd_bounds(instance_path, out_path);
        if (*simulate) {
            if (sim.instance.empty() == sim.latent.empty()) {
                throw ValidationError("simulate needs exactly one of an instance file or --latent");
            }
            return cmd_simulate(sim);
        }
        if (*transfer) return cmd_transfer(tr);
        if (*sample) return cmd_sample_log(latent_path, rows, log_seed, out_path);
        if (*analyze) return cmd_analyze(instance_path, n_list, out_path);
        if (*heat) return cmd_heatmap(l, grid, heat_out);
        if (*tight) return cmd_tightness(latent_path);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return 0;
}
