// flexent: flex-grid entangled-pair distribution toolkit.
//
// Pipeline: plan -> simulate-jsi / simulate-tomo -> tomo -> metrics ->
// allocate / report. Every command writes a .manifest.json next to its
// output recording version, seed, resolved configuration and file paths,
// so any artifact can be regenerated byte-for-byte (timestamp aside).

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "flexent/allocator.hpp"
#include "flexent/config.hpp"
#include "flexent/errors.hpp"
#include "flexent/flexgrid.hpp"
#include "flexent/io.hpp"
#include "flexent/metrics.hpp"
#include "flexent/parallel.hpp"
#include "flexent/qcore.hpp"
#include "flexent/rng.hpp"
#include "flexent/sourcesim.hpp"
#include "flexent/tomography.hpp"
#include "flexent/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using namespace flexent;

constexpr std::uint64_t kDefaultSeed = 12345;

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;
    std::uint64_t seed = kDefaultSeed;
    std::string out;
    int jobs = 0; // 0 = hardware concurrency
};

void add_config_opts(CLI::App* sub, CommonOpts& o) {
    sub->add_option("--config", o.config_path, "config file (flat key=value)")
        ->envname("FLEXENT_CONFIG");
    sub->add_option("--set", o.overrides, "override a config key, e.g. --set count=10")
        ->type_name("KEY=VALUE");
}

void add_seed_opt(CLI::App* sub, CommonOpts& o) {
    sub->add_option("--seed", o.seed, "master seed for all random streams")
        ->default_val(kDefaultSeed);
}

void add_jobs_opt(CLI::App* sub, CommonOpts& o) {
    sub->add_option("--jobs", o.jobs, "worker threads (default: hardware)");
}

Config resolve_config(const CommonOpts& o) {
    Config cfg = o.config_path.empty() ? default_config() : load_config_file(o.config_path);
    for (const auto& s : o.overrides) apply_override(cfg, s);
    cfg.validate();
    return cfg;
}

int effective_jobs(const CommonOpts& o) {
    if (o.jobs > 0) return o.jobs;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string iso_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_manifest(const std::string& path, const std::string& command,
                    const CommonOpts& opts, bool stochastic, const Config& cfg,
                    const std::map<std::string, std::string>& inputs,
                    const std::vector<std::string>& outputs) {
    json j;
    j["command"] = command;
    j["version"] = kVersion;
    j["timestamp"] = iso_timestamp();
    if (stochastic) j["seed"] = opts.seed;
    j["config_path"] = opts.config_path;
    j["overrides"] = opts.overrides;
    j["config"] = config_to_map(cfg);
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    write_text_file(path, j.dump(2) + "\n");
}

std::string manifest_path_for_file(const std::string& out) { return out + ".manifest.json"; }

std::string manifest_path_for_dir(const std::string& dir, const std::string& command) {
    return (fs::path(dir) / (command + ".manifest.json")).string();
}

std::string json_sibling(const std::string& csv_path) {
    if (csv_path.size() > 4 && csv_path.ends_with(".csv"))
        return csv_path.substr(0, csv_path.size() - 4) + ".json";
    return csv_path + ".json";
}

std::string posterior_filename(int k) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "posterior_ch%03d.json", k);
    return buf;
}

std::string density_filename(int k) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "density_ch%03d.csv", k);
    return buf;
}

// counts grouped by channel, channels ascending
std::map<int, std::vector<CountRecord>> group_by_channel(const std::vector<CountRecord>& counts) {
    std::map<int, std::vector<CountRecord>> g;
    for (const auto& r : counts) g[r.channel].push_back(r);
    return g;
}

// estimate of the per-channel coincidence rate: the 36 analyzer projectors
// resolve the identity three times per side, so the settings sum to 9x the
// full coincidence flux
double estimate_r_coinc(const std::vector<CountRecord>& records) {
    double total = 0.0, t_sum = 0.0;
    for (const auto& r : records) {
        total += static_cast<double>(r.counts);
        t_sum += r.integration_s;
    }
    const double t_mean = t_sum / static_cast<double>(records.size());
    return total / (9.0 * t_mean);
}

// ---- plan ------------------------------------------------------------

int cmd_plan(const CommonOpts& opts, const Config& cfg) {
    const auto plan = build_channel_plan(cfg.pump_thz, cfg.width_ghz, cfg.count,
                                         c_wss(cfg), l_wss(cfg));
    std::ostringstream os;
    write_plan_csv(os, plan);
    write_text_file(opts.out, os.str());
    write_manifest(manifest_path_for_file(opts.out), "plan", opts, false, cfg, {},
                   {opts.out});
    std::cout << "wrote " << plan.size() << " channel pairs to " << opts.out << "\n";
    return 0;
}

// ---- simulate-jsi ------------------------------------------------------

int cmd_simulate_jsi(const CommonOpts& opts, const Config& cfg,
                     const std::string& plan_path, const std::string& pattern,
                     const std::string& direction) {
    const auto plan = load_plan(plan_path);
    if (direction != "forward" && direction != "backward")
        throw UsageError("--direction must be forward or backward");
    const bool backward = direction == "backward";
    const SourceModel model = jsi_source(cfg, backward, opts.seed);
    Rng rng = Rng::for_stream(opts.seed, stream::kJsi);
    const JsiScan scan =
        simulate_jsi(model, plan, c_wss(cfg), l_wss(cfg),
                     jsi_pattern_from_label(pattern), cfg.jsi_integration_s, rng);
    std::ostringstream os;
    write_jsi_csv(os, scan);
    write_text_file(opts.out, os.str());
    write_manifest(manifest_path_for_file(opts.out), "simulate-jsi", opts, true, cfg,
                   {{"plan", plan_path}}, {opts.out});
    std::cout << "wrote " << scan.entries.size() << " scan points (" << scan.pattern
              << ", " << direction << ") to " << opts.out << "\n";
    return 0;
}

// ---- simulate-tomo -----------------------------------------------------

int cmd_simulate_tomo(const CommonOpts& opts, const Config& cfg,
                      const std::string& plan_path) {
    const auto plan = load_plan(plan_path);
    const SourceModel model = tomo_source(cfg, opts.seed);
    const auto settings = all_settings();
    std::vector<CountRecord> counts;
    counts.reserve(plan.size() * settings.size());
    for (const auto& pair : plan) {
        Rng rng = Rng::for_stream(opts.seed, stream::kTomoCounts,
                                  static_cast<std::uint64_t>(pair.k));
        const auto rows =
            simulate_counts(model, pair.k, settings, cfg.tomo_integration_s, rng);
        counts.insert(counts.end(), rows.begin(), rows.end());
    }
    std::ostringstream os;
    write_counts_csv(os, counts);
    write_text_file(opts.out, os.str());
    write_manifest(manifest_path_for_file(opts.out), "simulate-tomo", opts, true, cfg,
                   {{"plan", plan_path}}, {opts.out});
    std::cout << "wrote " << counts.size() << " count records for " << plan.size()
              << " channels to " << opts.out << "\n";
    return 0;
}

// ---- tomo ----------------------------------------------------------------

int cmd_tomo(const CommonOpts& opts, const Config& cfg, const std::string& counts_path) {
    const auto groups = group_by_channel(load_counts(counts_path));
    std::vector<int> channels;
    channels.reserve(groups.size());
    for (const auto& [k, recs] : groups) channels.push_back(k);

    fs::create_directories(opts.out);

    std::vector<ChannelPosterior> results;
    results.reserve(channels.size());
    for (const int k : channels) {
        (void)k;
        results.push_back(ChannelPosterior{
            0, PosteriorSummary{DensityMatrix(ComplexMatrix::Identity(4, 4) * Complex(0.25, 0)),
                                0, 0, 0, 0, 0, {}}});
    }

    parallel_for(channels.size(), effective_jobs(opts), [&](std::size_t i) {
        const int k = channels[i];
        const McmcConfig mc = mcmc_config(
            cfg, Rng::derive_seed(opts.seed, stream::kChain, static_cast<std::uint64_t>(k)));
        results[i] = ChannelPosterior{k, infer_posterior(groups.at(k), mc)};
    });

    std::vector<std::string> outputs;
    for (const auto& r : results) {
        const std::string path = (fs::path(opts.out) / posterior_filename(r.k)).string();
        write_text_file(path, posterior_to_json(r).dump(2) + "\n");
        outputs.push_back(path);
        if (!r.summary.warning.empty())
            std::cerr << "channel " << r.k << ": " << r.summary.warning << "\n";
    }
    write_manifest(manifest_path_for_dir(opts.out, "tomo"), "tomo", opts, true, cfg,
                   {{"counts", counts_path}}, outputs);
    std::cout << "inferred " << results.size() << " posteriors into " << opts.out << "\n";
    return 0;
}

// ---- metrics ---------------------------------------------------------------

std::vector<ChannelPosterior> load_posterior_dir(const std::string& dir) {
    if (!fs::is_directory(dir))
        throw ValidationError("posterior directory '" + dir + "' does not exist");
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.starts_with("posterior_ch") && name.ends_with(".json"))
            files.push_back(entry.path().string());
    }
    if (files.empty())
        throw ValidationError("no posterior_ch*.json files in '" + dir + "'");
    std::vector<ChannelPosterior> out;
    out.reserve(files.size());
    for (const auto& f : files) out.push_back(load_posterior(f));
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.k < b.k; });
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i].k == out[i - 1].k)
            throw ValidationError("duplicate posterior for channel " +
                                  std::to_string(out[i].k) + " in '" + dir + "'");
    return out;
}

int cmd_metrics(const CommonOpts& opts, const Config& cfg,
                const std::string& posteriors_dir, const std::string& counts_path,
                const std::string& jsi_path) {
    const auto posteriors = load_posterior_dir(posteriors_dir);
    const auto groups = group_by_channel(load_counts(counts_path));

    std::map<int, double> car_by_channel;
    if (!jsi_path.empty()) {
        const JsiScan scan = load_jsi(jsi_path);
        for (const auto& e : scan.entries)
            if (e.sig_ch == e.idl_ch && !car_by_channel.count(e.sig_ch))
                car_by_channel[e.sig_ch] =
                    car(e.coinc, e.singles_s, e.singles_i, cfg.coincidence_window_s,
                        e.integration_s);
    }

    std::vector<EntanglementReport> reports(posteriors.size());
    parallel_for(posteriors.size(), effective_jobs(opts), [&](std::size_t i) {
        const auto& p = posteriors[i];
        const auto counts_it = groups.find(p.k);
        if (counts_it == groups.end())
            throw ValidationError("no count records for channel " + std::to_string(p.k) +
                                  " in '" + counts_path + "'");
        const double r_coinc = estimate_r_coinc(counts_it->second);
        const auto car_it = car_by_channel.find(p.k);
        const double car_value = car_it == car_by_channel.end()
                                     ? std::numeric_limits<double>::quiet_NaN()
                                     : car_it->second;
        reports[i] = build_report(p.k, p.summary.mean_state, r_coinc, car_value);
    });

    std::ostringstream os;
    write_report_csv(os, reports);
    write_text_file(opts.out, os.str());
    const std::string json_path = json_sibling(opts.out);
    write_text_file(json_path, report_to_json(reports).dump(2) + "\n");

    std::map<std::string, std::string> inputs{{"posteriors", posteriors_dir},
                                              {"counts", counts_path}};
    if (!jsi_path.empty()) inputs["jsi"] = jsi_path;
    write_manifest(manifest_path_for_file(opts.out), "metrics", opts, false, cfg, inputs,
                   {opts.out, json_path});
    std::cout << "wrote metrics for " << reports.size() << " channels to " << opts.out
              << "\n";
    return 0;
}

// ---- allocate ----------------------------------------------------------------

int cmd_allocate(const CommonOpts& opts, const Config& cfg,
                 const std::string& requests_path, const std::string& report_path,
                 int c_ports, int l_ports) {
    const auto requests = load_requests(requests_path);
    const auto reports = load_report(report_path);
    const AllocationPlan plan = allocate(requests, reports, c_ports, l_ports);
    write_text_file(opts.out, allocation_to_json(plan).dump(2) + "\n");
    write_manifest(manifest_path_for_file(opts.out), "allocate", opts, false, cfg,
                   {{"requests", requests_path}, {"report", report_path}}, {opts.out});
    std::cout << "allocated " << plan.assignments.size() << " of " << requests.size()
              << " requests (" << plan.unmet.size() << " unmet) to " << opts.out << "\n";
    return 0;
}

// ---- report -------------------------------------------------------------------

int cmd_report(const CommonOpts& opts, const Config& cfg, const std::string& report_path,
               const std::string& jsi_path, const std::string& posteriors_dir, int top,
               int bottom) {
    if (top < 0 || bottom < 0) throw UsageError("--top/--bottom must be nonnegative");
    const auto reports = load_report(report_path);
    fs::create_directories(opts.out);
    std::vector<std::string> outputs;

    {
        std::ostringstream os;
        os << "k,fidelity\n";
        for (const auto& r : reports) os << r.k << ',' << fmt_double(r.fidelity) << '\n';
        const std::string path = (fs::path(opts.out) / "fidelity_vs_channel.csv").string();
        write_text_file(path, os.str());
        outputs.push_back(path);
    }
    {
        std::ostringstream os;
        os << "k,r_coinc,r_n,r_i\n";
        for (const auto& r : reports)
            os << r.k << ',' << fmt_double(r.r_coinc) << ',' << fmt_double(r.r_n) << ','
               << fmt_double(r.r_i) << '\n';
        const std::string path = (fs::path(opts.out) / "ebr_vs_channel.csv").string();
        write_text_file(path, os.str());
        outputs.push_back(path);
    }

    if (!jsi_path.empty()) {
        const JsiScan scan = load_jsi(jsi_path);
        std::ostringstream os;
        os << "sig_ch,idl_ch,coinc,car\n";
        for (const auto& e : scan.entries)
            os << e.sig_ch << ',' << e.idl_ch << ',' << e.coinc << ','
               << fmt_double(car(e.coinc, e.singles_s, e.singles_i,
                                 cfg.coincidence_window_s, e.integration_s))
               << '\n';
        const std::string path = (fs::path(opts.out) / "jsi_heatmap.csv").string();
        write_text_file(path, os.str());
        outputs.push_back(path);
    }

    std::map<std::string, std::string> inputs{{"report", report_path}};
    if (!jsi_path.empty()) inputs["jsi"] = jsi_path;

    if (!posteriors_dir.empty()) {
        inputs["posteriors"] = posteriors_dir;
        auto by_fidelity = reports;
        std::sort(by_fidelity.begin(), by_fidelity.end(), [](const auto& a, const auto& b) {
            if (a.fidelity != b.fidelity) return a.fidelity > b.fidelity;
            return a.k < b.k;
        });
        std::set<int> picks;
        for (int i = 0; i < top && i < static_cast<int>(by_fidelity.size()); ++i)
            picks.insert(by_fidelity[static_cast<std::size_t>(i)].k);
        for (int i = 0; i < bottom && i < static_cast<int>(by_fidelity.size()); ++i)
            picks.insert(by_fidelity[by_fidelity.size() - 1 - static_cast<std::size_t>(i)].k);

        std::map<int, ChannelPosterior> posteriors;
        for (auto& p : load_posterior_dir(posteriors_dir)) {
            const int k = p.k;
            posteriors.emplace(k, std::move(p));
        }
        for (const int k : picks) {
            const auto it = posteriors.find(k);
            if (it == posteriors.end())
                throw ValidationError("no posterior for selected channel " +
                                      std::to_string(k) + " in '" + posteriors_dir + "'");
            const ComplexMatrix& m = it->second.summary.mean_state.matrix();
            std::ostringstream os;
            os << "part,row,c1,c2,c3,c4\n";
            for (const char* part : {"re", "im"})
                for (int i = 0; i < 4; ++i) {
                    os << part << ',' << i;
                    for (int j = 0; j < 4; ++j)
                        os << ','
                           << fmt_double(part[0] == 'r' ? m(i, j).real() : m(i, j).imag());
                    os << '\n';
                }
            const std::string path = (fs::path(opts.out) / density_filename(k)).string();
            write_text_file(path, os.str());
            outputs.push_back(path);
        }
    }

    write_manifest(manifest_path_for_dir(opts.out, "report"), "report", opts, false, cfg,
                   inputs, outputs);
    std::cout << "wrote " << outputs.size() << " plot-data files to " << opts.out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"flex-grid entangled-photon distribution: plan, simulate, infer, allocate"};
    app.set_version_flag("--version", std::string("flexent ") + kVersion);
    app.require_subcommand(1);

    int exit_code = 0;

    // plan
    CommonOpts plan_opts;
    auto* plan_cmd = app.add_subcommand("plan", "build the energy-matched channel plan");
    add_config_opts(plan_cmd, plan_opts);
    plan_cmd->add_option("--out", plan_opts.out, "output CSV path")->required();
    double plan_pump = 0.0, plan_width = 0.0;
    int plan_count = 0;
    auto* pump_opt = plan_cmd->add_option("--pump", plan_pump, "pump frequency, THz");
    auto* width_opt = plan_cmd->add_option("--width", plan_width, "channel width, GHz");
    auto* count_opt = plan_cmd->add_option("--count", plan_count, "number of channel pairs");
    plan_cmd->callback([&] {
        Config cfg = resolve_config(plan_opts);
        if (pump_opt->count()) cfg.pump_thz = plan_pump;
        if (width_opt->count()) cfg.width_ghz = plan_width;
        if (count_opt->count()) cfg.count = plan_count;
        exit_code = cmd_plan(plan_opts, cfg);
    });

    // simulate-jsi
    CommonOpts sj_opts;
    std::string sj_plan, sj_pattern = "banded", sj_direction = "forward";
    auto* sj_cmd = app.add_subcommand("simulate-jsi", "simulate a JSI raster scan");
    add_config_opts(sj_cmd, sj_opts);
    add_seed_opt(sj_cmd, sj_opts);
    sj_cmd->add_option("--plan", sj_plan, "channel plan CSV")->required();
    sj_cmd->add_option("--pattern", sj_pattern, "scan pattern: banded|full");
    sj_cmd->add_option("--direction", sj_direction, "pump direction: forward|backward");
    sj_cmd->add_option("--out", sj_opts.out, "output CSV path")->required();
    sj_cmd->callback([&] {
        exit_code = cmd_simulate_jsi(sj_opts, resolve_config(sj_opts), sj_plan, sj_pattern,
                                     sj_direction);
    });

    // simulate-tomo
    CommonOpts st_opts;
    std::string st_plan;
    auto* st_cmd = app.add_subcommand("simulate-tomo",
                                      "simulate 36-setting tomography counts per channel");
    add_config_opts(st_cmd, st_opts);
    add_seed_opt(st_cmd, st_opts);
    st_cmd->add_option("--plan", st_plan, "channel plan CSV")->required();
    st_cmd->add_option("--out", st_opts.out, "output CSV path")->required();
    st_cmd->callback([&] {
        exit_code = cmd_simulate_tomo(st_opts, resolve_config(st_opts), st_plan);
    });

    // tomo
    CommonOpts tomo_opts;
    std::string tomo_counts;
    auto* tomo_cmd =
        app.add_subcommand("tomo", "Bayesian state tomography from count data");
    add_config_opts(tomo_cmd, tomo_opts);
    add_seed_opt(tomo_cmd, tomo_opts);
    add_jobs_opt(tomo_cmd, tomo_opts);
    tomo_cmd->add_option("--counts", tomo_counts, "count CSV from simulate-tomo")->required();
    tomo_cmd->add_option("--out", tomo_opts.out, "output directory for posterior JSON")
        ->required();
    tomo_cmd->callback(
        [&] { exit_code = cmd_tomo(tomo_opts, resolve_config(tomo_opts), tomo_counts); });

    // metrics
    CommonOpts met_opts;
    std::string met_posteriors, met_counts, met_jsi;
    auto* met_cmd = app.add_subcommand("metrics", "entanglement metrics and rates");
    add_config_opts(met_cmd, met_opts);
    add_jobs_opt(met_cmd, met_opts);
    met_cmd->add_option("--posteriors", met_posteriors, "directory of posterior JSON")
        ->required();
    met_cmd->add_option("--counts", met_counts, "count CSV (coincidence-rate estimate)")
        ->required();
    met_cmd->add_option("--jsi", met_jsi, "JSI CSV for per-channel CAR (optional)");
    met_cmd->add_option("--out", met_opts.out, "output report CSV path")->required();
    met_cmd->callback([&] {
        exit_code = cmd_metrics(met_opts, resolve_config(met_opts), met_posteriors,
                                met_counts, met_jsi);
    });

    // allocate
    CommonOpts alloc_opts;
    std::string alloc_requests, alloc_report;
    int alloc_c_ports = -1, alloc_l_ports = -1;
    auto* alloc_cmd =
        app.add_subcommand("allocate", "port-constrained channel-range provisioning");
    add_config_opts(alloc_cmd, alloc_opts);
    alloc_cmd->add_option("--requests", alloc_requests, "requests CSV")->required();
    alloc_cmd->add_option("--report", alloc_report, "metrics report CSV")->required();
    alloc_cmd->add_option("--c-ports", alloc_c_ports, "override C-band port budget");
    alloc_cmd->add_option("--l-ports", alloc_l_ports, "override L-band port budget");
    alloc_cmd->add_option("--out", alloc_opts.out, "output plan JSON path")->required();
    alloc_cmd->callback([&] {
        const Config cfg = resolve_config(alloc_opts);
        exit_code = cmd_allocate(alloc_opts, cfg, alloc_requests, alloc_report,
                                 alloc_c_ports >= 0 ? alloc_c_ports : cfg.c_ports,
                                 alloc_l_ports >= 0 ? alloc_l_ports : cfg.l_ports);
    });

    // report
    CommonOpts rep_opts;
    std::string rep_report, rep_jsi, rep_posteriors;
    int rep_top = 3, rep_bottom = 3;
    auto* rep_cmd = app.add_subcommand("report", "plot-ready CSV extracts");
    add_config_opts(rep_cmd, rep_opts);
    rep_cmd->add_option("--report", rep_report, "metrics report CSV")->required();
    rep_cmd->add_option("--jsi", rep_jsi, "JSI CSV for the heatmap (optional)");
    rep_cmd->add_option("--posteriors", rep_posteriors,
                        "posterior directory for density-matrix grids (optional)");
    rep_cmd->add_option("--top", rep_top, "highest-fidelity channels to export");
    rep_cmd->add_option("--bottom", rep_bottom, "lowest-fidelity channels to export");
    rep_cmd->add_option("--out", rep_opts.out, "output directory")->required();
    rep_cmd->callback([&] {
        exit_code = cmd_report(rep_opts, resolve_config(rep_opts), rep_report, rep_jsi,
                               rep_posteriors, rep_top, rep_bottom);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2; // help/version exit clean; usage errors -> 2
    } catch (const InfeasiblePlanError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NonConvergenceError& e) {
        std::cerr << "error: " << e.what() << " (best value " << e.best_value << ")\n";
        return 4;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
