// Command line front end: dataset generation, metric evaluation, online and
// offline clustering, the k-means baseline and the parameter search.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>

#include "abimca/cluster_metrics.hpp"
#include "abimca/core/error.hpp"
#include "abimca/csv.hpp"
#include "abimca/curve_geometry.hpp"
#include "abimca/datasets.hpp"
#include "abimca/engine.hpp"
#include "abimca/harness.hpp"
#include "abimca/kmeans.hpp"
#include "abimca/params.hpp"
#include "abimca/registry_io.hpp"
#include "abimca/simd/kernels.hpp"

namespace fs = std::filesystem;
using namespace abimca;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct InputOpts {
    std::string input;
    std::string labels;
    bool has_labels = false;
};

void add_input(CLI::App* cmd, InputOpts& o, bool with_labels) {
    cmd->add_option("-i,--input", o.input, "Series CSV")->required()->check(CLI::ExistingFile);
    if (with_labels) {
        cmd->add_option("-l,--labels", o.labels, "Label CSV (single column)")->check(CLI::ExistingFile);
        cmd->add_flag("--has-labels", o.has_labels, "Last column of the series CSV holds labels");
    }
}

LoadedSeries load_input(const InputOpts& o, bool need_labels) {
    LoadedSeries s = load_csv(o.input, o.has_labels);
    if (!o.labels.empty()) s.labels = load_labels_csv(o.labels);
    if (need_labels && !s.labels) throw ConfigError("labels required: pass --labels or --has-labels");
    if (s.labels && s.labels->size() != s.series.length()) {
        throw ConfigError("label count " + std::to_string(s.labels->size()) + " does not match series length " +
                          std::to_string(s.series.length()));
    }
    return s;
}

void add_abimca_options(CLI::App* cmd, AbimcaConfig& c) {
    cmd->add_option("--learning-rate", c.learning_rate, "SGD step size")->capture_default_str();
    cmd->add_option("--omega", c.train_cycles, "Training iterations per window")->capture_default_str();
    cmd->add_option("--eta", c.detection_threshold, "Detection threshold")->capture_default_str();
    cmd->add_option("--theta-factor", c.theta_factor, "Recognition threshold = theta-factor * eta")
        ->capture_default_str();
    cmd->add_option("--seq-len", c.window_length, "Window length")->capture_default_str();
    cmd->add_option("--step-size", c.stride, "Window stride")->capture_default_str();
    cmd->add_option("--score-weight", c.score_weight, "Score weight c_fw")->capture_default_str();
    cmd->add_option("--latent-center", c.latent_center, "Latent center c_lc")->capture_default_str();
    cmd->add_option("--penalty", c.penalty_weight, "Latent penalty weight")->capture_default_str();
    cmd->add_option("--seed", c.seed, "Initialization seed")->capture_default_str();
}

void add_kmeans_options(CLI::App* cmd, KMeansConfig& c) {
    cmd->add_option("--n-clusters", c.n_clusters, "Number of clusters")->capture_default_str();
    cmd->add_option("--max-iter", c.max_iter, "Mini-batch iterations")->capture_default_str();
    cmd->add_option("--batch-size", c.batch_size, "Mini-batch size")->capture_default_str();
    cmd->add_option("--seq-len", c.seq_len, "Window length for feature flattening")->capture_default_str();
    cmd->add_option("--seed", c.seed, "Seed")->capture_default_str();
}

void print_report(const MetricReport& r) {
    auto row = [](const char* key, const std::string& value) { std::printf("%-20s %s\n", key, value.c_str()); };
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("undefined"); };
    row("mt3scm", format_double(r.mt3scm));
    row("wcc", format_double(r.wcc));
    row("sl", format_double(r.sl));
    row("sp", format_double(r.sp));
    row("silhouette", format_double(r.silhouette));
    row("calinski_harabasz", opt(r.calinski_harabasz));
    row("davies_bouldin", opt(r.davies_bouldin));
    row("n_clusters", std::to_string(r.n_clusters));
    row("n_subsequences", std::to_string(r.n_subsequences));
    if (r.degenerate) row("note", "fewer than 2 clusters: sl, sp and silhouette set to 0");
    for (const auto& [id, cc] : r.cc_per_cluster) {
        const std::string key = "cc[" + std::to_string(id) + "]";
        row(key.c_str(), format_double(cc) + "  (N=" + std::to_string(r.cluster_sizes.at(id)) + ")");
    }
}

// generate --------------------------------------------------------------------

struct GenerateOpts {
    std::string kind = "lorenz";
    std::string out;
    std::string labels_out;
    std::size_t steps = 0;
    double dt = 0.0;
    std::uint64_t seed = 7;
    std::size_t dwell = 100;
    std::size_t repeats = 2;
    double noise = 0.01;
    std::size_t cycles = 6;
    std::vector<double> start;
};

void setup_generate(CLI::App& app, GenerateOpts& o) {
    auto* cmd = app.add_subcommand("generate", "Write a synthetic dataset as CSV");
    cmd->add_option("-k,--kind", o.kind, "lorenz | thomas | stepped | perfect")
        ->check(CLI::IsMember({"lorenz", "thomas", "stepped", "perfect"}))
        ->capture_default_str();
    cmd->add_option("-o,--out", o.out, "Output series CSV")->required();
    cmd->add_option("--labels-out", o.labels_out, "Ground-truth label CSV (stepped, perfect)");
    cmd->add_option("--steps", o.steps, "Integration steps (attractors)");
    cmd->add_option("--dt", o.dt, "Integration step (attractors)");
    cmd->add_option("--start", o.start, "Initial state x y z (attractors)")->expected(3);
    cmd->add_option("--seed", o.seed, "Noise seed (stepped)")->capture_default_str();
    cmd->add_option("--dwell", o.dwell, "Steps per regime (stepped)")->capture_default_str();
    cmd->add_option("--repeats", o.repeats, "Cycles (stepped)")->capture_default_str();
    cmd->add_option("--noise", o.noise, "Noise std (stepped)")->capture_default_str();
    cmd->add_option("--cycles", o.cycles, "Cycle repeats (perfect)")->capture_default_str();
    cmd->callback([&o] {
        if (o.kind == "lorenz" || o.kind == "thomas") {
            TimeSeries s = [&] {
                if (o.kind == "lorenz") {
                    LorenzParams p;
                    if (o.steps) p.steps = o.steps;
                    if (o.dt > 0) p.dt = o.dt;
                    if (!o.start.empty()) std::tie(p.x0, p.y0, p.z0) = std::tuple(o.start[0], o.start[1], o.start[2]);
                    return gen_lorenz(p);
                }
                ThomasParams p;
                if (o.steps) p.steps = o.steps;
                if (o.dt > 0) p.dt = o.dt;
                if (!o.start.empty()) std::tie(p.x0, p.y0, p.z0) = std::tuple(o.start[0], o.start[1], o.start[2]);
                return gen_thomas(p);
            }();
            write_series_csv(o.out, s);
        } else {
            const LabeledSeries ls = o.kind == "stepped"
                                         ? gen_step_regimes(default_step_spec(o.dwell, o.repeats, o.noise, o.seed))
                                         : gen_perfect_metric_dataset(o.cycles);
            write_series_csv(o.out, ls.series);
            if (!o.labels_out.empty()) write_labels_csv(o.labels_out, ls.labels);
        }
        std::printf("wrote %s\n", o.out.c_str());
    });
}

// curve / evaluate / features -------------------------------------------------

struct EvalOpts {
    InputOpts in;
    std::string out;
    std::string sp_out;
    std::string sl_out;
    bool exclude_zero = false;
};

void setup_curve(CLI::App& app, EvalOpts& o) {
    auto* cmd = app.add_subcommand("curve", "Per-step curvature, torsion, speed and acceleration");
    add_input(cmd, o.in, true);
    cmd->add_option("-o,--out", o.out, "Output CSV")->required();
    cmd->callback([&o] {
        const LoadedSeries s = load_input(o.in, false);
        write_trajectory(o.out, s.series, curve_params(s.series), s.labels ? &*s.labels : nullptr);
        std::printf("wrote %s\n", o.out.c_str());
    });
}

void setup_evaluate(CLI::App& app, EvalOpts& o) {
    auto* cmd = app.add_subcommand("evaluate", "Internal metrics of a labeled series");
    add_input(cmd, o.in, true);
    cmd->add_option("-o,--out", o.out, "Metric key/value CSV");
    cmd->add_flag("--exclude-zero", o.exclude_zero, "Drop steps labeled 0 (unknown)");
    cmd->callback([&o] {
        const LoadedSeries s = load_input(o.in, true);
        const MetricReport r = mt3scm(s.series, *s.labels, {.include_label_zero = !o.exclude_zero});
        print_report(r);
        if (!o.out.empty()) write_metric_report(o.out, r);
    });
}

void setup_features(CLI::App& app, EvalOpts& o) {
    auto* cmd = app.add_subcommand("features", "Per-subsequence feature matrices of both silhouette spaces");
    add_input(cmd, o.in, true);
    cmd->add_option("--sp-out", o.sp_out, "Curve-parameter feature CSV")->required();
    cmd->add_option("--sl-out", o.sl_out, "Median-location feature CSV")->required();
    cmd->callback([&o] {
        const LoadedSeries s = load_input(o.in, true);
        const auto feats = subsequence_features(s.series, curve_params(s.series), *s.labels);
        std::vector<std::vector<double>> sp, sl;
        for (const auto& f : feats) {
            const double id = static_cast<double>(f.cluster_id), start = static_cast<double>(f.start);
            const double n = static_cast<double>(f.count);
            sp.push_back({id, start, f.mean_kappa, f.mean_tau, f.mean_accel, f.sigma, n});
            std::vector<double> row{id, start};
            row.insert(row.end(), f.medians.begin(), f.medians.end());
            row.push_back(f.sigma);
            row.push_back(n);
            sl.push_back(std::move(row));
        }
        write_table_csv(o.sp_out, {"cluster", "start", "mean_kappa", "mean_tau", "mean_accel", "sigma", "count"}, sp);
        std::vector<std::string> head{"cluster", "start"};
        for (const auto& name : s.series.feature_names()) head.push_back("median_" + name);
        head.insert(head.end(), {"sigma", "count"});
        write_table_csv(o.sl_out, head, sl);
        std::printf("%zu subsequences\n", feats.size());
    });
}

// cluster / predict / kmeans --------------------------------------------------

struct ClusterOpts {
    InputOpts in;
    AbimcaConfig config;
    KMeansConfig kmeans;
    std::string out_dir;
    std::string registry;
    std::string out;
    bool allow_unknown = true;
};

void setup_cluster(CLI::App& app, ClusterOpts& o) {
    auto* cmd = app.add_subcommand("cluster", "Online clustering of a series");
    add_input(cmd, o.in, false);
    add_abimca_options(cmd, o.config);
    cmd->add_option("-o,--out-dir", o.out_dir, "Run directory (labels, trace, metrics, registry)")->required();
    cmd->callback([&o] {
        const LoadedSeries s = load_input(o.in, false);
        const OnlineResult res = run_online(s.series, o.config);
        const fs::path dir = o.out_dir;
        RunRecord rec;
        rec.algorithm = kAbimca;
        rec.dataset = fs::path(o.in.input).filename().string();
        rec.seed = o.config.seed;
        for (const auto& [k, v] : to_key_values(o.config)) {
            if (k != "seed" && k != "allow-unknown") rec.params.emplace_back(k, std::stod(v));
        }
        rec.labels = res.labels;
        rec.report = mt3scm(s.series, res.labels);
        write_run_dir(dir, rec, &res.steps, &o.config, res.registry.size());
        write_step_data(dir / "steps.csv", s.series, res.labels);
        save_registry(dir / "registry", res.registry, o.config);
        std::printf("registry entries: %zu\n", res.registry.size());
        print_report(rec.report);
    });
}

void setup_predict(CLI::App& app, ClusterOpts& o) {
    auto* cmd = app.add_subcommand("predict", "Label a series with a stored registry, no training");
    add_input(cmd, o.in, false);
    cmd->add_option("-r,--registry", o.registry, "Registry directory")->required()->check(CLI::ExistingDirectory);
    cmd->add_option("-o,--out", o.out, "Output label CSV")->required();
    cmd->add_option("--allow-unknown", o.allow_unknown, "Emit 0 when no snapshot scores below rho")
        ->capture_default_str();
    cmd->callback([&o] {
        const LoadedSeries s = load_input(o.in, false);
        StoredRegistry stored = load_registry(o.registry);
        stored.config.allow_unknown_in_predict = o.allow_unknown;
        const LabelArray labels = predict_offline(s.series, stored.registry, stored.config);
        write_labels_csv(o.out, labels);
        std::printf("wrote %s (%zu snapshots)\n", o.out.c_str(), stored.registry.size());
    });
}

void setup_kmeans(CLI::App& app, ClusterOpts& o) {
    auto* cmd = app.add_subcommand("kmeans", "Mini-batch k-means baseline");
    add_input(cmd, o.in, false);
    add_kmeans_options(cmd, o.kmeans);
    cmd->add_option("-o,--out-dir", o.out_dir, "Run directory (labels, metrics)")->required();
    cmd->callback([&o] {
        const LoadedSeries s = load_input(o.in, false);
        const KMeansResult res = fit_predict(standardize(s.series, fit_stats(s.series)), o.kmeans);
        RunRecord rec;
        rec.algorithm = kMiniBatchKMeans;
        rec.dataset = fs::path(o.in.input).filename().string();
        rec.seed = o.kmeans.seed;
        for (const auto& [k, v] : to_key_values(o.kmeans)) {
            if (k != "seed") rec.params.emplace_back(k, std::stod(v));
        }
        rec.labels = res.labels;
        rec.report = mt3scm(s.series, res.labels);
        write_run_dir(o.out_dir, rec);
        print_report(rec.report);
    });
}

// search / report -------------------------------------------------------------

struct SearchOpts {
    std::string algorithm = std::string(kAbimca);
    std::string dataset = "stepped";
    std::vector<std::string> datasets;
    std::size_t samples = 300;
    std::uint64_t seed = 1;
    std::size_t threads = 0;
    std::string out_dir = "runs";
    bool write_runs = false;
};

void print_best(const std::vector<RunRecord>& records) {
    for (const auto& [m, rec] : best_by_metric(records)) {
        std::printf("best %-18s %-14s run %zu\n", std::string(metric_name(m)).c_str(),
                    format_double(*metric_value(rec->report, m)).c_str(), rec->index);
    }
}

void setup_search(CLI::App& app, SearchOpts& o) {
    auto* cmd = app.add_subcommand("search", "Random search over the parameter bounds of one algorithm");
    cmd->add_option("-a,--algorithm", o.algorithm, "abimca | mini-batch-kmeans")->capture_default_str();
    cmd->add_option("-d,--dataset", o.dataset, "stepped | perfect | lorenz | thomas")->capture_default_str();
    cmd->add_option("-n,--samples", o.samples, "Number of sampled assignments")->capture_default_str();
    cmd->add_option("--seed", o.seed, "Search seed")->capture_default_str();
    cmd->add_option("-j,--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
    cmd->add_option("-o,--out-dir", o.out_dir, "Results directory")->capture_default_str();
    cmd->add_flag("--write-runs", o.write_runs, "Also write runs/<index>/ for every record");
    cmd->callback([&o] {
        const auto records = random_search(o.algorithm, o.dataset, default_space(o.algorithm), o.samples, o.seed,
                                           o.threads);
        const fs::path dir = fs::path(o.out_dir) / (o.algorithm + "_" + o.dataset);
        write_records_csv(dir / "records.csv", records);
        if (o.write_runs) {
            for (const auto& r : records) write_run_dir(dir / "runs" / std::to_string(r.index), r);
        }
        std::size_t failed = 0;
        for (const auto& r : records) failed += r.failed ? 1 : 0;
        std::printf("%zu records (%zu failed) -> %s\n", records.size(), failed, (dir / "records.csv").c_str());
        print_best(records);
    });
}

void setup_report(CLI::App& app, SearchOpts& o) {
    auto* cmd = app.add_subcommand("report", "Search both algorithms on the bundled datasets and count outperformances");
    cmd->add_option("-n,--samples", o.samples, "Samples per algorithm and dataset")->capture_default_str();
    cmd->add_option("-d,--datasets", o.datasets, "Dataset ids (default: all bundled)");
    cmd->add_option("--seed", o.seed, "Search seed")->capture_default_str();
    cmd->add_option("-j,--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
    cmd->add_option("-o,--out-dir", o.out_dir, "Results directory")->capture_default_str();
    cmd->callback([&o] {
        const auto datasets = o.datasets.empty() ? dataset_ids() : o.datasets;
        RecordsByAlgorithm all;
        for (const std::string& alg : {std::string(kAbimca), std::string(kMiniBatchKMeans)}) {
            for (const auto& ds : datasets) {
                auto recs = random_search(alg, ds, default_space(alg), o.samples, o.seed, o.threads);
                write_records_csv(fs::path(o.out_dir) / (alg + "_" + ds) / "records.csv", recs);
                all[alg][ds] = std::move(recs);
            }
        }
        const auto table = outperformance(all, std::string(kMiniBatchKMeans));
        std::vector<std::vector<double>> rows;
        std::printf("%-20s", "algorithm");
        for (Metric m : kAllMetrics) std::printf(" %18s", std::string(metric_name(m)).c_str());
        std::printf(" %6s\n", "total");
        for (const auto& [alg, counts] : table.counts) {
            std::printf("%-20s", alg.c_str());
            std::vector<double> row;
            for (Metric m : kAllMetrics) {
                std::printf(" %18zu", counts.at(m));
                row.push_back(static_cast<double>(counts.at(m)));
            }
            std::printf(" %6zu\n", table.totals.at(alg));
            row.push_back(static_cast<double>(table.totals.at(alg)));
            rows.push_back(std::move(row));
        }
        write_table_csv(fs::path(o.out_dir) / "outperformance.csv",
                        {"mt3scm", "silhouette", "calinski_harabasz", "davies_bouldin", "total"}, rows);
        const auto pw = pairwise(all, std::string(kAbimca), std::string(kMiniBatchKMeans));
        std::printf("abimca wins %zu, mini-batch-kmeans wins %zu, ties %zu\n", pw.a_wins, pw.b_wins, pw.ties);
    });
}

// Replaces `--config FILE` with `--key value` pairs for every key not already
// given on the command line.
std::vector<std::string> expand_config(CLI::App& app, std::vector<std::string> args) {
    const auto at = std::find_if(args.begin(), args.end(),
                                 [](const std::string& a) { return a == "--config" || a.rfind("--config=", 0) == 0; });
    if (at == args.end()) return args;
    std::string file;
    auto erase_to = at + 1;
    if (*at == "--config") {
        if (at + 1 == args.end()) throw ConfigError("--config needs a file name");
        file = *(at + 1);
        erase_to = at + 2;
    } else {
        file = at->substr(9);
    }
    args.erase(at, erase_to);

    CLI::App* sub = nullptr;
    for (const auto& a : args) {
        if (CLI::App* s = app.get_subcommand_no_throw(a)) {
            sub = s;
            break;
        }
    }
    if (!sub) throw ConfigError("--config must follow a subcommand");
    auto given = [&](const std::string& flag) {
        return std::any_of(args.begin(), args.end(),
                           [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
    };
    for (const auto& [key, value] : read_key_values(file)) {
        const std::string flag = "--" + key;
        const CLI::Option* opt = sub->get_option_no_throw(flag);
        if (!opt) throw ConfigError("unknown key '" + key + "' for subcommand " + sub->get_name());
        if (given(flag)) continue;
        if (opt->get_type_size() == 0) {
            if (value == "true" || value == "1") args.push_back(flag);
        } else {
            args.push_back(flag);
            args.push_back(value);
        }
    }
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-series subsequence clustering and internal metrics"};
    app.require_subcommand(1);
    std::string simd;
    app.add_option("--simd", simd, "Kernel backend: scalar | avx2 | neon");

    GenerateOpts gen;
    EvalOpts eval;
    ClusterOpts clus;
    SearchOpts search;
    setup_generate(app, gen);
    setup_curve(app, eval);
    setup_evaluate(app, eval);
    setup_features(app, eval);
    setup_cluster(app, clus);
    setup_predict(app, clus);
    setup_kmeans(app, clus);
    setup_search(app, search);
    setup_report(app, search);
    std::string config_file;
    for (auto* sub : app.get_subcommands({})) {
        sub->add_option("--config", config_file, "key = value file mirroring the flags; flags take precedence");
    }
    app.parse_complete_callback([&] {
        if (simd.empty()) return;
        for (auto b : simd::available_backends()) {
            if (simd::backend_name(b) == simd) {
                simd::set_backend(b);
                return;
            }
        }
        throw CLI::ValidationError("--simd", "backend not available: " + simd);
    });

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_config(app, std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
