#include "abimca/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "abimca/core/error.hpp"
#include "abimca/csv.hpp"
#include "abimca/kmeans.hpp"

namespace abimca {
namespace {

std::string format_param(double v) {
    if (std::nearbyint(v) == v && std::abs(v) < 1e15) return std::to_string(static_cast<long long>(v));
    return format_double(v);
}

std::uint64_t run_seed(std::uint64_t seed, std::size_t index) {
    // splitmix64 finalizer over (seed, index)
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

std::string opt_str(const std::optional<double>& v) { return v ? format_double(*v) : "undefined"; }

}  // namespace

void ParamSpace::validate() const {
    for (const auto& p : params) {
        if (!std::isfinite(p.lower) || !std::isfinite(p.upper) || p.lower > p.upper) {
            throw ConfigError("parameter space: invalid bounds for " + p.name);
        }
    }
}

ParamSpace default_space(std::string_view algorithm) {
    using K = ParamKind;
    if (algorithm == kAbimca) {
        return {std::string(algorithm),
                {{"learning-rate", 0.0, 0.01, K::Real},
                 {"omega", 5, 15, K::Integer},
                 {"step-size", 1, 3, K::Integer},
                 {"seq-len", 5, 20, K::Integer},
                 {"eta", 0.001, 10, K::Real},
                 {"theta-factor", 1, 3, K::Real}}};
    }
    if (algorithm == kMiniBatchKMeans) {
        return {std::string(algorithm),
                {{"n-clusters", 1, 30, K::Integer},
                 {"max-iter", 1, 200, K::Integer},
                 {"batch-size", 128, 2048, K::Integer},
                 {"seq-len", 1, 100, K::Integer}}};
    }
    throw ConfigError("unknown algorithm: " + std::string(algorithm));
}

ParamAssignment sample_assignment(const ParamSpace& space, Rng& rng) {
    ParamAssignment out;
    for (const auto& p : space.params) {
        double v = 0.0;
        if (p.kind == ParamKind::Integer) {
            const auto lo = static_cast<std::int64_t>(std::ceil(p.lower));
            const auto hi = static_cast<std::int64_t>(std::floor(p.upper));
            if (lo > hi) throw ConfigError("parameter space: no integer inside bounds of " + p.name);
            v = static_cast<double>(rng.between(lo, hi));
        } else {
            v = p.lower == p.upper ? p.lower : rng.uniform(p.lower, p.upper);
        }
        out.emplace_back(p.name, v);
    }
    return out;
}

std::string_view metric_name(Metric m) noexcept {
    switch (m) {
        case Metric::Mt3scm: return "mt3scm";
        case Metric::Silhouette: return "silhouette";
        case Metric::CalinskiHarabasz: return "calinski_harabasz";
        case Metric::DaviesBouldin: return "davies_bouldin";
    }
    return "unknown";
}

bool higher_is_better(Metric m) noexcept { return m != Metric::DaviesBouldin; }

std::optional<double> metric_value(const MetricReport& r, Metric m) {
    switch (m) {
        case Metric::Mt3scm: return r.mt3scm;
        case Metric::Silhouette: return r.silhouette;
        case Metric::CalinskiHarabasz: return r.calinski_harabasz;
        case Metric::DaviesBouldin: return r.davies_bouldin;
    }
    return std::nullopt;
}

bool beats(Metric m, double a, double b) noexcept { return higher_is_better(m) ? a > b : a < b; }

std::vector<std::string> dataset_ids() { return {"stepped", "perfect", "lorenz", "thomas"}; }

LabeledSeries load_dataset(std::string_view id) {
    if (id == "stepped") return gen_step_regimes(default_step_spec());
    if (id == "perfect") return gen_perfect_metric_dataset(6);
    auto unlabeled = [](TimeSeries s) {
        const std::size_t n = s.length();
        return LabeledSeries{std::move(s), LabelArray(n, 0)};
    };
    if (id == "lorenz") {
        LorenzParams p;
        p.steps = 2000;
        return unlabeled(gen_lorenz(p));
    }
    if (id == "thomas") {
        ThomasParams p;
        p.steps = 2000;
        return unlabeled(gen_thomas(p));
    }
    throw ConfigError("unknown dataset: " + std::string(id));
}

RunRecord run_single(std::string_view algorithm, std::string_view dataset, const TimeSeries& series,
                     const ParamAssignment& params, std::uint64_t seed) {
    RunRecord rec;
    rec.algorithm = algorithm;
    rec.dataset = dataset;
    rec.params = params;
    rec.seed = seed;
    if (algorithm != kAbimca && algorithm != kMiniBatchKMeans) {
        throw ConfigError("unknown algorithm: " + std::string(algorithm));
    }
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (algorithm == kAbimca) {
            AbimcaConfig c;
            for (const auto& [k, v] : params) set_param(c, k, format_param(v));
            c.seed = seed;
            rec.labels = run_online(series, c).labels;
        } else {
            KMeansConfig c;
            for (const auto& [k, v] : params) set_param(c, k, format_param(v));
            c.seed = seed;
            rec.labels = fit_predict(standardize(series, fit_stats(series)), c).labels;
        }
        rec.report = mt3scm(series, rec.labels);
    } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
    }
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

RunRecord rerun(const RunRecord& record) {
    const LabeledSeries data = load_dataset(record.dataset);
    RunRecord out = run_single(record.algorithm, record.dataset, data.series, record.params, record.seed);
    out.index = record.index;
    return out;
}

std::vector<RunRecord> random_search(std::string_view algorithm, std::string_view dataset, const ParamSpace& space,
                                     std::size_t samples, std::uint64_t seed, std::size_t threads) {
    if (samples < 1) throw std::invalid_argument("random_search: samples must be at least 1");
    if (space.algorithm != algorithm) throw ConfigError("random_search: space does not belong to " + std::string(algorithm));
    default_space(algorithm);
    space.validate();
    const LabeledSeries data = load_dataset(dataset);

    Rng rng(seed);
    std::vector<ParamAssignment> draws;
    for (std::size_t i = 0; i < samples; ++i) draws.push_back(sample_assignment(space, rng));

    std::vector<RunRecord> out(samples);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < samples; i = next++) {
            out[i] = run_single(algorithm, dataset, data.series, draws[i], run_seed(seed, i));
            out[i].index = i;
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, samples);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return out;
}

std::map<Metric, const RunRecord*> best_by_metric(const std::vector<RunRecord>& records) {
    std::map<Metric, const RunRecord*> best;
    bool any = false;
    for (const auto& r : records) {
        if (r.failed) continue;
        any = true;
        for (Metric m : kAllMetrics) {
            const auto v = metric_value(r.report, m);
            if (!v) continue;
            const auto it = best.find(m);
            if (it == best.end() || beats(m, *v, *metric_value(it->second->report, m))) best[m] = &r;
        }
    }
    if (!any) throw std::invalid_argument("best_by_metric: no successful records");
    return best;
}

namespace {

std::optional<double> best_value(const std::vector<RunRecord>& records, Metric m) {
    bool any = false;
    for (const auto& r : records) any = any || !r.failed;
    if (!any) return std::nullopt;
    const auto best = best_by_metric(records);
    const auto it = best.find(m);
    if (it == best.end()) return std::nullopt;
    return metric_value(it->second->report, m);
}

}  // namespace

OutperformanceTable outperformance(const RecordsByAlgorithm& records, const std::string& baseline) {
    const auto base = records.find(baseline);
    if (base == records.end()) throw ConfigError("outperformance: baseline " + baseline + " not present");
    OutperformanceTable table;
    table.baseline = baseline;
    for (const auto& [ds, _] : base->second) table.datasets.push_back(ds);

    for (const auto& [alg, by_ds] : records) {
        auto& row = table.counts[alg];
        for (Metric m : kAllMetrics) row[m] = 0;
        for (const auto& ds : table.datasets) {
            const auto it = by_ds.find(ds);
            if (it == by_ds.end()) continue;
            for (Metric m : kAllMetrics) {
                const auto a = best_value(it->second, m);
                const auto b = best_value(base->second.at(ds), m);
                if (a && b && beats(m, *a, *b)) ++row[m];
            }
        }
        std::size_t total = 0;
        for (const auto& [m, c] : row) total += c;
        table.totals[alg] = total;
    }
    return table;
}

PairwiseCounts pairwise(const RecordsByAlgorithm& records, const std::string& a, const std::string& b) {
    const auto ia = records.find(a), ib = records.find(b);
    if (ia == records.end() || ib == records.end()) throw ConfigError("pairwise: algorithm not present");
    PairwiseCounts out;
    for (const auto& [ds, ra] : ia->second) {
        const auto jt = ib->second.find(ds);
        if (jt == ib->second.end()) continue;
        for (Metric m : kAllMetrics) {
            const auto va = best_value(ra, m), vb = best_value(jt->second, m);
            if (va && vb && beats(m, *va, *vb)) ++out.a_wins;
            else if (va && vb && beats(m, *vb, *va)) ++out.b_wins;
            else ++out.ties;
        }
    }
    return out;
}

void write_score_trace(const std::filesystem::path& path, const std::vector<StepResult>& steps,
                       std::size_t registry_size, const AbimcaConfig& config) {
    auto out = open_out(path);
    out << "t,s_b";
    for (std::size_t k = 1; k <= registry_size; ++k) out << ",s_" << k;
    out << ",eta,rho\n";
    const std::string eta = format_double(config.detection_threshold);
    const std::string rho = format_double(config.recognition_threshold());
    for (const auto& s : steps) {
        out << s.t << ',' << format_double(s.base_score);
        for (std::size_t k = 0; k < registry_size; ++k) {
            out << ',';
            if (k < s.subseq_scores.size()) out << format_double(s.subseq_scores[k]);
        }
        out << ',' << eta << ',' << rho << '\n';
    }
}

void write_step_data(const std::filesystem::path& path, const TimeSeries& series, const LabelArray& labels) {
    if (labels.size() != series.length()) throw std::invalid_argument("write_step_data: label count mismatch");
    auto out = open_out(path);
    out << 't';
    for (const auto& name : series.feature_names()) out << ',' << name;
    out << ",label\n";
    for (std::size_t t = 0; t < series.length(); ++t) {
        out << t;
        for (std::size_t f = 0; f < series.dims(); ++f) out << ',' << format_double(series(f, t));
        out << ',' << labels[t] << '\n';
    }
}

void write_trajectory(const std::filesystem::path& path, const TimeSeries& series, const CurveParams& params,
                      const LabelArray* labels) {
    if (params.size() != series.length() || (labels && labels->size() != series.length())) {
        throw std::invalid_argument("write_trajectory: length mismatch");
    }
    auto out = open_out(path);
    out << 't';
    for (const auto& name : series.feature_names()) out << ',' << name;
    out << ",kappa,tau,speed,accel" << (labels ? ",label" : "") << '\n';
    for (std::size_t t = 0; t < series.length(); ++t) {
        out << t;
        for (std::size_t f = 0; f < series.dims(); ++f) out << ',' << format_double(series(f, t));
        out << ',' << format_double(params.kappa[t]) << ',' << format_double(params.tau[t]) << ','
            << format_double(params.speed[t]) << ',' << format_double(params.accel[t]);
        if (labels) out << ',' << (*labels)[t];
        out << '\n';
    }
}

void write_metric_report(const std::filesystem::path& path, const MetricReport& r) {
    auto out = open_out(path);
    out << "key,value\n";
    out << "mt3scm," << format_double(r.mt3scm) << '\n';
    out << "wcc," << format_double(r.wcc) << '\n';
    out << "sl," << format_double(r.sl) << '\n';
    out << "sp," << format_double(r.sp) << '\n';
    out << "silhouette," << format_double(r.silhouette) << '\n';
    out << "calinski_harabasz," << opt_str(r.calinski_harabasz) << '\n';
    out << "davies_bouldin," << opt_str(r.davies_bouldin) << '\n';
    out << "n_clusters," << r.n_clusters << '\n';
    out << "n_subsequences," << r.n_subsequences << '\n';
    out << "degenerate," << (r.degenerate ? "true" : "false") << '\n';
    for (const auto& [id, cc] : r.cc_per_cluster) out << "cc." << id << ',' << format_double(cc) << '\n';
    for (const auto& [id, n] : r.cluster_sizes) out << "size." << id << ',' << n << '\n';
}

void write_run_dir(const std::filesystem::path& dir, const RunRecord& record, const std::vector<StepResult>* steps,
                   const AbimcaConfig* config, std::size_t registry_size) {
    KeyValues kv;
    kv["algorithm"] = record.algorithm;
    kv["dataset"] = record.dataset;
    kv["seed"] = std::to_string(record.seed);
    for (const auto& [k, v] : record.params) kv["param." + k] = format_double(v);
    if (record.failed) kv["error"] = record.error;
    write_key_values(dir / "params.cfg", kv);
    if (!record.labels.empty()) write_labels_csv(dir / "labels.csv", record.labels);
    if (!record.failed) write_metric_report(dir / "metrics.csv", record.report);
    if (steps && config) write_score_trace(dir / "trace.csv", *steps, registry_size, *config);
}

void write_records_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
    auto out = open_out(path);
    out << "index,algorithm,dataset,seed,failed";
    if (!records.empty()) {
        for (const auto& [k, _] : records.front().params) out << ',' << k;
    }
    out << ",mt3scm,wcc,sl,sp,silhouette,calinski_harabasz,davies_bouldin,n_clusters,wall_seconds,error\n";
    for (const auto& r : records) {
        out << r.index << ',' << r.algorithm << ',' << r.dataset << ',' << r.seed << ',' << (r.failed ? 1 : 0);
        for (const auto& [_, v] : r.params) out << ',' << format_double(v);
        if (r.failed) {
            out << ",,,,,,,,," << format_double(r.wall_seconds);
        } else {
            const auto& m = r.report;
            out << ',' << format_double(m.mt3scm) << ',' << format_double(m.wcc) << ',' << format_double(m.sl) << ','
                << format_double(m.sp) << ',' << format_double(m.silhouette) << ','
                << (m.calinski_harabasz ? format_double(*m.calinski_harabasz) : "") << ','
                << (m.davies_bouldin ? format_double(*m.davies_bouldin) : "") << ',' << m.n_clusters << ','
                << format_double(r.wall_seconds);
        }
        std::string err = r.error;
        for (char& ch : err) {
            if (ch == ',' || ch == '\n') ch = ' ';
        }
        out << ',' << err << '\n';
    }
}

}  // namespace abimca
