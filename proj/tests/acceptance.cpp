// Acceptance checks: one PASS/FAIL line per criterion with the measured values.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>

#include "abimca/cluster_metrics.hpp"
#include "abimca/curve_geometry.hpp"
#include "abimca/datasets.hpp"
#include "abimca/engine.hpp"
#include "abimca/harness.hpp"
#include "gradient_check.hpp"
#include "stepped_eval.hpp"
#include "test_support.hpp"

using namespace abimca;
using testing::make_series;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome perfect_dataset() {
    const auto data = gen_perfect_metric_dataset(6);
    const MetricReport r = mt3scm(data.series, data.labels);
    const bool ok = std::abs(r.mt3scm - 1.0) <= 0.01 && std::abs(r.sl - 1.0) <= 0.01 && std::abs(r.sp - 1.0) <= 0.01;
    return {ok, fmt("mt3scm=%.6f sl=%.6f sp=%.6f wcc=%.6f", r.mt3scm, r.sl, r.sp, r.wcc)};
}

Outcome random_neutrality() {
    const std::pair<const char*, TimeSeries> series[] = {{"lorenz", gen_lorenz(LorenzParams{})},
                                                          {"thomas", gen_thomas(ThomasParams{})}};
    bool ok = true;
    std::string detail;
    for (const auto& [name, s] : series) {
        double sum_abs = 0.0, worst_wcc = 0.0, worst_sl = 0.0, worst_sp = 0.0;
        const CurveParams cp = curve_params(s);
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            Rng rng(1000 + seed);
            const std::size_t segments = static_cast<std::size_t>(rng.between(5, 30));
            const std::size_t n_labels = static_cast<std::size_t>(rng.between(2, 5));
            const LabelArray y = testing::random_segmentation(rng, s.length(), segments, n_labels);
            const MetricReport r = mt3scm(s, cp, y);
            sum_abs += std::abs(r.mt3scm);
            worst_wcc = std::max(worst_wcc, std::abs(r.wcc));
            worst_sl = std::max(worst_sl, std::abs(r.sl));
            worst_sp = std::max(worst_sp, std::abs(r.sp));
        }
        const double mean_abs = sum_abs / 10.0;
        ok = ok && mean_abs <= 0.05 && worst_wcc <= 0.15 && worst_sl <= 0.15 && worst_sp <= 0.15;
        detail += fmt("%s: mean|mt3scm|=%.4f max|wcc|=%.4f max|sl|=%.4f max|sp|=%.4f; ", name, mean_abs, worst_wcc,
                      worst_sl, worst_sp);
    }
    return {ok, detail};
}

Outcome analytic_curves() {
    double worst = 0.0, worst_tau = 0.0;
    const TimeSeries helix = make_series(3, 1000, [](std::size_t k, double i) {
        const double t = 0.01 * i;
        return k == 0 ? std::cos(t) : k == 1 ? std::sin(t) : t;
    });
    const CurveParams h = curve_params(helix);
    for (std::size_t i = 5; i + 5 < h.size(); ++i) {
        worst = std::max({worst, testing::rel_err(h.kappa[i], 0.5), testing::rel_err(h.tau[i], 0.5)});
    }
    for (double r : {0.5, 2.0}) {
        const TimeSeries c = make_series(3, 1300, [&](std::size_t k, double i) {
            const double t = 0.005 * i;
            return k == 0 ? r * std::cos(t) : k == 1 ? r * std::sin(t) : 0.0;
        });
        const CurveParams p = curve_params(c);
        for (std::size_t i = 5; i + 5 < p.size(); ++i) {
            worst = std::max(worst, testing::rel_err(p.kappa[i], 1.0 / r));
            worst_tau = std::max(worst_tau, std::abs(p.tau[i]));
        }
    }
    return {worst <= 0.02 && worst_tau <= 1e-3, fmt("max rel err=%.2e max|tau| circle=%.2e", worst, worst_tau)};
}

Outcome gradients() {
    double worst = 0.0;
    std::size_t checked = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        for (std::size_t d : {2u, 3u, 4u}) {
            for (std::size_t zeta : {3u, 5u}) {
                const auto r = testing::check_gradients(seed, d, zeta);
                worst = std::max(worst, r.worst_rel);
                checked += r.checked;
            }
        }
    }
    return {worst <= 1e-4, fmt("%zu partials, max rel err=%.2e", checked, worst)};
}

struct SteppedRun {
    LabeledSeries data;
    OnlineResult online;
};

const SteppedRun& stepped_run() {
    static const SteppedRun run = [] {
        LabeledSeries data = gen_step_regimes(default_step_spec(100, 2, 0.01, 7));
        OnlineResult online = run_online(data.series, AbimcaConfig{});
        return SteppedRun{std::move(data), std::move(online)};
    }();
    return run;
}

Outcome online_behavior() {
    const SteppedRun& run = stepped_run();
    const auto ev = testing::evaluate_stepped(run.data.labels, run.online.labels, 100);
    bool latency_ok = true;
    std::string lat;
    for (std::size_t g = 0; g < 4; ++g) {
        const long det = ev.detection_latency[g], rec = ev.recognition_latency[g];
        latency_ok = latency_ok && det >= 0 && rec >= 0 && rec < det;
        lat += fmt(" %ld/%ld", det, rec);
    }
    const bool ok = run.online.registry.size() == 4 && ev.second_cycle_match >= 0.9 && latency_ok;
    return {ok, fmt("entries=%zu second-cycle match=%.3f detection/recognition latency:%s", run.online.registry.size(),
                    ev.second_cycle_match, lat.c_str())};
}

Outcome offline_consistency() {
    const SteppedRun& run = stepped_run();
    const LabelArray off = predict_offline(run.data.series, run.online.registry, AbimcaConfig{});
    const double agree = testing::nonzero_agreement(run.online.labels, off);
    return {agree >= 0.9, fmt("agreement on non-zero online labels=%.3f", agree)};
}

Outcome silhouette_oracle() {
    Rng rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t m = static_cast<std::size_t>(rng.between(2, 40));
        const std::size_t k = static_cast<std::size_t>(rng.between(1, 5));
        const std::size_t p = static_cast<std::size_t>(rng.between(1, 6));
        Matrix x(m, p);
        for (double& v : x.flat()) v = rng.uniform(-3.0, 3.0);
        std::vector<Label> y(m);
        for (auto& l : y) l = rng.between(1, static_cast<std::int64_t>(k));
        worst = std::max(worst, std::abs(silhouette(x, y) - testing::silhouette_oracle(x, y)));
    }
    return {worst <= 1e-9, fmt("50 instances, max |diff|=%.2e", worst)};
}

Outcome harness_protocol(std::size_t samples, std::size_t table_samples, std::size_t threads) {
    const ParamSpace space = default_space(kAbimca);
    const auto recs = random_search(kAbimca, "stepped", space, samples, 300, threads);
    bool in_bounds = recs.size() == samples;
    std::size_t failed = 0, reproduced = 0;
    for (const RunRecord& r : recs) {
        for (std::size_t j = 0; j < r.params.size(); ++j) {
            in_bounds = in_bounds && r.params[j].second >= space.params[j].lower &&
                        r.params[j].second <= space.params[j].upper;
        }
        failed += r.failed;
        const RunRecord again = rerun(r);
        const bool same = again.failed == r.failed && again.labels == r.labels &&
                          std::abs(again.report.mt3scm - r.report.mt3scm) <= 1e-9 &&
                          std::abs(again.report.silhouette - r.report.silhouette) <= 1e-9;
        reproduced += same;
    }

    RecordsByAlgorithm table;
    for (const std::string alg : {std::string(kAbimca), std::string(kMiniBatchKMeans)}) {
        for (const auto& ds : dataset_ids()) {
            table[alg][ds] = random_search(alg, ds, default_space(alg), table_samples, 7, threads);
        }
    }
    const OutperformanceTable t = outperformance(table, std::string(kMiniBatchKMeans));
    const PairwiseCounts ab = pairwise(table, std::string(kAbimca), std::string(kMiniBatchKMeans));
    const PairwiseCounts ba = pairwise(table, std::string(kMiniBatchKMeans), std::string(kAbimca));
    const std::size_t cells = dataset_ids().size() * std::size(kAllMetrics);
    bool table_ok = t.totals.at(std::string(kMiniBatchKMeans)) == 0 && t.totals.at(std::string(kAbimca)) == ab.a_wins &&
                    ab.a_wins == ba.b_wins && ab.b_wins == ba.a_wins && ab.ties == ba.ties &&
                    ab.a_wins + ab.b_wins + ab.ties == cells;
    for (const auto& [alg, row] : t.counts) {
        for (const auto& [m, c] : row) table_ok = table_ok && c <= dataset_ids().size();
    }
    const bool ok = in_bounds && reproduced == samples && table_ok;
    return {ok, fmt("%zu records (%zu failed), in bounds=%s, reproduced=%zu/%zu; abimca beats baseline %zu, baseline "
                    "beats abimca %zu, ties %zu of %zu",
                    recs.size(), failed, in_bounds ? "yes" : "no", reproduced, samples, ab.a_wins, ab.b_wins, ab.ties,
                    cells)};
}

Outcome metric_fuzz() {
    Rng rng(77);
    std::size_t bounds_bad = 0, relabel_bad = 0, singleton_bad = 0, singletons = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = static_cast<std::size_t>(rng.between(20, 300));
        const std::size_t d = static_cast<std::size_t>(rng.between(2, 4));
        const TimeSeries s = testing::smooth_random_series(rng, d, n);
        LabelArray y = testing::random_segmentation(rng, n, static_cast<std::size_t>(rng.between(2, 15)),
                                                    static_cast<std::size_t>(rng.between(1, 5)));
        if (trial % 4 == 0) y[rng.below(n)] = 9;  // a single-step cluster
        const MetricReport r = mt3scm(s, y);
        if (!(r.mt3scm >= -1.0 && r.mt3scm <= 1.0)) ++bounds_bad;
        for (const auto& [id, cc] : r.cc_per_cluster) {
            if (!(cc >= -1.0 && cc <= 1.0)) ++bounds_bad;
            if (r.cluster_sizes.at(id) == 1) {
                ++singletons;
                if (cc != 0.0) ++singleton_bad;
            }
        }
        std::vector<Label> perm{3, 17, 5, 101, 42, 8, 64, 13, 99, 21};
        for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
        LabelArray z(n);
        for (std::size_t t = 0; t < n; ++t) z[t] = perm[static_cast<std::size_t>(y[t])];
        const MetricReport q = mt3scm(s, z);
        const bool same = q.mt3scm == r.mt3scm && q.wcc == r.wcc && q.sl == r.sl && q.sp == r.sp &&
                          q.silhouette == r.silhouette && q.calinski_harabasz == r.calinski_harabasz &&
                          q.davies_bouldin == r.davies_bouldin;
        relabel_bad += !same;
    }
    const bool ok = bounds_bad == 0 && relabel_bad == 0 && singleton_bad == 0 && singletons > 0;
    return {ok, fmt("out of bounds=%zu relabel mismatches=%zu singleton clusters=%zu (nonzero cc=%zu)", bounds_bad,
                    relabel_bad, singletons, singleton_bad)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::size_t samples = 30, table_samples = 3, threads = 0;
    std::set<int> only;
    app.add_option("--samples", samples, "Random-search samples for criterion 8 (300 at full scale)");
    app.add_option("--table-samples", table_samples, "Samples per algorithm and dataset for the outperformance table");
    app.add_option("-j,--threads", threads, "Worker threads for searches (0 = all cores)");
    app.add_option("--only", only, "Run only these criteria");
    CLI11_PARSE(app, argc, argv);

    struct Criterion {
        int id;
        const char* name;
        double limit_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "perfect dataset scores", 10, perfect_dataset},
        {2, "random segmentation neutrality", 60, random_neutrality},
        {3, "analytic curve oracle", 5, analytic_curves},
        {4, "gradient correctness", 60, gradients},
        {5, "online behavior", 120, online_behavior},
        {6, "offline consistency", 30, offline_consistency},
        {7, "silhouette oracle", 60, silhouette_oracle},
        {8, "harness protocol", samples <= 30 ? 180.0 : 1800.0,
         [&] { return harness_protocol(samples, table_samples, threads); }},
        {9, "metric property suite", 60, metric_fuzz},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        if (!only.empty() && !only.contains(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.limit_seconds;
        const bool pass = o.pass && in_time;
        failures += !pass;
        std::printf("criterion %d %s: %s  %s [%.2fs, limit %.0fs%s]\n", c.id, c.name, pass ? "PASS" : "FAIL",
                    o.detail.c_str(), secs, c.limit_seconds, in_time ? "" : ", exceeded");
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
