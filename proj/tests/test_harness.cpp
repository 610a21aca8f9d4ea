#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "abimca/core/error.hpp"
#include "abimca/csv.hpp"
#include "abimca/curve_geometry.hpp"
#include "abimca/datasets.hpp"
#include "abimca/harness.hpp"
#include "abimca/params.hpp"

using namespace abimca;
namespace fs = std::filesystem;

namespace {

RunRecord fake(std::size_t index, double mt, double sil, std::optional<double> ch, std::optional<double> db,
               bool failed = false) {
    RunRecord r;
    r.index = index;
    r.failed = failed;
    r.report.mt3scm = mt;
    r.report.silhouette = sil;
    r.report.calinski_harabasz = ch;
    r.report.davies_bouldin = db;
    return r;
}

std::vector<std::string> read_lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    return lines;
}

const ParamBound& bound(const ParamSpace& s, const std::string& name) {
    for (const auto& b : s.params) {
        if (b.name == name) return b;
    }
    throw std::out_of_range(name);
}

fs::path temp_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / "abimca_harness_test" / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("search spaces") {
    const ParamSpace a = default_space(kAbimca);
    CHECK(bound(a, "learning-rate").lower == 0.0);
    CHECK(bound(a, "learning-rate").upper == 0.01);
    CHECK(bound(a, "omega").lower == 5);
    CHECK(bound(a, "omega").upper == 15);
    CHECK(bound(a, "omega").kind == ParamKind::Integer);
    CHECK(bound(a, "theta-factor").lower == 1);
    CHECK(bound(a, "theta-factor").upper == 3);

    const ParamSpace k = default_space(kMiniBatchKMeans);
    CHECK(bound(k, "n-clusters").upper == 30);
    CHECK(bound(k, "batch-size").lower == 128);

    CHECK_THROWS_AS(default_space("birch"), ConfigError);
    ParamSpace bad = a;
    bad.params[0].lower = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("sampled assignments stay in bounds") {
    Rng rng(1);
    for (const auto* alg : {&kAbimca, &kMiniBatchKMeans}) {
        const ParamSpace s = default_space(*alg);
        for (int i = 0; i < 500; ++i) {
            const ParamAssignment p = sample_assignment(s, rng);
            REQUIRE(p.size() == s.params.size());
            for (std::size_t j = 0; j < p.size(); ++j) {
                CHECK(p[j].first == s.params[j].name);
                CHECK(p[j].second >= s.params[j].lower);
                CHECK(p[j].second <= s.params[j].upper);
                if (s.params[j].kind == ParamKind::Integer) CHECK(p[j].second == std::round(p[j].second));
            }
        }
    }
}

TEST_CASE("integer sampling reaches both ends") {
    ParamSpace s{"x", {{"n", 1, 3, ParamKind::Integer}}};
    Rng rng(2);
    std::map<double, int> seen;
    for (int i = 0; i < 300; ++i) ++seen[sample_assignment(s, rng)[0].second];
    CHECK(seen.size() == 3);
    for (const auto& [v, c] : seen) CHECK(c > 60);
}

TEST_CASE("random search on a fixed space") {
    ParamSpace fixed = default_space(kAbimca);
    for (auto& b : fixed.params) b.upper = b.lower = (b.name == "learning-rate" ? 0.01 : b.upper);
    const auto recs = random_search(kAbimca, "stepped", fixed, 3, 9, 2);
    REQUIRE(recs.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(recs[i].index == i);
        CHECK(recs[i].params == recs[0].params);
        CHECK_FALSE(recs[i].failed);
    }
    CHECK(recs[0].seed != recs[1].seed);
}

TEST_CASE("random search is deterministic and independent of the thread count") {
    const ParamSpace s = default_space(kMiniBatchKMeans);
    const auto a = random_search(kMiniBatchKMeans, "stepped", s, 6, 42, 1);
    const auto b = random_search(kMiniBatchKMeans, "stepped", s, 6, 42, 4);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].params == b[i].params);
        CHECK(a[i].seed == b[i].seed);
        CHECK(a[i].labels == b[i].labels);
        CHECK(a[i].report.mt3scm == b[i].report.mt3scm);
    }
    const auto one = random_search(kAbimca, "stepped", default_space(kAbimca), 1, 3);
    const auto again = random_search(kAbimca, "stepped", default_space(kAbimca), 1, 3);
    CHECK(one[0].params == again[0].params);
    CHECK(one[0].labels == again[0].labels);
    CHECK(one[0].report.mt3scm == again[0].report.mt3scm);
}

TEST_CASE("records are reproducible from their stored tuple") {
    const auto recs = random_search(kMiniBatchKMeans, "perfect", default_space(kMiniBatchKMeans), 3, 5);
    for (const RunRecord& r : recs) {
        const RunRecord again = rerun(r);
        CHECK(again.failed == r.failed);
        CHECK(std::abs(again.report.mt3scm - r.report.mt3scm) <= 1e-9);
        CHECK(std::abs(again.report.silhouette - r.report.silhouette) <= 1e-9);
        CHECK(again.labels == r.labels);
    }
}

TEST_CASE("unknown ids and bad arguments") {
    CHECK_THROWS_AS(load_dataset("bee-waggle"), ConfigError);
    CHECK_THROWS_AS(random_search(kAbimca, "nope", default_space(kAbimca), 1, 0), ConfigError);
    CHECK_THROWS_AS(random_search("birch", "stepped", default_space(kAbimca), 1, 0), ConfigError);
    CHECK_THROWS_AS(random_search(kAbimca, "stepped", default_space(kAbimca), 0, 0), std::invalid_argument);
    const auto data = load_dataset("stepped");
    CHECK_THROWS_AS(run_single("birch", "stepped", data.series, {}, 0), ConfigError);
    // Invalid parameters fail the run instead of aborting the search.
    const RunRecord r = run_single(kAbimca, "stepped", data.series, {{"learning-rate", 0.0}}, 0);
    CHECK(r.failed);
    CHECK_FALSE(r.error.empty());
    for (const auto& id : dataset_ids()) CHECK_NOTHROW(load_dataset(id));
}

TEST_CASE("best by metric") {
    const std::vector<RunRecord> recs{fake(0, 0.1, 0.2, 5.0, 1.0), fake(1, 0.3, 0.1, std::nullopt, 0.5),
                                      fake(2, 0.2, 0.0, 7.0, std::nullopt), fake(3, 0.9, 0.9, 100.0, 0.1, true)};
    const auto best = best_by_metric(recs);
    CHECK(best.at(Metric::Mt3scm)->index == 1);
    CHECK(best.at(Metric::Silhouette)->index == 0);
    CHECK(best.at(Metric::CalinskiHarabasz)->index == 2);
    CHECK(best.at(Metric::DaviesBouldin)->index == 1);

    const std::vector<RunRecord> single{fake(7, 0.1, 0.1, 1.0, 1.0)};
    for (Metric m : kAllMetrics) CHECK(best_by_metric(single).at(m)->index == 7);

    const std::vector<RunRecord> undefined{fake(0, 0.1, 0.0, std::nullopt, std::nullopt)};
    CHECK_FALSE(best_by_metric(undefined).contains(Metric::DaviesBouldin));

    CHECK_THROWS_AS(best_by_metric({fake(0, 0, 0, 0, 0, true)}), std::invalid_argument);
    CHECK(higher_is_better(Metric::Mt3scm));
    CHECK_FALSE(higher_is_better(Metric::DaviesBouldin));
    CHECK(beats(Metric::DaviesBouldin, 0.5, 1.0));
    CHECK_FALSE(beats(Metric::Mt3scm, 0.5, 0.5));
}

TEST_CASE("outperformance counting") {
    RecordsByAlgorithm recs;
    recs["a"]["d1"] = {fake(0, 0.9, 0.9, 100.0, 0.1)};
    recs["base"]["d1"] = {fake(0, 0.1, 0.1, 10.0, 1.0)};
    OutperformanceTable t = outperformance(recs, "base");
    CHECK(t.totals.at("a") == 4);
    CHECK(t.totals.at("base") == 0);
    CHECK(t.datasets == std::vector<std::string>{"d1"});

    recs["a"]["d1"] = {fake(0, 0.1, 0.1, 10.0, 1.0)};
    t = outperformance(recs, "base");
    CHECK(t.totals.at("a") == 0);
    const PairwiseCounts tie = pairwise(recs, "a", "base");
    CHECK(tie.ties == 4);

    CHECK_THROWS_AS(outperformance(recs, "missing"), ConfigError);
}

TEST_CASE("pairwise counts are antisymmetric and complete") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        RecordsByAlgorithm recs;
        const std::size_t datasets = 1 + rng.below(4);
        for (const std::string alg : {"a", "b"}) {
            for (std::size_t d = 0; d < datasets; ++d) {
                auto& v = recs[alg]["d" + std::to_string(d)];
                for (int i = 0; i < 3; ++i) {
                    auto q = [&] { return std::round(rng.uniform(0, 4)) / 4; };
                    v.push_back(fake(i, q(), q(), rng.below(3) ? std::optional(q()) : std::nullopt, q()));
                }
            }
        }
        const PairwiseCounts ab = pairwise(recs, "a", "b"), ba = pairwise(recs, "b", "a");
        CHECK(ab.a_wins == ba.b_wins);
        CHECK(ab.b_wins == ba.a_wins);
        CHECK(ab.ties == ba.ties);
        CHECK(ab.a_wins + ab.b_wins + ab.ties == datasets * 4);
        const auto t = outperformance(recs, "b");
        CHECK(t.totals.at("a") == ab.a_wins);
        for (const auto& [m, c] : t.counts.at("a")) CHECK(c <= datasets);
    }
}

TEST_CASE("score trace format") {
    const auto data = gen_step_regimes(default_step_spec(30, 1));
    AbimcaConfig c;
    const OnlineResult r = run_online(data.series, c);
    const fs::path dir = temp_dir("trace");
    write_score_trace(dir / "trace.csv", r.steps, r.registry.size(), c);
    const auto lines = read_lines(dir / "trace.csv");
    std::string header = "t,s_b";
    for (std::size_t k = 1; k <= r.registry.size(); ++k) header += ",s_" + std::to_string(k);
    header += ",eta,rho";
    CHECK(lines.front() == header);
    CHECK(lines.size() == r.steps.size() + 1);

    write_score_trace(dir / "empty.csv", r.steps, 0, c);
    CHECK(read_lines(dir / "empty.csv").front() == "t,s_b,eta,rho");
}

TEST_CASE("trajectory and run directory") {
    const auto data = gen_perfect_metric_dataset(1);
    const CurveParams cp = curve_params(data.series);
    const fs::path dir = temp_dir("traj");
    write_trajectory(dir / "traj.csv", data.series, cp, &data.labels);
    const LoadedSeries back = load_csv(dir / "traj.csv", true);
    // Columns t, x, y, z, kappa, tau, speed, accel.
    REQUIRE(back.series.dims() == 8);
    for (std::size_t t = 0; t < cp.size(); ++t) CHECK(back.series(4, t) == cp.kappa[t]);
    CHECK(*back.labels == data.labels);

    const auto recs = random_search(kMiniBatchKMeans, "stepped", default_space(kMiniBatchKMeans), 1, 1);
    write_run_dir(dir / "runs" / "0", recs[0]);
    for (const char* f : {"params.cfg", "labels.csv", "metrics.csv"}) CHECK(fs::exists(dir / "runs" / "0" / f));
    const KeyValues kv = read_key_values(dir / "runs" / "0" / "params.cfg");
    CHECK(kv.contains("param.n-clusters"));
    CHECK(kv.at("algorithm") == "mini-batch-kmeans");
    CHECK(load_labels_csv(dir / "runs" / "0" / "labels.csv") == recs[0].labels);

    write_records_csv(dir / "records.csv", recs);
    CHECK(read_lines(dir / "records.csv").size() == 2);
}

TEST_CASE("parameter files") {
    AbimcaConfig c;
    set_param(c, "eta", "0.2");
    set_param(c, "omega", "7");
    set_param(c, "allow-unknown", "false");
    CHECK(c.detection_threshold == 0.2);
    CHECK(c.train_cycles == 7);
    CHECK_FALSE(c.allow_unknown_in_predict);
    CHECK_THROWS_AS(set_param(c, "bogus", "1"), ConfigError);
    CHECK_THROWS_AS(set_param(c, "omega", "x"), ConfigError);
    CHECK_THROWS_AS(set_param(c, "omega", "2.5"), ConfigError);

    const AbimcaConfig back = from_key_values<AbimcaConfig>(to_key_values(c));
    CHECK(back.detection_threshold == c.detection_threshold);
    CHECK(back.train_cycles == c.train_cycles);
    CHECK(back.allow_unknown_in_predict == c.allow_unknown_in_predict);

    KMeansConfig k;
    set_param(k, "n-clusters", "9");
    CHECK(from_key_values<KMeansConfig>(to_key_values(k)).n_clusters == 9);

    const fs::path dir = temp_dir("kv");
    write_key_values(dir / "a.cfg", to_key_values(c));
    CHECK(read_key_values(dir / "a.cfg") == to_key_values(c));
    std::ofstream(dir / "bad.cfg") << "# comment\n\neta 3\n";
    CHECK_THROWS_AS(read_key_values(dir / "bad.cfg"), ParseError);
}
