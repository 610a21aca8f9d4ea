#include <doctest.h>

#include <cmath>
#include <numeric>

#include "abimca/timeseries.hpp"
#include "test_support.hpp"

using namespace abimca;

TEST_CASE("TimeSeries construction checks its invariants") {
    CHECK_THROWS_AS(TimeSeries(Matrix(0, 5)), std::invalid_argument);
    CHECK_THROWS_AS(TimeSeries(Matrix(2, 1)), std::invalid_argument);
    Matrix bad(1, 3, 0.0);
    bad(0, 1) = std::nan("");
    CHECK_THROWS_AS(TimeSeries{bad}, std::invalid_argument);
    bad(0, 1) = INFINITY;
    CHECK_THROWS_AS(TimeSeries{bad}, std::invalid_argument);
    CHECK_THROWS_AS(TimeSeries(Matrix(2, 3), {"a"}), std::invalid_argument);
    CHECK_THROWS_AS(TimeSeries(Matrix(2, 3), {}, 0.0), std::invalid_argument);

    const TimeSeries s(Matrix::from_rows({{1, 2, 3}, {4, 5, 6}}));
    CHECK(s.dims() == 2);
    CHECK(s.length() == 3);
    CHECK(s(1, 2) == 6);
    CHECK(s.feature_names() == std::vector<std::string>{"x0", "x1"});
}

TEST_CASE("segment_labels run-length encodes") {
    using S = Subsequence;
    CHECK(segment_labels(LabelArray{1, 1, 2, 2, 2, 1}) == std::vector<S>{{1, 0, 2}, {2, 2, 3}, {1, 5, 1}});
    CHECK(segment_labels(LabelArray{7}) == std::vector<S>{{7, 0, 1}});
    CHECK(segment_labels(LabelArray{0, 0, 3, 3}) == std::vector<S>{{0, 0, 2}, {3, 2, 2}});
}

TEST_CASE("segment_labels round-trips random label arrays") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        LabelArray y(1 + rng.below(60));
        for (auto& l : y) l = static_cast<Label>(rng.below(4));
        const auto segs = segment_labels(y);
        std::size_t total = 0;
        for (std::size_t j = 0; j < segs.size(); ++j) {
            total += segs[j].length;
            if (j > 0) {
                CHECK(segs[j].start == segs[j - 1].end());
                CHECK(segs[j].cluster_id != segs[j - 1].cluster_id);
            }
        }
        CHECK(total == y.size());
        CHECK(expand_segments(segs) == y);
    }
}

TEST_CASE("window starts") {
    CHECK(window_starts(5, 3, 1) == std::vector<std::size_t>{0, 1, 2});
    CHECK(window_starts(5, 3, 2) == std::vector<std::size_t>{0, 2});
    CHECK_THROWS_AS(window_starts(2, 3, 1), std::invalid_argument);
    CHECK_THROWS_AS(window_starts(5, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(window_starts(5, 3, 0), std::invalid_argument);

    for (std::size_t n = 2; n < 30; ++n) {
        for (std::size_t len = 2; len <= n; ++len) {
            for (std::size_t stride = 1; stride < 5; ++stride) {
                CHECK(window_starts(n, len, stride).size() == (n - len) / stride + 1);
            }
        }
    }
}

TEST_CASE("windows are contiguous column slices") {
    const TimeSeries s = testing::make_series(2, 7, [](std::size_t k, double t) { return 10.0 * k + t; });
    const auto w = windows(s, 3, 2);
    REQUIRE(w.size() == 3);
    CHECK(w[1].start == 2);
    CHECK(w[1].end_index() == 4);
    CHECK(w[1].values(0, 0) == 2.0);
    CHECK(w[1].values(1, 2) == 14.0);
}

TEST_CASE("fit_stats and standardize") {
    const auto stats = fit_stats(TimeSeries(Matrix::from_rows({{0, 2}})));
    CHECK(stats.mean[0] == 1.0);
    CHECK(stats.stddev[0] == doctest::Approx(std::sqrt(2.0)));

    const auto c = fit_stats(TimeSeries(Matrix::from_rows({{4, 4, 4}})));
    CHECK(c.mean[0] == 4.0);
    CHECK(c.stddev[0] == kStdFloor);

    const auto u = fit_stats(TimeSeries(Matrix::from_rows({{1, 2, 3}})));
    CHECK(u.mean[0] == 2.0);
    CHECK(u.stddev[0] == doctest::Approx(1.0));

    const TimeSeries five(Matrix::from_rows({{5, 5, 5}}));
    CHECK(standardize(five, {{5.0}, {1.0}}).values() == Matrix::from_rows({{0, 0, 0}}));
    CHECK(standardize(TimeSeries(Matrix::from_rows({{3, 3}})), {{1.0}, {2.0}})(0, 0) == 1.0);
    CHECK_THROWS_AS(standardize(five, {{5.0}, {0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(standardize(five, {{5.0, 1.0}, {1.0, 1.0}}), std::invalid_argument);
}

TEST_CASE("standardize then unstandardize recovers the input") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const TimeSeries s = testing::make_series(3, 40, [&](std::size_t, double) { return rng.uniform(-1e3, 1e3); });
        const auto st = fit_stats(s);
        const TimeSeries back = unstandardize(standardize(s, st), st);
        for (std::size_t i = 0; i < s.values().size(); ++i) {
            CHECK(std::abs(back.values().flat()[i] - s.values().flat()[i]) <= 1e-10);
        }
    }
}
