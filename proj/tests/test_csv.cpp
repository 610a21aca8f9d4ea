#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "abimca/core/error.hpp"
#include "abimca/csv.hpp"
#include "abimca/datasets.hpp"

using namespace abimca;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& content) {
    const fs::path dir = fs::temp_directory_path() / "abimca_csv_test";
    fs::create_directories(dir);
    const fs::path p = dir / name;
    std::ofstream(p) << content;
    return p;
}

}  // namespace

TEST_CASE("load a valid two-feature file") {
    const auto s = load_csv(temp_file("ok.csv", "a,b\n1,2\n3,4.5\n-1e2,0\n"));
    CHECK(s.series.dims() == 2);
    CHECK(s.series.length() == 3);
    CHECK(s.series(0, 2) == -100.0);
    CHECK(s.series(1, 1) == 4.5);
    CHECK(s.series.feature_names() == std::vector<std::string>{"a", "b"});
    CHECK_FALSE(s.labels);
}

TEST_CASE("label column") {
    const auto s = load_csv(temp_file("lab.csv", "a,b,label\n1,2,0\n3,4,2\n"), true);
    CHECK(s.series.dims() == 2);
    REQUIRE(s.labels);
    CHECK(*s.labels == LabelArray{0, 2});
    CHECK_THROWS_AS(load_csv(temp_file("neg.csv", "a,label\n1,-1\n2,1\n"), true), ParseError);
}

TEST_CASE("NaN cell is rejected with its location") {
    try {
        load_csv(temp_file("nan.csv", "a,b\n1,2\n3,NaN\n"));
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.row() == 3);
        CHECK(e.column() == 2);
        CHECK(std::string(e.what()).find("NaN") != std::string::npos);
    }
}

TEST_CASE("malformed files") {
    CHECK_THROWS_AS(load_csv(temp_file("empty.csv", "")), ParseError);
    CHECK_THROWS_AS(load_csv(temp_file("header_only.csv", "a,b\n")), ParseError);
    CHECK_THROWS_AS(load_csv(temp_file("ragged.csv", "a,b\n1,2\n3\n")), ParseError);
    CHECK_THROWS_AS(load_csv(temp_file("text.csv", "a\n1\nx\n")), ParseError);
    CHECK_THROWS_AS(load_csv(temp_file("inf.csv", "a\n1\ninf\n")), ParseError);
    CHECK_THROWS_AS(load_csv("/nonexistent/file.csv"), ParseError);
    try {
        load_csv(temp_file("ragged2.csv", "a,b\n1,2\n3,4,5\n"));
    } catch (const ParseError& e) {
        CHECK(e.row() == 3);
    }
}

TEST_CASE("generated Lorenz series survives a write/load round trip") {
    LorenzParams p;
    p.steps = 500;
    const TimeSeries s = gen_lorenz(p);
    const fs::path path = fs::temp_directory_path() / "abimca_csv_test" / "lorenz.csv";
    write_series_csv(path, s);
    const auto back = load_csv(path);
    REQUIRE(back.series.length() == s.length());
    for (std::size_t i = 0; i < s.values().size(); ++i) {
        CHECK(std::abs(back.series.values().flat()[i] - s.values().flat()[i]) <= 1e-9);
    }
    CHECK(back.series.values() == s.values());
}

TEST_CASE("label files") {
    const LabelArray y{0, 1, 1, 4};
    const fs::path path = fs::temp_directory_path() / "abimca_csv_test" / "labels.csv";
    write_labels_csv(path, y);
    CHECK(load_labels_csv(path) == y);
    CHECK(load_labels_csv(temp_file("nohead.csv", "3\n2\n")) == LabelArray{3, 2});
    CHECK_THROWS_AS(load_labels_csv(temp_file("twocol.csv", "1,2\n")), ParseError);
    CHECK_THROWS_AS(load_labels_csv(temp_file("nolabels.csv", "label\n")), ParseError);
}
