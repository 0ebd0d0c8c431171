#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mckean/io.hpp"
#include "mckean/svg.hpp"
#include "test_support.hpp"

using namespace mckean;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_file(const char* name) {
    const fs::path dir = fs::temp_directory_path() / "mckean_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("csv files are rectangular with a header") {
    const fs::path p = temp_file("tiny.csv");
    {
        io::CsvWriter csv(p.string(), {"a", "b"});
        csv.row({1.0, 2.0});
        csv.row({0.1, -4.5e-9});
        CHECK_THROWS_AS(csv.row({1.0}), IoError);
    }
    std::ifstream in(p);
    std::string line;
    std::size_t rows = 0, commas = 0;
    while (std::getline(in, line)) {
        ++rows;
        commas = std::count(line.begin(), line.end(), ',');
        CHECK(commas == 1);
    }
    CHECK(rows == 3);
}

TEST_CASE("doubles round-trip through the csv format") {
    const double v = -0.19935874178695384;
    CHECK(std::stod(io::fmt(v)) == v);
    CHECK(io::fmt(v) == io::fmt(v));
}

TEST_CASE("density csv uses the x,u schema") {
    const Grid g(2.0, 17);
    const fs::path p = temp_file("density.csv");
    io::write_density_csv(p.string(), uniform_density(g, -1.0, 1.0));
    const std::string text = slurp(p);
    CHECK(text.rfind("x,u\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 18);
}

TEST_CASE("svg plots are well-formed and escape labels") {
    const fs::path p = temp_file("plot.svg");
    svg::emit_svg(p.string(), "decay of <xi> & friends",
                  {{"series <1>", {0.0, 1.0, 2.0}, {3.0, 2.0, 1.5}}, {"flat", {0.0, 2.0}, {1.0, 1.0}}},
                  {{"limit", 1.25}});
    const std::string text = slurp(p);
    CHECK(text.rfind("<?xml", 0) == 0);
    CHECK(text.find("<svg") != std::string::npos);
    CHECK(text.find("</svg>") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '<') == std::count(text.begin(), text.end(), '>'));
    CHECK(text.find("decay of &lt;xi&gt; &amp; friends") != std::string::npos);
    CHECK(text.find("stroke-dasharray") != std::string::npos);  // the reference line
    CHECK(text.find("<polyline") != std::string::npos);

    CHECK_THROWS_AS(svg::emit_svg(p.string(), "empty", {}), IoError);
}

TEST_CASE("emitted files are byte-identical across repeated writes") {
    const Grid g(2.0, 33);
    const GridDensity u = gaussian_density(g, 0.3, 0.5);
    const fs::path p1 = temp_file("det1.csv"), p2 = temp_file("det2.csv");
    io::write_density_csv(p1.string(), u);
    io::write_density_csv(p2.string(), u);
    CHECK(slurp(p1) == slurp(p2));
}
