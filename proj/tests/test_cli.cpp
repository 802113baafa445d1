#include "doctest.h"

#include "affsym/catalog.hpp"
#include "affsym/report.hpp"

#include "json.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

using namespace affsym;
using ordered_json = nlohmann::ordered_json;

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("config parsing fills every field") {
    const char* text = R"({
        "command": "scan",
        "surface": "z2z2",
        "grid": {"t": [-0.5, 0.5, 3], "u": [0, 0.5, 2], "v": [0, 0, 1]},
        "tolerances": {"scan": 1e-7, "fundamental_derivative": 2e-5,
                       "fundamental_pointwise": 1e-9},
        "output": {"path": "out.json", "format": "csv"},
        "seed": 42
    })";
    const RunConfig c = config_from_json(text);
    CHECK(c.command == Command::Scan);
    CHECK(c.surface == "z2z2");
    REQUIRE(c.grid.has_value());
    CHECK((*c.grid)[0].start == -0.5);
    CHECK((*c.grid)[0].count == 3);
    CHECK((*c.grid)[2].count == 1);
    CHECK(c.tol_scan == 1e-7);
    CHECK(c.tol_derivative == 2e-5);
    CHECK(c.tol_pointwise == 1e-9);
    CHECK(c.output_path == "out.json");
    CHECK(c.format == OutputFormat::Csv);
    CHECK(c.seed == 42);

    const RunConfig d = config_from_json(R"({"command": "classify", "surface": "z2z2"})");
    CHECK(!d.grid.has_value());
    CHECK(d.tol_scan == 1e-6);
    CHECK(d.tol_derivative == 1e-5);
    CHECK(d.tol_pointwise == 1e-8);
    CHECK(d.format == OutputFormat::Json);
    CHECK(d.output_path.empty());
    CHECK(d.seed == 1);
}

TEST_CASE("malformed configs are rejected") {
    const char* bad[] = {
        "{",
        "[]",
        R"({"surface": "z2z2"})",
        R"({"command": "fly", "surface": "z2z2"})",
        R"({"command": "scan"})",
        R"({"command": "scan", "surface": "z2z2", "unknown": 1})",
        R"({"command": "scan", "surface": {"family": "proper_warped"}})",
        R"({"command": "scan", "surface": {"family": "odd", "fibre": "unit_sphere2"}})",
        R"({"command": "scan", "surface": {"family": "proper_warped", "fibre": "unit_sphere2", "extra": 1}})",
        R"({"command": "scan", "surface": "z2z2", "grid": {"t": [0, 1, 2]}})",
        R"({"command": "scan", "surface": "z2z2", "grid": {"t": [0,1,2], "u": [0,1,2], "v": [0,1,2], "w": [0,1,2]}})",
        R"({"command": "scan", "surface": "z2z2", "grid": {"t": [0,1,0], "u": [0,1,2], "v": [0,1,2]}})",
        R"({"command": "scan", "surface": "z2z2", "grid": {"t": [0,1,2.5], "u": [0,1,2], "v": [0,1,2]}})",
        R"({"command": "scan", "surface": "z2z2", "grid": {"t": [1,0,2], "u": [0,1,2], "v": [0,1,2]}})",
        R"({"command": "scan", "surface": "z2z2", "tolerances": {"scan": 0}})",
        R"({"command": "scan", "surface": "z2z2", "tolerances": {"scans": 1e-6}})",
        R"({"command": "scan", "surface": "z2z2", "output": {"format": "xml"}})",
        R"({"command": "scan", "surface": "z2z2", "output": {"path": 3}})",
        R"({"command": "scan", "surface": "z2z2", "seed": -1})",
        R"({"command": "scan", "surface": "z2z2", "seed": 1.5})",
    };
    for (const char* text : bad) {
        CAPTURE(text);
        CHECK_THROWS_AS(config_from_json(text), ConfigError);
    }

    // Curve shape errors.
    const char* curve_bad[] = {
        R"([1,2,3,4,5,6,7,8,9])",  // too many coefficients
        R"([])",
        R"(["x"])",
    };
    for (const char* c1 : curve_bad) {
        CAPTURE(c1);
        const std::string text =
            std::string(R"({"command": "scan", "surface": {"family": "proper_warped",
                "fibre": "unit_sphere2", "curve": {"c1": )") +
            c1 + R"(, "c2": [1], "domain": [0.2, 1.2]}}})";
        CHECK_THROWS_AS(config_from_json(text), ConfigError);
    }
    CHECK_THROWS_AS(config_from_json(
                        R"({"command": "scan", "surface": {"family": "proper_warped",
            "fibre": "unit_sphere2", "curve": {"c1": [1], "c2": [1], "domain": [1.2, 0.2]}}})"),
                    ConfigError);
}

TEST_CASE("run rejects bad domains and surfaces") {
    RunConfig c = config_from_json(R"({"command": "classify", "surface": "nope"})");
    CHECK_THROWS_AS(run(c), ConfigError);

    // Grid outside the catalog domain.
    c = config_from_json(R"({
        "command": "scan", "surface": "z2z2",
        "grid": {"t": [0, 2, 3], "u": [0, 1, 2], "v": [0, 1, 2]}
    })");
    CHECK_THROWS_AS(run(c), ConfigError);

    // Classify needs a single lattice point.
    c = config_from_json(R"({
        "command": "classify", "surface": "z2z2",
        "grid": {"t": [0, 1, 2], "u": [0, 0, 1], "v": [0, 0, 1]}
    })");
    CHECK_THROWS_AS(run(c), ConfigError);

    // Composed surface with an unusable profile curve.
    c = config_from_json(R"({
        "command": "classify",
        "surface": {"family": "improper_warped", "fibre": "elliptic_paraboloid",
                    "curve": {"c1": [2, 1], "c2": [0, 1], "domain": [0.5, 1.5]}}
    })");
    CHECK_THROWS_AS(run(c), ConfigError);
}

TEST_CASE("composed surfaces hash like their named default") {
    const RunConfig by_name =
        config_from_json(R"({"command": "classify", "surface": "proper_warped:unit_sphere2"})");
    const RunConfig composed = config_from_json(R"({
        "command": "classify",
        "surface": {"family": "proper_warped", "fibre": "unit_sphere2",
                    "curve": {"c1": [0,0,0,0,0,0,1], "c2": [2,0,0,0,0,0,0,1],
                              "domain": [0.2, 1.2]}}
    })");
    CHECK(canonical_config(by_name) == canonical_config(composed));
    CHECK(config_hash(by_name) == config_hash(composed));

    const std::string h = config_hash(by_name);
    CHECK(h.size() == 16);
    for (char ch : h) CHECK(std::isxdigit(static_cast<unsigned char>(ch)));

    // The output block is not part of the identity; the grid is.
    RunConfig moved = by_name;
    moved.output_path = "elsewhere.json";
    moved.format = OutputFormat::Csv;
    CHECK(config_hash(moved) == h);
    RunConfig regrid = by_name;
    regrid.grid = {{{0.3, 0.9, 1}, {0.0, 0.0, 1}, {0.0, 0.0, 1}}};
    CHECK(config_hash(regrid) != h);
}

TEST_CASE("canonical config resolves the per-command default grid") {
    const RunConfig c = config_from_json(R"({"command": "verify", "surface": "z2z2"})");
    const ordered_json canon = ordered_json::parse(canonical_config(c));
    CHECK(canon["command"] == "verify");
    CHECK(canon["surface"] == "z2z2");
    for (int i = 0; i < 3; ++i) {
        CHECK(canon["grid"][i][0].get<double>() == doctest::Approx(-0.8));
        CHECK(canon["grid"][i][1].get<double>() == doctest::Approx(0.8));
        CHECK(canon["grid"][i][2].get<int>() == 3);
    }

    const RunConfig s = config_from_json(R"({"command": "scan", "surface": "z2z2"})");
    const ordered_json canon2 = ordered_json::parse(canonical_config(s));
    CHECK(canon2["grid"][0][2].get<int>() == 5);
    CHECK(canon2["tolerances"]["scan"].get<double>() == 1e-6);
}

TEST_CASE("runs are deterministic") {
    const RunConfig c = config_from_json(R"({
        "command": "scan", "surface": "z2z2",
        "grid": {"t": [-0.5, 0.5, 2], "u": [-0.5, 0.5, 2], "v": [-0.5, 0.5, 2]},
        "seed": 5
    })");
    const RunResult r1 = run(c, "2026-01-01T00:00:00Z");
    const RunResult r2 = run(c, "2026-01-01T00:00:00Z");
    CHECK(r1.json == r2.json);
    CHECK(r1.csv == r2.csv);
    CHECK(r1.exit_code == 0);

    // Natural timestamps differ at most in meta.timestamp.
    ordered_json a = ordered_json::parse(run(c).json);
    ordered_json b = ordered_json::parse(run(c).json);
    a["meta"].erase("timestamp");
    b["meta"].erase("timestamp");
    CHECK(a.dump() == b.dump());
}

TEST_CASE("scan report carries meta, rows and summary") {
    const RunConfig c = config_from_json(R"({
        "command": "scan", "surface": "z2z2",
        "grid": {"t": [-0.5, 0.5, 2], "u": [-0.5, 0.5, 2], "v": [-0.5, 0.5, 2]},
        "seed": 9
    })");
    const RunResult r = run(c, "2026-01-01T00:00:00Z");
    const ordered_json j = ordered_json::parse(r.json);

    CHECK(j["schema"].get<int>() == 1);
    CHECK(j["meta"]["version"] == kVersion);
    CHECK(j["meta"]["config_hash"] == config_hash(c));
    CHECK(j["meta"]["seed"].get<uint64_t>() == 9);
    CHECK(j["meta"]["timestamp"] == "2026-01-01T00:00:00Z");

    REQUIRE(j["results"].size() == 8);
    for (const auto& row : j["results"]) {
        CHECK(row["valid"].get<bool>());
        CHECK(row["group"] == "Z2xZ2");
        CHECK(row["class"] == "TETRA_A4");
        CHECK(row["lambda"].get<double>() ==
              doctest::Approx(std::pow(2.0, -1.4)).epsilon(1e-8));
        CHECK(row.contains("margin"));
        CHECK(!row.contains("error"));
    }
    CHECK(j["summary"]["points"].get<int>() == 8);
    CHECK(j["summary"]["valid"].get<int>() == 8);
    CHECK(j["summary"]["errors"].get<int>() == 0);
    CHECK(j["summary"]["histogram"]["Z2xZ2"].get<int>() == 8);
    CHECK(j["summary"]["lambda"]["min"].get<double>() ==
          doctest::Approx(std::pow(2.0, -1.4)).epsilon(1e-8));

    // The round sphere classifies as SO3, whose margin is omitted.
    const RunConfig s = config_from_json(
        R"({"command": "classify", "surface": "unit_sphere3"})");
    const ordered_json js = ordered_json::parse(run(s).json);
    REQUIRE(js["results"].size() == 1);
    CHECK(js["results"][0]["group"] == "SO3");
    CHECK(!js["results"][0].contains("margin"));
    CHECK(!js.contains("summary"));
}

TEST_CASE("csv rows reuse the json number spellings") {
    const RunConfig c = config_from_json(R"({
        "command": "scan", "surface": "z2z2",
        "grid": {"t": [-1, 1, 2], "u": [-1, 1, 2], "v": [0, 0, 1]}
    })");
    const RunResult r = run(c, "t");
    const auto rows = lines_of(r.csv);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] ==
          "t,u,v,valid,group,class,lambda,mu,a,b,c,d,residual,margin,ambiguous,"
          "c_norm,apolarity,volume_residual,s_asym,error");

    const ordered_json j = ordered_json::parse(r.json);
    for (size_t i = 0; i < 4; ++i) {
        const auto cells = split(rows[i + 1], ',');
        REQUIRE(cells.size() == 20);
        const auto& row = j["results"][i];
        CHECK(cells[0] == ordered_json(row["x"][0]).dump());
        CHECK(cells[1] == ordered_json(row["x"][1]).dump());
        CHECK(cells[3] == "true");
        CHECK(cells[4] == row["group"].get<std::string>());
        CHECK(cells[6] == ordered_json(row["lambda"]).dump());
        CHECK(cells[12] == ordered_json(row["residual"]).dump());
        CHECK(cells[13] == ordered_json(row["margin"]).dump());
        CHECK(cells[19].empty());
    }
}

TEST_CASE("verify command reports each check and sets the exit code") {
    const RunConfig c = config_from_json(R"({
        "command": "verify", "surface": "z2z2",
        "grid": {"t": [-0.2, 0.2, 2], "u": [0, 0, 1], "v": [0, 0, 1]}
    })");
    const RunResult r = run(c, "t");
    CHECK(r.exit_code == 0);
    const ordered_json j = ordered_json::parse(r.json);
    REQUIRE(j["results"].size() == 14);  // 2 points x 7 checks
    for (const auto& row : j["results"]) {
        CHECK(row["valid"].get<bool>());
        CHECK(row["pass"].get<bool>());
        CHECK(row["value"].get<double>() <= row["tolerance"].get<double>());
    }

    RunConfig tight = c;
    tight.tol_derivative = 1e-18;
    tight.tol_pointwise = 1e-18;
    const RunResult rt = run(tight, "t");
    CHECK(rt.exit_code == 1);

    // A lattice point whose stencil leaves the domain is an invalid row, not a crash.
    const RunConfig edge = config_from_json(R"({
        "command": "verify", "surface": "z2z2",
        "grid": {"t": [1, 1, 1], "u": [1, 1, 1], "v": [1, 1, 1]}
    })");
    const RunResult re = run(edge, "t");
    CHECK(re.exit_code == 1);
    const ordered_json je = ordered_json::parse(re.json);
    REQUIRE(je["results"].size() == 1);
    CHECK(!je["results"][0]["valid"].get<bool>());
    CHECK(je["results"][0].contains("error"));
}

TEST_CASE("construct command emits positions") {
    const RunConfig c = config_from_json(R"({
        "command": "construct", "surface": "proper_warped:unit_sphere2",
        "grid": {"t": [0.4, 0.8, 2], "u": [0, 0, 1], "v": [0, 0, 1]}
    })");
    const RunResult r = run(c, "t");
    CHECK(r.exit_code == 0);
    const ordered_json j = ordered_json::parse(r.json);
    REQUIRE(j["results"].size() == 2);

    const SurfaceSpec s = surface_by_name("proper_warped:unit_sphere2");
    const Vec4 F = s.partial(Vec3(0.4, 0.0, 0.0), 0, 0, 0);
    for (int k = 0; k < 4; ++k)
        CHECK(j["results"][0]["position"][k].get<double>() == doctest::Approx(F[k]));
    CHECK(lines_of(r.csv)[0] == "t,u,v,valid,F0,F1,F2,F3,error");
}

TEST_CASE("output delivery writes the payload verbatim") {
    RunConfig c = config_from_json(R"({
        "command": "classify", "surface": "z2z2",
        "output": {"path": "", "format": "json"}
    })");
    const std::string path = "affsym_test_out.json";
    c.output_path = path;
    CHECK(run_and_write(c) == 0);
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    ordered_json a = ordered_json::parse(buf.str());
    ordered_json b = ordered_json::parse(run(c).json);
    a["meta"].erase("timestamp");
    b["meta"].erase("timestamp");
    CHECK(a.dump() == b.dump());
    CHECK(buf.str().back() == '\n');
    std::remove(path.c_str());

    c.output_path = "/nonexistent_dir_affsym/out.json";
    CHECK(run_and_write(c) == 2);
}
