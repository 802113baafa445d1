#include "affsym/report.hpp"

#include "affsym/affine_core.hpp"
#include "affsym/catalog.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <limits>
#include <map>
#include <vector>

namespace affsym {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& msg) { throw ConfigError(msg); }

void require_keys(const ordered_json& obj, std::initializer_list<const char*> allowed,
                  const char* where) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* k : allowed) ok = ok || item.key() == k;
        if (!ok) bad("unknown key '" + item.key() + "' in " + where);
    }
}

double positive_number(const ordered_json& v, const std::string& name) {
    if (!v.is_number()) bad(name + " must be a number");
    const double x = v.get<double>();
    if (!(x > 0.0)) bad(name + " must be positive");
    return x;
}

Command command_from_string(const std::string& s) {
    if (s == "classify") return Command::Classify;
    if (s == "scan") return Command::Scan;
    if (s == "verify") return Command::Verify;
    if (s == "construct") return Command::Construct;
    bad("unknown command '" + s + "'");
}

const char* family_name(SurfaceFamily f) {
    switch (f) {
        case SurfaceFamily::ProperWarped: return "proper_warped";
        case SurfaceFamily::ImproperScaling: return "improper_warped";
        case SurfaceFamily::ImproperTranslation: return "improper_warped_translation";
        default: return "";
    }
}

CurveCoeffs coeff_list(const ordered_json& v, const std::string& name) {
    if (!v.is_array() || v.empty() || v.size() > kCurveBasisSize)
        bad(name + " must list 1 to 8 basis coefficients");
    CurveCoeffs c{};
    for (size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) bad(name + " must contain numbers only");
        c[i] = v[i].get<double>();
    }
    return c;
}

std::shared_ptr<const CurveSpec> parse_curve(const ordered_json& v) {
    if (!v.is_object()) bad("surface.curve must be an object");
    require_keys(v, {"c1", "c2", "domain"}, "surface.curve");
    if (!v.contains("c1") || !v.contains("c2") || !v.contains("domain"))
        bad("surface.curve requires c1, c2 and domain");
    auto curve = std::make_shared<CurveSpec>();
    curve->c1 = coeff_list(v["c1"], "surface.curve.c1");
    curve->c2 = coeff_list(v["c2"], "surface.curve.c2");
    const auto& d = v["domain"];
    if (!d.is_array() || d.size() != 2 || !d[0].is_number() || !d[1].is_number())
        bad("surface.curve.domain must be [low, high]");
    curve->domain = {d[0].get<double>(), d[1].get<double>()};
    if (!(curve->domain[0] < curve->domain[1]))
        bad("surface.curve.domain must be a nonempty interval");
    return curve;
}

GridAxis parse_axis(const ordered_json& v, const std::string& name) {
    if (!v.is_array() || v.size() != 3) bad(name + " must be [start, stop, count]");
    if (!v[0].is_number() || !v[1].is_number()) bad(name + " start/stop must be numbers");
    if (!v[2].is_number_integer()) bad(name + " count must be an integer");
    GridAxis a;
    a.start = v[0].get<double>();
    a.stop = v[1].get<double>();
    const int64_t n = v[2].get<int64_t>();
    if (n < 1) bad(name + " count must be at least 1");
    if (n > 1000000) bad(name + " count is unreasonably large");
    a.count = static_cast<int>(n);
    if (!(a.start <= a.stop)) bad(name + " start must not exceed stop");
    return a;
}

struct Resolved {
    SurfaceSpec spec;         // pristine; domain as declared by the catalog
    SurfaceSpec narrowed;     // domain shrunk to the grid ranges (lattice layout)
    std::array<GridAxis, 3> grid{};
    std::array<int, 3> counts{};
};

Resolved resolve(const RunConfig& c) {
    Resolved r;
    try {
        r.spec = surface_by_name(c.surface, c.curve);
    } catch (const std::exception& e) {
        bad(e.what());
    }

    const auto& dom = r.spec.domain;
    if (c.grid) {
        r.grid = *c.grid;
        const char* axes = "tuv";
        for (int i = 0; i < 3; ++i) {
            const GridAxis& a = r.grid[i];
            const double slack = 1e-9 * (dom[i][1] - dom[i][0]);
            if (a.start < dom[i][0] - slack || a.stop > dom[i][1] + slack)
                bad(std::string("grid axis ") + axes[i] + " leaves the surface domain");
        }
    } else {
        for (int i = 0; i < 3; ++i) {
            const double lo = dom[i][0], hi = dom[i][1], span = hi - lo;
            switch (c.command) {
                case Command::Classify: r.grid[i] = {lo, hi, 1}; break;
                case Command::Verify:
                    // Default verify lattice stays clear of the boundary so
                    // the residual stencils remain inside the domain.
                    r.grid[i] = {lo + 0.1 * span, hi - 0.1 * span, 3};
                    break;
                default: r.grid[i] = {lo, hi, 5}; break;
            }
        }
    }
    int total = 1;
    for (int i = 0; i < 3; ++i) {
        r.counts[i] = r.grid[i].count;
        total *= r.counts[i];
    }
    if (c.command == Command::Classify && total != 1)
        bad("classify evaluates a single point; use count 1 on every axis");

    r.narrowed = r.spec;
    for (int i = 0; i < 3; ++i) r.narrowed.domain[i] = {r.grid[i].start, r.grid[i].stop};
    return r;
}

Vec3 lattice_point(const std::array<GridAxis, 3>& grid, int i, int j, int k) {
    const int ijk[3] = {i, j, k};
    Vec3 x;
    for (int d = 0; d < 3; ++d) {
        const GridAxis& a = grid[d];
        x[d] = a.count == 1 ? 0.5 * (a.start + a.stop)
                            : a.start + (a.stop - a.start) * ijk[d] / (a.count - 1.0);
    }
    return x;
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// --- CSV helpers: cells reuse the JSON number spelling so both formats carry
// identical values.

std::string csv_cell(const ordered_json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) {
        const std::string& s = v.get_ref<const std::string&>();
        if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
        std::string out = "\"";
        for (char ch : s) {
            if (ch == '"') out += '"';
            out += ch;
        }
        out += '"';
        return out;
    }
    return v.dump();
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<ordered_json>>& rows) {
    std::string out;
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += header[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += csv_cell(row[i]);
        }
        out += '\n';
    }
    return out;
}

ordered_json point_json(const Vec3& x) { return ordered_json::array({x[0], x[1], x[2]}); }

}  // namespace

const char* to_string(Command c) {
    switch (c) {
        case Command::Classify: return "classify";
        case Command::Scan: return "scan";
        case Command::Verify: return "verify";
        case Command::Construct: return "construct";
    }
    return "?";
}

const char* to_string(OutputFormat f) {
    return f == OutputFormat::Json ? "json" : "csv";
}

RunConfig config_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        bad(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) bad("config must be a JSON object");
    require_keys(j, {"command", "surface", "grid", "tolerances", "output", "seed"}, "config");

    RunConfig c;
    if (!j.contains("command") || !j["command"].is_string())
        bad("config requires a string 'command'");
    c.command = command_from_string(j["command"].get<std::string>());

    if (!j.contains("surface")) bad("config requires 'surface'");
    const auto& s = j["surface"];
    if (s.is_string()) {
        c.surface = s.get<std::string>();
    } else if (s.is_object()) {
        require_keys(s, {"family", "fibre", "curve"}, "surface");
        if (!s.contains("family") || !s["family"].is_string() || !s.contains("fibre") ||
            !s["fibre"].is_string())
            bad("composed surface requires string 'family' and 'fibre'");
        const std::string family = s["family"].get<std::string>();
        if (family != "proper_warped" && family != "improper_warped" &&
            family != "improper_warped_translation")
            bad("unknown warped family '" + family + "'");
        c.surface = family + ":" + s["fibre"].get<std::string>();
        if (s.contains("curve")) c.curve = parse_curve(s["curve"]);
    } else {
        bad("surface must be a catalog id or a composed object");
    }

    if (j.contains("grid")) {
        const auto& g = j["grid"];
        if (!g.is_object()) bad("grid must be an object with axes t, u, v");
        require_keys(g, {"t", "u", "v"}, "grid");
        if (!g.contains("t") || !g.contains("u") || !g.contains("v"))
            bad("grid requires all three axes t, u, v");
        c.grid = {{parse_axis(g["t"], "grid.t"), parse_axis(g["u"], "grid.u"),
                   parse_axis(g["v"], "grid.v")}};
    }

    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        if (!t.is_object()) bad("tolerances must be an object");
        require_keys(t, {"scan", "fundamental_derivative", "fundamental_pointwise"},
                     "tolerances");
        if (t.contains("scan")) c.tol_scan = positive_number(t["scan"], "tolerances.scan");
        if (t.contains("fundamental_derivative"))
            c.tol_derivative =
                positive_number(t["fundamental_derivative"], "tolerances.fundamental_derivative");
        if (t.contains("fundamental_pointwise"))
            c.tol_pointwise =
                positive_number(t["fundamental_pointwise"], "tolerances.fundamental_pointwise");
    }

    if (j.contains("output")) {
        const auto& o = j["output"];
        if (!o.is_object()) bad("output must be an object");
        require_keys(o, {"path", "format"}, "output");
        if (o.contains("path")) {
            if (!o["path"].is_string()) bad("output.path must be a string");
            c.output_path = o["path"].get<std::string>();
        }
        if (o.contains("format")) {
            if (!o["format"].is_string()) bad("output.format must be a string");
            const std::string f = o["format"].get<std::string>();
            if (f == "json") c.format = OutputFormat::Json;
            else if (f == "csv") c.format = OutputFormat::Csv;
            else bad("output.format must be 'json' or 'csv'");
        }
    }

    if (j.contains("seed")) {
        const auto& v = j["seed"];
        if (v.is_number_unsigned()) c.seed = v.get<uint64_t>();
        else if (v.is_number_integer() && v.get<int64_t>() >= 0)
            c.seed = static_cast<uint64_t>(v.get<int64_t>());
        else bad("seed must be a non-negative integer");
    }
    return c;
}

std::string canonical_config(const RunConfig& c) {
    const Resolved r = resolve(c);
    ordered_json j;
    j["command"] = to_string(c.command);
    if (r.spec.curve && r.spec.sphere) {
        ordered_json curve;
        curve["c1"] = r.spec.curve->c1;
        curve["c2"] = r.spec.curve->c2;
        curve["domain"] = r.spec.curve->domain;
        ordered_json surf;
        surf["family"] = family_name(r.spec.family);
        surf["fibre"] = r.spec.sphere->id;
        surf["curve"] = std::move(curve);
        j["surface"] = std::move(surf);
    } else {
        j["surface"] = r.spec.id;
    }
    ordered_json grid = ordered_json::array();
    for (const GridAxis& a : r.grid) grid.push_back(ordered_json::array({a.start, a.stop, a.count}));
    j["grid"] = std::move(grid);
    ordered_json tol;
    tol["scan"] = c.tol_scan;
    tol["fundamental_derivative"] = c.tol_derivative;
    tol["fundamental_pointwise"] = c.tol_pointwise;
    j["tolerances"] = std::move(tol);
    j["seed"] = c.seed;
    return j.dump();
}

std::string config_hash(const RunConfig& c) {
    const std::string s = canonical_config(c);
    uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunResult run(const RunConfig& c, const std::string& timestamp) {
    const Resolved r = resolve(c);
    RunResult out;

    ordered_json report;
    report["schema"] = kReportSchema;
    ordered_json meta;
    meta["version"] = kVersion;
    meta["config_hash"] = config_hash(c);
    meta["seed"] = c.seed;
    meta["timestamp"] = timestamp.empty() ? utc_now() : timestamp;
    report["meta"] = std::move(meta);

    ordered_json results = ordered_json::array();
    std::vector<std::string> header;
    std::vector<std::vector<ordered_json>> rows;

    if (c.command == Command::Classify || c.command == Command::Scan) {
        const ScanResult sr = scan(r.narrowed, r.counts, c.tol_scan);
        header = {"t", "u", "v", "valid", "group", "class", "lambda", "mu", "a", "b",
                  "c", "d", "residual", "margin", "ambiguous", "c_norm", "apolarity",
                  "volume_residual", "s_asym", "error"};
        int n_err = 0, n_amb = 0;
        std::map<std::string, int> histogram;
        double worst_residual = 0.0, worst_margin = std::numeric_limits<double>::infinity();
        double l_min = std::numeric_limits<double>::infinity(), l_max = -l_min;
        double m_min = l_min, m_max = -l_min;
        for (const ScanPoint& p : sr.points) {
            ordered_json row;
            row["x"] = point_json(p.x);
            row["valid"] = p.valid;
            if (p.valid) {
                row["group"] = to_string(p.group);
                row["class"] = to_string(p.cls);
                row["lambda"] = p.lambda;
                row["mu"] = p.mu;
                row["a"] = p.a;
                row["b"] = p.b;
                row["c"] = p.c;
                row["d"] = p.d;
                row["residual"] = p.residual;
                // Margin is infinite when no more symmetric hypothesis exists
                // (SO3); the key is omitted rather than serialized as null.
                if (std::isfinite(p.margin)) row["margin"] = p.margin;
                row["ambiguous"] = p.ambiguous;
                row["c_norm"] = p.c_norm;
                row["apolarity"] = p.apolarity;
                row["volume_residual"] = p.volume_residual;
                row["s_asym"] = p.s_asym;
                rows.push_back({p.x[0], p.x[1], p.x[2], true, to_string(p.group),
                                to_string(p.cls), p.lambda, p.mu, p.a, p.b, p.c, p.d,
                                p.residual,
                                std::isfinite(p.margin) ? ordered_json(p.margin)
                                                        : ordered_json(nullptr),
                                p.ambiguous, p.c_norm, p.apolarity, p.volume_residual,
                                p.s_asym, ""});
                histogram[to_string(p.group)]++;
                n_amb += p.ambiguous ? 1 : 0;
                worst_residual = std::max(worst_residual, p.residual);
                if (std::isfinite(p.margin)) worst_margin = std::min(worst_margin, p.margin);
                l_min = std::min(l_min, p.lambda);
                l_max = std::max(l_max, p.lambda);
                m_min = std::min(m_min, p.mu);
                m_max = std::max(m_max, p.mu);
            } else {
                row["error"] = p.error;
                rows.push_back({p.x[0], p.x[1], p.x[2], false, "", "", nullptr, nullptr,
                                nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr,
                                nullptr, nullptr, nullptr, nullptr, p.error});
                ++n_err;
            }
            results.push_back(std::move(row));
        }
        if (c.command == Command::Scan) {
            ordered_json summary;
            summary["points"] = static_cast<int>(sr.points.size());
            summary["valid"] = static_cast<int>(sr.points.size()) - n_err;
            summary["errors"] = n_err;
            summary["ambiguous"] = n_amb;
            ordered_json hist;
            for (const auto& [g, n] : histogram) hist[g] = n;
            summary["histogram"] = std::move(hist);
            if (n_err < static_cast<int>(sr.points.size())) {
                summary["worst_residual"] = worst_residual;
                if (std::isfinite(worst_margin)) summary["worst_margin"] = worst_margin;
                ordered_json l;
                l["min"] = l_min;
                l["max"] = l_max;
                summary["lambda"] = std::move(l);
                ordered_json m;
                m["min"] = m_min;
                m["max"] = m_max;
                summary["mu"] = std::move(m);
            }
            report["summary"] = std::move(summary);
        }
        out.exit_code = n_err == 0 ? 0 : 1;
    } else if (c.command == Command::Verify) {
        header = {"t", "u", "v", "valid", "check", "value", "scale", "tolerance", "pass",
                  "error"};
        FundamentalOptions opts;
        opts.tol_derivative = c.tol_derivative;
        opts.tol_pointwise = c.tol_pointwise;
        bool all_pass = true;
        for (int i = 0; i < r.counts[0]; ++i)
            for (int j = 0; j < r.counts[1]; ++j)
                for (int k = 0; k < r.counts[2]; ++k) {
                    const Vec3 x = lattice_point(r.grid, i, j, k);
                    try {
                        const FundamentalReport fr = check_fundamental(r.spec, x, opts);
                        for (const ResidualRecord& rec : fr.records) {
                            ordered_json row;
                            row["x"] = point_json(x);
                            row["valid"] = true;
                            row["check"] = rec.name;
                            row["value"] = rec.value;
                            row["scale"] = rec.scale;
                            row["tolerance"] = rec.tolerance;
                            row["pass"] = rec.pass;
                            results.push_back(std::move(row));
                            rows.push_back({x[0], x[1], x[2], true, rec.name, rec.value,
                                            rec.scale, rec.tolerance, rec.pass, ""});
                            all_pass = all_pass && rec.pass;
                        }
                    } catch (const std::exception& e) {
                        ordered_json row;
                        row["x"] = point_json(x);
                        row["valid"] = false;
                        row["error"] = e.what();
                        results.push_back(std::move(row));
                        rows.push_back({x[0], x[1], x[2], false, "", nullptr, nullptr,
                                        nullptr, nullptr, e.what()});
                        all_pass = false;
                    }
                }
        out.exit_code = all_pass ? 0 : 1;
    } else {  // Construct
        header = {"t", "u", "v", "valid", "F0", "F1", "F2", "F3", "error"};
        bool all_valid = true;
        for (int i = 0; i < r.counts[0]; ++i)
            for (int j = 0; j < r.counts[1]; ++j)
                for (int k = 0; k < r.counts[2]; ++k) {
                    const Vec3 x = lattice_point(r.grid, i, j, k);
                    const Vec4 F = r.spec.partial(x, 0, 0, 0);
                    ordered_json row;
                    row["x"] = point_json(x);
                    row["position"] = ordered_json::array({F[0], F[1], F[2], F[3]});
                    std::string err;
                    try {
                        (void)apparatus(r.spec, x);
                    } catch (const std::exception& e) {
                        err = e.what();
                        all_valid = false;
                    }
                    row["valid"] = err.empty();
                    if (!err.empty()) row["error"] = err;
                    results.push_back(std::move(row));
                    rows.push_back({x[0], x[1], x[2], err.empty(), F[0], F[1], F[2], F[3],
                                    err});
                }
        out.exit_code = all_valid ? 0 : 1;
    }

    report["results"] = std::move(results);
    out.json = report.dump(2);
    out.csv = csv_table(header, rows);
    return out;
}

int run_and_write(const RunConfig& c) {
    const RunResult res = run(c);
    const std::string& payload = c.format == OutputFormat::Json ? res.json : res.csv;
    if (c.output_path.empty()) {
        std::cout << payload;
        if (c.format == OutputFormat::Json) std::cout << '\n';
    } else {
        std::ofstream f(c.output_path, std::ios::binary);
        f << payload;
        if (c.format == OutputFormat::Json) f << '\n';
        if (!f) {
            std::cerr << "error: cannot write output file '" << c.output_path << "'\n";
            return 2;
        }
    }
    return res.exit_code;
}

}  // namespace affsym
