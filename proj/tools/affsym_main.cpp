#include "affsym/report.hpp"

#include "CLI11.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

using namespace affsym;

namespace {

double to_double(const std::string& s, const std::string& what) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw ConfigError(what + ": '" + s + "' is not a number");
    return v;
}

int to_count(const std::string& s, const std::string& what) {
    int v = 0;
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end || v < 1)
        throw ConfigError(what + ": '" + s + "' is not a positive count");
    return v;
}

std::array<GridAxis, 3> parse_grid_string(const std::string& text) {
    std::array<std::optional<GridAxis>, 3> ax;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw ConfigError("grid axis must look like t=start:stop:count, got '" + tok + "'");
        const std::string name = tok.substr(0, eq);
        const int idx = name == "t" ? 0 : name == "u" ? 1 : name == "v" ? 2 : -1;
        if (idx < 0) throw ConfigError("unknown grid axis '" + name + "'");
        if (ax[idx]) throw ConfigError("grid axis '" + name + "' given twice");
        std::stringstream parts(tok.substr(eq + 1));
        std::string lo, hi, n, extra;
        if (!std::getline(parts, lo, ':') || !std::getline(parts, hi, ':') ||
            !std::getline(parts, n, ':') || std::getline(parts, extra, ':'))
            throw ConfigError("grid axis '" + name + "' must be start:stop:count");
        GridAxis a;
        a.start = to_double(lo, "grid axis " + name + " start");
        a.stop = to_double(hi, "grid axis " + name + " stop");
        a.count = to_count(n, "grid axis " + name + " count");
        if (!(a.start <= a.stop))
            throw ConfigError("grid axis '" + name + "' start must not exceed stop");
        ax[idx] = a;
    }
    if (!ax[0] || !ax[1] || !ax[2]) throw ConfigError("grid must specify axes t, u and v");
    return {*ax[0], *ax[1], *ax[2]};
}

std::array<GridAxis, 3> parse_point_string(const std::string& text) {
    std::stringstream ss(text);
    std::string tok;
    std::array<double, 3> p{};
    int i = 0;
    while (std::getline(ss, tok, ',')) {
        if (i == 3) throw ConfigError("--point needs exactly three coordinates");
        p[i++] = to_double(tok, "point coordinate");
    }
    if (i != 3) throw ConfigError("--point needs exactly three coordinates");
    return {GridAxis{p[0], p[0], 1}, GridAxis{p[1], p[1], 1}, GridAxis{p[2], p[2], 1}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "affsym: pointwise rotational symmetry of definite hypersurfaces in R^4.\n"
        "Classifies the (cubic form, shape operator) stabilizer, scans parameter\n"
        "grids, and verifies the structure identities on catalog surfaces.\n"
        "Set AFFSYM_THREADS to cap scan parallelism."};
    app.require_subcommand(0, 1);

    std::string config_path;
    app.add_option("--config", config_path,
                   "JSON config file mirroring the full run configuration");

    struct Flags {
        std::string surface, grid, point, output, format = "json";
        double tol = -1, tol_derivative = -1, tol_pointwise = -1;
        uint64_t seed = 1;
    } flags;

    const char* descriptions[4] = {
        "classify the symmetry group at a single point",
        "classify every point of a parameter grid",
        "evaluate the fundamental-equation residual suite on a grid",
        "sample surface points and report definiteness",
    };
    const char* names[4] = {"classify", "scan", "verify", "construct"};
    std::array<CLI::App*, 4> subs{};
    for (int i = 0; i < 4; ++i) {
        CLI::App* sub = app.add_subcommand(names[i], descriptions[i]);
        sub->add_option("--surface", flags.surface,
                        "catalog id, e.g. z2z2 or proper_warped:unit_sphere2");
        sub->add_option("--grid", flags.grid, "per-axis lattice t=0:1:5,u=0:1:5,v=0:1:5");
        if (i == 0) sub->add_option("--point", flags.point, "evaluation point t,u,v");
        sub->add_option("--tol", flags.tol, "classification tolerance");
        sub->add_option("--tol-derivative", flags.tol_derivative,
                        "tolerance for derivative-level residuals");
        sub->add_option("--tol-pointwise", flags.tol_pointwise,
                        "tolerance for pointwise residuals");
        sub->add_option("--output", flags.output, "report file (default: stdout)");
        sub->add_option("--format", flags.format, "report format")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--seed", flags.seed, "seed echoed into the report meta");
        subs[i] = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg;
        CLI::App* picked = nullptr;
        for (CLI::App* sub : subs)
            if (sub->parsed()) picked = sub;

        if (!config_path.empty()) {
            if (picked)
                throw ConfigError("--config carries the whole run; drop the subcommand");
            std::ifstream f(config_path);
            if (!f) throw ConfigError("cannot read config file '" + config_path + "'");
            std::stringstream ss;
            ss << f.rdbuf();
            cfg = config_from_json(ss.str());
        } else if (picked) {
            const std::string name = picked->get_name();
            cfg.command = name == "classify"  ? Command::Classify
                          : name == "scan"    ? Command::Scan
                          : name == "verify"  ? Command::Verify
                                              : Command::Construct;
            if (flags.surface.empty()) throw ConfigError("--surface is required");
            cfg.surface = flags.surface;
            if (!flags.point.empty() && !flags.grid.empty())
                throw ConfigError("--point and --grid are mutually exclusive");
            if (!flags.point.empty()) cfg.grid = parse_point_string(flags.point);
            if (!flags.grid.empty()) cfg.grid = parse_grid_string(flags.grid);
            if (flags.tol > 0) cfg.tol_scan = flags.tol;
            if (flags.tol_derivative > 0) cfg.tol_derivative = flags.tol_derivative;
            if (flags.tol_pointwise > 0) cfg.tol_pointwise = flags.tol_pointwise;
            cfg.output_path = flags.output;
            cfg.format = flags.format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
            cfg.seed = flags.seed;
        } else {
            std::cerr << app.help();
            return 2;
        }
        return run_and_write(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
