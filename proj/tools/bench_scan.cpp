#include "affsym/catalog.hpp"
#include "affsym/verifier.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace affsym;
using clock_type = std::chrono::steady_clock;

namespace {

double run_ms(const SurfaceSpec& s, const std::array<int, 3>& grid, bool parallel,
              ScanResult& out) {
    const auto t0 = clock_type::now();
    out = parallel ? scan(s, grid) : scan_serial(s, grid);
    const auto t1 = clock_type::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

bool identical(const ScanResult& a, const ScanResult& b) {
    if (a.points.size() != b.points.size()) return false;
    for (size_t i = 0; i < a.points.size(); ++i) {
        const ScanPoint& p = a.points[i];
        const ScanPoint& q = b.points[i];
        if (p.valid != q.valid || p.group != q.group || p.cls != q.cls ||
            p.ambiguous != q.ambiguous || p.error != q.error)
            return false;
        const double pv[] = {p.lambda, p.mu, p.a, p.b, p.c, p.d, p.residual, p.margin};
        const double qv[] = {q.lambda, q.mu, q.a, q.b, q.c, q.d, q.residual, q.margin};
        if (std::memcmp(pv, qv, sizeof pv) != 0) return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Timing harness: serial reference scan versus the OpenMP scan.\n"
                 "Checks that both produce bit-identical classifications."};
    int grid_n = 12;
    int reps = 3;
    std::string surface_name = "z2z2";
    app.add_option("--grid", grid_n, "points per axis")->check(CLI::PositiveNumber);
    app.add_option("--reps", reps, "repetitions, best time wins")
        ->check(CLI::PositiveNumber);
    app.add_option("--surface", surface_name, "catalog surface to scan");
    CLI11_PARSE(app, argc, argv);

    SurfaceSpec surface;
    try {
        surface = surface_by_name(surface_name);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    const std::array<int, 3> grid = {grid_n, grid_n, grid_n};
    const int total = grid_n * grid_n * grid_n;

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif

    ScanResult serial_res, parallel_res;
    double best_serial = 1e300, best_parallel = 1e300;
    // One throwaway round so page faults and allocator warm-up don't bias
    // the serial side.
    run_ms(surface, grid, false, serial_res);
    for (int i = 0; i < reps; ++i) {
        best_serial = std::min(best_serial, run_ms(surface, grid, false, serial_res));
        best_parallel = std::min(best_parallel, run_ms(surface, grid, true, parallel_res));
    }

    if (!identical(serial_res, parallel_res)) {
        std::fprintf(stderr, "serial and parallel scans disagree on %s\n",
                     surface_name.c_str());
        return 1;
    }

    std::printf("surface            %s\n", surface_name.c_str());
    std::printf("points             %d (%d per axis)\n", total, grid_n);
    std::printf("threads            %d\n", threads);
    std::printf("serial reference   %9.2f ms  (%7.1f pts/s)\n", best_serial,
                total / best_serial * 1e3);
    std::printf("openmp scan        %9.2f ms  (%7.1f pts/s)\n", best_parallel,
                total / best_parallel * 1e3);
    std::printf("observed speedup   %.2fx\n", best_serial / best_parallel);
    std::printf("results identical  yes\n");
    return 0;
}
