// Times the two data-parallel kernels against their serial references and
// reports the speedup.  Both paths must agree bit-for-bit.
#include <chrono>
#include <cstdio>
#include <cstring>

#include "lht/oracle.hpp"
#include "lht/simharness.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

template <typename F>
double time_ms(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

} // namespace

int main(int argc, char** argv) {
    int reps = 200;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--reps") == 0 && i + 1 < argc) reps = std::atoi(argv[i + 1]);

#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not enabled; both paths run serially\n");
#endif

    // Monte Carlo replication loop
    lht::sim::ExperimentConfig cfg;
    cfg.p = 100;
    cfg.n = 300;
    cfg.model.kind = lht::sim::ModelKind::M1;
    cfg.dist = lht::sim::DistKind::Gaussian;
    cfg.reps = reps;
    cfg.level = 0.05;
    cfg.seed = 7;

    lht::sim::SummaryReport serial, parallel;
    const double t_serial = time_ms([&] { serial = lht::sim::run_experiment(cfg, lht::Exec::Serial); });
    const double t_parallel =
        time_ms([&] { parallel = lht::sim::run_experiment(cfg, lht::Exec::Parallel); });
    const bool same =
        serial.stats.at("U").empirical_mean == parallel.stats.at("U").empirical_mean &&
        serial.stats.at("V").ks_distance == parallel.stats.at("V").ks_distance &&
        serial.r_rejection_rate == parallel.r_rejection_rate;
    std::printf("simulate  p=%d n=%d reps=%d  serial %8.1f ms   parallel %8.1f ms   x%.2f   %s\n",
                cfg.p, cfg.n, cfg.reps, t_serial, t_parallel, t_serial / t_parallel,
                same ? "bit-identical" : "MISMATCH");

    // contour double integral
    lht::oracle::QuadPolicy policy;
    lht::mp::SeriesConstants s1, s2;
    const double t_js =
        time_ms([&] { s1 = lht::oracle::contour_series_U(0.5, policy, lht::Exec::Serial); });
    const double t_jp =
        time_ms([&] { s2 = lht::oracle::contour_series_U(0.5, policy, lht::Exec::Parallel); });
    const bool same2 = s1.i1 == s2.i1 && s1.i2 == s2.i2 && s1.j1 == s2.j1;
    std::printf("contour_U c=0.5            serial %8.1f ms   parallel %8.1f ms   x%.2f   %s\n",
                t_js, t_jp, t_js / t_jp, same2 ? "bit-identical" : "MISMATCH");

    return (same && same2) ? 0 : 1;
}
