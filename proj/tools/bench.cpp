// Benchmark of the batch pipeline: the serial reference loop (jobs = 1)
// against the OpenMP path, verifying that both produce identical reports.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mavg/pipeline.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

} // namespace

int main(int argc, char** argv) {
    std::size_t n_graphs = 200;
    if (argc > 1) n_graphs = std::stoul(argv[1]);

    mavg::PipelineConfig cfg;
    cfg.dataset_size = n_graphs;
    cfg.seed = 20240917;
    cfg.noise.rot_sigma_deg = 5.0;
    cfg.noise.dir_sigma_deg = 3.0;
    cfg.noise.chirality_flip_prob = 0.15;

    std::printf("generating %zu graphs...\n", n_graphs);
    const std::vector<mavg::NamedGraph> dataset = mavg::generate_dataset(cfg);

    cfg.jobs = 1;
    auto t0 = Clock::now();
    const mavg::BatchResult serial = mavg::run_pipeline(dataset, cfg);
    const double serial_s = seconds_since(t0);

    int hw_threads = 1;
#ifdef _OPENMP
    hw_threads = omp_get_max_threads();
#endif

    std::printf("%-24s %10s %12s\n", "path", "seconds", "graphs/s");
    std::printf("%-24s %10.3f %12.1f\n", "serial (jobs=1)", serial_s,
                static_cast<double>(n_graphs) / serial_s);

    std::vector<int> job_counts;
    for (int jobs : {2, 4, hw_threads}) {
        if (jobs > 1 && std::find(job_counts.begin(), job_counts.end(), jobs) == job_counts.end()) {
            job_counts.push_back(jobs);
        }
    }
    for (int jobs : job_counts) {
        cfg.jobs = jobs;
        t0 = Clock::now();
        const mavg::BatchResult parallel = mavg::run_pipeline(dataset, cfg);
        const double par_s = seconds_since(t0);
        const bool identical =
            mavg::predictions_text(parallel) == mavg::predictions_text(serial) &&
            (!serial.metrics || parallel.metrics->to_csv() == serial.metrics->to_csv());
        char label[64];
        std::snprintf(label, sizeof(label), "openmp (jobs=%d)", jobs);
        std::printf("%-24s %10.3f %12.1f   speedup %.2fx  %s\n", label, par_s,
                    static_cast<double>(n_graphs) / par_s, serial_s / par_s,
                    identical ? "outputs identical" : "OUTPUT MISMATCH");
        if (!identical) return 1;
    }

    if (serial.metrics) {
        std::printf("rotation median %.4f deg, translation median %.6f m, %zu/%zu graphs ok\n",
                    serial.metrics->rotation_median_deg, serial.metrics->translation_median_m,
                    serial.n_ok(), dataset.size());
    }
    return 0;
}
