#ifndef MAVG_PIPELINE_HPP
#define MAVG_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "mavg/config.hpp"
#include "mavg/graph_io.hpp"
#include "mavg/metrics.hpp"

namespace mavg {

/// Everything the pipeline produced for one graph. Failures are recorded,
/// not thrown, so one degenerate graph cannot kill a batch run.
struct GraphResult {
    std::string name;
    bool ok = false;
    std::string failure_reason;
    AbsolutePoseSet poses;
    std::optional<double> rotation_error_deg;  // present when GT available
    std::optional<double> translation_error_m;
    std::optional<RepairReport> repair;
    std::vector<double> edge_errors_before_deg; // vs GT, when available
    std::vector<double> edge_errors_after_deg;
    RotAvgTrace rot_trace;
    TransAvgTrace trans_trace;
};

struct BatchResult {
    std::vector<GraphResult> graphs;
    std::optional<MetricsReport> metrics; // absent when no graph had GT

    std::size_t n_ok() const;
};

/// Deterministic dataset: per-graph seeds derived from cfg.seed, noise
/// applied on top of exact scenes.
std::vector<NamedGraph> generate_dataset(const PipelineConfig& cfg);

/// Full per-graph chain: optional repair, rotation averaging (spectral
/// initialization feeding the selected solver), translation averaging.
GraphResult run_graph_pipeline(const NamedGraph& input, const PipelineConfig& cfg);

/// Batch over graphs. jobs <= 1 runs the serial reference loop; jobs > 1
/// distributes graphs over OpenMP threads. Results are ordered like the
/// input regardless of scheduling, so the two paths emit identical bytes.
BatchResult run_pipeline(const std::vector<NamedGraph>& graphs, const PipelineConfig& cfg);

/// Output files of the pipeline subcommand.
std::string predictions_text(const BatchResult& batch);
std::string report_json(const BatchResult& batch, const PipelineConfig& cfg);
std::string diagnostics_json(const BatchResult& batch);

} // namespace mavg

#endif // MAVG_PIPELINE_HPP
