#ifndef MAVG_METRICS_HPP
#define MAVG_METRICS_HPP

#include <map>
#include <string>
#include <vector>

#include "mavg/pose_graph.hpp"

namespace mavg {

inline const std::vector<double> kRotationThresholdsDeg = {3.0, 5.0, 10.0, 30.0, 45.0};
inline const std::vector<double> kTranslationThresholdsM = {0.05, 0.1, 0.25, 0.5, 0.75};

struct MetricsReport {
    double rotation_median_deg = 0.0;
    std::map<double, double> rotation_pct_under;    // threshold deg -> %
    double translation_median_m = 0.0;
    std::map<double, double> translation_pct_under; // threshold m -> %
    std::size_t n_graphs_evaluated = 0;
    std::size_t n_graphs_skipped_multicomponent = 0;

    /// Table-style CSV: header line plus one value line in the column order
    /// 3, 5, 10, 30, 45 deg, rotation median, 0.05 .. 0.75 m, translation
    /// median.
    std::string to_csv() const;
    std::string to_json() const;
};

struct Histogram {
    std::vector<double> edges;       // uniform bin edges, size counts+1
    std::vector<std::int64_t> counts;
    enum class Scale { Linear, Log10 } scale = Scale::Linear;

    double bin_center(std::size_t k) const { return 0.5 * (edges[k] + edges[k + 1]); }
    /// log10(count) for nonzero bins; empty bins are absent from the view.
    std::vector<std::pair<double, double>> log_view() const;
    std::string to_csv() const;
};

/// Gauge-aligns the rotations, then returns the mean geodesic error over
/// nodes in degrees.
double graph_rotation_error(const AbsolutePoseSet& pred, const GroundTruthPoses& gt);

/// Similarity-aligns the centers (optionally disabled), then returns the
/// mean Euclidean center error in meters.
double graph_translation_error(const AbsolutePoseSet& pred, const GroundTruthPoses& gt,
                               bool align = true);

/// Per-graph error pair used by dataset evaluation.
struct GraphErrors {
    double rotation_deg = 0.0;
    double translation_m = 0.0;
};

/// Dataset-level report: skips multi-component graphs (counted), aggregates
/// per-graph mean errors, medians with the even-count mean-of-middle-two
/// convention, and the threshold table.
MetricsReport evaluate_dataset(const std::vector<ViewGraph>& graphs,
                               const std::vector<AbsolutePoseSet>& predictions);

/// Uniform histogram on [0, max_value]; overflow clamps into the last bin.
Histogram histogram(const std::vector<double>& values, double bin_width, double max_value,
                    Histogram::Scale scale = Histogram::Scale::Linear);

double median(std::vector<double> values);

} // namespace mavg

#endif // MAVG_METRICS_HPP
