#include "mavg/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "mavg/graph_io.hpp"

namespace mavg {

namespace {

std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

} // namespace

std::string MetricsReport::to_csv() const {
    std::string header;
    std::string values;
    for (double t : kRotationThresholdsDeg) {
        header += "rot_pct_under_" + short_number(t) + "deg,";
        values += format_double(rotation_pct_under.at(t)) + ",";
    }
    header += "rot_median_deg,";
    values += format_double(rotation_median_deg) + ",";
    for (double t : kTranslationThresholdsM) {
        header += "trans_pct_under_" + short_number(t) + "m,";
        values += format_double(translation_pct_under.at(t)) + ",";
    }
    header += "trans_median_m";
    values += format_double(translation_median_m);
    return header + "\n" + values + "\n";
}

std::string MetricsReport::to_json() const {
    std::string out = "{\n  \"rotation\": {\n    \"median_deg\": " +
                      format_double(rotation_median_deg) + ",\n    \"pct_under\": {";
    bool first = true;
    for (const auto& [t, v] : rotation_pct_under) {
        out += (first ? "" : ", ");
        out += "\"" + short_number(t) + "\": " + format_double(v);
        first = false;
    }
    out += "}\n  },\n  \"translation\": {\n    \"median_m\": " +
           format_double(translation_median_m) + ",\n    \"pct_under\": {";
    first = true;
    for (const auto& [t, v] : translation_pct_under) {
        out += (first ? "" : ", ");
        out += "\"" + short_number(t) + "\": " + format_double(v);
        first = false;
    }
    out += "}\n  },\n  \"n_graphs_evaluated\": " + std::to_string(n_graphs_evaluated) +
           ",\n  \"n_graphs_skipped_multicomponent\": " +
           std::to_string(n_graphs_skipped_multicomponent) + "\n}\n";
    return out;
}

std::vector<std::pair<double, double>> Histogram::log_view() const {
    std::vector<std::pair<double, double>> out;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] > 0) {
            out.emplace_back(bin_center(k), std::log10(static_cast<double>(counts[k])));
        }
    }
    return out;
}

std::string Histogram::to_csv() const {
    std::string out = "bin_center,count\n";
    if (scale == Scale::Log10) {
        for (const auto& [center, value] : log_view()) {
            out += format_double(center) + "," + format_double(value) + "\n";
        }
        return out;
    }
    for (std::size_t k = 0; k < counts.size(); ++k) {
        out += format_double(bin_center(k)) + "," + std::to_string(counts[k]) + "\n";
    }
    return out;
}

double graph_rotation_error(const AbsolutePoseSet& pred, const GroundTruthPoses& gt) {
    const AbsolutePoseSet aligned = gauge_align_rotations(pred, gt);
    double acc = 0.0;
    for (const auto& [id, pose] : aligned.poses) {
        acc += geodesic_angle(pose.rotation, gt.at(id).rotation_matrix());
    }
    return rad2deg(acc / static_cast<double>(aligned.poses.size()));
}

double graph_translation_error(const AbsolutePoseSet& pred, const GroundTruthPoses& gt,
                               bool align) {
    const AbsolutePoseSet aligned = align ? similarity_align_translations(pred, gt) : pred;
    if (aligned.poses.size() != gt.size()) {
        throw NodeSetMismatch("graph_translation_error: node sets differ");
    }
    double acc = 0.0;
    for (const auto& [id, pose] : aligned.poses) {
        acc += (pose.center - gt.at(id).center).norm();
    }
    return acc / static_cast<double>(aligned.poses.size());
}

double median(std::vector<double> values) {
    if (values.empty()) throw EmptyDataset("median of empty list");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

MetricsReport evaluate_dataset(const std::vector<ViewGraph>& graphs,
                               const std::vector<AbsolutePoseSet>& predictions) {
    if (graphs.size() != predictions.size()) {
        throw LengthMismatch("graphs and predictions differ in length");
    }
    if (graphs.empty()) throw EmptyDataset("evaluate_dataset on empty dataset");

    std::vector<double> rot_errors;
    std::vector<double> trans_errors;
    std::size_t skipped = 0;
    for (std::size_t k = 0; k < graphs.size(); ++k) {
        if (connected_components(graphs[k]).size() != 1) {
            ++skipped;
            continue;
        }
        if (!graphs[k].ground_truth) {
            throw MissingGroundTruth("graph " + std::to_string(k) + " carries no ground truth");
        }
        const GroundTruthPoses& gt = *graphs[k].ground_truth;
        rot_errors.push_back(graph_rotation_error(predictions[k], gt));
        trans_errors.push_back(graph_translation_error(predictions[k], gt));
    }
    if (rot_errors.empty()) throw EmptyDataset("all graphs were skipped");

    MetricsReport report;
    report.n_graphs_evaluated = rot_errors.size();
    report.n_graphs_skipped_multicomponent = skipped;
    report.rotation_median_deg = median(rot_errors);
    report.translation_median_m = median(trans_errors);
    const double denom = static_cast<double>(rot_errors.size());
    for (double t : kRotationThresholdsDeg) {
        const auto c = std::count_if(rot_errors.begin(), rot_errors.end(),
                                     [t](double e) { return e < t; });
        report.rotation_pct_under[t] = 100.0 * static_cast<double>(c) / denom;
    }
    for (double t : kTranslationThresholdsM) {
        const auto c = std::count_if(trans_errors.begin(), trans_errors.end(),
                                     [t](double e) { return e < t; });
        report.translation_pct_under[t] = 100.0 * static_cast<double>(c) / denom;
    }
    return report;
}

Histogram histogram(const std::vector<double>& values, double bin_width, double max_value,
                    Histogram::Scale scale) {
    if (bin_width <= 0.0) throw ConfigError("bin_width must be positive");
    if (max_value <= 0.0) throw ConfigError("max_value must be positive");
    Histogram h;
    h.scale = scale;
    const auto n_bins = static_cast<std::size_t>(std::ceil(max_value / bin_width - 1e-12));
    h.counts.assign(n_bins, 0);
    h.edges.resize(n_bins + 1);
    for (std::size_t k = 0; k <= n_bins; ++k) h.edges[k] = std::min(bin_width * k, max_value);
    for (double v : values) {
        auto bin = static_cast<std::size_t>(std::max(0.0, std::floor(v / bin_width)));
        bin = std::min(bin, n_bins - 1); // overflow clamps into the last bin
        h.counts[bin] += 1;
    }
    return h;
}

} // namespace mavg
