#ifndef MAVG_CHIRALITY_HPP
#define MAVG_CHIRALITY_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "mavg/pose_graph.hpp"

namespace mavg {

/// The four essential-matrix decomposition candidates of one edge:
///   c0 = (R, t)   c1 = (R, -t)   c2 = (R_tw, t)   c3 = (R_tw, -t)
/// with R_tw = rot_about_axis(t, pi) * R. c0 is the observed pose.
struct CandidateSet {
    NodeId i = 0;
    NodeId j = 0;
    std::array<std::pair<Rotation3, UnitVector3>, 4> candidates;
    int selected = 0;
};

CandidateSet enumerate_candidates(const RelativePoseEdge& edge);

struct RepairConfig {
    int max_sweeps = 50;
    int restarts = 8;
    double lambda_t = 1.0; // weight of the coplanarity term
    std::uint64_t seed = 0;
};

struct RepairReport {
    struct EdgeOutcome {
        NodeId i = 0;
        NodeId j = 0;
        int input_index = 0;
        int output_index = 0;
        // edge rotation error vs ground truth in degrees, when available
        std::optional<double> input_error_deg;
        std::optional<double> output_error_deg;
    };
    std::vector<EdgeOutcome> edges;
    std::size_t triangle_count = 0;
    double cost_before = 0.0;
    double cost_after = 0.0;
    int sweeps = 0;        // sweeps used by the winning restart
    int winning_restart = 0;
    bool converged = true;
    bool exhaustive = false;
};

/// Total cycle inconsistency of a candidate assignment: for every triangle,
/// the geodesic angle of the oriented rotation product plus lambda_t times
/// a coplanarity score of the chained baseline directions. The coplanarity
/// score is the smallest singular value of the direction matrix plus a
/// penalty of pi/2 when the near-null vector has mixed signs (which is what
/// a -t flip produces).
double triangle_cycle_cost(const ViewGraph& g, const std::vector<int>& assignment,
                           double lambda_t = 1.0);

/// Per-edge candidate selection minimizing triangle_cycle_cost by iterated
/// conditional modes with random restarts; exhaustive search on graphs with
/// at most 8 edges. Edges outside all triangles keep the observed pose.
std::pair<ViewGraph, RepairReport> repair_graph(const ViewGraph& g,
                                                const RepairConfig& cfg = {});

/// 36x36 joint histogram of per-edge errors before vs after refinement.
/// Bins are 5 degrees wide with centers 1, 6, ..., 176; values at or above
/// 178.5 clamp into the last bin.
struct TransferMatrix {
    static constexpr int kBins = 36;
    std::array<std::array<std::int64_t, kBins>, kBins> counts{};

    static int bin_of(double error_deg);
    static double bin_center(int bin);

    std::int64_t row_sum(int r) const;
    std::int64_t col_sum(int c) const;

    std::string to_csv() const;
    std::string to_json() const;
};

TransferMatrix transfer_matrix(const std::vector<double>& before_deg,
                               const std::vector<double>& after_deg);

/// Rotation error of every edge against the ground-truth relative pose,
/// in degrees, in edge storage order.
std::vector<double> edge_rotation_errors_deg(const ViewGraph& g);

} // namespace mavg

#endif // MAVG_CHIRALITY_HPP
