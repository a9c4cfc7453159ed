#ifndef MAVG_ROTATION_AVG_HPP
#define MAVG_ROTATION_AVG_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "mavg/pose_graph.hpp"

namespace mavg {

enum class RobustLoss { L2, Huber, GemanMcClure };

struct RotAvgConfig {
    RobustLoss robust_loss = RobustLoss::Huber;
    double loss_scale = 0.1;     // c of Huber / Geman-McClure, chordal units
    int max_irls_iters = 50;
    double irls_tol = 1e-8;      // on surrogate cost change
    int node_sweeps = 2;         // K_n
    int edge_sweeps = 2;         // K_e
    int rounds = 8;
    double temperature = 0.5;    // tau of the edge weights, chordal units
    NodeId anchor = -1;          // -1: smallest node id
    bool random_init = false;    // random absolute poses instead of spectral
    std::uint64_t seed = 0;      // used only by random_init

    void validate() const;
};

/// Per-iteration diagnostics of a rotation solve.
struct RotAvgTrace {
    std::vector<double> robust_cost;     // per outer iteration / round
    std::vector<double> surrogate_cost;  // weighted squared cost
    std::map<std::pair<NodeId, NodeId>, double> final_edge_weights;
    std::map<std::pair<NodeId, NodeId>, double> final_edge_scores;
    int iterations = 0;
};

/// Working state of the alternating node/edge iteration.
struct RotAvgState {
    std::vector<NodeId> ids;                       // sorted node ids
    std::vector<Rotation3> absolute;               // per node, aligned with ids
    std::vector<Rotation3> working_relative;       // per edge, storage order
    std::vector<Rotation3> observed_relative;      // per edge, storage order
    std::vector<double> edge_score;                // d_ij, per edge
    std::vector<double> edge_weight;               // exp(-d_ij / tau)
    int iteration = 0;

    std::size_t index_of(NodeId id) const;
};

RotAvgState make_state(const ViewGraph& g, const AbsolutePoseSet& init);

/// Mean chordal inconsistency at node i (index into state.ids):
///   d_i = (1/|N_i|) sum_j || R_i - W_ij R_j ||_F
/// computed with the current working relatives.
double node_cost(const RotAvgState& state, const ViewGraph& g, std::size_t node_index);

/// Rectifies one edge: picks, among the current product R_i R_j^T, the
/// observed relative, and their geodesic midpoint, the rotation minimizing
/// the symmetric squared-chordal sum to both; returns it together with the
/// outlier score ||W - R_i R_j^T||_F + ||W - observed||_F, which is zero
/// exactly when the product matches the observation.
std::pair<Rotation3, double> edge_rectify_and_score(const RotAvgState& state,
                                                    const ViewGraph& g,
                                                    std::size_t edge_index);

/// Spectral initialization: top-3 eigenvectors (power iteration with
/// deflation on the degree-normalized block matrix of relative rotations),
/// blocks projected to SO(3), gauge anchored. Centers are zero.
AbsolutePoseSet spectral_init(const ViewGraph& g, NodeId anchor = -1);

/// Robust IRLS for the rotation objective: reweighted chordal averaging
/// with Gauss-Seidel node sweeps. The robust cost at exit never exceeds the
/// cost at entry.
AbsolutePoseSet irls_solve(const ViewGraph& g, const AbsolutePoseSet& init,
                           const RotAvgConfig& cfg, RotAvgTrace* trace = nullptr);

/// Alternating refinement: K_n weighted node sweeps followed by K_e edge
/// rectification sweeps per round, edge weights exp(-d_ij / tau). Consistent
/// input is a fixed point.
AbsolutePoseSet iterative_refine(const ViewGraph& g, const AbsolutePoseSet& init,
                                 const RotAvgConfig& cfg, RotAvgTrace* trace = nullptr);

/// Right-multiplies every rotation by the inverse of the anchor's so the
/// anchor becomes identity; relative rotations are unchanged.
AbsolutePoseSet fix_gauge(const AbsolutePoseSet& poses, NodeId anchor);

/// Spectral initialization, or seeded random poses when cfg.random_init.
AbsolutePoseSet initial_poses(const ViewGraph& g, const RotAvgConfig& cfg);

/// rho, psi/r and the IRLS weight of the configured loss.
double robust_rho(const RotAvgConfig& cfg, double r);
double robust_weight(const RotAvgConfig& cfg, double r);

} // namespace mavg

#endif // MAVG_ROTATION_AVG_HPP
