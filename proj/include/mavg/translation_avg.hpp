#ifndef MAVG_TRANSLATION_AVG_HPP
#define MAVG_TRANSLATION_AVG_HPP

#include <cstdint>
#include <vector>

#include "mavg/pose_graph.hpp"

namespace mavg {

enum class MEstimator { L2, Huber, Cauchy };

struct TransAvgConfig {
    MEstimator m_estimator = MEstimator::Cauchy;
    double estimator_scale = 0.5;     // c of Huber / Cauchy
    int outer_irls_iters = 20;
    int inner_alternations = 10;
    double tol = 1e-10;               // on objective change
    double d_floor = 1e-9;            // lower clamp for the scale variables
    bool rotation_residual_on = true; // include the rotation term in the residual
    std::uint64_t seed = 0;           // initialization seed

    void validate() const;
};

struct TransAvgTrace {
    std::vector<double> robust_objective;   // per outer iteration
    std::vector<double> weighted_objective; // per inner T-solve
    std::map<std::pair<NodeId, NodeId>, double> final_edge_weights;
    std::map<std::pair<NodeId, NodeId>, double> final_scales;
    double center_sum_residual = 0.0;   // |sum T_i| at exit
    double scale_constraint_residual = 0.0;
    int coincident_center_events = 0;   // d updates hit by a zero baseline
    int outer_iterations = 0;
};

/// Exact minimizer of the edge's squared residual over the scale variable,
/// clamped from below: max(d_floor, <T_j - T_i, u> / ||T_j - T_i||^2).
/// A vanishing baseline yields d_floor and sets the coincident flag.
double scale_update(const Eigen::Vector3d& t_i, const Eigen::Vector3d& t_j,
                    const Eigen::Vector3d& u_ij, double d_floor, bool* coincident = nullptr);

/// Combined residual driving the IRLS weights:
///   sqrt(||(T_j - T_i) d_ij - u_ij||^2 + ||R_ij - R*_i R*_j^T||_F^2)
/// (the rotation term only when enabled).
double residual_combined(const Eigen::Vector3d& t_i, const Eigen::Vector3d& t_j, double d_ij,
                         const Eigen::Vector3d& u_ij, const Rotation3& observed_rel,
                         const Rotation3& rot_i, const Rotation3& rot_j,
                         bool rotation_residual_on);

/// Recovers camera centers from world-frame direction observations
/// u_ij = R*_i^T T_ij and the estimated absolute rotations, by IRLS over the
/// bilinear objective sum mu(||(T_j - T_i) d_ij - u_ij||) subject to
/// sum T_i = 0 and sum <T_j - T_i, u_ij> = 1. refined_dirs supplies T_ij per
/// edge in storage order. Output gauge is Raw (the constraints fix an
/// arbitrary frame and scale).
AbsolutePoseSet bata_solve(const ViewGraph& g, const AbsolutePoseSet& rotations,
                           const std::vector<UnitVector3>& refined_dirs,
                           const TransAvgConfig& cfg, TransAvgTrace* trace = nullptr);

} // namespace mavg

#endif // MAVG_TRANSLATION_AVG_HPP
