#ifndef MAVG_POSE_GRAPH_HPP
#define MAVG_POSE_GRAPH_HPP

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mavg/so3.hpp"

namespace mavg {

using NodeId = int;

struct CameraNode {
    NodeId id = 0;
    double focal = 1.0; // pixels
    int width = 0;
    int height = 0;
};

/// Axis-aligned detection box, upper-left corner in pixels. Carried for
/// format fidelity only; no solver reads it.
struct DetectionBox {
    double x = 0.0;
    double y = 0.0;
    double bb_w = 0.0;
    double bb_h = 0.0;
};

struct RelativePoseEdge {
    NodeId i = 0;
    NodeId j = 0;
    UnitQuaternion rotation;       // R_ij with R_ij = R_i R_j^T
    UnitVector3 translation_dir;   // T_ij, camera-pair baseline direction
    std::vector<std::pair<DetectionBox, DetectionBox>> boxes;

    Rotation3 rotation_matrix() const { return rotation.to_rotation(); }
};

struct GroundTruthPose {
    UnitQuaternion rotation;   // R̂_i
    Eigen::Vector3d center;    // T̂_i, meters

    Rotation3 rotation_matrix() const { return rotation.to_rotation(); }
};

using GroundTruthPoses = std::map<NodeId, GroundTruthPose>;

enum class GaugeTag { Raw, Anchored, Aligned };

/// Predicted absolute poses together with the gauge convention they are
/// expressed in. Anchored(id) implies the anchor rotation is identity.
struct AbsolutePoseSet {
    struct Pose {
        Rotation3 rotation;
        Eigen::Vector3d center = Eigen::Vector3d::Zero();
    };
    std::map<NodeId, Pose> poses;
    GaugeTag gauge_tag = GaugeTag::Raw;
    NodeId anchor = -1; // meaningful only for GaugeTag::Anchored
};

struct ViewGraph {
    std::vector<CameraNode> nodes;
    std::vector<RelativePoseEdge> edges;
    std::optional<GroundTruthPoses> ground_truth;

    bool has_node(NodeId id) const;
    const CameraNode* find_node(NodeId id) const;
    std::size_t node_index(NodeId id) const;
    double connectivity() const;

    /// Structural and invariant checks; throws on violations
    /// (unknown endpoints, self loops, duplicate pairs, partial GT).
    void validate() const;
};

/// Exact relative pose implied by ground truth:
///   R̂_ij = R̂_i R̂_j^T,   T̂_ij = R̂_i (T̂_j - T̂_i) / ||T̂_j - T̂_i||.
/// Throws CoincidentCenters when the baseline is below 1e-12 m.
std::pair<Rotation3, UnitVector3> relative_from_absolute(const GroundTruthPoses& gt,
                                                         NodeId i, NodeId j);

/// Undirected connected components, each sorted, ordered by smallest member.
std::vector<std::vector<NodeId>> connected_components(const ViewGraph& g);

/// Removes the global rotation gauge: right-multiplies every predicted
/// rotation by the single S minimizing sum_i ||R_i S - R̂_i||_F^2. Relative
/// rotations are unchanged by construction.
AbsolutePoseSet gauge_align_rotations(const AbsolutePoseSet& pred,
                                      const GroundTruthPoses& gt);

/// Closed-form similarity (rotation, positive scale, offset) minimizing
/// sum_i ||s S T_i + o - T̂_i||^2, applied to all predicted centers.
/// Throws DegenerateConfiguration when the ground-truth centers are
/// collinear (scale/rotation not identifiable).
AbsolutePoseSet similarity_align_translations(const AbsolutePoseSet& pred,
                                              const GroundTruthPoses& gt);

/// Relative pose of the reversed edge: (R_ij^T, normalized -R_ij^T T_ij).
std::pair<Rotation3, UnitVector3> reverse_edge(const Rotation3& r_ij,
                                               const UnitVector3& t_ij);

} // namespace mavg

#endif // MAVG_POSE_GRAPH_HPP
