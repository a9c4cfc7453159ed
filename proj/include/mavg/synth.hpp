#ifndef MAVG_SYNTH_HPP
#define MAVG_SYNTH_HPP

#include <array>
#include <cstdint>

#include "mavg/pose_graph.hpp"

namespace mavg {

enum class FlipKind { Twist, NegateT, TwistAndNegate };

/// Edge corruption model: small folded-normal angular noise on most edges
/// plus a fraction of decomposition-ambiguity flips producing ~180 degree
/// outliers.
struct NoiseModel {
    double rot_sigma_deg = 5.0;        // std of axis-angle perturbation on R_ij
    double dir_sigma_deg = 5.0;        // std of angular perturbation on T_ij
    double chirality_flip_prob = 0.1;  // per-edge probability of a flip
    // weights over {twist, negate-t, twist-and-negate}
    std::array<double, 3> flip_kind_weights{1.0, 0.0, 0.0};

    void validate() const;
};

struct SceneConfig {
    int n_nodes = 8;
    double target_connectivity = 0.5536; // fraction of the n(n-1)/2 pairs
    double radius = 2.0;                 // meters, camera centers in a ball
    double look_at_jitter_deg = 15.0;    // deviation from looking at the centroid
    std::uint64_t seed = 0;
    bool emit_boxes = false;             // random plausible boxes, format testing only

    void validate() const;
};

/// Random single-component scene with exact (noise-free) relative-pose
/// edges and full ground truth. Deterministic given the seed; throws
/// GenerationFailed after 100 connectivity retries.
ViewGraph generate_scene(const SceneConfig& cfg);

/// Applies the noise model to every edge: an optional chirality flip
/// (twist: R <- (2 t t^T - I) R; negate-t: t <- -t; or both), then rotation
/// noise of folded-normal magnitude about a uniform axis, then direction
/// noise about a random axis perpendicular to t. Nodes and ground truth
/// are untouched. Throws MissingGroundTruth if g carries no ground truth.
ViewGraph apply_noise(const ViewGraph& g, const NoiseModel& nm, std::uint64_t seed);

} // namespace mavg

#endif // MAVG_SYNTH_HPP
