#include "mavg/synth.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Geometry>

#include "mavg/rng.hpp"

namespace mavg {

void NoiseModel::validate() const {
    if (rot_sigma_deg < 0.0 || dir_sigma_deg < 0.0) {
        throw ConfigError("noise sigmas must be nonnegative");
    }
    if (chirality_flip_prob < 0.0 || chirality_flip_prob > 1.0) {
        throw ConfigError("chirality_flip_prob must lie in [0, 1]");
    }
    const double wsum = flip_kind_weights[0] + flip_kind_weights[1] + flip_kind_weights[2];
    if (flip_kind_weights[0] < 0.0 || flip_kind_weights[1] < 0.0 || flip_kind_weights[2] < 0.0) {
        throw ConfigError("flip kind weights must be nonnegative");
    }
    if (chirality_flip_prob > 0.0 && wsum <= 0.0) {
        throw ConfigError("flip kind weights must not all be zero when flips are enabled");
    }
}

void SceneConfig::validate() const {
    if (n_nodes < 3) throw ConfigError("n_nodes must be at least 3");
    if (target_connectivity <= 0.0 || target_connectivity > 1.0) {
        throw ConfigError("target_connectivity must lie in (0, 1]");
    }
    if (radius <= 0.0) throw ConfigError("radius must be positive");
    if (look_at_jitter_deg < 0.0) throw ConfigError("look_at_jitter_deg must be nonnegative");
}

namespace {

/// World-to-camera rotation that points the camera's +z axis from `center`
/// toward `target`.
Rotation3 look_at(const Eigen::Vector3d& center, const Eigen::Vector3d& target) {
    Eigen::Vector3d fwd = target - center;
    if (fwd.norm() < 1e-9) fwd = Eigen::Vector3d::UnitZ();
    fwd.normalize();
    Eigen::Vector3d up = Eigen::Vector3d::UnitY();
    if (std::abs(up.dot(fwd)) > 0.99) up = Eigen::Vector3d::UnitX();
    const Eigen::Vector3d right = up.cross(fwd).normalized();
    const Eigen::Vector3d down = fwd.cross(right);
    Eigen::Matrix3d m;
    m.row(0) = right;
    m.row(1) = down;
    m.row(2) = fwd;
    return Rotation3(m);
}

bool connected_with_edges(int n_nodes, const std::vector<std::pair<NodeId, NodeId>>& pairs) {
    std::vector<int> parent(n_nodes);
    for (int i = 0; i < n_nodes; ++i) parent[i] = i;
    auto find = [&parent](int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    };
    int components = n_nodes;
    for (const auto& [a, b] : pairs) {
        const int ra = find(a), rb = find(b);
        if (ra != rb) {
            parent[ra] = rb;
            --components;
        }
    }
    return components == 1;
}

Rotation3 random_small_rotation(Rng& rng, double sigma_deg) {
    const UnitVector3 axis(rng.unit_vector());
    const double angle = std::abs(rng.normal(0.0, deg2rad(sigma_deg)));
    return rot_about_axis(axis, angle);
}

} // namespace

ViewGraph generate_scene(const SceneConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);

    const int n = cfg.n_nodes;
    const std::size_t n_pairs = static_cast<std::size_t>(n) * (n - 1) / 2;
    const std::size_t n_edges = static_cast<std::size_t>(
        std::ceil(cfg.target_connectivity * static_cast<double>(n_pairs)));

    ViewGraph g;
    GroundTruthPoses gt;
    std::vector<Eigen::Vector3d> centers(n);
    for (int i = 0; i < n; ++i) {
        centers[i] = rng.in_ball(cfg.radius);
        // keep baselines clearly away from the coincident-center guard
        for (int k = 0; k < i; ++k) {
            if ((centers[i] - centers[k]).norm() < 1e-3 * cfg.radius) {
                centers[i] = rng.in_ball(cfg.radius);
                k = -1;
            }
        }
    }
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const auto& c : centers) centroid += c;
    centroid /= static_cast<double>(n);

    for (int i = 0; i < n; ++i) {
        CameraNode node;
        node.id = i;
        node.focal = rng.uniform(500.0, 700.0);
        node.width = 640;
        node.height = 480;
        g.nodes.push_back(node);

        Rotation3 rot = look_at(centers[i], centroid);
        if (cfg.look_at_jitter_deg > 0.0) {
            rot = random_small_rotation(rng, cfg.look_at_jitter_deg) * rot;
        }
        gt.emplace(i, GroundTruthPose{UnitQuaternion::from_rotation(rot), centers[i]});
    }

    std::vector<std::pair<NodeId, NodeId>> all_pairs;
    all_pairs.reserve(n_pairs);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) all_pairs.emplace_back(i, j);
    }

    std::vector<std::pair<NodeId, NodeId>> chosen;
    bool ok = false;
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
        std::vector<std::pair<NodeId, NodeId>> pool = all_pairs;
        rng.shuffle(pool);
        chosen.assign(pool.begin(), pool.begin() + static_cast<long>(n_edges));
        ok = connected_with_edges(n, chosen);
    }
    if (!ok) {
        throw GenerationFailed("no single-component edge set after 100 retries");
    }
    std::sort(chosen.begin(), chosen.end());

    for (const auto& [i, j] : chosen) {
        const auto [r_ij, t_ij] = relative_from_absolute(gt, i, j);
        RelativePoseEdge e;
        e.i = i;
        e.j = j;
        e.rotation = UnitQuaternion::from_rotation(r_ij);
        e.translation_dir = t_ij;
        if (cfg.emit_boxes) {
            auto box = [&rng](const CameraNode& cam) {
                DetectionBox b;
                b.bb_w = rng.uniform(20.0, cam.width / 2.0);
                b.bb_h = rng.uniform(20.0, cam.height / 2.0);
                b.x = rng.uniform(0.0, cam.width - b.bb_w);
                b.y = rng.uniform(0.0, cam.height - b.bb_h);
                return b;
            };
            e.boxes.emplace_back(box(g.nodes[i]), box(g.nodes[j]));
        }
        g.edges.push_back(std::move(e));
    }

    g.ground_truth = std::move(gt);
    g.validate();
    return g;
}

ViewGraph apply_noise(const ViewGraph& g, const NoiseModel& nm, std::uint64_t seed) {
    nm.validate();
    if (!g.ground_truth) {
        throw MissingGroundTruth("apply_noise requires ground truth on the input graph");
    }
    Rng rng(Rng::derive(seed, 1));
    ViewGraph out = g;

    const double wsum = nm.flip_kind_weights[0] + nm.flip_kind_weights[1] + nm.flip_kind_weights[2];

    for (auto& e : out.edges) {
        Rotation3 r = e.rotation_matrix();
        Eigen::Vector3d t = e.translation_dir.vec();

        if (nm.chirality_flip_prob > 0.0 && rng.uniform01() < nm.chirality_flip_prob) {
            const double pick = rng.uniform01() * wsum;
            FlipKind kind = FlipKind::TwistAndNegate;
            if (pick < nm.flip_kind_weights[0]) {
                kind = FlipKind::Twist;
            } else if (pick < nm.flip_kind_weights[0] + nm.flip_kind_weights[1]) {
                kind = FlipKind::NegateT;
            }
            if (kind == FlipKind::Twist || kind == FlipKind::TwistAndNegate) {
                r = rot_about_axis(UnitVector3(t), M_PI) * r;
            }
            if (kind == FlipKind::NegateT || kind == FlipKind::TwistAndNegate) {
                t = -t;
            }
        }

        if (nm.rot_sigma_deg > 0.0) {
            r = random_small_rotation(rng, nm.rot_sigma_deg) * r;
        }
        if (nm.dir_sigma_deg > 0.0) {
            // rotate t about a random perpendicular axis
            Eigen::Vector3d perp = rng.unit_vector().cross(t);
            while (perp.norm() < 1e-9) perp = rng.unit_vector().cross(t);
            perp.normalize();
            const double angle = std::abs(rng.normal(0.0, deg2rad(nm.dir_sigma_deg)));
            t = rot_about_axis(UnitVector3(perp), angle) * t;
        }

        e.rotation = UnitQuaternion::from_rotation(r);
        e.translation_dir = UnitVector3(t);
    }
    return out;
}

} // namespace mavg
