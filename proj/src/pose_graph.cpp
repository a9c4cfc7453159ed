#include "mavg/pose_graph.hpp"

#include <algorithm>
#include <set>

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace mavg {

bool ViewGraph::has_node(NodeId id) const { return find_node(id) != nullptr; }

const CameraNode* ViewGraph::find_node(NodeId id) const {
    for (const auto& n : nodes) {
        if (n.id == id) return &n;
    }
    return nullptr;
}

std::size_t ViewGraph::node_index(NodeId id) const {
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (nodes[k].id == id) return k;
    }
    throw UnknownNode("node id " + std::to_string(id) + " not in graph");
}

double ViewGraph::connectivity() const {
    const std::size_t n = nodes.size();
    if (n < 2) return 0.0;
    return static_cast<double>(edges.size()) / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

void ViewGraph::validate() const {
    std::set<NodeId> ids;
    for (const auto& n : nodes) {
        if (!ids.insert(n.id).second) {
            throw Error("duplicate node id " + std::to_string(n.id));
        }
        if (n.focal <= 0.0 || n.width <= 0 || n.height <= 0) {
            throw Error("node " + std::to_string(n.id) + " has non-positive intrinsics");
        }
    }
    std::set<std::pair<NodeId, NodeId>> pairs;
    for (const auto& e : edges) {
        if (e.i == e.j) {
            throw Error("self loop on node " + std::to_string(e.i));
        }
        if (!ids.count(e.i) || !ids.count(e.j)) {
            throw UnknownNodeRef("edge references unknown node " +
                                 std::to_string(ids.count(e.i) ? e.j : e.i));
        }
        auto key = std::minmax(e.i, e.j);
        if (!pairs.insert(key).second) {
            throw DuplicateEdge("duplicate edge {" + std::to_string(key.first) + "," +
                                std::to_string(key.second) + "}");
        }
    }
    if (ground_truth) {
        if (ground_truth->size() != nodes.size()) {
            throw Error("ground truth must cover every node or be absent");
        }
        for (const auto& n : nodes) {
            if (!ground_truth->count(n.id)) {
                throw Error("ground truth missing node " + std::to_string(n.id));
            }
        }
    }
}

std::pair<Rotation3, UnitVector3> relative_from_absolute(const GroundTruthPoses& gt,
                                                         NodeId i, NodeId j) {
    const auto it_i = gt.find(i);
    const auto it_j = gt.find(j);
    if (it_i == gt.end() || it_j == gt.end()) {
        throw UnknownNode("relative_from_absolute: unknown node id");
    }
    const Eigen::Vector3d baseline = it_j->second.center - it_i->second.center;
    const double len = baseline.norm();
    if (len < 1e-12) {
        throw CoincidentCenters("baseline between " + std::to_string(i) + " and " +
                                std::to_string(j) + " is below 1e-12 m");
    }
    const Rotation3 ri = it_i->second.rotation_matrix();
    const Rotation3 rj = it_j->second.rotation_matrix();
    const Rotation3 r_ij = ri * rj.transpose();
    const UnitVector3 t_ij(ri * (baseline / len));
    return {r_ij, t_ij};
}

std::vector<std::vector<NodeId>> connected_components(const ViewGraph& g) {
    std::map<NodeId, NodeId> parent;
    for (const auto& n : g.nodes) parent[n.id] = n.id;

    // union-find with path halving
    auto find = [&parent](NodeId a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    };
    for (const auto& e : g.edges) {
        const NodeId ra = find(e.i);
        const NodeId rb = find(e.j);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
    }

    std::map<NodeId, std::vector<NodeId>> groups;
    for (const auto& n : g.nodes) groups[find(n.id)].push_back(n.id);

    std::vector<std::vector<NodeId>> out;
    out.reserve(groups.size());
    for (auto& [root, members] : groups) {
        std::sort(members.begin(), members.end());
        out.push_back(std::move(members));
    }
    // map iteration is keyed by root = smallest member, already the required order
    return out;
}

AbsolutePoseSet gauge_align_rotations(const AbsolutePoseSet& pred,
                                      const GroundTruthPoses& gt) {
    if (pred.poses.size() != gt.size()) {
        throw NodeSetMismatch("gauge_align_rotations: node sets differ in size");
    }
    Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
    for (const auto& [id, pose] : pred.poses) {
        const auto it = gt.find(id);
        if (it == gt.end()) {
            throw NodeSetMismatch("gauge_align_rotations: node " + std::to_string(id) +
                                  " missing from ground truth");
        }
        acc += pose.rotation.matrix().transpose() * it->second.rotation_matrix().matrix();
    }
    const Rotation3 s = nearest_rotation(acc);

    AbsolutePoseSet out = pred;
    for (auto& [id, pose] : out.poses) {
        pose.rotation = pose.rotation * s;
    }
    out.gauge_tag = GaugeTag::Aligned;
    out.anchor = -1;
    return out;
}

AbsolutePoseSet similarity_align_translations(const AbsolutePoseSet& pred,
                                              const GroundTruthPoses& gt) {
    if (pred.poses.size() != gt.size()) {
        throw NodeSetMismatch("similarity_align_translations: node sets differ in size");
    }
    const std::size_t n = gt.size();
    if (n < 3) {
        throw DegenerateConfiguration("similarity alignment needs at least 3 centers");
    }

    Eigen::Matrix3Xd src(3, n), dst(3, n);
    std::size_t k = 0;
    for (const auto& [id, pose] : pred.poses) {
        const auto it = gt.find(id);
        if (it == gt.end()) {
            throw NodeSetMismatch("similarity_align_translations: node " + std::to_string(id) +
                                  " missing from ground truth");
        }
        src.col(k) = pose.center;
        dst.col(k) = it->second.center;
        ++k;
    }

    // collinear ground truth leaves rotation about the line and scale coupled
    {
        const Eigen::Matrix3Xd centered = dst.colwise() - dst.rowwise().mean();
        Eigen::JacobiSVD<Eigen::Matrix3Xd> svd(centered);
        const auto& sv = svd.singularValues();
        if (sv(1) <= 1e-9 * std::max(1.0, sv(0))) {
            throw DegenerateConfiguration("ground-truth centers are collinear");
        }
    }
    {
        const Eigen::Matrix3Xd centered = src.colwise() - src.rowwise().mean();
        if (centered.norm() < 1e-12) {
            throw DegenerateConfiguration("predicted centers are coincident");
        }
    }

    const Eigen::Matrix4d t = Eigen::umeyama(src, dst, true);
    const Eigen::Matrix3d sr = t.topLeftCorner<3, 3>();
    const Eigen::Vector3d offset = t.topRightCorner<3, 1>();

    AbsolutePoseSet out = pred;
    for (auto& [id, pose] : out.poses) {
        pose.center = sr * pose.center + offset;
    }
    out.gauge_tag = GaugeTag::Aligned;
    out.anchor = -1;
    return out;
}

std::pair<Rotation3, UnitVector3> reverse_edge(const Rotation3& r_ij,
                                               const UnitVector3& t_ij) {
    const Rotation3 r_ji = r_ij.transpose();
    const UnitVector3 t_ji(-(r_ji * t_ij.vec()));
    return {r_ji, t_ji};
}

} // namespace mavg
