#include "mavg/rotation_avg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "mavg/rng.hpp"

namespace mavg {

void RotAvgConfig::validate() const {
    if (loss_scale <= 0.0) throw ConfigError("loss_scale must be positive");
    if (max_irls_iters < 1 || node_sweeps < 1 || edge_sweeps < 1 || rounds < 1) {
        throw ConfigError("iteration counts must be at least 1");
    }
    if (temperature <= 0.0) throw ConfigError("temperature must be positive");
}

double robust_rho(const RotAvgConfig& cfg, double r) {
    const double c = cfg.loss_scale;
    switch (cfg.robust_loss) {
        case RobustLoss::L2:
            return 0.5 * r * r;
        case RobustLoss::Huber:
            return r <= c ? 0.5 * r * r : c * (r - 0.5 * c);
        case RobustLoss::GemanMcClure:
            return 0.5 * c * c * r * r / (c * c + r * r);
    }
    return 0.0;
}

double robust_weight(const RotAvgConfig& cfg, double r) {
    if (r < 1e-12) return 1.0;
    const double c = cfg.loss_scale;
    switch (cfg.robust_loss) {
        case RobustLoss::L2:
            return 1.0;
        case RobustLoss::Huber:
            return std::min(1.0, c / r);
        case RobustLoss::GemanMcClure: {
            const double q = c * c / (c * c + r * r);
            return q * q;
        }
    }
    return 1.0;
}

namespace {

NodeId pick_anchor(const ViewGraph& g, NodeId requested) {
    if (requested >= 0) {
        if (!g.has_node(requested)) {
            throw UnknownNode("anchor node " + std::to_string(requested) + " not in graph");
        }
        return requested;
    }
    NodeId smallest = g.nodes.front().id;
    for (const auto& n : g.nodes) smallest = std::min(smallest, n.id);
    return smallest;
}

struct EdgeView {
    std::size_t a;      // index of edge.i in sorted ids
    std::size_t b;      // index of edge.j
    Rotation3 rel;      // R_ab so that R_a = rel * R_b
};

std::vector<NodeId> sorted_ids(const ViewGraph& g) {
    std::vector<NodeId> ids;
    ids.reserve(g.nodes.size());
    for (const auto& n : g.nodes) ids.push_back(n.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::size_t id_index(const std::vector<NodeId>& ids, NodeId id) {
    const auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) {
        throw UnknownNode("node " + std::to_string(id) + " not in graph");
    }
    return static_cast<std::size_t>(it - ids.begin());
}

} // namespace

std::size_t RotAvgState::index_of(NodeId id) const { return id_index(ids, id); }

RotAvgState make_state(const ViewGraph& g, const AbsolutePoseSet& init) {
    RotAvgState st;
    st.ids = sorted_ids(g);
    st.absolute.reserve(st.ids.size());
    for (NodeId id : st.ids) {
        const auto it = init.poses.find(id);
        if (it == init.poses.end()) {
            throw NodeSetMismatch("initialization misses node " + std::to_string(id));
        }
        st.absolute.push_back(it->second.rotation);
    }
    st.observed_relative.reserve(g.edges.size());
    for (const auto& e : g.edges) st.observed_relative.push_back(e.rotation_matrix());
    st.working_relative = st.observed_relative;
    st.edge_score.assign(g.edges.size(), 0.0);
    st.edge_weight.assign(g.edges.size(), 1.0);
    return st;
}

double node_cost(const RotAvgState& state, const ViewGraph& g, std::size_t node_index) {
    double acc = 0.0;
    int degree = 0;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const std::size_t a = state.index_of(g.edges[e].i);
        const std::size_t b = state.index_of(g.edges[e].j);
        if (a == node_index) {
            acc += chordal_distance(state.absolute[a], state.working_relative[e] * state.absolute[b]);
            ++degree;
        } else if (b == node_index) {
            acc += chordal_distance(state.absolute[b],
                                    state.working_relative[e].transpose() * state.absolute[a]);
            ++degree;
        }
    }
    return degree > 0 ? acc / degree : 0.0;
}

std::pair<Rotation3, double> edge_rectify_and_score(const RotAvgState& state,
                                                    const ViewGraph& g,
                                                    std::size_t edge_index) {
    const std::size_t a = state.index_of(g.edges[edge_index].i);
    const std::size_t b = state.index_of(g.edges[edge_index].j);
    const Rotation3 product = state.absolute[a] * state.absolute[b].transpose();
    const Rotation3& observed = state.observed_relative[edge_index];

    const Rotation3 mid = geodesic_midpoint(product, observed);
    const Rotation3 cands[3] = {product, observed, mid};
    double best_sq = 0.0;
    int best = 0;
    for (int k = 0; k < 3; ++k) {
        const double da = chordal_distance(cands[k], product);
        const double db = chordal_distance(cands[k], observed);
        const double sq = da * da + db * db;
        if (k == 0 || sq < best_sq) {
            best_sq = sq;
            best = k;
        }
    }
    const double score = chordal_distance(cands[best], product) +
                         chordal_distance(cands[best], observed);
    return {cands[best], score};
}

AbsolutePoseSet spectral_init(const ViewGraph& g, NodeId anchor) {
    if (g.nodes.empty()) throw EmptyDataset("spectral_init on empty graph");
    if (connected_components(g).size() != 1) {
        throw NotConnected("spectral_init requires a single-component graph");
    }
    const std::vector<NodeId> ids = sorted_ids(g);
    const std::size_t n = ids.size();
    const std::size_t dim = 3 * n;

    // Degree-normalized block matrix of relative rotations with identity
    // self-blocks; its top eigenspace stacks the absolute rotations scaled
    // by sqrt(1 + deg) per block, a factor the SO(3) projection absorbs.
    std::vector<double> degree(n, 1.0);
    for (const auto& e : g.edges) {
        degree[id_index(ids, e.i)] += 1.0;
        degree[id_index(ids, e.j)] += 1.0;
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t k = 0; k < n; ++k) {
        m.block<3, 3>(3 * k, 3 * k) = Eigen::Matrix3d::Identity() / degree[k];
    }
    for (const auto& e : g.edges) {
        const std::size_t a = id_index(ids, e.i);
        const std::size_t b = id_index(ids, e.j);
        const double scale = 1.0 / std::sqrt(degree[a] * degree[b]);
        const Eigen::Matrix3d r = e.rotation_matrix().matrix() * scale;
        m.block<3, 3>(3 * a, 3 * b) = r;
        m.block<3, 3>(3 * b, 3 * a) = r.transpose();
    }

    // Power iteration with deflation for the three leading eigenvectors.
    constexpr int kMaxIters = 10000;
    constexpr double kTol = 1e-10;
    Eigen::MatrixXd basis(dim, 3);
    Eigen::Vector3d eigenvalues;
    for (int vec = 0; vec < 3; ++vec) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
        v(vec) = 1.0;
        for (int prev = 0; prev < vec; ++prev) v -= basis.col(prev).dot(v) * basis.col(prev);
        v.normalize();
        bool converged = false;
        for (int it = 0; it < kMaxIters; ++it) {
            Eigen::VectorXd next = m * v;
            for (int prev = 0; prev < vec; ++prev) {
                next -= basis.col(prev).dot(next) * basis.col(prev);
            }
            const double nn = next.norm();
            if (nn < 1e-14) break; // start vector fell into the deflated space
            next /= nn;
            const double delta = std::min((next - v).norm(), (next + v).norm());
            v = next;
            if (delta < kTol) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw EigenFailure("power iteration did not converge for eigenvector " +
                               std::to_string(vec));
        }
        basis.col(vec) = v;
        eigenvalues(vec) = v.dot(m * v);
    }
    (void)eigenvalues;

    // A mixing of the eigenbasis may be improper; flip one column if so.
    double det_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        det_sum += basis.block<3, 3>(3 * k, 0).determinant();
    }
    if (det_sum < 0.0) basis.col(2) = -basis.col(2);

    AbsolutePoseSet out;
    for (std::size_t k = 0; k < n; ++k) {
        AbsolutePoseSet::Pose p;
        p.rotation = nearest_rotation(basis.block<3, 3>(3 * k, 0));
        out.poses.emplace(ids[k], p);
    }
    return fix_gauge(out, pick_anchor(g, anchor));
}

namespace {

/// One Gauss-Seidel sweep of weighted chordal node updates, in id order.
/// Weights and relatives are per edge; each update is the exact minimizer
/// of its local weighted cost, so the sweep never increases the total.
void node_sweep(RotAvgState& st, const ViewGraph& g, const std::vector<Rotation3>& relatives,
                const std::vector<double>& weights) {
    for (std::size_t node = 0; node < st.ids.size(); ++node) {
        std::vector<Rotation3> targets;
        std::vector<double> w;
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            if (weights[e] <= 0.0) continue;
            const std::size_t a = st.index_of(g.edges[e].i);
            const std::size_t b = st.index_of(g.edges[e].j);
            if (a == node) {
                targets.push_back(relatives[e] * st.absolute[b]);
                w.push_back(weights[e]);
            } else if (b == node) {
                targets.push_back(relatives[e].transpose() * st.absolute[a]);
                w.push_back(weights[e]);
            }
        }
        if (targets.empty()) continue;
        try {
            st.absolute[node] = chordal_mean(targets, w);
        } catch (const DegenerateMatrix&) {
            throw DegenerateMatrix("degenerate chordal mean at node " +
                                   std::to_string(st.ids[node]));
        }
    }
}

AbsolutePoseSet state_to_poses(const RotAvgState& st) {
    AbsolutePoseSet out;
    for (std::size_t k = 0; k < st.ids.size(); ++k) {
        AbsolutePoseSet::Pose p;
        p.rotation = st.absolute[k];
        out.poses.emplace(st.ids[k], p);
    }
    return out;
}

AbsolutePoseSet random_poses(const ViewGraph& g, std::uint64_t seed) {
    Rng rng(Rng::derive(seed, 3));
    AbsolutePoseSet out;
    for (NodeId id : sorted_ids(g)) {
        const UnitQuaternion q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
        AbsolutePoseSet::Pose p;
        p.rotation = q.to_rotation();
        out.poses.emplace(id, p);
    }
    return out;
}

} // namespace

AbsolutePoseSet irls_solve(const ViewGraph& g, const AbsolutePoseSet& init,
                           const RotAvgConfig& cfg, RotAvgTrace* trace) {
    cfg.validate();
    RotAvgState st = make_state(g, init);
    const std::size_t n_edges = g.edges.size();

    auto residual = [&st, &g](std::size_t e) {
        const std::size_t a = st.index_of(g.edges[e].i);
        const std::size_t b = st.index_of(g.edges[e].j);
        return chordal_distance(st.observed_relative[e],
                                st.absolute[a] * st.absolute[b].transpose());
    };
    auto robust_cost = [&]() {
        double acc = 0.0;
        for (std::size_t e = 0; e < n_edges; ++e) acc += robust_rho(cfg, residual(e));
        return acc;
    };

    const double entry_cost = robust_cost();
    if (trace) trace->robust_cost.push_back(entry_cost);

    std::vector<double> weights(n_edges, 1.0);
    double prev_surrogate = -1.0;
    int iters = 0;
    for (int it = 0; it < cfg.max_irls_iters; ++it) {
        ++iters;
        for (std::size_t e = 0; e < n_edges; ++e) weights[e] = robust_weight(cfg, residual(e));
        node_sweep(st, g, st.observed_relative, weights);

        double surrogate = 0.0;
        for (std::size_t e = 0; e < n_edges; ++e) {
            const double r = residual(e);
            surrogate += weights[e] * r * r;
        }
        if (trace) {
            trace->surrogate_cost.push_back(surrogate);
            trace->robust_cost.push_back(robust_cost());
        }
        if (prev_surrogate >= 0.0 && prev_surrogate - surrogate < cfg.irls_tol) break;
        prev_surrogate = surrogate;
    }

    if (trace) {
        trace->iterations = iters;
        for (std::size_t e = 0; e < n_edges; ++e) {
            trace->final_edge_weights[{g.edges[e].i, g.edges[e].j}] = weights[e];
        }
    }
    return fix_gauge(state_to_poses(st), pick_anchor(g, cfg.anchor));
}

AbsolutePoseSet iterative_refine(const ViewGraph& g, const AbsolutePoseSet& init,
                                 const RotAvgConfig& cfg, RotAvgTrace* trace) {
    cfg.validate();
    RotAvgState st = make_state(g, init);
    const std::size_t n_edges = g.edges.size();

    // scores of the initial state
    for (std::size_t e = 0; e < n_edges; ++e) {
        const auto [rect, score] = edge_rectify_and_score(st, g, e);
        st.working_relative[e] = rect;
        st.edge_score[e] = score;
        st.edge_weight[e] = std::exp(-score / cfg.temperature);
    }

    for (int round = 0; round < cfg.rounds; ++round) {
        for (int kn = 0; kn < cfg.node_sweeps; ++kn) {
            node_sweep(st, g, st.working_relative, st.edge_weight);
        }
        for (int ke = 0; ke < cfg.edge_sweeps; ++ke) {
            for (std::size_t e = 0; e < n_edges; ++e) {
                const auto [rect, score] = edge_rectify_and_score(st, g, e);
                st.working_relative[e] = rect;
                st.edge_score[e] = score;
                st.edge_weight[e] = std::exp(-score / cfg.temperature);
            }
        }
        st.iteration = round + 1;
        if (trace) {
            double cost = 0.0;
            for (std::size_t e = 0; e < n_edges; ++e) {
                const std::size_t a = st.index_of(g.edges[e].i);
                const std::size_t b = st.index_of(g.edges[e].j);
                cost += robust_rho(cfg, chordal_distance(st.observed_relative[e],
                                                         st.absolute[a] * st.absolute[b].transpose()));
            }
            trace->robust_cost.push_back(cost);
        }
    }

    if (trace) {
        trace->iterations = st.iteration;
        for (std::size_t e = 0; e < n_edges; ++e) {
            trace->final_edge_weights[{g.edges[e].i, g.edges[e].j}] = st.edge_weight[e];
            trace->final_edge_scores[{g.edges[e].i, g.edges[e].j}] = st.edge_score[e];
        }
    }
    return fix_gauge(state_to_poses(st), pick_anchor(g, cfg.anchor));
}

AbsolutePoseSet fix_gauge(const AbsolutePoseSet& poses, NodeId anchor) {
    const auto it = poses.poses.find(anchor);
    if (it == poses.poses.end()) {
        throw UnknownNode("gauge anchor " + std::to_string(anchor) + " not present");
    }
    const Rotation3 s = it->second.rotation.transpose();
    AbsolutePoseSet out = poses;
    for (auto& [id, p] : out.poses) p.rotation = p.rotation * s;
    out.gauge_tag = GaugeTag::Anchored;
    out.anchor = anchor;
    return out;
}

AbsolutePoseSet initial_poses(const ViewGraph& g, const RotAvgConfig& cfg) {
    if (cfg.random_init) {
        return fix_gauge(random_poses(g, cfg.seed), pick_anchor(g, cfg.anchor));
    }
    return spectral_init(g, cfg.anchor);
}

} // namespace mavg
