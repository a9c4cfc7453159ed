#include "mavg/translation_avg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "mavg/rng.hpp"

namespace mavg {

void TransAvgConfig::validate() const {
    if (estimator_scale <= 0.0) throw ConfigError("estimator_scale must be positive");
    if (outer_irls_iters < 1 || inner_alternations < 1) {
        throw ConfigError("iteration counts must be at least 1");
    }
    if (d_floor <= 0.0) throw ConfigError("d_floor must be positive");
}

double scale_update(const Eigen::Vector3d& t_i, const Eigen::Vector3d& t_j,
                    const Eigen::Vector3d& u_ij, double d_floor, bool* coincident) {
    const Eigen::Vector3d delta = t_j - t_i;
    const double len2 = delta.squaredNorm();
    if (len2 < 1e-24) {
        if (coincident) *coincident = true;
        return d_floor;
    }
    if (coincident) *coincident = false;
    return std::max(d_floor, delta.dot(u_ij) / len2);
}

double residual_combined(const Eigen::Vector3d& t_i, const Eigen::Vector3d& t_j, double d_ij,
                         const Eigen::Vector3d& u_ij, const Rotation3& observed_rel,
                         const Rotation3& rot_i, const Rotation3& rot_j,
                         bool rotation_residual_on) {
    const double trans2 = ((t_j - t_i) * d_ij - u_ij).squaredNorm();
    double rot2 = 0.0;
    if (rotation_residual_on) {
        const double d = chordal_distance(observed_rel, rot_i * rot_j.transpose());
        rot2 = d * d;
    }
    return std::sqrt(trans2 + rot2);
}

namespace {

double estimator_rho(const TransAvgConfig& cfg, double r) {
    const double c = cfg.estimator_scale;
    switch (cfg.m_estimator) {
        case MEstimator::L2:
            return 0.5 * r * r;
        case MEstimator::Huber:
            return r <= c ? 0.5 * r * r : c * (r - 0.5 * c);
        case MEstimator::Cauchy:
            return 0.5 * c * c * std::log1p(r * r / (c * c));
    }
    return 0.0;
}

double estimator_weight(const TransAvgConfig& cfg, double r) {
    if (r < 1e-12) return 1.0;
    const double c = cfg.estimator_scale;
    switch (cfg.m_estimator) {
        case MEstimator::L2:
            return 1.0;
        case MEstimator::Huber:
            return std::min(1.0, c / r);
        case MEstimator::Cauchy:
            return 1.0 / (1.0 + r * r / (c * c));
    }
    return 1.0;
}

} // namespace

AbsolutePoseSet bata_solve(const ViewGraph& g, const AbsolutePoseSet& rotations,
                           const std::vector<UnitVector3>& refined_dirs,
                           const TransAvgConfig& cfg, TransAvgTrace* trace) {
    cfg.validate();
    const std::size_t n = g.nodes.size();
    const std::size_t n_edges = g.edges.size();
    if (n < 3) throw Error("translation averaging needs at least 3 cameras");
    if (refined_dirs.size() != n_edges) {
        throw LengthMismatch("refined_dirs size does not match edge count");
    }
    if (rotations.poses.size() < n) throw NoRotations("rotation estimate missing nodes");
    if (connected_components(g).size() != 1) {
        throw NotConnected("translation averaging requires a single component");
    }

    std::vector<NodeId> ids;
    ids.reserve(n);
    for (const auto& node : g.nodes) ids.push_back(node.id);
    std::sort(ids.begin(), ids.end());
    auto index_of = [&ids](NodeId id) {
        return static_cast<std::size_t>(
            std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
    };

    std::vector<Rotation3> rot(n, Rotation3::identity());
    for (std::size_t k = 0; k < n; ++k) {
        const auto it = rotations.poses.find(ids[k]);
        if (it == rotations.poses.end()) {
            throw NoRotations("rotation estimate misses node " + std::to_string(ids[k]));
        }
        rot[k] = it->second.rotation;
    }

    // World-frame direction of (T_j - T_i) implied by each edge.
    struct EdgeData {
        std::size_t a, b;
        Eigen::Vector3d u;
        Rotation3 observed_rel;
    };
    std::vector<EdgeData> edges;
    edges.reserve(n_edges);
    for (std::size_t e = 0; e < n_edges; ++e) {
        EdgeData d;
        d.a = index_of(g.edges[e].i);
        d.b = index_of(g.edges[e].j);
        d.u = rot[d.a].transpose() * refined_dirs[e].vec();
        d.observed_rel = g.edges[e].rotation_matrix();
        edges.push_back(d);
    }

    const std::size_t dim = 3 * n;
    const std::size_t kkt_dim = dim + 4;

    // Constraint rows: sum of centers (3) and the scale-fixing row (1).
    Eigen::MatrixXd constraints = Eigen::MatrixXd::Zero(4, dim);
    for (std::size_t k = 0; k < n; ++k) {
        constraints.block<3, 3>(0, 3 * k) = Eigen::Matrix3d::Identity();
    }
    for (const auto& e : edges) {
        constraints.block<1, 3>(3, 3 * e.b) += e.u.transpose();
        constraints.block<1, 3>(3, 3 * e.a) -= e.u.transpose();
    }
    Eigen::Vector4d constraint_rhs(0.0, 0.0, 0.0, 1.0);

    // Seeded random start projected onto both constraints.
    Eigen::VectorXd t(dim);
    {
        Rng rng(Rng::derive(cfg.seed, 4));
        double s = 0.0;
        for (int attempt = 0; attempt < 64; ++attempt) {
            for (std::size_t k = 0; k < dim; ++k) t(k) = rng.normal();
            Eigen::Vector3d mean = Eigen::Vector3d::Zero();
            for (std::size_t k = 0; k < n; ++k) mean += t.segment<3>(3 * k);
            mean /= static_cast<double>(n);
            for (std::size_t k = 0; k < n; ++k) t.segment<3>(3 * k) -= mean;
            s = (constraints.row(3) * t).value();
            if (std::abs(s) > 1e-9) break;
        }
        if (std::abs(s) <= 1e-9) throw SingularKKT("cannot satisfy the scale constraint");
        t /= s;
    }

    std::vector<double> d_scale(n_edges, cfg.d_floor);
    std::vector<double> weights(n_edges, 1.0);

    auto weighted_objective = [&](const Eigen::VectorXd& centers) {
        double acc = 0.0;
        for (std::size_t e = 0; e < n_edges; ++e) {
            const Eigen::Vector3d delta =
                centers.segment<3>(3 * edges[e].b) - centers.segment<3>(3 * edges[e].a);
            acc += weights[e] * (delta * d_scale[e] - edges[e].u).squaredNorm();
        }
        return acc;
    };
    auto robust_objective = [&](const Eigen::VectorXd& centers) {
        double acc = 0.0;
        for (std::size_t e = 0; e < n_edges; ++e) {
            const double r = residual_combined(
                centers.segment<3>(3 * edges[e].a), centers.segment<3>(3 * edges[e].b), d_scale[e],
                edges[e].u, edges[e].observed_rel, rot[edges[e].a], rot[edges[e].b],
                cfg.rotation_residual_on);
            acc += estimator_rho(cfg, r);
        }
        return acc;
    };

    int coincident_events = 0;
    double prev_robust = -1.0;
    int outer_done = 0;
    for (int outer = 0; outer < cfg.outer_irls_iters; ++outer) {
        ++outer_done;
        for (std::size_t e = 0; e < n_edges; ++e) {
            const double r = residual_combined(
                t.segment<3>(3 * edges[e].a), t.segment<3>(3 * edges[e].b), d_scale[e], edges[e].u,
                edges[e].observed_rel, rot[edges[e].a], rot[edges[e].b], cfg.rotation_residual_on);
            weights[e] = estimator_weight(cfg, r);
        }

        double prev_inner = -1.0;
        for (int inner = 0; inner < cfg.inner_alternations; ++inner) {
            for (std::size_t e = 0; e < n_edges; ++e) {
                bool coincident = false;
                d_scale[e] = scale_update(t.segment<3>(3 * edges[e].a),
                                          t.segment<3>(3 * edges[e].b), edges[e].u, cfg.d_floor,
                                          &coincident);
                if (coincident) ++coincident_events;
            }

            // Equality-constrained weighted least squares in T via the KKT system.
            Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(kkt_dim, kkt_dim);
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(kkt_dim);
            for (std::size_t e = 0; e < n_edges; ++e) {
                const double wd = weights[e] * d_scale[e];
                const double wdd = wd * d_scale[e];
                const std::size_t a3 = 3 * edges[e].a;
                const std::size_t b3 = 3 * edges[e].b;
                for (int c = 0; c < 3; ++c) {
                    kkt(a3 + c, a3 + c) += wdd;
                    kkt(b3 + c, b3 + c) += wdd;
                    kkt(a3 + c, b3 + c) -= wdd;
                    kkt(b3 + c, a3 + c) -= wdd;
                }
                rhs.segment<3>(b3) += wd * edges[e].u;
                rhs.segment<3>(a3) -= wd * edges[e].u;
            }
            // A vanishing Tikhonov term keeps the system invertible while
            // floored-scale edges leave parts of the graph uncoupled; it
            // perturbs healthy solves at ~1e-13 relative, inside the 1e-12
            // monotonicity slack.
            const double reg = std::max(1e-13 * kkt.trace() / static_cast<double>(dim), 1e-18);
            for (std::size_t k = 0; k < dim; ++k) kkt(k, k) += reg;

            kkt.block(dim, 0, 4, dim) = constraints;
            kkt.block(0, dim, dim, 4) = constraints.transpose();
            rhs.segment<4>(dim) = constraint_rhs;

            Eigen::PartialPivLU<Eigen::MatrixXd> lu(kkt);
            const Eigen::VectorXd solution = lu.solve(rhs);
            const double solve_residual = (kkt * solution - rhs).norm();
            if (!solution.allFinite() || solve_residual > 1e-6 * (1.0 + rhs.norm())) {
                throw SingularKKT("constrained least-squares system is singular");
            }
            t = solution.head(dim);

            const double obj = weighted_objective(t);
            if (trace) trace->weighted_objective.push_back(obj);
            if (prev_inner >= 0.0 && prev_inner - obj < cfg.tol) break;
            prev_inner = obj;
        }

        const double robust = robust_objective(t);
        if (trace) trace->robust_objective.push_back(robust);
        if (prev_robust >= 0.0 && prev_robust - robust < cfg.tol) break;
        prev_robust = robust;
    }

    if (trace) {
        Eigen::Vector3d sum = Eigen::Vector3d::Zero();
        for (std::size_t k = 0; k < n; ++k) sum += t.segment<3>(3 * k);
        trace->center_sum_residual = sum.cwiseAbs().maxCoeff();
        trace->scale_constraint_residual = std::abs((constraints.row(3) * t).value() - 1.0);
        trace->outer_iterations = outer_done;
        trace->coincident_center_events = coincident_events;
        for (std::size_t e = 0; e < n_edges; ++e) {
            trace->final_edge_weights[{g.edges[e].i, g.edges[e].j}] = weights[e];
            trace->final_scales[{g.edges[e].i, g.edges[e].j}] = d_scale[e];
        }
    }

    AbsolutePoseSet out;
    for (std::size_t k = 0; k < n; ++k) {
        AbsolutePoseSet::Pose p;
        const auto it = rotations.poses.find(ids[k]);
        p.rotation = it->second.rotation;
        p.center = t.segment<3>(3 * k);
        out.poses.emplace(ids[k], p);
    }
    out.gauge_tag = GaugeTag::Raw;
    return out;
}

} // namespace mavg
