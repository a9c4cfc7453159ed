#include "mavg/chirality.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Dense>

#include "mavg/rng.hpp"

namespace mavg {

CandidateSet enumerate_candidates(const RelativePoseEdge& edge) {
    CandidateSet out;
    out.i = edge.i;
    out.j = edge.j;
    const Rotation3 r = edge.rotation_matrix();
    const UnitVector3 t = edge.translation_dir;
    const Rotation3 r_tw = rot_about_axis(t, M_PI) * r;
    out.candidates[0] = {r, t};
    out.candidates[1] = {r, t.negated()};
    out.candidates[2] = {r_tw, t};
    out.candidates[3] = {r_tw, t.negated()};
    out.selected = 0;
    return out;
}

namespace {

struct Triangle {
    // node indices a < b < c and the edge slots that connect them
    std::size_t e_ab, e_bc, e_ca;
    bool fwd_ab, fwd_bc, fwd_ca; // true when traversal matches edge storage order
};

struct RepairProblem {
    const ViewGraph* g = nullptr;
    double lambda_t = 1.0;
    std::vector<CandidateSet> candidates;          // per edge slot
    std::vector<Triangle> triangles;
    std::vector<std::vector<std::size_t>> edge_triangles; // edge slot -> triangle indices

    double triangle_cost(const Triangle& tri, const std::vector<int>& assignment) const;
    double total_cost(const std::vector<int>& assignment) const;
    double edge_local_cost(std::size_t edge, const std::vector<int>& assignment) const;
};

/// Candidate pose of an edge oriented along a traversal direction.
std::pair<Rotation3, UnitVector3> oriented(const CandidateSet& cs, int k, bool forward) {
    const auto& [r, t] = cs.candidates[static_cast<std::size_t>(k)];
    if (forward) return {r, t};
    return reverse_edge(r, t);
}

double RepairProblem::triangle_cost(const Triangle& tri, const std::vector<int>& assignment) const {
    const auto [r_ab, t_ab] = oriented(candidates[tri.e_ab], assignment[tri.e_ab], tri.fwd_ab);
    const auto [r_bc, t_bc] = oriented(candidates[tri.e_bc], assignment[tri.e_bc], tri.fwd_bc);
    const auto [r_ca, t_ca] = oriented(candidates[tri.e_ca], assignment[tri.e_ca], tri.fwd_ca);

    const double rot_term = geodesic_angle(r_ab * r_bc * r_ca, Rotation3::identity());

    // Baseline directions chained into the frame of the first node:
    // the relative rotations transport each later leg back to it.
    Eigen::Matrix3d dirs;
    dirs.col(0) = t_ab.vec();
    dirs.col(1) = r_ab * t_bc.vec();
    dirs.col(2) = (r_ab * r_bc) * t_ca.vec();

    Eigen::JacobiSVD<Eigen::Matrix3d> svd(dirs, Eigen::ComputeFullV);
    double cop = svd.singularValues()(2);
    const Eigen::Vector3d null_vec = svd.matrixV().col(2);
    const double mx = null_vec.maxCoeff();
    const double mn = null_vec.minCoeff();
    if (mx > 0.0 && mn < 0.0) cop += M_PI / 2.0; // mixed signs: a -t flip signature
    return rot_term + lambda_t * cop;
}

double RepairProblem::total_cost(const std::vector<int>& assignment) const {
    double cost = 0.0;
    for (const auto& tri : triangles) cost += triangle_cost(tri, assignment);
    return cost;
}

double RepairProblem::edge_local_cost(std::size_t edge, const std::vector<int>& assignment) const {
    double cost = 0.0;
    for (std::size_t ti : edge_triangles[edge]) cost += triangle_cost(triangles[ti], assignment);
    return cost;
}

RepairProblem build_problem(const ViewGraph& g, double lambda_t) {
    RepairProblem p;
    p.g = &g;
    p.lambda_t = lambda_t;
    p.candidates.reserve(g.edges.size());
    for (const auto& e : g.edges) p.candidates.push_back(enumerate_candidates(e));

    std::map<std::pair<NodeId, NodeId>, std::size_t> slot;
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
        slot[std::minmax(g.edges[k].i, g.edges[k].j)] = k;
    }

    std::vector<NodeId> ids;
    ids.reserve(g.nodes.size());
    for (const auto& n : g.nodes) ids.push_back(n.id);
    std::sort(ids.begin(), ids.end());

    p.edge_triangles.resize(g.edges.size());
    for (std::size_t a = 0; a < ids.size(); ++a) {
        for (std::size_t b = a + 1; b < ids.size(); ++b) {
            const auto it_ab = slot.find({ids[a], ids[b]});
            if (it_ab == slot.end()) continue;
            for (std::size_t c = b + 1; c < ids.size(); ++c) {
                const auto it_bc = slot.find({ids[b], ids[c]});
                if (it_bc == slot.end()) continue;
                const auto it_ca = slot.find({ids[a], ids[c]});
                if (it_ca == slot.end()) continue;
                Triangle tri;
                tri.e_ab = it_ab->second;
                tri.e_bc = it_bc->second;
                tri.e_ca = it_ca->second;
                const auto& g_edges = g.edges;
                tri.fwd_ab = g_edges[tri.e_ab].i == ids[a];
                tri.fwd_bc = g_edges[tri.e_bc].i == ids[b];
                tri.fwd_ca = g_edges[tri.e_ca].i == ids[c]; // traversal c -> a
                p.edge_triangles[tri.e_ab].push_back(p.triangles.size());
                p.edge_triangles[tri.e_bc].push_back(p.triangles.size());
                p.edge_triangles[tri.e_ca].push_back(p.triangles.size());
                p.triangles.push_back(tri);
            }
        }
    }
    return p;
}

struct IcmOutcome {
    std::vector<int> assignment;
    double cost = 0.0;
    int sweeps = 0;
    bool converged = false;
};

IcmOutcome run_icm(const RepairProblem& p, std::vector<int> assignment, int max_sweeps,
                   const std::vector<bool>& in_triangle) {
    IcmOutcome out;
    bool changed = true;
    int sweeps = 0;
    while (changed && sweeps < max_sweeps) {
        changed = false;
        ++sweeps;
        for (std::size_t e = 0; e < assignment.size(); ++e) {
            if (!in_triangle[e]) continue;
            int best_k = assignment[e];
            std::vector<int> trial = assignment;
            double best = 0.0;
            bool first = true;
            for (int k = 0; k < 4; ++k) {
                trial[e] = k;
                const double c = p.edge_local_cost(e, trial);
                if (first || c < best) {
                    best = c;
                    best_k = k;
                    first = false;
                }
            }
            if (best_k != assignment[e]) {
                assignment[e] = best_k;
                changed = true;
            }
        }
    }
    out.assignment = std::move(assignment);
    out.cost = p.total_cost(out.assignment);
    out.sweeps = sweeps;
    out.converged = !changed;
    return out;
}

IcmOutcome run_exhaustive(const RepairProblem& p, const std::vector<bool>& in_triangle) {
    const std::size_t n_edges = p.candidates.size();
    std::vector<std::size_t> free_edges;
    for (std::size_t e = 0; e < n_edges; ++e) {
        if (in_triangle[e]) free_edges.push_back(e);
    }
    std::vector<int> assignment(n_edges, 0);
    std::vector<int> best = assignment;
    double best_cost = p.total_cost(assignment);
    const std::uint64_t combos = 1ULL << (2 * free_edges.size());
    for (std::uint64_t code = 1; code < combos; ++code) {
        for (std::size_t f = 0; f < free_edges.size(); ++f) {
            assignment[free_edges[f]] = static_cast<int>((code >> (2 * f)) & 3ULL);
        }
        const double c = p.total_cost(assignment);
        if (c < best_cost) {
            best_cost = c;
            best = assignment;
        }
    }
    IcmOutcome out;
    out.assignment = std::move(best);
    out.cost = best_cost;
    out.sweeps = 1;
    out.converged = true;
    return out;
}

} // namespace

double triangle_cycle_cost(const ViewGraph& g, const std::vector<int>& assignment,
                           double lambda_t) {
    if (assignment.size() != g.edges.size()) {
        throw LengthMismatch("assignment size does not match edge count");
    }
    return build_problem(g, lambda_t).total_cost(assignment);
}

std::pair<ViewGraph, RepairReport> repair_graph(const ViewGraph& g, const RepairConfig& cfg) {
    const RepairProblem p = build_problem(g, cfg.lambda_t);

    std::vector<bool> in_triangle(g.edges.size(), false);
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        in_triangle[e] = !p.edge_triangles[e].empty();
    }

    const std::vector<int> observed(g.edges.size(), 0);
    RepairReport report;
    report.triangle_count = p.triangles.size();
    report.cost_before = p.total_cost(observed);

    IcmOutcome best;
    if (g.edges.size() <= 8) {
        best = run_exhaustive(p, in_triangle);
        report.exhaustive = true;
    } else {
        best = run_icm(p, observed, cfg.max_sweeps, in_triangle);
        report.winning_restart = 0;
        Rng rng(Rng::derive(cfg.seed, 2));
        for (int r = 1; r < cfg.restarts; ++r) {
            std::vector<int> start(g.edges.size(), 0);
            for (std::size_t e = 0; e < start.size(); ++e) {
                if (in_triangle[e]) start[e] = static_cast<int>(rng.index(4));
            }
            const IcmOutcome run = run_icm(p, std::move(start), cfg.max_sweeps, in_triangle);
            if (run.cost < best.cost) {
                best = run;
                report.winning_restart = r;
            }
        }
    }
    report.cost_after = best.cost;
    report.sweeps = best.sweeps;
    report.converged = best.converged;

    ViewGraph out = g;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const int k = best.assignment[e];
        const auto& [r, t] = p.candidates[e].candidates[static_cast<std::size_t>(k)];
        out.edges[e].rotation = UnitQuaternion::from_rotation(r);
        out.edges[e].translation_dir = t;

        RepairReport::EdgeOutcome eo;
        eo.i = g.edges[e].i;
        eo.j = g.edges[e].j;
        eo.input_index = 0;
        eo.output_index = k;
        if (g.ground_truth) {
            const auto [gt_r, gt_t] =
                relative_from_absolute(*g.ground_truth, g.edges[e].i, g.edges[e].j);
            eo.input_error_deg = rad2deg(geodesic_angle(g.edges[e].rotation_matrix(), gt_r));
            eo.output_error_deg = rad2deg(geodesic_angle(r, gt_r));
        }
        report.edges.push_back(eo);
    }
    return {std::move(out), std::move(report)};
}

int TransferMatrix::bin_of(double error_deg) {
    const int b = static_cast<int>(std::floor((error_deg + 1.5) / 5.0));
    return std::clamp(b, 0, kBins - 1);
}

double TransferMatrix::bin_center(int bin) { return 1.0 + 5.0 * bin; }

std::int64_t TransferMatrix::row_sum(int r) const {
    std::int64_t s = 0;
    for (int c = 0; c < kBins; ++c) s += counts[r][c];
    return s;
}

std::int64_t TransferMatrix::col_sum(int c) const {
    std::int64_t s = 0;
    for (int r = 0; r < kBins; ++r) s += counts[r][c];
    return s;
}

std::string TransferMatrix::to_csv() const {
    std::string out = "before\\after";
    for (int c = 0; c < kBins; ++c) out += "," + std::to_string(1 + 5 * c);
    out += "\n";
    for (int r = 0; r < kBins; ++r) {
        out += std::to_string(1 + 5 * r);
        for (int c = 0; c < kBins; ++c) out += "," + std::to_string(counts[r][c]);
        out += "\n";
    }
    return out;
}

std::string TransferMatrix::to_json() const {
    std::string out = "{\n  \"bin_centers\": [";
    for (int c = 0; c < kBins; ++c) out += (c ? "," : "") + std::to_string(1 + 5 * c);
    out += "],\n  \"counts\": [\n";
    for (int r = 0; r < kBins; ++r) {
        out += "    [";
        for (int c = 0; c < kBins; ++c) out += (c ? "," : "") + std::to_string(counts[r][c]);
        out += r + 1 < kBins ? "],\n" : "]\n";
    }
    out += "  ]\n}\n";
    return out;
}

TransferMatrix transfer_matrix(const std::vector<double>& before_deg,
                               const std::vector<double>& after_deg) {
    if (before_deg.size() != after_deg.size()) {
        throw LengthMismatch("before/after error lists differ in length");
    }
    TransferMatrix m;
    for (std::size_t k = 0; k < before_deg.size(); ++k) {
        m.counts[TransferMatrix::bin_of(before_deg[k])][TransferMatrix::bin_of(after_deg[k])] += 1;
    }
    return m;
}

std::vector<double> edge_rotation_errors_deg(const ViewGraph& g) {
    if (!g.ground_truth) {
        throw MissingGroundTruth("edge errors need ground truth");
    }
    std::vector<double> out;
    out.reserve(g.edges.size());
    for (const auto& e : g.edges) {
        const auto [gt_r, gt_t] = relative_from_absolute(*g.ground_truth, e.i, e.j);
        out.push_back(rad2deg(geodesic_angle(e.rotation_matrix(), gt_r)));
    }
    return out;
}

} // namespace mavg
