#include "mavg/pipeline.hpp"

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mavg/rng.hpp"

namespace mavg {

using nlohmann::json;

namespace {

// stable name hash; std::hash is implementation-defined
std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

std::size_t BatchResult::n_ok() const {
    std::size_t n = 0;
    for (const auto& g : graphs) n += g.ok ? 1 : 0;
    return n;
}

std::vector<NamedGraph> generate_dataset(const PipelineConfig& cfg) {
    std::vector<NamedGraph> out;
    out.reserve(cfg.dataset_size);
    for (std::size_t k = 0; k < cfg.dataset_size; ++k) {
        SceneConfig scene = cfg.scene;
        scene.seed = Rng::derive(cfg.seed, 1000 + k);
        const ViewGraph clean = generate_scene(scene);
        const ViewGraph noisy = apply_noise(clean, cfg.noise, Rng::derive(cfg.seed, 2000 + k));
        char name[32];
        std::snprintf(name, sizeof(name), "g%05zu", k);
        out.push_back({name, noisy});
    }
    return out;
}

GraphResult run_graph_pipeline(const NamedGraph& input, const PipelineConfig& cfg) {
    GraphResult result;
    result.name = input.name;
    const ViewGraph& g = input.graph;
    try {
        if (connected_components(g).size() != 1) {
            result.failure_reason = "multi_component";
            return result;
        }

        const bool have_gt = g.ground_truth.has_value();
        if (have_gt) result.edge_errors_before_deg = edge_rotation_errors_deg(g);

        ViewGraph working = g;
        if (!cfg.skip_repair) {
            RepairConfig rc = cfg.repair;
            rc.seed = Rng::derive(cfg.seed, fnv1a(input.name));
            auto [repaired, report] = repair_graph(working, rc);
            working = std::move(repaired);
            result.repair = std::move(report);
        }
        if (have_gt) result.edge_errors_after_deg = edge_rotation_errors_deg(working);

        RotAvgConfig rot_cfg = cfg.rotavg;
        rot_cfg.seed = Rng::derive(cfg.seed, fnv1a(input.name) + 1);
        AbsolutePoseSet rotations = initial_poses(working, rot_cfg);
        switch (cfg.rot_solver) {
            case RotSolver::Spectral:
                break;
            case RotSolver::Irls:
                rotations = irls_solve(working, rotations, rot_cfg, &result.rot_trace);
                break;
            case RotSolver::Iterative:
                rotations = iterative_refine(working, rotations, rot_cfg, &result.rot_trace);
                break;
        }

        std::vector<UnitVector3> dirs;
        dirs.reserve(working.edges.size());
        for (const auto& e : working.edges) dirs.push_back(e.translation_dir);

        TransAvgConfig trans_cfg = cfg.transavg;
        trans_cfg.seed = Rng::derive(cfg.seed, fnv1a(input.name) + 2);
        result.poses = bata_solve(working, rotations, dirs, trans_cfg, &result.trans_trace);
        result.ok = true;

        if (have_gt) {
            result.rotation_error_deg = graph_rotation_error(result.poses, *g.ground_truth);
            result.translation_error_m = graph_translation_error(result.poses, *g.ground_truth);
        }
    } catch (const Error& err) {
        result.ok = false;
        result.failure_reason = err.what();
    } catch (const std::exception& err) {
        result.ok = false;
        result.failure_reason = std::string("internal: ") + err.what();
    }
    return result;
}

BatchResult run_pipeline(const std::vector<NamedGraph>& graphs, const PipelineConfig& cfg) {
    BatchResult batch;
    batch.graphs.resize(graphs.size());

    if (cfg.jobs <= 1) {
        // serial reference path
        for (std::size_t k = 0; k < graphs.size(); ++k) {
            batch.graphs[k] = run_graph_pipeline(graphs[k], cfg);
        }
    } else {
#ifdef _OPENMP
        const auto count = static_cast<std::int64_t>(graphs.size());
#pragma omp parallel for schedule(dynamic) num_threads(cfg.jobs)
        for (std::int64_t k = 0; k < count; ++k) {
            batch.graphs[static_cast<std::size_t>(k)] =
                run_graph_pipeline(graphs[static_cast<std::size_t>(k)], cfg);
        }
#else
        for (std::size_t k = 0; k < graphs.size(); ++k) {
            batch.graphs[k] = run_graph_pipeline(graphs[k], cfg);
        }
#endif
    }

    std::vector<ViewGraph> eval_graphs;
    std::vector<AbsolutePoseSet> eval_preds;
    for (std::size_t k = 0; k < graphs.size(); ++k) {
        if (batch.graphs[k].ok && graphs[k].graph.ground_truth) {
            eval_graphs.push_back(graphs[k].graph);
            eval_preds.push_back(batch.graphs[k].poses);
        }
    }
    if (!eval_graphs.empty()) {
        batch.metrics = evaluate_dataset(eval_graphs, eval_preds);
        // graphs the solver refused because of multiple components count as
        // skipped, matching the evaluation skip rule
        std::size_t skipped = 0;
        for (const auto& r : batch.graphs) {
            if (!r.ok && r.failure_reason == "multi_component") ++skipped;
        }
        batch.metrics->n_graphs_skipped_multicomponent += skipped;
    }
    return batch;
}

std::string predictions_text(const BatchResult& batch) {
    std::vector<NamedPoses> sets;
    for (const auto& g : batch.graphs) {
        if (g.ok) sets.push_back({g.name, g.poses});
    }
    return serialize_poses(sets);
}

std::string report_json(const BatchResult& batch, const PipelineConfig& cfg) {
    json doc;
    doc["solver"] = to_string(cfg.rot_solver);
    doc["skip_repair"] = cfg.skip_repair;
    doc["n_graphs"] = batch.graphs.size();
    doc["n_ok"] = batch.n_ok();
    if (batch.metrics) {
        const MetricsReport& m = *batch.metrics;
        json jm;
        jm["rotation_median_deg"] = m.rotation_median_deg;
        jm["translation_median_m"] = m.translation_median_m;
        auto short_key = [](double t) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%g", t);
            return std::string(buf);
        };
        json rot_pct, trans_pct;
        for (const auto& [t, v] : m.rotation_pct_under) rot_pct[short_key(t)] = v;
        for (const auto& [t, v] : m.translation_pct_under) trans_pct[short_key(t)] = v;
        jm["rotation_pct_under"] = rot_pct;
        jm["translation_pct_under"] = trans_pct;
        jm["n_graphs_evaluated"] = m.n_graphs_evaluated;
        jm["n_graphs_skipped_multicomponent"] = m.n_graphs_skipped_multicomponent;
        doc["metrics"] = jm;
    }
    json per_graph = json::array();
    for (const auto& g : batch.graphs) {
        json jg;
        jg["name"] = g.name;
        jg["status"] = g.ok ? "ok" : "failed";
        jg["reason"] = g.failure_reason;
        if (g.rotation_error_deg) jg["rotation_error_deg"] = *g.rotation_error_deg;
        if (g.translation_error_m) jg["translation_error_m"] = *g.translation_error_m;
        if (g.repair) {
            jg["repair_changed_edges"] = [&g]() {
                int changed = 0;
                for (const auto& e : g.repair->edges) changed += e.output_index != 0 ? 1 : 0;
                return changed;
            }();
            jg["repair_cost_before"] = g.repair->cost_before;
            jg["repair_cost_after"] = g.repair->cost_after;
        }
        per_graph.push_back(jg);
    }
    doc["per_graph"] = per_graph;
    return doc.dump(2) + "\n";
}

std::string diagnostics_json(const BatchResult& batch) {
    json doc = json::array();
    for (const auto& g : batch.graphs) {
        json jg;
        jg["name"] = g.name;
        jg["rotation"]["robust_cost"] = g.rot_trace.robust_cost;
        jg["rotation"]["surrogate_cost"] = g.rot_trace.surrogate_cost;
        jg["rotation"]["iterations"] = g.rot_trace.iterations;
        json weights = json::object();
        for (const auto& [key, v] : g.rot_trace.final_edge_weights) {
            weights[std::to_string(key.first) + "-" + std::to_string(key.second)] = v;
        }
        jg["rotation"]["edge_weights"] = weights;
        json scores = json::object();
        for (const auto& [key, v] : g.rot_trace.final_edge_scores) {
            scores[std::to_string(key.first) + "-" + std::to_string(key.second)] = v;
        }
        jg["rotation"]["edge_scores"] = scores;
        jg["translation"]["robust_objective"] = g.trans_trace.robust_objective;
        jg["translation"]["weighted_objective"] = g.trans_trace.weighted_objective;
        jg["translation"]["center_sum_residual"] = g.trans_trace.center_sum_residual;
        jg["translation"]["scale_constraint_residual"] = g.trans_trace.scale_constraint_residual;
        jg["translation"]["outer_iterations"] = g.trans_trace.outer_iterations;
        json tw = json::object();
        for (const auto& [key, v] : g.trans_trace.final_edge_weights) {
            tw[std::to_string(key.first) + "-" + std::to_string(key.second)] = v;
        }
        jg["translation"]["edge_weights"] = tw;
        doc.push_back(jg);
    }
    return doc.dump(2) + "\n";
}

} // namespace mavg
