#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mavg/pipeline.hpp"
#include "mavg/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitAllFailed = 4;

mavg::PipelineConfig load_config(const std::string& path) {
    std::string text;
    try {
        text = mavg::read_file(path);
    } catch (const mavg::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::exit(kExitIo);
    }
    try {
        return mavg::PipelineConfig::parse(text);
    } catch (const mavg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        std::exit(kExitConfig);
    }
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        std::cerr << "error: cannot create directory " << dir << ": " << ec.message() << "\n";
        std::exit(kExitIo);
    }
}

void write_or_die(const std::string& path, const std::string& content) {
    try {
        mavg::write_file(path, content);
    } catch (const mavg::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::exit(kExitIo);
    }
}

std::vector<mavg::NamedGraph> load_dataset(const std::string& path) {
    std::string text;
    try {
        text = mavg::read_file(path);
    } catch (const mavg::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::exit(kExitIo);
    }
    try {
        return mavg::parse_dataset(text);
    } catch (const mavg::Error& e) {
        std::cerr << "error: " << path << ": " << e.what() << "\n";
        std::exit(kExitIo);
    }
}

int cmd_generate(const std::string& config_path, const std::string& out_dir) {
    const mavg::PipelineConfig cfg = load_config(config_path);
    ensure_dir(out_dir);

    std::vector<mavg::NamedGraph> dataset;
    try {
        dataset = mavg::generate_dataset(cfg);
    } catch (const mavg::Error& e) {
        std::cerr << "generation error: " << e.what() << "\n";
        return kExitConfig;
    }

    write_or_die(out_dir + "/dataset.graphs", mavg::serialize_dataset(dataset));

    double mean_connectivity = 0.0;
    std::size_t n_edges = 0;
    for (const auto& g : dataset) {
        mean_connectivity += g.graph.connectivity();
        n_edges += g.graph.edges.size();
    }
    mean_connectivity /= static_cast<double>(dataset.size());

    json manifest;
    manifest["seed"] = cfg.seed;
    manifest["graph_count"] = dataset.size();
    manifest["total_edges"] = n_edges;
    manifest["mean_connectivity"] = mean_connectivity;
    manifest["config"] = cfg.to_text();
    write_or_die(out_dir + "/manifest.json", manifest.dump(2) + "\n");
    return kExitOk;
}

int cmd_pipeline(const std::string& config_path, const std::string& in_path,
                 const std::string& out_dir, bool skip_repair, const std::string& rotavg,
                 bool diagnostics, int jobs) {
    mavg::PipelineConfig cfg = load_config(config_path);
    if (skip_repair) cfg.skip_repair = true;
    if (!rotavg.empty()) {
        try {
            cfg.rot_solver = mavg::rot_solver_from_string(rotavg);
        } catch (const mavg::ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return kExitConfig;
        }
    }
    if (jobs > 0) cfg.jobs = jobs;

    const std::vector<mavg::NamedGraph> dataset = load_dataset(in_path);
    ensure_dir(out_dir);

    const mavg::BatchResult batch = mavg::run_pipeline(dataset, cfg);

    write_or_die(out_dir + "/predictions.poses", mavg::predictions_text(batch));
    if (batch.metrics) {
        write_or_die(out_dir + "/report.csv", batch.metrics->to_csv());
    }
    write_or_die(out_dir + "/report.json", mavg::report_json(batch, cfg));

    if (diagnostics) {
        write_or_die(out_dir + "/diagnostics.json", mavg::diagnostics_json(batch));
        std::vector<double> before, after;
        for (const auto& g : batch.graphs) {
            before.insert(before.end(), g.edge_errors_before_deg.begin(),
                          g.edge_errors_before_deg.end());
            after.insert(after.end(), g.edge_errors_after_deg.begin(),
                         g.edge_errors_after_deg.end());
        }
        if (!before.empty() && before.size() == after.size()) {
            write_or_die(out_dir + "/transfer_matrix.csv",
                         mavg::transfer_matrix(before, after).to_csv());
        }
    }

    for (const auto& g : batch.graphs) {
        if (!g.ok) {
            std::cerr << "graph " << g.name << " failed: " << g.failure_reason << "\n";
        }
    }
    return batch.n_ok() > 0 ? kExitOk : kExitAllFailed;
}

int cmd_analyze(const std::string& in_path, const std::string& out_dir, int restarts,
                int max_sweeps, double lambda_t) {
    const std::vector<mavg::NamedGraph> dataset = load_dataset(in_path);
    for (const auto& g : dataset) {
        if (!g.graph.ground_truth) {
            std::cerr << "error: graph " << g.name << " has no ground truth\n";
            return kExitConfig;
        }
    }
    ensure_dir(out_dir);

    std::vector<double> before, after;
    for (const auto& g : dataset) {
        mavg::RepairConfig rc;
        rc.restarts = restarts;
        rc.max_sweeps = max_sweeps;
        rc.lambda_t = lambda_t;
        const auto [repaired, report] = mavg::repair_graph(g.graph, rc);
        const auto eb = mavg::edge_rotation_errors_deg(g.graph);
        const auto ea = mavg::edge_rotation_errors_deg(repaired);
        before.insert(before.end(), eb.begin(), eb.end());
        after.insert(after.end(), ea.begin(), ea.end());
    }

    const auto lin_before = mavg::histogram(before, 5.0, 180.0);
    const auto lin_after = mavg::histogram(after, 5.0, 180.0);
    auto log_before = lin_before;
    log_before.scale = mavg::Histogram::Scale::Log10;
    auto log_after = lin_after;
    log_after.scale = mavg::Histogram::Scale::Log10;

    write_or_die(out_dir + "/hist_before_linear.csv", lin_before.to_csv());
    write_or_die(out_dir + "/hist_after_linear.csv", lin_after.to_csv());
    write_or_die(out_dir + "/hist_before_log10.csv", log_before.to_csv());
    write_or_die(out_dir + "/hist_after_log10.csv", log_after.to_csv());

    const mavg::TransferMatrix tm = mavg::transfer_matrix(before, after);
    write_or_die(out_dir + "/transfer_matrix.csv", tm.to_csv());
    write_or_die(out_dir + "/transfer_matrix.json", tm.to_json());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"motion averaging on small sparse view graphs"};
    app.require_subcommand(1);

    std::string config_path, out_dir, in_path, rotavg;
    bool skip_repair = false, diagnostics = false, dump_config = false;
    int jobs = 0, restarts = 8, max_sweeps = 50;
    double lambda_t = 1.0;

    auto* gen = app.add_subcommand("generate", "write a synthetic dataset");
    gen->add_option("--config", config_path, "config file")->required();
    gen->add_option("--out", out_dir, "output directory")->required();

    auto* pipe = app.add_subcommand("pipeline", "repair, rotation and translation averaging");
    pipe->add_option("--config", config_path, "config file")->required();
    pipe->add_option("--in", in_path, "input .graphs file")->required();
    pipe->add_option("--out", out_dir, "output directory")->required();
    pipe->add_flag("--skip-repair", skip_repair, "feed raw relative poses to the solvers");
    pipe->add_option("--rotavg", rotavg, "rotation solver: spectral | irls | iterative");
    pipe->add_flag("--diagnostics", diagnostics, "emit solver traces and the transfer matrix");
    pipe->add_option("--jobs", jobs, "parallel graphs (default: config value)");

    auto* ana = app.add_subcommand("analyze-chirality", "edge-error histograms and transfer matrix");
    ana->add_option("--in", in_path, "input .graphs file (with ground truth)")->required();
    ana->add_option("--out", out_dir, "output directory")->required();
    ana->add_option("--restarts", restarts, "repair restarts");
    ana->add_option("--max-sweeps", max_sweeps, "repair sweep cap");
    ana->add_option("--lambda-t", lambda_t, "coplanarity weight");

    auto* defaults = app.add_subcommand("default-config", "print the default config file");
    defaults->add_flag("--full", dump_config, "(no effect; all keys are always printed)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (gen->parsed()) return cmd_generate(config_path, out_dir);
        if (pipe->parsed()) {
            return cmd_pipeline(config_path, in_path, out_dir, skip_repair, rotavg, diagnostics,
                                jobs);
        }
        if (ana->parsed()) return cmd_analyze(in_path, out_dir, restarts, max_sweeps, lambda_t);
        if (defaults->parsed()) {
            std::cout << mavg::PipelineConfig{}.to_text();
            return kExitOk;
        }
    } catch (const mavg::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const mavg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const mavg::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAllFailed;
    }
    return kExitConfig;
}
