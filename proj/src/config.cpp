#include "mavg/config.hpp"

#include <cstdlib>
#include <sstream>

#include "mavg/graph_io.hpp"

namespace mavg {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end != value.c_str() + value.size() || value.empty()) {
        throw ConfigError("bad numeric value for " + key + ": '" + value + "'");
    }
    return v;
}

long to_long(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const long v = std::strtol(value.c_str(), &end, 10);
    if (end != value.c_str() + value.size() || value.empty()) {
        throw ConfigError("bad integer value for " + key + ": '" + value + "'");
    }
    return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (end != value.c_str() + value.size() || value.empty()) {
        throw ConfigError("bad seed value for " + key + ": '" + value + "'");
    }
    return v;
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("bad boolean value for " + key + ": '" + value + "'");
}

RobustLoss robust_loss_from_string(const std::string& v) {
    if (v == "l2") return RobustLoss::L2;
    if (v == "huber") return RobustLoss::Huber;
    if (v == "geman_mcclure") return RobustLoss::GemanMcClure;
    throw ConfigError("unknown robust_loss '" + v + "' (l2 | huber | geman_mcclure)");
}

MEstimator m_estimator_from_string(const std::string& v) {
    if (v == "l2") return MEstimator::L2;
    if (v == "huber") return MEstimator::Huber;
    if (v == "cauchy") return MEstimator::Cauchy;
    throw ConfigError("unknown m_estimator '" + v + "' (l2 | huber | cauchy)");
}

std::string to_string(RobustLoss l) {
    switch (l) {
        case RobustLoss::L2: return "l2";
        case RobustLoss::Huber: return "huber";
        case RobustLoss::GemanMcClure: return "geman_mcclure";
    }
    return "l2";
}

std::string to_string(MEstimator m) {
    switch (m) {
        case MEstimator::L2: return "l2";
        case MEstimator::Huber: return "huber";
        case MEstimator::Cauchy: return "cauchy";
    }
    return "l2";
}

} // namespace

RotSolver rot_solver_from_string(const std::string& name) {
    if (name == "spectral") return RotSolver::Spectral;
    if (name == "irls") return RotSolver::Irls;
    if (name == "iterative") return RotSolver::Iterative;
    throw ConfigError("unknown rotation solver '" + name + "' (spectral | irls | iterative)");
}

std::string to_string(RotSolver s) {
    switch (s) {
        case RotSolver::Spectral: return "spectral";
        case RotSolver::Irls: return "irls";
        case RotSolver::Iterative: return "iterative";
    }
    return "iterative";
}

PipelineConfig PipelineConfig::parse(const std::string& text) {
    PipelineConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.resize(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            }
            section = line.substr(1, line.size() - 2);
            if (section != "scene" && section != "noise" && section != "rotavg" &&
                section != "transavg" && section != "run") {
                throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" +
                                  section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string qualified = section + "." + key;

        if (section == "scene") {
            if (key == "n_nodes") cfg.scene.n_nodes = static_cast<int>(to_long(qualified, value));
            else if (key == "target_connectivity") cfg.scene.target_connectivity = to_double(qualified, value);
            else if (key == "radius") cfg.scene.radius = to_double(qualified, value);
            else if (key == "look_at_jitter_deg") cfg.scene.look_at_jitter_deg = to_double(qualified, value);
            else if (key == "emit_boxes") cfg.scene.emit_boxes = to_bool(qualified, value);
            else throw ConfigError("unknown key " + qualified);
        } else if (section == "noise") {
            if (key == "rot_sigma_deg") cfg.noise.rot_sigma_deg = to_double(qualified, value);
            else if (key == "dir_sigma_deg") cfg.noise.dir_sigma_deg = to_double(qualified, value);
            else if (key == "chirality_flip_prob") cfg.noise.chirality_flip_prob = to_double(qualified, value);
            else if (key == "flip_weight_twist") cfg.noise.flip_kind_weights[0] = to_double(qualified, value);
            else if (key == "flip_weight_negate_t") cfg.noise.flip_kind_weights[1] = to_double(qualified, value);
            else if (key == "flip_weight_twist_negate") cfg.noise.flip_kind_weights[2] = to_double(qualified, value);
            else throw ConfigError("unknown key " + qualified);
        } else if (section == "rotavg") {
            if (key == "solver") cfg.rot_solver = rot_solver_from_string(value);
            else if (key == "robust_loss") cfg.rotavg.robust_loss = robust_loss_from_string(value);
            else if (key == "loss_scale") cfg.rotavg.loss_scale = to_double(qualified, value);
            else if (key == "max_irls_iters") cfg.rotavg.max_irls_iters = static_cast<int>(to_long(qualified, value));
            else if (key == "irls_tol") cfg.rotavg.irls_tol = to_double(qualified, value);
            else if (key == "node_sweeps") cfg.rotavg.node_sweeps = static_cast<int>(to_long(qualified, value));
            else if (key == "edge_sweeps") cfg.rotavg.edge_sweeps = static_cast<int>(to_long(qualified, value));
            else if (key == "rounds") cfg.rotavg.rounds = static_cast<int>(to_long(qualified, value));
            else if (key == "temperature") cfg.rotavg.temperature = to_double(qualified, value);
            else if (key == "anchor") cfg.rotavg.anchor = static_cast<NodeId>(to_long(qualified, value));
            else if (key == "random_init") cfg.rotavg.random_init = to_bool(qualified, value);
            else throw ConfigError("unknown key " + qualified);
        } else if (section == "transavg") {
            if (key == "m_estimator") cfg.transavg.m_estimator = m_estimator_from_string(value);
            else if (key == "estimator_scale") cfg.transavg.estimator_scale = to_double(qualified, value);
            else if (key == "outer_irls_iters") cfg.transavg.outer_irls_iters = static_cast<int>(to_long(qualified, value));
            else if (key == "inner_alternations") cfg.transavg.inner_alternations = static_cast<int>(to_long(qualified, value));
            else if (key == "tol") cfg.transavg.tol = to_double(qualified, value);
            else if (key == "d_floor") cfg.transavg.d_floor = to_double(qualified, value);
            else if (key == "rotation_residual_on") cfg.transavg.rotation_residual_on = to_bool(qualified, value);
            else throw ConfigError("unknown key " + qualified);
        } else if (section == "run") {
            if (key == "dataset_size") {
                const long v = to_long(qualified, value);
                if (v <= 0) throw ConfigError("dataset size must be positive");
                cfg.dataset_size = static_cast<std::size_t>(v);
            } else if (key == "seed") {
                cfg.seed = to_u64(qualified, value);
            } else if (key == "jobs") {
                const long v = to_long(qualified, value);
                if (v < 1) throw ConfigError("jobs must be at least 1");
                cfg.jobs = static_cast<int>(v);
            } else if (key == "repair_max_sweeps") {
                cfg.repair.max_sweeps = static_cast<int>(to_long(qualified, value));
            } else if (key == "repair_restarts") {
                cfg.repair.restarts = static_cast<int>(to_long(qualified, value));
            } else if (key == "repair_lambda_t") {
                cfg.repair.lambda_t = to_double(qualified, value);
            } else if (key == "skip_repair") {
                cfg.skip_repair = to_bool(qualified, value);
            } else {
                throw ConfigError("unknown key " + qualified);
            }
        } else {
            throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
        }
    }
    cfg.scene.validate();
    cfg.noise.validate();
    cfg.rotavg.validate();
    cfg.transavg.validate();
    return cfg;
}

PipelineConfig PipelineConfig::parse_file(const std::string& path) {
    return parse(read_file(path));
}

std::string PipelineConfig::to_text() const {
    std::string out;
    out += "[scene]\n";
    out += "n_nodes = " + std::to_string(scene.n_nodes) + "\n";
    out += "target_connectivity = " + format_double(scene.target_connectivity) + "\n";
    out += "radius = " + format_double(scene.radius) + "\n";
    out += "look_at_jitter_deg = " + format_double(scene.look_at_jitter_deg) + "\n";
    out += "emit_boxes = " + std::string(scene.emit_boxes ? "true" : "false") + "\n";
    out += "\n[noise]\n";
    out += "rot_sigma_deg = " + format_double(noise.rot_sigma_deg) + "\n";
    out += "dir_sigma_deg = " + format_double(noise.dir_sigma_deg) + "\n";
    out += "chirality_flip_prob = " + format_double(noise.chirality_flip_prob) + "\n";
    out += "flip_weight_twist = " + format_double(noise.flip_kind_weights[0]) + "\n";
    out += "flip_weight_negate_t = " + format_double(noise.flip_kind_weights[1]) + "\n";
    out += "flip_weight_twist_negate = " + format_double(noise.flip_kind_weights[2]) + "\n";
    out += "\n[rotavg]\n";
    out += "solver = " + to_string(rot_solver) + "\n";
    out += "robust_loss = " + to_string(rotavg.robust_loss) + "\n";
    out += "loss_scale = " + format_double(rotavg.loss_scale) + "\n";
    out += "max_irls_iters = " + std::to_string(rotavg.max_irls_iters) + "\n";
    out += "irls_tol = " + format_double(rotavg.irls_tol) + "\n";
    out += "node_sweeps = " + std::to_string(rotavg.node_sweeps) + "\n";
    out += "edge_sweeps = " + std::to_string(rotavg.edge_sweeps) + "\n";
    out += "rounds = " + std::to_string(rotavg.rounds) + "\n";
    out += "temperature = " + format_double(rotavg.temperature) + "\n";
    out += "anchor = " + std::to_string(rotavg.anchor) + "\n";
    out += "random_init = " + std::string(rotavg.random_init ? "true" : "false") + "\n";
    out += "\n[transavg]\n";
    out += "m_estimator = " + to_string(transavg.m_estimator) + "\n";
    out += "estimator_scale = " + format_double(transavg.estimator_scale) + "\n";
    out += "outer_irls_iters = " + std::to_string(transavg.outer_irls_iters) + "\n";
    out += "inner_alternations = " + std::to_string(transavg.inner_alternations) + "\n";
    out += "tol = " + format_double(transavg.tol) + "\n";
    out += "d_floor = " + format_double(transavg.d_floor) + "\n";
    out += "rotation_residual_on = " + std::string(transavg.rotation_residual_on ? "true" : "false") + "\n";
    out += "\n[run]\n";
    out += "dataset_size = " + std::to_string(dataset_size) + "\n";
    out += "seed = " + std::to_string(seed) + "\n";
    out += "jobs = " + std::to_string(jobs) + "\n";
    out += "repair_max_sweeps = " + std::to_string(repair.max_sweeps) + "\n";
    out += "repair_restarts = " + std::to_string(repair.restarts) + "\n";
    out += "repair_lambda_t = " + format_double(repair.lambda_t) + "\n";
    out += "skip_repair = " + std::string(skip_repair ? "true" : "false") + "\n";
    return out;
}

} // namespace mavg
