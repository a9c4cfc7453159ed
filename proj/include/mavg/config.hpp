#ifndef MAVG_CONFIG_HPP
#define MAVG_CONFIG_HPP

#include <cstdint>
#include <string>

#include "mavg/rotation_avg.hpp"
#include "mavg/synth.hpp"
#include "mavg/translation_avg.hpp"
#include "mavg/chirality.hpp"

namespace mavg {

enum class RotSolver { Spectral, Irls, Iterative };

/// Composite configuration for the batch pipeline, parsed from a plain-text
/// 'key = value' file with sections [scene] [noise] [rotavg] [transavg]
/// [run]. Unknown sections or keys are errors.
struct PipelineConfig {
    SceneConfig scene;
    NoiseModel noise;
    RepairConfig repair;
    RotAvgConfig rotavg;
    RotSolver rot_solver = RotSolver::Iterative;
    TransAvgConfig transavg;
    std::size_t dataset_size = 100;
    std::uint64_t seed = 1;
    int jobs = 1;
    bool skip_repair = false;

    static PipelineConfig parse(const std::string& text);
    static PipelineConfig parse_file(const std::string& path);

    /// Every setting in file syntax, usable as a starting config.
    std::string to_text() const;
};

RotSolver rot_solver_from_string(const std::string& name);
std::string to_string(RotSolver s);

} // namespace mavg

#endif // MAVG_CONFIG_HPP
