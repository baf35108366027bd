#pragma once

#include <string>

#include "lanesim/config.hpp"
#include "lanesim/runner.hpp"

namespace lanesim {

// Emitted files share one convention: a '#'-commented copy of the full
// config (including the seed) precedes the header row.

// checkpoint.bin, training_log.csv and config_used.cfg under out_dir.
void write_train_outputs(const ScenarioConfig& cfg, const TrainResult& result,
                         const std::string& out_dir);

// exits.csv, loops.csv and summary.csv under out_dir.
void write_eval_outputs(const ScenarioConfig& cfg, const EvalResult& result,
                        const std::string& out_dir);

// Runs a greedy evaluation while streaming trajectory.csv, then writes the
// remaining eval artifacts.
EvalResult evaluate_to_dir(const ScenarioConfig& cfg, const QNetwork& net,
                           const std::string& out_dir);

}  // namespace lanesim
