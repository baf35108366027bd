#include "lanesim/artifacts.hpp"

#include <filesystem>
#include <fstream>

#include "lanesim/checkpoint.hpp"
#include "lanesim/csv.hpp"

namespace lanesim {

namespace {

std::string provenance(const ScenarioConfig& cfg) {
    return "lanesim run configuration\n" + cfg.serialize();
}

}  // namespace

void write_train_outputs(const ScenarioConfig& cfg, const TrainResult& result,
                         const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    save_checkpoint(out_dir + "/checkpoint.bin", result.net, cfg.dqn);

    csv::Writer log(out_dir + "/training_log.csv");
    log.comment_block(provenance(cfg));
    log.header("step,loss,mean_reward,mean_speed");
    for (const auto& row : result.log) {
        log.row(csv::num(row.step) + "," + csv::num(row.loss) + "," +
                csv::num(row.mean_reward) + "," + csv::num(row.mean_speed));
    }

    std::ofstream used(out_dir + "/config_used.cfg");
    used << cfg.serialize();
}

void write_eval_outputs(const ScenarioConfig& cfg, const EvalResult& result,
                        const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);

    csv::Writer exits(out_dir + "/exits.csv");
    exits.comment_block(provenance(cfg));
    exits.header("vehicle_id,spawn_step,exit_step,mean_speed");
    for (const auto& e : result.exits) {
        exits.row(csv::num(static_cast<long>(e.vehicle_id)) + "," + csv::num(e.spawn_step) +
                  "," + csv::num(e.exit_step) + "," + csv::num(e.mean_speed));
    }

    csv::Writer loops(out_dir + "/loops.csv");
    loops.comment_block(provenance(cfg));
    loops.header("loop_x,window_start_step,flow_veh_per_h,density_veh_per_km,space_mean_speed");
    for (const auto& rec : result.flow_density) {
        loops.row(csv::num(rec.loop_x) + "," + csv::num(rec.window_start_step) + "," +
                  csv::num(rec.flow_veh_per_h) + "," + csv::num(rec.density_veh_per_km) +
                  "," + csv::num(rec.space_mean_speed));
    }

    csv::Writer summary(out_dir + "/summary.csv");
    summary.comment_block(provenance(cfg));
    summary.header("metric,value");
    const auto& s = result.summary;
    summary.row("mean_speed," + csv::num(s.mean_speed));
    summary.row("mean_expected_speed," + csv::num(s.mean_expected_speed));
    summary.row("throughput_veh_per_h," + csv::num(s.throughput_veh_per_h));
    summary.row("lane_changes," + csv::num(s.lane_changes));
    summary.row("lane_changes_per_vehicle_km," + csv::num(s.lane_changes_per_vehicle_km));
    summary.row("total_spawned," + csv::num(s.total_spawned));
    summary.row("total_exited," + csv::num(s.total_exited));
    for (std::size_t lane = 0; lane < s.tail_lane_mean_speed.size(); ++lane) {
        summary.row("tail_mean_speed_lane" + std::to_string(lane) + "," +
                    csv::num(s.tail_lane_mean_speed[lane]));
    }
}

EvalResult evaluate_to_dir(const ScenarioConfig& cfg, const QNetwork& net,
                           const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    csv::Writer trajectory(out_dir + "/trajectory.csv");
    trajectory.comment_block(provenance(cfg));
    trajectory.header("step,vehicle_id,lane,x,y,v,v_y,changing");
    EvalResult result = evaluate(cfg, net, [&](const TrajectoryRow& row) {
        trajectory.row(csv::num(row.step) + "," + csv::num(static_cast<long>(row.vehicle_id)) +
                       "," + csv::num(static_cast<long>(row.lane)) + "," + csv::num(row.x) +
                       "," + csv::num(row.y) + "," + csv::num(row.v) + "," +
                       csv::num(row.v_y) + "," + (row.changing ? "1" : "0"));
    });
    write_eval_outputs(cfg, result, out_dir);
    return result;
}

}  // namespace lanesim
