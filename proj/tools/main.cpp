#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "lanesim/artifacts.hpp"
#include "lanesim/checkpoint.hpp"
#include "lanesim/csv.hpp"
#include "lanesim/plot.hpp"
#include "lanesim/sweep.hpp"

namespace fs = std::filesystem;
using namespace lanesim;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<double> alpha;
    std::optional<long> steps;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "scenario config file (key = value lines)");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "master RNG seed");
    cmd->add_option("--alpha", opts.alpha, "lane-change cooperation coefficient");
    cmd->add_option("--steps", opts.steps, "simulation steps");
}

ScenarioConfig resolve_config(const CommonOpts& opts) {
    ScenarioConfig cfg;
    if (!opts.config_path.empty()) cfg = ScenarioConfig::from_file(opts.config_path);
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.alpha) cfg.reward.alpha = *opts.alpha;
    if (opts.steps) cfg.total_steps = *opts.steps;
    cfg.validate();
    return cfg;
}

int cmd_train(const CommonOpts& opts) {
    const ScenarioConfig cfg = resolve_config(opts);
    const TrainResult result = train(cfg);
    write_train_outputs(cfg, result, opts.out_dir);
    std::cout << "trained " << cfg.total_steps << " steps, " << result.updates
              << " updates -> " << opts.out_dir << "/checkpoint.bin\n";
    return 0;
}

int cmd_eval(const CommonOpts& opts, const std::string& checkpoint_path) {
    const ScenarioConfig cfg = resolve_config(opts);
    const Checkpoint ckpt = load_checkpoint(checkpoint_path);
    const EvalResult result = evaluate_to_dir(cfg, ckpt.net, opts.out_dir);
    std::cout << "evaluated " << cfg.total_steps << " steps: mean speed "
              << csv::num(result.summary.mean_speed) << " m/s, throughput "
              << csv::num(result.summary.throughput_veh_per_h) << " veh/h -> "
              << opts.out_dir << "\n";
    return 0;
}

std::vector<double> parse_list(const std::string& csv_text, const std::string& what) {
    std::vector<double> values;
    std::stringstream ss(csv_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw std::runtime_error(what + ": bad number '" + item + "'");
        }
    }
    if (values.empty()) throw std::runtime_error(what + ": empty list");
    return values;
}

int cmd_sweep(const CommonOpts& opts, const std::string& lanes_text,
              const std::string& tups_text, const std::string& alphas_text,
              int replicates, int parallel, long train_steps, long eval_steps,
              bool paper_scale) {
    ScenarioConfig base = resolve_config(opts);

    SweepOptions sweep;
    for (double v : parse_list(lanes_text, "--lanes")) {
        sweep.lane_counts.push_back(static_cast<int>(v));
    }
    sweep.t_ups = parse_list(tups_text, "--tups");
    if (!alphas_text.empty()) sweep.alphas = parse_list(alphas_text, "--alphas");
    sweep.replicates = replicates;
    sweep.parallel = parallel;
    if (paper_scale) {
        sweep.lane_counts = {2, 3, 4, 5, 6};
        sweep.replicates = 10;
    }
    if (opts.steps) train_steps = *opts.steps;

    const auto evaluator = make_train_eval_evaluator(base, train_steps, eval_steps);
    const SweepResult result = run_sweep(sweep, base.seed, evaluator);

    fs::create_directories(opts.out_dir);
    const std::string provenance = "lanesim run configuration\n" + base.serialize() +
                                   "train_steps = " + std::to_string(train_steps) +
                                   "\neval_steps = " + std::to_string(eval_steps);

    csv::Writer cells(opts.out_dir + "/sweep_cells.csv");
    cells.comment_block(provenance);
    cells.header("lane_count,t_up,alpha,replicate,mean_speed");
    for (const auto& cell : result.cells) {
        for (std::size_t r = 0; r < cell.speeds.size(); ++r) {
            cells.row(csv::num(static_cast<long>(cell.cell.lane_count)) + "," +
                      csv::num(cell.cell.t_up) + "," + csv::num(cell.cell.alpha) + "," +
                      csv::num(static_cast<long>(r)) + "," + csv::num(cell.speeds[r]));
        }
    }

    csv::Writer star(opts.out_dir + "/alpha_star.csv");
    star.comment_block(provenance);
    star.header("lane_count,t_up,alpha_star,best_speed");
    for (const auto& a : result.alpha_star) {
        star.row(csv::num(static_cast<long>(a.lane_count)) + "," + csv::num(a.t_up) + "," +
                 csv::num(a.alpha_star) + "," + csv::num(a.best_speed));
    }

    csv::Writer plane(opts.out_dir + "/plane.csv");
    plane.comment_block(provenance);
    plane.header("beta0,beta1,beta2");
    plane.row(csv::num(result.plane[0]) + "," + csv::num(result.plane[1]) + "," +
              csv::num(result.plane[2]));

    std::cout << "swept " << result.cells.size() << " cells x " << sweep.replicates
              << " replicates -> " << opts.out_dir << "\n";
    return 0;
}

int cmd_plot(const std::string& kind, const std::vector<std::string>& inputs,
             const std::vector<std::string>& labels, const std::string& out_dir) {
    if (inputs.empty()) throw std::runtime_error("plot: at least one --in CSV required");
    fs::create_directories(out_dir);
    std::vector<std::string> written;
    if (kind == "time_space") {
        written = plot_time_space(inputs.front(), out_dir);
    } else if (kind == "flow_density") {
        written.push_back(plot_flow_density(inputs, labels, out_dir + "/flow_density.svg"));
    } else if (kind == "alpha_surface") {
        written.push_back(plot_alpha_surface(inputs.front(), out_dir + "/alpha_surface.svg"));
    } else {
        throw std::runtime_error("plot: unknown kind '" + kind +
                                 "' (expected time_space, flow_density or alpha_surface)");
    }
    for (const auto& path : written) std::cout << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-lane highway microsimulator with a cooperative lane-changing DQN"};
    app.require_subcommand(1);

    CommonOpts train_opts;
    auto* train_cmd = app.add_subcommand("train", "train a policy in the configured scenario");
    add_common(train_cmd, train_opts);

    CommonOpts eval_opts;
    std::string checkpoint_path;
    auto* eval_cmd = app.add_subcommand("eval", "greedy rollout of a trained checkpoint");
    add_common(eval_cmd, eval_opts);
    eval_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();

    CommonOpts sweep_opts;
    std::string lanes_text = "2,3";
    std::string tups_text = "2,4,6";
    std::string alphas_text;
    int replicates = 3;
    int parallel = std::max(1u, std::thread::hardware_concurrency());
    long train_steps = 6000;
    long eval_steps = 4000;
    bool paper_scale = false;
    auto* sweep_cmd = app.add_subcommand("sweep", "alpha grid search with plane fit");
    add_common(sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--lanes", lanes_text, "lane counts, comma separated");
    sweep_cmd->add_option("--tups", tups_text, "departure intervals (s), comma separated");
    sweep_cmd->add_option("--alphas", alphas_text, "alpha values (default: the canonical 12)");
    sweep_cmd->add_option("--replicates", replicates, "seeded repetitions per cell");
    sweep_cmd->add_option("--parallel", parallel, "worker threads");
    sweep_cmd->add_option("--train-steps", train_steps, "training steps per cell");
    sweep_cmd->add_option("--eval-steps", eval_steps, "evaluation steps per cell");
    sweep_cmd->add_flag("--paper-scale", paper_scale, "2-6 lanes, 10 replicates");

    std::string plot_kind;
    std::vector<std::string> plot_inputs;
    std::vector<std::string> plot_labels;
    std::string plot_out = "out";
    auto* plot_cmd = app.add_subcommand("plot", "render CSV outputs as SVG");
    plot_cmd->add_option("--kind", plot_kind, "time_space | flow_density | alpha_surface")
        ->required();
    plot_cmd->add_option("--in", plot_inputs, "input CSV file(s)")->required();
    plot_cmd->add_option("--label", plot_labels, "legend label per input");
    plot_cmd->add_option("--out", plot_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_cmd->parsed()) return cmd_train(train_opts);
        if (eval_cmd->parsed()) return cmd_eval(eval_opts, checkpoint_path);
        if (sweep_cmd->parsed()) {
            return cmd_sweep(sweep_opts, lanes_text, tups_text, alphas_text, replicates,
                             parallel, train_steps, eval_steps, paper_scale);
        }
        if (plot_cmd->parsed()) return cmd_plot(plot_kind, plot_inputs, plot_labels, plot_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
