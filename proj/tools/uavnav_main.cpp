#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "uavnav/checkpoint.hpp"
#include "uavnav/config.hpp"
#include "uavnav/eval.hpp"
#include "uavnav/plot.hpp"
#include "uavnav/ppo.hpp"
#include "uavnav/selftest.hpp"

namespace {

using namespace uavnav;

int cmd_train(const std::string& config_path, uint64_t seed, const std::string& out_dir,
              bool quiet) {
    const RunConfig cfg = load_config(config_path);
    TrainSettings settings;
    settings.env = cfg.env;
    settings.noise = cfg.noise.effective();
    settings.denoiser = cfg.filter.kind;
    settings.filter = cfg.filter;
    settings.ppo = cfg.ppo;
    settings.master_seed = seed;
    settings.out_dir = out_dir;
    settings.verbose = !quiet;

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        save_config(cfg, out_dir + "/config.ini");
    }
    const TrainResult result = train(settings);
    if (!out_dir.empty()) {
        std::printf("checkpoint: %s/checkpoint.ckpt\n", out_dir.c_str());
        std::printf("train log:  %s/trainlog.csv\n", out_dir.c_str());
    }
    if (!result.log.episodes.empty()) {
        const EpisodeRow& last = result.log.episodes.back();
        std::printf("episodes %ld  mean100_return %.1f  mean100_len %.1f\n", last.episode,
                    last.mean100_return, last.mean100_len);
    }
    return 0;
}

ActorCritic load_checkpoint_checked(const std::string& path) {
    if (!std::filesystem::exists(path)) {
        throw std::runtime_error("checkpoint not found: " + path);
    }
    return load_checkpoint(path);
}

int cmd_eval(const std::string& config_path, const std::string& checkpoint_path, long episodes,
             uint64_t seed, double mu_override, double sigma_override, bool has_mu, bool has_sigma,
             const std::string& denoiser_override) {
    const RunConfig cfg = load_config(config_path);
    const ActorCritic agent = load_checkpoint_checked(checkpoint_path);

    NoiseSpec noise = cfg.noise.effective();
    if (has_mu) noise.mu = mu_override;
    if (has_sigma) noise.sigma = sigma_override;
    DenoiserKind kind = cfg.filter.kind;
    if (!denoiser_override.empty()) kind = parse_denoiser_kind(denoiser_override);
    if (episodes <= 0) episodes = cfg.sweep.episodes_per_cell;

    MeanPolicyController controller(agent);
    const CellResult r = evaluate_cell(controller, cfg.env, noise, kind, cfg.filter, episodes,
                                       cell_seed_for(seed, {noise.mu, noise.sigma, kind}));
    std::printf("%s\n%s\n", kCellCsvHeader, cell_csv_row(r).c_str());
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& checkpoint_path,
              const std::string& kind_override, const std::string& out_csv, long episodes,
              uint64_t seed, bool has_seed, long max_cells, int threads, bool quiet) {
    RunConfig cfg = load_config(config_path);
    const ActorCritic agent = load_checkpoint_checked(checkpoint_path);

    if (!kind_override.empty()) cfg.sweep.kind = parse_sweep_kind(kind_override);
    if (episodes > 0) cfg.sweep.episodes_per_cell = episodes;
    if (has_seed) cfg.sweep.seed = seed;

    SweepOptions options;
    options.max_cells = max_cells;
    options.threads = threads;
    options.verbose = !quiet;
    const auto rows = run_sweep(agent, cfg.env, cfg.filter, cfg.sweep, out_csv, options);
    std::printf("%zu/%zu cells in %s\n", rows.size(), sweep_cells(cfg.sweep).size(),
                out_csv.c_str());
    return 0;
}

int cmd_plot(const std::string& results_path, const std::string& kind, const std::string& out) {
    if (kind == "train") {
        const std::string prefix =
            out.empty() ? std::filesystem::path(results_path).stem().string() : out;
        render_train_curves(results_path, prefix);
        std::printf("wrote %s_reward.svg and %s_length.svg\n", prefix.c_str(), prefix.c_str());
        return 0;
    }
    const auto rows = read_cell_csv(results_path);
    const std::string svg = out.empty()
                                ? std::filesystem::path(results_path).stem().string() + ".svg"
                                : out;
    if (kind == "biased") {
        render_sweep_heatmap(rows, svg);
    } else {
        render_sweep_lines(rows, parse_sweep_kind(kind), svg);
    }
    std::printf("wrote %s\n", svg.c_str());
    return 0;
}

int cmd_replay(const std::string& config_path, const std::string& checkpoint_path, uint64_t seed,
               const std::string& out_prefix) {
    const RunConfig cfg = load_config(config_path);
    const ActorCritic agent = load_checkpoint_checked(checkpoint_path);

    MeanPolicyController controller(agent);
    const TrajectoryRecord record = replay_episode(controller, cfg.env, cfg.noise.effective(),
                                                   cfg.filter.kind, cfg.filter, seed);
    record.write_csv(out_prefix + ".csv");
    render_trajectory(record, cfg.env, out_prefix + ".svg");
    std::printf("outcome: %s  return: %.2f  steps: %zu\n", to_string(record.outcome),
                record.episode_return, record.points.size() - 1);
    std::printf("wrote %s.csv and %s.svg\n", out_prefix.c_str(), out_prefix.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D UAV waypoint-navigation lab: PPO training and noise-robustness evaluation"};
    app.require_subcommand(1);

    std::string config_path, checkpoint_path, out_path, kind, denoiser;
    uint64_t seed = 1;
    long episodes = 0, max_cells = 0;
    int threads = 0;
    bool quiet = false;
    double mu = 0.0, sigma = 0.0;

    auto* train_cmd = app.add_subcommand("train", "train a policy from a config file");
    train_cmd->add_option("config", config_path, "config file")->required();
    train_cmd->add_option("--seed", seed, "master seed (default 1)");
    train_cmd->add_option("--out", out_path, "output directory for checkpoint and train log");
    train_cmd->add_flag("--quiet", quiet, "suppress progress lines");

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on one noise cell");
    eval_cmd->add_option("config", config_path, "config file")->required();
    eval_cmd->add_option("--checkpoint", checkpoint_path, "policy checkpoint")->required();
    eval_cmd->add_option("--episodes", episodes, "episodes (default: sweep.episodes_per_cell)");
    eval_cmd->add_option("--seed", seed, "master seed (default 1)");
    auto* mu_opt = eval_cmd->add_option("--mu", mu, "override noise mu");
    auto* sigma_opt = eval_cmd->add_option("--sigma", sigma, "override noise sigma");
    eval_cmd->add_option("--denoiser", denoiser, "override denoiser kind {none,lpf,kalman}");

    auto* sweep_cmd = app.add_subcommand("sweep", "run a noise sweep against a checkpoint");
    sweep_cmd->add_option("config", config_path, "config file")->required();
    sweep_cmd->add_option("--checkpoint", checkpoint_path, "policy checkpoint")->required();
    sweep_cmd->add_option("--kind", kind, "sweep kind {unbiased,bias_only,biased}");
    sweep_cmd->add_option("--out", out_path, "output CSV (default sweep.csv)");
    sweep_cmd->add_option("--episodes", episodes, "episodes per cell override");
    auto* sweep_seed_opt = sweep_cmd->add_option("--seed", seed, "master seed override");
    sweep_cmd->add_option("--max-cells", max_cells, "stop after this many new cells");
    sweep_cmd->add_option("--threads", threads, "worker threads (default: UAVNAV_THREADS or all)");
    sweep_cmd->add_flag("--quiet", quiet, "suppress per-cell progress");

    auto* plot_cmd = app.add_subcommand("plot", "render sweep results or training curves to SVG");
    plot_cmd->add_option("results", config_path, "results CSV (or train log for --kind train)")
        ->required();
    plot_cmd->add_option("--kind", kind, "{unbiased,bias_only,biased,train}")->required();
    plot_cmd->add_option("--out", out_path, "output SVG path (or prefix for train)");

    auto* replay_cmd = app.add_subcommand("replay", "record and render one evaluation episode");
    replay_cmd->add_option("config", config_path, "config file")->required();
    replay_cmd->add_option("--checkpoint", checkpoint_path, "policy checkpoint")->required();
    replay_cmd->add_option("--seed", seed, "episode seed (default 1)");
    replay_cmd->add_option("--out", out_path, "output prefix (default replay)");

    auto* selftest_cmd = app.add_subcommand("selftest", "run the built-in oracle/property suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_cmd) return cmd_train(config_path, seed, out_path, quiet);
        if (*eval_cmd) {
            return cmd_eval(config_path, checkpoint_path, episodes, seed, mu, sigma,
                            mu_opt->count() > 0, sigma_opt->count() > 0, denoiser);
        }
        if (*sweep_cmd) {
            return cmd_sweep(config_path, checkpoint_path, kind,
                             out_path.empty() ? "sweep.csv" : out_path, episodes, seed,
                             sweep_seed_opt->count() > 0, max_cells, threads, quiet);
        }
        if (*plot_cmd) return cmd_plot(config_path, kind, out_path);
        if (*replay_cmd) {
            return cmd_replay(config_path, checkpoint_path, seed,
                              out_path.empty() ? "replay" : out_path);
        }
        if (*selftest_cmd) return run_selftest() ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
