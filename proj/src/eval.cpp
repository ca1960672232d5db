#include "uavnav/eval.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "uavnav/ppo.hpp"

namespace uavnav {

const char* const kCellCsvHeader =
    "mu,sigma,denoiser,episodes,successes,collisions,timeouts,success_rate,mean_return,"
    "mean_length";

std::string cell_csv_row(const CellResult& r) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%s,%ld,%ld,%ld,%ld,%.9g,%.9g,%.9g", r.mu, r.sigma,
                  to_string(r.denoiser), r.episodes, r.successes, r.collisions, r.timeouts,
                  r.success_rate, r.mean_return, r.mean_length);
    return buf;
}

std::vector<CellResult> read_cell_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read results file: " + path);
    std::vector<CellResult> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first) {
            first = false;
            if (line != kCellCsvHeader) {
                throw std::runtime_error("malformed results file (bad header): " + path);
            }
            continue;
        }
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 10) continue;  // tolerate a truncated tail line
        try {
            CellResult r;
            r.mu = std::stod(fields[0]);
            r.sigma = std::stod(fields[1]);
            r.denoiser = parse_denoiser_kind(fields[2]);
            r.episodes = std::stol(fields[3]);
            r.successes = std::stol(fields[4]);
            r.collisions = std::stol(fields[5]);
            r.timeouts = std::stol(fields[6]);
            r.success_rate = std::stod(fields[7]);
            r.mean_return = std::stod(fields[8]);
            r.mean_length = std::stod(fields[9]);
            rows.push_back(r);
        } catch (const std::exception&) {
            continue;
        }
    }
    return rows;
}

CellResult evaluate_cell(Controller& controller, const EnvConfig& env_config,
                         const NoiseSpec& noise, DenoiserKind denoiser,
                         const FilterConfig& filter_config, long episodes, uint64_t cell_seed) {
    if (episodes <= 0) throw std::invalid_argument("evaluate_cell: episodes must be > 0");

    CellResult result;
    result.mu = noise.mu;
    result.sigma = noise.sigma;
    result.denoiser = denoiser;
    result.episodes = episodes;

    double return_sum = 0.0;
    long length_sum = 0;

    for (long ep = 0; ep < episodes; ++ep) {
        const uint64_t ep_seed = derive_seed(cell_seed, "episode", static_cast<uint64_t>(ep));
        ObsPipeline pipe(env_config, noise, denoiser, filter_config,
                         derive_seed(ep_seed, "env"), derive_seed(ep_seed, "noise"));
        controller.begin_episode();

        for (;;) {
            const StepOutcome out = pipe.advance(controller.act(pipe.pending_observation()));
            if (!out.terminal) continue;
            switch (pipe.finished_reason()) {
                case DoneReason::success: ++result.successes; break;
                case DoneReason::collision: ++result.collisions; break;
                case DoneReason::timeout: ++result.timeouts; break;
                case DoneReason::running: break;
            }
            return_sum += pipe.finished_return();
            length_sum += pipe.finished_length();
            break;
        }
    }

    result.success_rate = static_cast<double>(result.successes) / episodes;
    result.mean_return = return_sum / static_cast<double>(episodes);
    result.mean_length = static_cast<double>(length_sum) / static_cast<double>(episodes);
    return result;
}

std::vector<SweepCell> sweep_cells(const SweepSettings& sweep) {
    auto grid = [](double lo, double hi, double step) {
        std::vector<double> vals;
        if (step <= 0.0 || hi < lo) throw std::invalid_argument("sweep grid: bad range/step");
        const long n = std::lround((hi - lo) / step) + 1;
        vals.reserve(n);
        for (long i = 0; i < n; ++i) vals.push_back(lo + static_cast<double>(i) * step);
        return vals;
    };

    std::vector<double> mu_grid, sigma_grid;
    switch (sweep.kind) {
        case SweepKind::unbiased:
            mu_grid = {sweep.mu_min};
            sigma_grid = grid(sweep.sigma_min, sweep.sigma_max, sweep.sigma_step);
            break;
        case SweepKind::bias_only:
            mu_grid = grid(sweep.mu_min, sweep.mu_max, sweep.mu_step);
            sigma_grid = {sweep.sigma_min};
            break;
        case SweepKind::biased_grid:
            mu_grid = grid(sweep.mu_min, sweep.mu_max, sweep.mu_step);
            sigma_grid = grid(sweep.sigma_min, sweep.sigma_max, sweep.sigma_step);
            break;
    }
    if (sweep.denoisers.empty()) throw std::invalid_argument("sweep: no denoisers listed");
    if (sweep.episodes_per_cell <= 0) throw std::invalid_argument("sweep: episodes_per_cell > 0");

    std::vector<SweepCell> cells;
    cells.reserve(sweep.denoisers.size() * mu_grid.size() * sigma_grid.size());
    for (const DenoiserKind d : sweep.denoisers)
        for (const double mu : mu_grid)
            for (const double sigma : sigma_grid) cells.push_back({mu, sigma, d});
    return cells;
}

uint64_t cell_seed_for(uint64_t master_seed, const SweepCell& cell) {
    uint64_t seed = derive_seed(master_seed, "cell");
    seed = mix_seed(seed, std::bit_cast<uint64_t>(cell.mu));
    seed = mix_seed(seed, std::bit_cast<uint64_t>(cell.sigma));
    seed = mix_seed(seed, static_cast<uint64_t>(cell.denoiser));
    return seed;
}

namespace {

int resolve_threads(int requested, std::size_t cells) {
    int n = requested;
    if (n <= 0) {
        if (const char* env = std::getenv("UAVNAV_THREADS")) n = std::atoi(env);
    }
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    return static_cast<int>(std::min<std::size_t>(n, std::max<std::size_t>(cells, 1)));
}

}  // namespace

std::vector<CellResult> run_sweep(const ActorCritic& agent, const EnvConfig& env_config,
                                  const FilterConfig& filter_config, const SweepSettings& sweep,
                                  const std::string& csv_path, const SweepOptions& options) {
    const std::vector<SweepCell> cells = sweep_cells(sweep);

    // Resume: an existing file must hold a prefix of this sweep's rows.
    std::vector<CellResult> done_rows;
    if (std::ifstream probe(csv_path); probe.good()) {
        done_rows = read_cell_csv(csv_path);
        if (done_rows.size() > cells.size()) {
            throw std::runtime_error("results file has more rows than the sweep has cells: " +
                                     csv_path);
        }
        for (std::size_t i = 0; i < done_rows.size(); ++i) {
            const SweepCell& c = cells[i];
            char want_mu[32], want_sigma[32], got_mu[32], got_sigma[32];
            std::snprintf(want_mu, sizeof(want_mu), "%.9g", c.mu);
            std::snprintf(got_mu, sizeof(got_mu), "%.9g", done_rows[i].mu);
            std::snprintf(want_sigma, sizeof(want_sigma), "%.9g", c.sigma);
            std::snprintf(got_sigma, sizeof(got_sigma), "%.9g", done_rows[i].sigma);
            if (std::string(want_mu) != got_mu || std::string(want_sigma) != got_sigma ||
                done_rows[i].denoiser != c.denoiser) {
                throw std::runtime_error("results file does not match the sweep spec: " + csv_path);
            }
        }
    }

    const std::size_t first_pending = done_rows.size();
    std::size_t end_cell = cells.size();
    if (options.max_cells > 0) {
        end_cell = std::min(end_cell, first_pending + static_cast<std::size_t>(options.max_cells));
    }

    // Rewrite verified rows so a torn tail line from an interrupted run
    // cannot corrupt the file, then append from there.
    std::ofstream out(csv_path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write results file: " + csv_path);
    out << kCellCsvHeader << "\n";
    for (const CellResult& r : done_rows) out << cell_csv_row(r) << "\n";
    out.flush();

    const std::size_t n_pending = end_cell - first_pending;
    std::vector<CellResult> results(n_pending);
    std::vector<char> ready(n_pending, 0);
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::condition_variable cv;

    auto worker = [&]() {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= n_pending) return;
            const SweepCell& cell = cells[first_pending + k];
            MeanPolicyController controller(agent);
            const CellResult r =
                evaluate_cell(controller, env_config, NoiseSpec{cell.mu, cell.sigma},
                              cell.denoiser, filter_config, sweep.episodes_per_cell,
                              cell_seed_for(sweep.seed, cell));
            {
                std::lock_guard<std::mutex> lock(mu);
                results[k] = r;
                ready[k] = 1;
            }
            cv.notify_all();
        }
    };

    const int n_threads = resolve_threads(options.threads, n_pending);
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);

    // Commit rows strictly in grid order so the file is always a clean prefix.
    {
        std::unique_lock<std::mutex> lock(mu);
        for (std::size_t k = 0; k < n_pending; ++k) {
            cv.wait(lock, [&] { return ready[k] == 1; });
            out << cell_csv_row(results[k]) << "\n";
            out.flush();
            done_rows.push_back(results[k]);
            if (options.verbose) {
                std::fprintf(stderr, "cell %zu/%zu  mu=%.3g sigma=%.3g %s  success=%.3f\n",
                             first_pending + k + 1, cells.size(), results[k].mu, results[k].sigma,
                             to_string(results[k].denoiser), results[k].success_rate);
            }
        }
    }
    for (auto& t : pool) t.join();

    return done_rows;
}

void TrajectoryRecord::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trajectory file: " + path);
    out << "step,true_x,true_y,measured_x,measured_y,estimated_x,estimated_y,vx_raw,vy_raw,"
           "vmag_raw,reward\n";
    char buf[320];
    for (const TrajectoryPoint& p : points) {
        std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                      p.step, p.true_pos.x, p.true_pos.y, p.measured_pos.x, p.measured_pos.y,
                      p.estimated_pos.x, p.estimated_pos.y, p.action.vx_raw, p.action.vy_raw,
                      p.action.vmag_raw, p.reward);
        out << buf;
    }
}

TrajectoryRecord replay_episode(Controller& controller, const EnvConfig& env_config,
                                const NoiseSpec& noise, DenoiserKind denoiser,
                                const FilterConfig& filter_config, uint64_t seed) {
    env_config.validate();
    noise.validate();

    RngStream env_stream(derive_seed(seed, "env"));
    RngStream noise_stream(derive_seed(seed, "noise"));
    Denoiser den(denoiser, filter_config, noise.sigma, env_config.sample_rate_hz());

    TrajectoryRecord record;
    SimState state = reset_env(env_config, env_stream);
    record.initial_state = state;
    controller.begin_episode();

    Vec2 prev_cmd{0.0, 0.0};
    Vec2 measured = perturb_position(state.pos, noise, noise_stream);
    Vec2 estimate = den.step(measured, prev_cmd, env_config.dt);
    record.points.push_back({0, state.pos, measured, estimate, Action{}, 0.0});

    while (state.done_reason == DoneReason::running) {
        const Observation obs = observe_from(estimate, state, env_config);
        const Action action = controller.act(obs);
        prev_cmd = velocity_command(action, env_config);
        const StepOutcome out = step_env(state, action, env_config);
        record.episode_return += out.reward;
        measured = perturb_position(state.pos, noise, noise_stream);
        estimate = den.step(measured, prev_cmd, env_config.dt);
        record.points.push_back({state.step, state.pos, measured, estimate, action, out.reward});
    }
    record.outcome = state.done_reason;
    return record;
}

}  // namespace uavnav
