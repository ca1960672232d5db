#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "uavnav/agent.hpp"
#include "uavnav/config.hpp"
#include "uavnav/env.hpp"
#include "uavnav/filters.hpp"
#include "uavnav/noise.hpp"

namespace uavnav {

// Anything that can fly an episode. begin_episode() lets scripted test
// controllers draw per-episode randomness of their own.
class Controller {
   public:
    virtual ~Controller() = default;
    virtual void begin_episode() {}
    virtual Action act(const Observation& obs) = 0;
};

// Deterministic evaluation policy: the actor's mean action, no sampling.
class MeanPolicyController : public Controller {
   public:
    explicit MeanPolicyController(const ActorCritic& agent) : agent_(&agent) {}
    Action act(const Observation& obs) override { return to_action(agent_->action_mean(obs)); }

   private:
    const ActorCritic* agent_;
};

struct CellResult {
    double mu = 0.0;
    double sigma = 0.0;
    DenoiserKind denoiser = DenoiserKind::none;
    long episodes = 0;
    long successes = 0;
    long collisions = 0;
    long timeouts = 0;
    double success_rate = 0.0;
    double mean_return = 0.0;
    double mean_length = 0.0;
};

// Header and 9-significant-digit row formatting shared by writer and tests.
extern const char* const kCellCsvHeader;
std::string cell_csv_row(const CellResult& r);
std::vector<CellResult> read_cell_csv(const std::string& path);  // skips malformed tail lines

// Runs `episodes` seeded episodes; per-episode streams derive from the cell
// seed and episode index only, so any execution order yields the same
// numbers.
CellResult evaluate_cell(Controller& controller, const EnvConfig& env_config,
                         const NoiseSpec& noise, DenoiserKind denoiser,
                         const FilterConfig& filter_config, long episodes, uint64_t cell_seed);

struct SweepCell {
    double mu = 0.0;
    double sigma = 0.0;
    DenoiserKind denoiser = DenoiserKind::none;
};

// Grid expansion: denoisers outermost, then mu, then sigma.
std::vector<SweepCell> sweep_cells(const SweepSettings& sweep);

// Seed for one cell, a pure function of the master seed and the cell
// coordinates (never of execution order).
uint64_t cell_seed_for(uint64_t master_seed, const SweepCell& cell);

struct SweepOptions {
    int threads = 0;        // 0: UAVNAV_THREADS env var, else hardware concurrency
    long max_cells = 0;     // stop after this many newly evaluated cells (0: no limit)
    bool verbose = false;
};

// Evaluates every cell of the sweep against `csv_path`, appending rows in
// grid order as cells complete. Already-present rows are verified against
// the spec and skipped, so an interrupted sweep resumes to a byte-identical
// final file. Returns all rows present after the run.
std::vector<CellResult> run_sweep(const ActorCritic& agent, const EnvConfig& env_config,
                                  const FilterConfig& filter_config, const SweepSettings& sweep,
                                  const std::string& csv_path, const SweepOptions& options = {});

struct TrajectoryPoint {
    int step = 0;
    Vec2 true_pos;
    Vec2 measured_pos;
    Vec2 estimated_pos;
    Action action;
    double reward = 0.0;
};

struct TrajectoryRecord {
    std::vector<TrajectoryPoint> points;  // first entry is the pre-step spawn
    DoneReason outcome = DoneReason::running;
    double episode_return = 0.0;
    SimState initial_state;  // spawn layout for rendering

    void write_csv(const std::string& path) const;
};

// One recorded episode under the given noise/denoiser pipeline.
TrajectoryRecord replay_episode(Controller& controller, const EnvConfig& env_config,
                                const NoiseSpec& noise, DenoiserKind denoiser,
                                const FilterConfig& filter_config, uint64_t seed);

}  // namespace uavnav
