#pragma once

#include <string>
#include <vector>

#include "uavnav/eval.hpp"

namespace uavnav {

// Success-rate-vs-parameter line chart, one series per denoiser. `kind`
// selects the x axis: unbiased sweeps plot against sigma, bias-only against
// mu. Throws on empty input.
void render_sweep_lines(const std::vector<CellResult>& rows, SweepKind kind,
                        const std::string& svg_path);

// 2D success-rate heatmap over the (mu, sigma) grid (mu vertical, sigma
// horizontal, warm = high) with a colorbar. One file per denoiser present.
void render_sweep_heatmap(const std::vector<CellResult>& rows, const std::string& svg_path);

// Training curves from a train-log CSV: mean100 return and mean100 episode
// length against steps. Writes <prefix>_reward.svg and <prefix>_length.svg.
void render_train_curves(const std::string& trainlog_csv, const std::string& out_prefix);

// Top-down episode view: arena, safety inset, obstacles, goal disc, true
// path, and estimate dots.
void render_trajectory(const TrajectoryRecord& record, const EnvConfig& env_config,
                       const std::string& svg_path);

}  // namespace uavnav
