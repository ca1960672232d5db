#pragma once

#include <string>

#include "uavnav/agent.hpp"

namespace uavnav {

// Checkpoint file: a text header (magic, layer sizes, head activations,
// log-std) followed by all parameters as a flat little-endian float32 blob,
// actor first then critic, each layer as weights row-major then biases.
void save_checkpoint(const std::string& path, const ActorCritic& agent);

// Throws std::runtime_error on a missing file, bad magic, or shape/count
// mismatch.
ActorCritic load_checkpoint(const std::string& path);

}  // namespace uavnav
