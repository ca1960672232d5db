#pragma once

namespace uavnav {

// Compact oracle/property suite behind the `selftest` CLI subcommand. Prints
// one line per check; returns true when everything passed.
bool run_selftest();

}  // namespace uavnav
