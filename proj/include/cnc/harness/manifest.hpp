#pragma once

#include "cnc/harness/config.hpp"

#include <iosfwd>

namespace cnc::harness {

// Plain-text run record: key = value lines. Holds no timestamps so that
// reruns produce identical files.
void write_manifest(std::ostream &out, const ExperimentConfig &cfg);

} // namespace cnc::harness
