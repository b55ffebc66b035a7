#include "cnc/harness/manifest.hpp"

#include <ostream>

#ifndef CNC_VERSION
#define CNC_VERSION "unknown"
#endif

namespace cnc::harness {

void write_manifest(std::ostream &out, const ExperimentConfig &cfg) {
    out << "experiment = " << cfg.experiment << '\n';
    out << "config_hash = " << config_hash(cfg) << '\n';
    out << "seed = " << cfg.seed << '\n';
    out << "trials = " << cfg.trials << '\n';
    out << "cnc_version = " << CNC_VERSION << '\n';
#if defined(__clang__)
    out << "compiler = clang " << __clang_version__ << '\n';
#elif defined(__GNUC__)
    out << "compiler = gcc " << __VERSION__ << '\n';
#endif
    out << "cxx_standard = " << __cplusplus << '\n';
    out << "config = " << canonical_json(cfg) << '\n';
}

} // namespace cnc::harness
