#pragma once

// Command layer shared by the CLI binary and the test suites: each command
// consumes a parsed config, runs the work, and writes its output directory
// (config snapshot, CSVs, JSON summary). Outputs contain no timestamps or
// host details, so identical config + seed gives byte-identical files.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "wfl/config.hpp"

namespace wfl::cmd {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<fl::Mode> mode;
    std::optional<std::string> out_dir;
    int threads = 1;
};

// Writes table.csv, table.iters.csv, summary.txt, config.snapshot.ini.
// Returns the output directory used.
std::string run_calibrate(const cfg::CalibrateConfig& config,
                          const std::string& snapshot, const Overrides& ov);

// Writes rounds.csv, summary.json, config.snapshot.ini.
std::string run_train(const cfg::TrainConfig& config,
                      const std::string& snapshot, const Overrides& ov);

// Writes bound.json (also echoed to `os`).
std::string run_bound(const cfg::BoundConfig& config,
                      const std::string& snapshot, const Overrides& ov,
                      std::ostream& os);

// Runs one of {lemma1, corollary1, energy, quantizer, gradients, all};
// prints one line per check to `os`; returns true when every check passed.
bool run_validate(const std::string& suite, std::ostream& os);

// 64-bit FNV-1a over a file's bytes, hex-encoded (audit hash for the
// calibration table a run consumed).
std::string file_hash_hex(const std::string& path);

void write_file(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

}  // namespace wfl::cmd
