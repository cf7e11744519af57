#pragma once

// Experiment configuration: INI-style sections of typed key = value
// pairs. Validation is schema-driven and collects every problem before
// reporting (unknown keys and sections are errors), so a bad file is fixed
// in one pass.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wfl/calibration.hpp"
#include "wfl/dataset.hpp"
#include "wfl/engine.hpp"
#include "wfl/model.hpp"

namespace wfl::cfg {

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

  private:
    std::vector<std::string> problems_;
};

struct IniDoc {
    // section -> key -> raw value (whitespace-trimmed)
    std::map<std::string, std::map<std::string, std::string>> sections;
    std::string raw_text;  // byte-exact snapshot of the input

    static IniDoc parse_file(const std::string& path);
    static IniDoc parse_text(const std::string& text);
};

struct DatasetSection {
    std::string kind = "synthetic_blobs";  // or "csv"
    data::BlobsParams blobs;
    std::string csv_path;

    data::Dataset build() const;
};

struct TrainConfig {
    fl::FlConfig fl;
    fl::ModelSpec model;
    DatasetSection dataset;
    int code_n = 1008;
    std::uint64_t code_seed = 7;
    bool plain_min_sum = false;
    std::string calibration_table_path;  // required unless error_free
    std::string output_dir;
};

struct CalibrateConfig {
    calib::CalibrationJob job;
    int code_n = 1008;
    std::uint64_t code_seed = 7;
    bool plain_min_sum = false;
    std::string output_dir;
    int threads = 1;
};

struct BoundConfig {
    energy::BoundConstants constants;
    bool eta_from_theorem = false;  // eta = 1/(L sqrt(RE))
    std::int64_t dim = 1;
    // BER sequence source: constant or the adaptive schedule
    double fixed_ber = 0.0;
    bool use_schedule = false;
    sched::BerSchedule schedule;
    std::string output_dir;
};

TrainConfig parse_train_config(const IniDoc& doc);
CalibrateConfig parse_calibrate_config(const IniDoc& doc);
BoundConfig parse_bound_config(const IniDoc& doc);

}  // namespace wfl::cfg
