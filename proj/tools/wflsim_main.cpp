// wflsim: link-level simulator for federated learning over a noisy
// downlink with budgeted LDPC decoding.
//
//   wflsim calibrate --config cfg.ini [--seed S] [--threads N] [--out DIR]
//   wflsim train     --config cfg.ini [--seed S] [--mode M] [--threads N] [--out DIR]
//   wflsim validate  SUITE
//   wflsim bound     --config cfg.ini [--out DIR]
//
// Exit codes: 0 success, 1 runtime failure, 2 usage/config error.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wfl/commands.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string mode;
    std::string out_dir;
    int threads = 1;
};

wfl::cmd::Overrides make_overrides(const CommonFlags& f) {
    wfl::cmd::Overrides ov;
    if (f.seed_set) ov.seed = f.seed;
    if (!f.mode.empty()) {
        if (f.mode == "physical")
            ov.mode = wfl::fl::Mode::Physical;
        else if (f.mode == "statistical")
            ov.mode = wfl::fl::Mode::Statistical;
        else if (f.mode == "error_free")
            ov.mode = wfl::fl::Mode::ErrorFree;
        else
            throw wfl::cfg::ConfigError(
                {"--mode must be physical, statistical or error_free"});
    }
    if (!f.out_dir.empty()) ov.out_dir = f.out_dir;
    ov.threads = f.threads;
    return ov;
}

void add_common(CLI::App* sub, CommonFlags& f, bool with_mode) {
    sub->add_option("--config", f.config_path, "configuration file")
        ->required();
    sub->add_option("--seed", f.seed, "override the config seed")
        ->each([&f](const std::string&) { f.seed_set = true; });
    if (with_mode)
        sub->add_option("--mode", f.mode,
                        "physical | statistical | error_free");
    sub->add_option("--threads", f.threads, "worker cap (results unchanged)");
    sub->add_option("--out", f.out_dir, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wireless federated learning link simulator"};
    app.require_subcommand(1);

    CommonFlags calibrate_flags, train_flags, bound_flags;
    std::string suite;

    CLI::App* calibrate = app.add_subcommand("calibrate",
                                             "measure the BER vs (SNR, Q) table");
    add_common(calibrate, calibrate_flags, false);

    CLI::App* train = app.add_subcommand("train", "run a federated experiment");
    add_common(train, train_flags, true);

    CLI::App* validate =
        app.add_subcommand("validate", "run a property-check suite");
    validate->add_option("suite", suite,
                         "lemma1 | corollary1 | energy | quantizer | "
                         "gradients | all")
        ->required();

    CLI::App* bound =
        app.add_subcommand("bound", "evaluate the convergence bound");
    add_common(bound, bound_flags, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (calibrate->parsed()) {
            auto doc = wfl::cfg::IniDoc::parse_file(calibrate_flags.config_path);
            auto config = wfl::cfg::parse_calibrate_config(doc);
            std::string dir = wfl::cmd::run_calibrate(
                config, doc.raw_text, make_overrides(calibrate_flags));
            std::cout << "calibration written to " << dir << "\n";
        } else if (train->parsed()) {
            auto doc = wfl::cfg::IniDoc::parse_file(train_flags.config_path);
            auto config = wfl::cfg::parse_train_config(doc);
            std::string dir = wfl::cmd::run_train(config, doc.raw_text,
                                                  make_overrides(train_flags));
            std::cout << "experiment written to " << dir << "\n";
        } else if (validate->parsed()) {
            if (!wfl::cmd::run_validate(suite, std::cout)) return 1;
        } else if (bound->parsed()) {
            auto doc = wfl::cfg::IniDoc::parse_file(bound_flags.config_path);
            auto config = wfl::cfg::parse_bound_config(doc);
            wfl::cmd::run_bound(config, doc.raw_text,
                                make_overrides(bound_flags), std::cout);
        }
    } catch (const wfl::cfg::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
