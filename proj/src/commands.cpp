#include "wfl/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wfl/channel.hpp"
#include "wfl/error_model.hpp"
#include "wfl/rng.hpp"

namespace wfl::cmd {

namespace fs = std::filesystem;

void write_file(const std::string& path, const std::string& bytes) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string file_hash_hex(const std::string& path) {
    std::string bytes = read_file(path);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::string resolve_out_dir(const std::string& configured,
                            const Overrides& ov, const char* fallback) {
    if (ov.out_dir) return *ov.out_dir;
    if (!configured.empty()) return configured;
    return fallback;
}

}  // namespace

std::string run_calibrate(const cfg::CalibrateConfig& config,
                          const std::string& snapshot, const Overrides& ov) {
    cfg::CalibrateConfig c = config;
    if (ov.seed) c.job.seed = *ov.seed;
    c.threads = ov.threads;
    const std::string dir = resolve_out_dir(c.output_dir, ov, "runs/calibrate");

    auto code = ldpc::ParityCheckMatrix::construct(c.code_n, c.code_seed);
    auto enc = ldpc::SystematicEncoder::build(code);
    ldpc::DecoderOptions opts;
    opts.normalized = !c.plain_min_sum;
    sched::CalibrationTable table =
        calib::run_calibration(c.job, code, enc, c.threads, opts);

    write_file(dir + "/config.snapshot.ini", snapshot);
    write_file(dir + "/table.csv", table.to_csv());
    write_file(dir + "/table.iters.csv", table.iters_to_csv());
    write_file(dir + "/summary.txt", calib::summary_text(table));
    return dir;
}

std::string run_train(const cfg::TrainConfig& config,
                      const std::string& snapshot, const Overrides& ov) {
    cfg::TrainConfig c = config;
    if (ov.seed) c.fl.seed = *ov.seed;
    if (ov.mode) c.fl.mode = *ov.mode;
    c.fl.threads = ov.threads;
    const std::string dir = resolve_out_dir(c.output_dir, ov, "runs/train");

    data::Dataset dataset = c.dataset.build();
    if (c.model.input_dim == 0) c.model.input_dim = dataset.feature_dim;

    fl::CodeAssets assets;
    sched::CalibrationTable table;
    std::optional<ldpc::ParityCheckMatrix> code;
    std::optional<ldpc::SystematicEncoder> enc;
    std::string table_hash;

    if (c.fl.mode != fl::Mode::ErrorFree) {
        const std::string iters_path =
            c.calibration_table_path + ".iters.csv";
        std::string iters_text;
        if (fs::exists(iters_path)) iters_text = read_file(iters_path);
        // table.csv lives next to its companion <table>.iters.csv
        table = sched::CalibrationTable::from_csv(
            read_file(c.calibration_table_path), iters_text);
        if (table.code_n() != c.code_n || table.code_seed() != c.code_seed)
            throw std::runtime_error(
                "calibration table was measured for code (n=" +
                std::to_string(table.code_n()) + ", seed=" +
                std::to_string(table.code_seed()) +
                ") but the config requests (n=" + std::to_string(c.code_n) +
                ", seed=" + std::to_string(c.code_seed) + ")");
        assets.table = &table;
        table_hash = file_hash_hex(c.calibration_table_path);
    }
    if (c.fl.mode == fl::Mode::Physical) {
        code = ldpc::ParityCheckMatrix::construct(c.code_n, c.code_seed);
        enc = ldpc::SystematicEncoder::build(*code);
        assets.code = &*code;
        assets.encoder = &*enc;
        assets.decoder.normalized = !c.plain_min_sum;
    }

    fl::ExperimentResult result =
        fl::run_experiment(c.fl, c.model, dataset, assets);

    nlohmann::json summary;
    summary["mode"] = c.fl.mode == fl::Mode::Physical      ? "physical"
                      : c.fl.mode == fl::Mode::Statistical ? "statistical"
                                                           : "error_free";
    summary["rounds"] = c.fl.rounds;
    summary["clients"] = c.fl.clients;
    summary["final_test_acc"] = result.final_test_acc;
    summary["client_avg_test_acc"] = result.client_avg_test_acc;
    summary["final_train_loss"] = result.rounds.back().train_loss;
    summary["total_decode_energy_j"] = result.total_decode_energy_j;
    summary["total_tx_energy_j"] = result.total_tx_energy_j;
    summary["total_train_energy_j"] = result.total_train_energy_j;
    summary["total_decode_iterations"] = result.total_decode_iterations;
    summary["saturation_warnings"] = result.saturation_warnings;
    if (!table_hash.empty()) summary["calibration_table_hash"] = table_hash;

    write_file(dir + "/config.snapshot.ini", snapshot);
    write_file(dir + "/rounds.csv", fl::round_records_csv(result.rounds));
    write_file(dir + "/summary.json", summary.dump(2) + "\n");
    return dir;
}

std::string run_bound(const cfg::BoundConfig& config,
                      const std::string& snapshot, const Overrides& ov,
                      std::ostream& os) {
    cfg::BoundConfig c = config;
    const std::string dir = resolve_out_dir(c.output_dir, ov, "runs/bound");
    if (c.eta_from_theorem) c.constants.eta = energy::theorem_eta(c.constants);

    std::vector<double> bers;
    if (c.use_schedule) {
        sched::BerSchedule s = c.schedule;
        s.rounds = c.constants.rounds;
        for (int r = 0; r < c.constants.rounds; ++r)
            bers.push_back(s.target_ber(r));
    } else {
        bers.assign(static_cast<std::size_t>(c.constants.rounds), c.fixed_ber);
    }
    std::string report = energy::bound_report_json(c.constants, c.dim, bers);
    write_file(dir + "/config.snapshot.ini", snapshot);
    write_file(dir + "/bound.json", report);
    os << report;
    return dir;
}

// ---------------------------------------------------------------------------
// Validation suites
// ---------------------------------------------------------------------------

namespace {

struct Suite {
    std::ostream& os;
    bool ok = true;

    void check(const std::string& name, bool pass, double observed,
               double expected, const std::string& tol) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s %s observed=%.6g expected=%.6g tol=%s\n",
                      pass ? "ok  " : "FAIL", name.c_str(), observed, expected,
                      tol.c_str());
        os << buf;
        ok = ok && pass;
    }
};

void suite_lemma1(Suite& s) {
    const int n_bits = 8;
    const std::int64_t dim = 100000;
    const int reps = 100;
    for (double b : {1e-2, 1e-3}) {
        std::vector<double> w(static_cast<std::size_t>(dim));
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = draw_unit(11, make_stream(StreamPurpose::ValidationMc, 0), i);
        w[0] = 0.0;
        w[1] = 1.0;  // pin the range so M = 1 exactly
        quant::QuantizedPayload payload = quant::quantize_with_range(w, n_bits, 0.0, 1.0);

        errmodel::BitErrorSpec spec;
        spec.ber = b;
        spec.n_bits = n_bits;
        spec.seed = 11;
        double total = 0.0;
        for (int rep = 0; rep < reps; ++rep) {
            quant::QuantizedPayload corrupted = errmodel::inject_bit_errors(
                payload, spec,
                make_stream(StreamPurpose::ValidationMc, 1,
                            static_cast<std::uint64_t>(rep)));
            total += errmodel::measure_model_error(w, quant::dequantize(corrupted));
        }
        double empirical = total / reps;
        double analytic = errmodel::expected_model_mse(dim, n_bits, b, 1.0);
        double rel = std::fabs(empirical - analytic) / analytic;
        char name[64];
        std::snprintf(name, sizeof name, "lemma1.mse_b%g", b);
        s.check(name, rel <= 0.10, empirical, analytic, "10% relative");
    }
}

void suite_corollary1(Suite& s) {
    const int local_steps = 5, n_bits = 8;
    for (double theta : {0.01, 0.1, 0.5}) {
        double prev = std::numeric_limits<double>::infinity();
        bool monotone = true, bounded = true;
        for (int rounds : {10, 100, 1000}) {
            sched::CorollaryBound cb =
                sched::corollary_sum_bound(theta, rounds, local_steps, n_bits);
            bounded = bounded && cb.lhs <= cb.rhs;
            monotone = monotone && cb.lhs < prev;
            prev = cb.lhs;
        }
        char name[64];
        std::snprintf(name, sizeof name, "corollary1.theta%g", theta);
        s.check(std::string(name) + ".lhs_le_rhs", bounded, bounded, 1, "exact");
        s.check(std::string(name) + ".decreasing", monotone, monotone, 1, "exact");
    }
}

void suite_energy(Suite& s) {
    energy::EnergyModel m;
    double decode = energy::decoding_energy(60e6 * 8, 10, m);
    s.check("energy.decode_96.5mJ", std::fabs(decode - 96.5e-3) / 96.5e-3 <= 0.005,
            decode * 1e3, 96.5, "0.5%");
    double tx = energy::transceiver_energy(60e6 * 8, m);
    s.check("energy.coded_tx_78mJ", std::fabs(tx - 78e-3) / 78e-3 <= 0.005,
            tx * 1e3, 78, "0.5%");
    double uncoded = 4.8e8 * m.tx_rx_pj_per_bit * 1e-12;
    s.check("energy.uncoded_39mJ", std::fabs(uncoded - 39e-3) / 39e-3 <= 0.01,
            uncoded * 1e3, 39, "1%");
}

void suite_quantizer(Suite& s) {
    bool bound_ok = true, monotone_ok = true;
    for (int n_bits : {1, 3, 8, 16}) {
        std::vector<double> w(257);
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = 10.0 * draw_unit(5, make_stream(StreamPurpose::ValidationMc, 2,
                                                   static_cast<std::uint64_t>(n_bits)),
                                    i) -
                   5.0;
        quant::QuantizedPayload p = quant::quantize(w, n_bits);
        std::vector<double> back = quant::dequantize(p);
        double half = p.delta() / 2;
        for (std::size_t i = 0; i < w.size(); ++i)
            bound_ok = bound_ok && std::fabs(back[i] - w[i]) <= half + 1e-12;
        std::vector<double> sorted = w;
        std::sort(sorted.begin(), sorted.end());
        quant::QuantizedPayload ps = quant::quantize(sorted, n_bits);
        for (std::int64_t d = 1; d < ps.dim; ++d)
            monotone_ok =
                monotone_ok && quant::index_of(ps, d - 1) <= quant::index_of(ps, d);
    }
    s.check("quantizer.roundtrip_half_delta", bound_ok, bound_ok, 1, "delta/2");
    s.check("quantizer.monotone_indices", monotone_ok, monotone_ok, 1, "exact");
}

void suite_gradients(Suite& s) {
    for (int kind = 0; kind < 2; ++kind) {
        fl::ModelSpec spec;
        spec.kind = kind == 0 ? fl::ModelKind::LogisticRegression
                              : fl::ModelKind::MlpOneHidden;
        spec.input_dim = 6;
        spec.hidden_dim = 4;
        spec.classes = 3;
        auto model = fl::make_model(spec);

        data::BlobsParams bp;
        bp.classes = 3;
        bp.dim = 6;
        bp.per_class = 10;
        bp.spread = 1.0;
        bp.seed = 17;
        data::Dataset d = data::make_blobs(bp);
        std::vector<int> batch(d.train_idx.begin(), d.train_idx.begin() + 8);

        double worst = 0.0;
        const int params = spec.param_count();
        std::vector<double> w(static_cast<std::size_t>(params));
        std::vector<double> grad(w.size());
        for (int inst = 0; inst < 100; ++inst) {
            for (std::size_t i = 0; i < w.size(); ++i)
                w[i] = 2.0 * draw_unit(23, make_stream(StreamPurpose::ValidationMc, 3,
                                                       static_cast<std::uint64_t>(
                                                           kind * 100 + inst)),
                                       i) -
                       1.0;
            model->loss_grad(w, d, batch, grad);
            int probe = inst % params;
            const double eps = 1e-6;
            std::vector<double> wp = w, wm = w;
            wp[static_cast<std::size_t>(probe)] += eps;
            wm[static_cast<std::size_t>(probe)] -= eps;
            double fd = (model->loss(wp, d, batch) - model->loss(wm, d, batch)) /
                        (2 * eps);
            double denom = std::max({std::fabs(fd),
                                     std::fabs(grad[static_cast<std::size_t>(probe)]),
                                     1e-8});
            worst = std::max(worst,
                             std::fabs(fd - grad[static_cast<std::size_t>(probe)]) /
                                 denom);
        }
        s.check(kind == 0 ? "gradients.logistic" : "gradients.mlp",
                worst <= 1e-5, worst, 0, "1e-5 relative");
    }
}

}  // namespace

bool run_validate(const std::string& suite, std::ostream& os) {
    Suite s{os};
    bool known = false;
    if (suite == "lemma1" || suite == "all") known = true, suite_lemma1(s);
    if (suite == "corollary1" || suite == "all") known = true, suite_corollary1(s);
    if (suite == "energy" || suite == "all") known = true, suite_energy(s);
    if (suite == "quantizer" || suite == "all") known = true, suite_quantizer(s);
    if (suite == "gradients" || suite == "all") known = true, suite_gradients(s);
    if (!known)
        throw cfg::ConfigError({"unknown validation suite '" + suite +
                                "' (expected lemma1, corollary1, energy, "
                                "quantizer, gradients, or all)"});
    os << (s.ok ? "validation passed\n" : "validation FAILED\n");
    return s.ok;
}

}  // namespace wfl::cmd
