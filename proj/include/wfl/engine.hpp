#pragma once

// Federated training loop: broadcast (quantize -> encode -> channel ->
// decode, or statistical bit flips), local SGD at each client, uplink
// aggregation. Uplink updates arrive error-free; only the downlink link is
// simulated. Every random draw is keyed by (seed, purpose, round, client,
// index), so runs are bit-reproducible for any thread count.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wfl/calibration.hpp"
#include "wfl/dataset.hpp"
#include "wfl/energy.hpp"
#include "wfl/ldpc.hpp"
#include "wfl/model.hpp"
#include "wfl/schedule.hpp"

namespace wfl::fl {

enum class Mode { Physical, Statistical, ErrorFree };

struct ScheduleSpec {
    enum class Kind { Adaptive, FixedBer, FixedQ, CustomBer };
    Kind kind = Kind::Adaptive;
    sched::BerSchedule adaptive;
    double fixed_ber = 0.0;
    int fixed_q = 0;
    std::vector<double> custom_ber;  // one value per round (test/driver use)
};

struct FlConfig {
    int clients = 10;      // K
    int rounds = 30;       // R
    int local_steps = 5;   // E
    double eta = 0.01;
    int batch_size = 64;
    int n_bits = 8;        // N
    Mode mode = Mode::Statistical;
    ScheduleSpec schedule;
    double snr_db = 2.5;   // receive SNR per information bit
    std::uint64_t seed = 0;
    data::Partition partition = data::Partition::Iid;
    int threads = 1;
    energy::EnergyModel energy;

    void validate() const;
};

// Immutable link assets shared by a run. Physical mode needs code +
// encoder (+ table unless the schedule is FixedQ); statistical mode needs
// the table (with mean iterations) for budget lookup and energy
// imputation.
struct CodeAssets {
    const ldpc::ParityCheckMatrix* code = nullptr;
    const ldpc::SystematicEncoder* encoder = nullptr;
    const sched::CalibrationTable* table = nullptr;
    ldpc::DecoderOptions decoder;
};

struct RoundRecord {
    int round = 0;
    double target_ber = 0.0;
    int q_r = 0;
    double measured_ber = 0.0;  // mean over clients, payload bits only
    double mean_iters = 0.0;    // per decoded frame (imputed in statistical)
    double energy_j = 0.0;      // decoding energy, all clients, this round
    double train_loss = 0.0;    // global model on the training split
    double test_acc = 0.0;      // global model on the held-out split
    bool saturated = false;     // target below the table floor
};

struct ExperimentResult {
    std::vector<RoundRecord> rounds;
    std::vector<double> final_weights;     // server model w_R
    std::vector<double> client_avg_weights;  // mean of client models after the
                                             // last local training phase
    double final_test_acc = 0.0;
    double client_avg_test_acc = 0.0;
    double total_decode_energy_j = 0.0;
    double total_tx_energy_j = 0.0;
    double total_train_energy_j = 0.0;
    double total_decode_iterations = 0.0;  // frame-iterations, all clients
    int saturation_warnings = 0;
};

struct LocalSgdResult {
    std::vector<double> weights;  // after E steps
    std::vector<double> delta;    // weights - start
    double last_loss = 0.0;
};

// E mini-batch steps from `start`, batches drawn with replacement from the
// shard on the client's stream. Throws (with round/client context) on a
// non-finite loss or gradient.
LocalSgdResult local_sgd(const Objective& model, const data::Dataset& data,
                         std::span<const int> shard,
                         const std::vector<double>& start, int steps,
                         double eta, int batch_size, std::uint64_t seed,
                         int round, int client);

// w + mean(deltas); all deltas must match the model dimension.
std::vector<double> aggregate(const std::vector<double>& w,
                              const std::vector<std::vector<double>>& deltas);

struct BroadcastOutcome {
    std::vector<std::vector<double>> client_weights;
    double target_ber = 0.0;
    int q_r = 0;
    bool saturated = false;
    double mean_measured_ber = 0.0;
    double total_iters = 0.0;      // all clients
    std::int64_t frames_per_client = 0;
    std::int64_t padded_bits_per_client = 0;  // frames * k
};

BroadcastOutcome broadcast_round(const std::vector<double>& global_weights,
                                 const FlConfig& cfg, const CodeAssets& assets,
                                 int round);

ExperimentResult run_experiment(const FlConfig& cfg, const ModelSpec& spec,
                                const data::Dataset& dataset,
                                const CodeAssets& assets);

// Deterministic small random init on the experiment seed.
std::vector<double> initial_weights(const ModelSpec& spec, std::uint64_t seed);

std::string round_records_csv(const std::vector<RoundRecord>& rounds);

}  // namespace wfl::fl
