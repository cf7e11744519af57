#pragma once

// Client-side energy ledger and a numeric evaluator of the convergence
// bound for user-supplied constants.
//
// Decoding energy counts payload (model) bits, not coded bits: the
// reference chip figures only reconcile that way (4.8e8 bits * 10 iters *
// 20.1 pJ = 96.5 mJ). Transceiver energy divides payload bits by the code
// rate, since coded bits cross the air.

#include <cstdint>
#include <string>
#include <vector>

namespace wfl::energy {

struct EnergyModel {
    double decode_pj_per_bit_iter = 20.1;
    double tx_rx_pj_per_bit = 81.2;
    double train_mj_per_epoch = 13.7;
    double code_rate = 0.5;

    void validate() const;
};

// bits * mean_iterations * decode_pj_per_bit_iter, in joules.
double decoding_energy(double payload_bits, double mean_iterations,
                       const EnergyModel& model);

// (payload_bits / code_rate) * tx_rx_pj_per_bit, in joules.
double transceiver_energy(double payload_bits, const EnergyModel& model);

// epochs * train_mj_per_epoch, in joules.
double training_energy(double epochs, const EnergyModel& model);

struct BoundConstants {
    double smoothness_l = 1.0;       // L
    double sigma_local_sq = 0.0;     // sigma_L^2
    double sigma_global_sq = 0.0;    // sigma_G^2
    double f0_minus_fstar = 0.0;     // E f(w_0) - f*
    double model_range_m = 0.0;      // M
    int clients = 1;                 // K
    int local_steps = 1;             // E
    int rounds = 1;                  // R
    int n_bits = 8;                  // N
    double eta = 0.0;                // learning rate

    void validate() const;
};

struct BoundReport {
    // Four terms of the gradient-norm bound and their total.
    double term_init = 0.0;       // 2 (E f(w0) - f*) / (eta R E)
    double term_bit_errors = 0.0; // (L+1)^2 D M^2 (4^N-1) / (3 (2^N-1)^2 eta R E) * sum
    double term_variance = 0.0;   // L (L+1) eta (sigma_L^2 + sigma_G^2) / K
    double term_drift = 0.0;      // L^2 eta^2 sigma_L^2 (K+1)(E-1) / K
    double total = 0.0;
    double ber_sum = 0.0;         // sum_r b_r (1-b_r)^(N-1)
    bool lr_condition = false;

    // Simplified form at eta = 1 / (L sqrt(RE)), with its constants.
    double c0 = 0.0, c1 = 0.0, c2 = 0.0, c3 = 0.0;
    double simplified_total = 0.0;
};

// Evaluates the bound for the given constants, model dimension, and BER
// sequence (length R). Evaluation is unconditional; the learning-rate
// condition is reported as a flag.
BoundReport convergence_bound_rhs(const BoundConstants& c, std::int64_t dim,
                                  const std::vector<double>& ber_sequence);

// 1 - ((K+L)/K) L eta - 2 L^2 eta^2 E (E-1) >= 0
bool lr_condition_holds(const BoundConstants& c);

// eta = 1 / (L sqrt(RE))
double theorem_eta(const BoundConstants& c);

std::string bound_report_json(const BoundConstants& c, std::int64_t dim,
                              const std::vector<double>& ber_sequence);

}  // namespace wfl::energy
