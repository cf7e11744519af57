#pragma once

// BPSK over AWGN at a configured receive SNR, producing LLR frames.
//
// SNR convention: snr_db is Es/N0 per channel symbol, so the per-dimension
// noise variance is sigma^2 = 1 / (2 * 10^(snr_db/10)). The calibration
// tables are generated under the same convention, which keeps everything
// downstream self-consistent. Readers used to Eb/N0 at rate 1/2 should
// shift by 10*log10(2) ~= 3.01 dB.

#include <cmath>
#include <cstdint>
#include <limits>

#include "wfl/bitvec.hpp"
#include "wfl/ldpc.hpp"

namespace wfl::channel {

struct ChannelConfig {
    double snr_db = 2.5;  // +infinity selects the noiseless mode
    std::uint64_t seed = 0;

    bool noiseless() const { return std::isinf(snr_db) && snr_db > 0; }
    double noise_variance() const {
        return 1.0 / (2.0 * std::pow(10.0, snr_db / 10.0));
    }
};

// LLR magnitude used for noiseless transmissions.
inline constexpr double kNoiselessLlr = 1e3;

// Maps bit 0 -> +1, bit 1 -> -1, adds N(0, sigma^2) noise keyed by
// (cfg.seed, stream_id, symbol index), and returns LLR_i = 2 y_i / sigma^2.
ldpc::LlrFrame transmit(const ChannelConfig& cfg, const BitVec& codeword,
                        std::uint64_t stream_id);

// Monte Carlo hard-decision BER without coding; sanity baseline against
// the Gaussian tail Q(sqrt(2 * 10^(snr_db/10))).
double uncoded_ber(const ChannelConfig& cfg, std::int64_t num_bits);

// Gaussian tail probability P(Z > x).
inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// The system-level "receive SNR" dial (configs, calibration tables) is per
// information bit; coded symbols carry rate * that energy. Infinity passes
// through for the noiseless sentinel.
inline double symbol_snr_db(double receive_snr_db, double code_rate) {
    if (std::isinf(receive_snr_db)) return receive_snr_db;
    return receive_snr_db + 10.0 * std::log10(code_rate);
}

}  // namespace wfl::channel
