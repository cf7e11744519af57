#pragma once

// Monte Carlo measurement of achieved BER as a function of (SNR, max
// decoding iterations Q) for one code instance. Each cell draws random
// information words, runs encode -> AWGN -> min-sum, and counts
// information-bit errors until the error-count stopping rule or the frame
// cap is hit. Frames are keyed by (seed, cell, frame index), so the result
// is bit-identical for any thread count; the stopping rule is evaluated at
// fixed chunk boundaries for the same reason.

#include <cstdint>
#include <string>
#include <vector>

#include "wfl/ldpc.hpp"
#include "wfl/schedule.hpp"

namespace wfl::calib {

struct CalibrationJob {
    // Receive SNR per information bit; converted to symbol SNR internally.
    std::vector<double> snr_points{1.5, 2.5};
    std::vector<int> q_points{2, 4, 6, 8, 12, 16, 20, 24, 32, 52};
    std::int64_t min_error_bits = 100;
    std::int64_t max_frames = 2000;
    std::uint64_t seed = 0;

    void validate() const;
};

sched::CalibrationTable run_calibration(
    const CalibrationJob& job, const ldpc::ParityCheckMatrix& code,
    const ldpc::SystematicEncoder& enc, int threads = 1,
    const ldpc::DecoderOptions& opts = ldpc::DecoderOptions{});

// Hamming distance over length. Throws on length mismatch.
double measure_round_ber(const BitVec& decoded, const BitVec& truth);

// Per-cell CI listing for humans.
std::string summary_text(const sched::CalibrationTable& table);

}  // namespace wfl::calib
