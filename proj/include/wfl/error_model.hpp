#pragma once

// Statistical bit-flip channel and the closed-form distortion it induces
// on dequantized parameters. The injector flips every payload bit
// independently with probability b; a truncated variant keeps at most one
// flip per parameter and exists solely as the oracle for the analytical
// at-most-one-flip expressions (bias and mean square model error below).

#include <cstdint>
#include <vector>

#include "wfl/quantizer.hpp"

namespace wfl::errmodel {

struct BitErrorSpec {
    double ber = 0.0;  // b in [0, 0.5]
    int n_bits = 0;
    std::uint64_t seed = 0;
};

enum class InjectMode {
    Independent,      // every bit i.i.d. Bernoulli(b)
    AtMostOnePerParam // analysis model: multi-flip patterns suppressed
};

// Flips payload bits; the (w_min, w_max) scalars travel error-free.
// Deterministic in (payload, spec, stream_id). Throws if b is outside
// [0, 0.5].
quant::QuantizedPayload inject_bit_errors(
    const quant::QuantizedPayload& p, const BitErrorSpec& spec,
    std::uint64_t stream_id, InjectMode mode = InjectMode::Independent);

// Expected distortion E[delta(w_d) | w_d] of one parameter under the
// at-most-one-flip model: b (1-b)^(N-1) Delta sum_i (1 - 2 w_d^(i)) 2^i,
// where w_d^(i) is digit i of the parameter's natural-binary index.
double expected_param_bias(double w_d, double w_min, double w_max, int n_bits,
                           double b);

// Mean square model error D (4^N - 1) / (3 (2^N - 1)^2) * b (1-b)^(N-1) M^2.
double expected_model_mse(std::int64_t dim, int n_bits, double b, double m_w);

// Squared Euclidean distance ||w_tilde - w||^2. Throws on length mismatch.
double measure_model_error(const std::vector<double>& w,
                           const std::vector<double>& w_tilde);

}  // namespace wfl::errmodel
