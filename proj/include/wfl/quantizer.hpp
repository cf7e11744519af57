#pragma once

// N-bit uniform digitalization of a parameter vector over its [min, max]
// range. The range is split into 2^N - 1 intervals; each parameter maps to
// the index of the nearest boundary, written as natural binary, LSB first
// (bit i of a parameter's group carries weight 2^i). The (w_min, w_max)
// scalars ride along exactly and are never subject to bit errors.

#include <cstdint>
#include <vector>

#include "wfl/bitvec.hpp"

namespace wfl::quant {

struct QuantizedPayload {
    BitVec bits;      // length dim * n_bits
    int n_bits = 0;   // N, 1..16
    std::int64_t dim = 0;
    double w_min = 0.0;
    double w_max = 0.0;

    double delta() const {
        return n_bits == 0 || w_max == w_min
                   ? 0.0
                   : (w_max - w_min) / static_cast<double>((1u << n_bits) - 1);
    }
};

// Range taken from the data itself (the server-side path).
QuantizedPayload quantize(const std::vector<double>& w, int n_bits);

// Explicit range, clamping inputs into [w_min, w_max]. Degenerate ranges
// (w_max == w_min) map everything to index 0.
QuantizedPayload quantize_with_range(const std::vector<double>& w, int n_bits,
                                     double w_min, double w_max);

std::vector<double> dequantize(const QuantizedPayload& p);

// Index helpers, exposed for tests and the error model.
std::uint32_t index_of(const QuantizedPayload& p, std::int64_t d);
void set_index(QuantizedPayload& p, std::int64_t d, std::uint32_t index);

}  // namespace wfl::quant
