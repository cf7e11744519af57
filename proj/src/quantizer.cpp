#include "wfl/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wfl::quant {

namespace {

void check_args(const std::vector<double>& w, int n_bits) {
    if (w.empty()) throw std::invalid_argument("quantize: empty vector");
    if (n_bits < 1 || n_bits > 16)
        throw std::invalid_argument("quantize: n_bits must be in [1, 16]");
    for (double x : w)
        if (!std::isfinite(x))
            throw std::invalid_argument("quantize: non-finite input");
}

}  // namespace

QuantizedPayload quantize(const std::vector<double>& w, int n_bits) {
    check_args(w, n_bits);
    auto [lo, hi] = std::minmax_element(w.begin(), w.end());
    return quantize_with_range(w, n_bits, *lo, *hi);
}

QuantizedPayload quantize_with_range(const std::vector<double>& w, int n_bits,
                                     double w_min, double w_max) {
    check_args(w, n_bits);
    if (!(w_min <= w_max))
        throw std::invalid_argument("quantize: w_min must not exceed w_max");

    QuantizedPayload p;
    p.n_bits = n_bits;
    p.dim = static_cast<std::int64_t>(w.size());
    p.w_min = w_min;
    p.w_max = w_max;
    p.bits = BitVec(static_cast<std::size_t>(p.dim) * n_bits);

    const std::uint32_t max_index = (1u << n_bits) - 1;
    const double delta = p.delta();
    if (delta == 0.0) return p;  // all indices 0

    for (std::int64_t d = 0; d < p.dim; ++d) {
        double x = std::clamp(w[static_cast<std::size_t>(d)], w_min, w_max);
        // llround rounds halves away from zero; the argument is >= 0 here.
        long long idx = std::llround((x - w_min) / delta);
        std::uint32_t index = static_cast<std::uint32_t>(
            std::clamp<long long>(idx, 0, max_index));
        set_index(p, d, index);
    }
    return p;
}

std::vector<double> dequantize(const QuantizedPayload& p) {
    std::vector<double> w(static_cast<std::size_t>(p.dim));
    const double delta = p.delta();
    const std::uint32_t max_index = (1u << p.n_bits) - 1;
    for (std::int64_t d = 0; d < p.dim; ++d) {
        std::uint32_t idx = index_of(p, d);
        // Top index returns w_max exactly rather than w_min + K*delta,
        // which can differ in the last ulp.
        w[static_cast<std::size_t>(d)] =
            idx == max_index ? p.w_max : p.w_min + idx * delta;
    }
    return w;
}

std::uint32_t index_of(const QuantizedPayload& p, std::int64_t d) {
    std::uint32_t idx = 0;
    std::size_t base = static_cast<std::size_t>(d) * p.n_bits;
    for (int i = 0; i < p.n_bits; ++i)
        if (p.bits.get(base + i)) idx |= 1u << i;
    return idx;
}

void set_index(QuantizedPayload& p, std::int64_t d, std::uint32_t index) {
    std::size_t base = static_cast<std::size_t>(d) * p.n_bits;
    for (int i = 0; i < p.n_bits; ++i)
        p.bits.set(base + i, (index >> i) & 1u);
}

}  // namespace wfl::quant
