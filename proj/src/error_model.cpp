#include "wfl/error_model.hpp"

#include <cmath>
#include <stdexcept>

#include "wfl/rng.hpp"

namespace wfl::errmodel {

namespace {

void check_spec(const BitErrorSpec& spec) {
    if (!(spec.ber >= 0.0 && spec.ber <= 0.5))
        throw std::invalid_argument("BitErrorSpec: ber must be in [0, 0.5]");
}

}  // namespace

quant::QuantizedPayload inject_bit_errors(const quant::QuantizedPayload& p,
                                          const BitErrorSpec& spec,
                                          std::uint64_t stream_id,
                                          InjectMode mode) {
    check_spec(spec);
    quant::QuantizedPayload out = p;
    if (spec.ber == 0.0) return out;
    const std::size_t total = p.bits.size();

    if (mode == InjectMode::Independent) {
        for (std::size_t i = 0; i < total; ++i) {
            if (draw_unit(spec.seed, stream_id, i) < spec.ber)
                out.bits.flip(i);
        }
        return out;
    }

    // At-most-one-flip oracle: draw the same i.i.d. pattern per parameter
    // but suppress it entirely when more than one bit would flip, which
    // realizes P(only bit i flips) = b (1-b)^(N-1).
    const int nb = p.n_bits;
    for (std::int64_t d = 0; d < p.dim; ++d) {
        int flips = 0;
        int flip_pos = -1;
        for (int i = 0; i < nb; ++i) {
            std::size_t bit = static_cast<std::size_t>(d) * nb + i;
            if (draw_unit(spec.seed, stream_id, bit) < spec.ber) {
                ++flips;
                flip_pos = i;
            }
        }
        if (flips == 1)
            out.bits.flip(static_cast<std::size_t>(d) * nb + flip_pos);
    }
    return out;
}

double expected_param_bias(double w_d, double w_min, double w_max, int n_bits,
                           double b) {
    std::vector<double> one{w_d};
    quant::QuantizedPayload p =
        quant::quantize_with_range(one, n_bits, w_min, w_max);
    std::uint32_t idx = quant::index_of(p, 0);
    double signed_weight = 0.0;
    for (int i = 0; i < n_bits; ++i) {
        int digit = (idx >> i) & 1u;
        signed_weight += (1.0 - 2.0 * digit) * static_cast<double>(1u << i);
    }
    return b * std::pow(1.0 - b, n_bits - 1) * p.delta() * signed_weight;
}

double expected_model_mse(std::int64_t dim, int n_bits, double b, double m_w) {
    if (dim < 1 || n_bits < 1)
        throw std::invalid_argument("expected_model_mse: bad dimensions");
    if (!(b >= 0.0 && b <= 0.5))
        throw std::invalid_argument("expected_model_mse: b must be in [0, 0.5]");
    if (m_w < 0)
        throw std::invalid_argument("expected_model_mse: negative range");
    const double four_n = std::pow(4.0, n_bits);
    const double two_n = std::pow(2.0, n_bits);
    return static_cast<double>(dim) * (four_n - 1.0) /
           (3.0 * (two_n - 1.0) * (two_n - 1.0)) * b *
           std::pow(1.0 - b, n_bits - 1) * m_w * m_w;
}

double measure_model_error(const std::vector<double>& w,
                           const std::vector<double>& w_tilde) {
    if (w.size() != w_tilde.size())
        throw std::invalid_argument("measure_model_error: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        double d = w_tilde[i] - w[i];
        acc += d * d;
    }
    return acc;
}

}  // namespace wfl::errmodel
