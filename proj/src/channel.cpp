#include "wfl/channel.hpp"

#include <stdexcept>

#include "wfl/rng.hpp"

namespace wfl::channel {

ldpc::LlrFrame transmit(const ChannelConfig& cfg, const BitVec& codeword,
                        std::uint64_t stream_id) {
    const std::size_t n = codeword.size();
    ldpc::LlrFrame frame;
    frame.values.resize(n);
    if (cfg.noiseless()) {
        for (std::size_t i = 0; i < n; ++i)
            frame.values[i] = codeword.get(i) ? -kNoiselessLlr : kNoiselessLlr;
        return frame;
    }
    const double var = cfg.noise_variance();
    if (!(var > 0))
        throw std::invalid_argument("transmit: non-positive noise variance");
    const double sigma = std::sqrt(var);
    const double scale = 2.0 / var;
    for (std::size_t i = 0; i < n; ++i) {
        double x = codeword.get(i) ? -1.0 : 1.0;
        double y = x + sigma * draw_normal(cfg.seed, stream_id, i);
        frame.values[i] = scale * y;
    }
    return frame;
}

double uncoded_ber(const ChannelConfig& cfg, std::int64_t num_bits) {
    if (num_bits < 10000)
        throw std::invalid_argument("uncoded_ber: need at least 1e4 bits");
    if (cfg.noiseless()) return 0.0;
    const double sigma = std::sqrt(cfg.noise_variance());
    const std::uint64_t bits_stream =
        make_stream(StreamPurpose::ChannelInfoBits);
    const std::uint64_t noise_stream = make_stream(StreamPurpose::ChannelNoise);
    std::int64_t errors = 0;
    for (std::int64_t i = 0; i < num_bits; ++i) {
        bool bit = draw_u64(cfg.seed, bits_stream, static_cast<std::uint64_t>(i)) & 1u;
        double x = bit ? -1.0 : 1.0;
        double y =
            x + sigma * draw_normal(cfg.seed, noise_stream,
                                    static_cast<std::uint64_t>(i));
        bool decided = y < 0.0;
        if (decided != bit) ++errors;
    }
    return static_cast<double>(errors) / static_cast<double>(num_bits);
}

}  // namespace wfl::channel
