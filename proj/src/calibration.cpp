#include "wfl/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "wfl/channel.hpp"
#include "wfl/parallel.hpp"
#include "wfl/rng.hpp"

namespace wfl::calib {

namespace {

constexpr std::int64_t kChunkFrames = 64;

struct WilsonInterval {
    double center = 0.0;
    double halfwidth = 0.0;
    double upper() const { return center + halfwidth; }
};

WilsonInterval wilson(std::int64_t errors, std::int64_t trials) {
    constexpr double z = 1.959963984540054;  // 95%
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(errors) / n;
    const double z2 = z * z;
    WilsonInterval w;
    w.center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    w.halfwidth = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) /
                  (1.0 + z2 / n);
    return w;
}

BitVec random_info_word(int k, std::uint64_t seed, std::uint64_t stream) {
    BitVec msg(static_cast<std::size_t>(k));
    auto& words = msg.words();
    for (std::size_t w = 0; w < words.size(); ++w)
        words[w] = draw_u64(seed, stream, w);
    int spare = static_cast<int>(words.size()) * 64 - k;
    if (spare > 0) words.back() &= ~0ull >> spare;
    return msg;
}

}  // namespace

void CalibrationJob::validate() const {
    if (snr_points.empty() || q_points.empty())
        throw std::invalid_argument("CalibrationJob: empty grid");
    if (!std::is_sorted(q_points.begin(), q_points.end()))
        throw std::invalid_argument("CalibrationJob: q_points must be ascending");
    for (int q : q_points)
        if (q < 1) throw std::invalid_argument("CalibrationJob: q must be >= 1");
    if (min_error_bits < 50)
        throw std::invalid_argument("CalibrationJob: min_error_bits >= 50");
    if (max_frames < 100)
        throw std::invalid_argument("CalibrationJob: max_frames >= 100");
}

sched::CalibrationTable run_calibration(const CalibrationJob& job,
                                        const ldpc::ParityCheckMatrix& code,
                                        const ldpc::SystematicEncoder& enc,
                                        int threads,
                                        const ldpc::DecoderOptions& opts) {
    job.validate();
    const int k = enc.info_bits();
    std::vector<sched::CalibrationEntry> entries;

    const double rate = static_cast<double>(k) / code.cols();
    for (std::size_t snr_idx = 0; snr_idx < job.snr_points.size(); ++snr_idx) {
        const double snr = job.snr_points[snr_idx];
        channel::ChannelConfig cfg;
        cfg.snr_db = channel::symbol_snr_db(snr, rate);
        cfg.seed = job.seed;
        for (int q : job.q_points) {
            // Frame f reuses the same message and noise draws across the
            // Q cells of one SNR (streams keyed by SNR row, not cell), so
            // BER-vs-Q comparisons are paired.
            std::int64_t frames = 0;
            std::int64_t errors = 0;
            std::int64_t iters = 0;

            std::vector<std::int64_t> chunk_errors(kChunkFrames);
            std::vector<std::int64_t> chunk_iters(kChunkFrames);
            while (frames < job.max_frames) {
                const std::int64_t batch =
                    std::min(kChunkFrames, job.max_frames - frames);
                parallel_for(batch, threads, [&](std::int64_t i) {
                    const std::uint64_t f =
                        static_cast<std::uint64_t>(frames + i);
                    BitVec msg = random_info_word(
                        k, job.seed,
                        make_stream(StreamPurpose::CalibInfoBits, snr_idx, 0,
                                    f));
                    BitVec cw = enc.encode(msg);
                    ldpc::LlrFrame rx = channel::transmit(
                        cfg, cw,
                        make_stream(StreamPurpose::CalibNoise, snr_idx, 0, f));
                    ldpc::DecodeResult res =
                        ldpc::min_sum_decode(code, enc, rx, q, opts);
                    chunk_errors[i] = static_cast<std::int64_t>(
                        res.info_bits.hamming_distance(msg));
                    chunk_iters[i] = res.iterations_used;
                });
                for (std::int64_t i = 0; i < batch; ++i) {
                    errors += chunk_errors[i];
                    iters += chunk_iters[i];
                }
                frames += batch;
                if (errors >= job.min_error_bits) break;
            }

            sched::CalibrationEntry e;
            e.snr_db = snr;
            e.q = q;
            e.frames = frames;
            e.mean_iters =
                static_cast<double>(iters) / static_cast<double>(frames);
            const std::int64_t bits = frames * k;
            if (cfg.noiseless()) {
                e.ber = 0.0;
                e.ci_halfwidth = 0.0;
                e.resolved = true;
            } else {
                WilsonInterval w = wilson(errors, bits);
                e.ci_halfwidth = w.halfwidth;
                if (errors >= job.min_error_bits) {
                    e.ber = static_cast<double>(errors) /
                            static_cast<double>(bits);
                    e.resolved = true;
                } else {
                    e.ber = w.upper();
                    e.resolved = false;
                }
            }
            entries.push_back(e);
        }
    }
    return sched::CalibrationTable(code.cols(), code.seed(),
                                   std::move(entries));
}

double measure_round_ber(const BitVec& decoded, const BitVec& truth) {
    if (decoded.size() != truth.size())
        throw std::invalid_argument("measure_round_ber: length mismatch");
    if (decoded.size() == 0) return 0.0;
    return static_cast<double>(decoded.hamming_distance(truth)) /
           static_cast<double>(decoded.size());
}

std::string summary_text(const sched::CalibrationTable& table) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "calibration for code n=%d seed=%llu\n",
                  table.code_n(),
                  static_cast<unsigned long long>(table.code_seed()));
    out += buf;
    for (const auto& e : table.entries()) {
        std::snprintf(buf, sizeof buf,
                      "snr=%5.2f dB  Q=%3d  ber=%.4e (+-%.2e, 95%%)  "
                      "frames=%lld  mean_iters=%.3f%s\n",
                      e.snr_db, e.q, e.ber, e.ci_halfwidth,
                      static_cast<long long>(e.frames), e.mean_iters,
                      e.resolved ? "" : "  [upper bound: under-resolved]");
        out += buf;
    }
    return out;
}

}  // namespace wfl::calib
