#include "wfl/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "wfl/channel.hpp"
#include "wfl/error_model.hpp"
#include "wfl/parallel.hpp"
#include "wfl/quantizer.hpp"
#include "wfl/rng.hpp"

namespace wfl::fl {

void FlConfig::validate() const {
    if (clients < 1 || rounds < 1 || local_steps < 1)
        throw std::invalid_argument("FlConfig: clients, rounds, local_steps >= 1");
    if (!(eta > 0)) throw std::invalid_argument("FlConfig: eta must be > 0");
    if (batch_size < 1) throw std::invalid_argument("FlConfig: batch_size >= 1");
    if (n_bits < 1 || n_bits > 16)
        throw std::invalid_argument("FlConfig: n_bits must be in [1, 16]");
    energy.validate();
    if (schedule.kind == ScheduleSpec::Kind::Adaptive) {
        sched::BerSchedule s = schedule.adaptive;
        s.rounds = rounds;
        s.validate();
    } else if (schedule.kind == ScheduleSpec::Kind::FixedBer) {
        if (!(schedule.fixed_ber >= 0 && schedule.fixed_ber <= 0.5))
            throw std::invalid_argument("FlConfig: fixed_ber in [0, 0.5]");
    } else if (schedule.kind == ScheduleSpec::Kind::FixedQ) {
        if (schedule.fixed_q < 1)
            throw std::invalid_argument("FlConfig: fixed_q >= 1");
    } else if (static_cast<int>(schedule.custom_ber.size()) != rounds) {
        throw std::invalid_argument(
            "FlConfig: custom ber sequence must have one value per round");
    }
}

LocalSgdResult local_sgd(const Objective& model, const data::Dataset& data,
                         std::span<const int> shard,
                         const std::vector<double>& start, int steps,
                         double eta, int batch_size, std::uint64_t seed,
                         int round, int client) {
    if (shard.empty()) throw std::invalid_argument("local_sgd: empty shard");
    LocalSgdResult out;
    out.weights = start;
    std::vector<double> grad(start.size());
    std::vector<int> batch(static_cast<std::size_t>(batch_size));
    const std::uint64_t stream =
        make_stream(StreamPurpose::SgdBatch, static_cast<std::uint64_t>(round),
                    static_cast<std::uint64_t>(client));
    for (int e = 0; e < steps; ++e) {
        for (int j = 0; j < batch_size; ++j) {
            std::uint64_t pick = draw_below(
                seed, stream,
                static_cast<std::uint64_t>(e) * batch_size + j, shard.size());
            batch[static_cast<std::size_t>(j)] = shard[pick];
        }
        double loss = model.loss_grad(out.weights, data, batch, grad);
        if (!std::isfinite(loss))
            throw std::runtime_error("local_sgd: non-finite loss at round " +
                                     std::to_string(round) + " client " +
                                     std::to_string(client));
        for (std::size_t i = 0; i < grad.size(); ++i) {
            if (!std::isfinite(grad[i]))
                throw std::runtime_error(
                    "local_sgd: non-finite gradient at round " +
                    std::to_string(round) + " client " + std::to_string(client));
            out.weights[i] -= eta * grad[i];
        }
        out.last_loss = loss;
    }
    out.delta.resize(start.size());
    for (std::size_t i = 0; i < start.size(); ++i)
        out.delta[i] = out.weights[i] - start[i];
    return out;
}

std::vector<double> aggregate(const std::vector<double>& w,
                              const std::vector<std::vector<double>>& deltas) {
    if (deltas.empty()) throw std::invalid_argument("aggregate: no deltas");
    for (const auto& d : deltas)
        if (d.size() != w.size())
            throw std::invalid_argument("aggregate: dimension mismatch");
    std::vector<double> out = w;
    const double inv = 1.0 / static_cast<double>(deltas.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        double sum = 0.0;
        for (const auto& d : deltas) sum += d[i];
        out[i] += sum * inv;
    }
    return out;
}

namespace {

struct RoundPolicy {
    double target_ber = 0.0;
    int q = 0;
    bool saturated = false;
};

RoundPolicy resolve_policy(const FlConfig& cfg, const CodeAssets& assets,
                           int round, bool need_q) {
    RoundPolicy p;
    const auto& s = cfg.schedule;
    auto lookup = [&](double target) {
        if (!assets.table)
            throw std::runtime_error(
                "broadcast_round: calibration table required for budget lookup");
        sched::QLookup lk = assets.table->q_for_target(cfg.snr_db, target);
        p.q = lk.q;
        p.saturated = lk.saturated;
    };
    switch (s.kind) {
        case ScheduleSpec::Kind::Adaptive: {
            sched::BerSchedule sch = s.adaptive;
            sch.rounds = cfg.rounds;
            p.target_ber = sch.target_ber(round);
            if (need_q) lookup(p.target_ber);
            break;
        }
        case ScheduleSpec::Kind::FixedBer:
            p.target_ber = s.fixed_ber;
            if (need_q) lookup(p.target_ber);
            break;
        case ScheduleSpec::Kind::CustomBer:
            p.target_ber = s.custom_ber[static_cast<std::size_t>(round)];
            if (need_q) lookup(p.target_ber);
            break;
        case ScheduleSpec::Kind::FixedQ:
            p.q = s.fixed_q;
            if (assets.table)
                p.target_ber = assets.table->entry(cfg.snr_db, s.fixed_q).ber;
            break;
    }
    return p;
}

BitVec payload_frame(const BitVec& payload, std::int64_t frame, int k) {
    BitVec msg(static_cast<std::size_t>(k));
    const std::int64_t base = frame * k;
    const std::int64_t total = static_cast<std::int64_t>(payload.size());
    for (int i = 0; i < k; ++i) {
        std::int64_t pos = base + i;
        if (pos < total && payload.get(static_cast<std::size_t>(pos)))
            msg.set(static_cast<std::size_t>(i), true);
    }
    return msg;
}

}  // namespace

BroadcastOutcome broadcast_round(const std::vector<double>& w,
                                 const FlConfig& cfg, const CodeAssets& assets,
                                 int round) {
    BroadcastOutcome out;
    out.client_weights.resize(static_cast<std::size_t>(cfg.clients));
    const std::int64_t dim = static_cast<std::int64_t>(w.size());
    const std::int64_t payload_bits = dim * cfg.n_bits;

    if (cfg.mode == Mode::ErrorFree) {
        quant::QuantizedPayload p = quant::quantize(w, cfg.n_bits);
        std::vector<double> recon = quant::dequantize(p);
        for (auto& cw : out.client_weights) cw = recon;
        return out;
    }

    quant::QuantizedPayload payload = quant::quantize(w, cfg.n_bits);

    if (cfg.mode == Mode::Statistical) {
        if (!assets.table)
            throw std::runtime_error(
                "broadcast_round: statistical mode needs a calibration table");
        RoundPolicy pol = resolve_policy(cfg, assets, round, /*need_q=*/true);
        out.target_ber = pol.target_ber;
        out.q_r = pol.q;
        out.saturated = pol.saturated;
        const int k = assets.table->code_n() / 2;
        out.frames_per_client = (payload_bits + k - 1) / k;
        out.padded_bits_per_client = out.frames_per_client * k;
        const double imputed =
            assets.table->mean_iters(cfg.snr_db, pol.q) *
            static_cast<double>(out.frames_per_client);

        std::vector<double> bers(static_cast<std::size_t>(cfg.clients));
        parallel_for(cfg.clients, cfg.threads, [&](std::int64_t c) {
            errmodel::BitErrorSpec spec;
            spec.ber = pol.target_ber;
            spec.n_bits = cfg.n_bits;
            spec.seed = cfg.seed;
            quant::QuantizedPayload corrupted = errmodel::inject_bit_errors(
                payload, spec,
                make_stream(StreamPurpose::ErrorInject,
                            static_cast<std::uint64_t>(round),
                            static_cast<std::uint64_t>(c)));
            bers[static_cast<std::size_t>(c)] =
                static_cast<double>(corrupted.bits.hamming_distance(payload.bits)) /
                static_cast<double>(payload_bits);
            out.client_weights[static_cast<std::size_t>(c)] =
                quant::dequantize(corrupted);
        });
        for (double b : bers) out.mean_measured_ber += b;
        out.mean_measured_ber /= cfg.clients;
        out.total_iters = imputed * cfg.clients;
        return out;
    }

    // Physical mode.
    if (!assets.code || !assets.encoder)
        throw std::runtime_error("broadcast_round: physical mode needs code assets");
    RoundPolicy pol = resolve_policy(cfg, assets, round,
                                     cfg.schedule.kind != ScheduleSpec::Kind::FixedQ);
    out.target_ber = pol.target_ber;
    out.q_r = pol.q;
    out.saturated = pol.saturated;

    const int k = assets.encoder->info_bits();
    const std::int64_t frames = (payload_bits + k - 1) / k;
    out.frames_per_client = frames;
    out.padded_bits_per_client = frames * k;

    channel::ChannelConfig ch;
    ch.snr_db = channel::symbol_snr_db(
        cfg.snr_db, static_cast<double>(k) / assets.code->cols());
    ch.seed = cfg.seed;

    // Frames of one client share bit-vector words, so the parallel grain is
    // the client; frames run serially inside.
    std::vector<std::int64_t> iters(static_cast<std::size_t>(cfg.clients), 0);
    std::vector<std::int64_t> errors(static_cast<std::size_t>(cfg.clients), 0);
    std::vector<BitVec> received(static_cast<std::size_t>(cfg.clients),
                                 BitVec(static_cast<std::size_t>(payload_bits)));
    parallel_for(cfg.clients, cfg.threads, [&](std::int64_t c) {
        for (std::int64_t f = 0; f < frames; ++f) {
            BitVec msg = payload_frame(payload.bits, f, k);
            BitVec codeword = assets.encoder->encode(msg);
            ldpc::LlrFrame rx = channel::transmit(
                ch, codeword,
                make_stream(StreamPurpose::ChannelNoise,
                            static_cast<std::uint64_t>(round),
                            static_cast<std::uint64_t>(c),
                            static_cast<std::uint64_t>(f)));
            ldpc::DecodeResult res =
                ldpc::min_sum_decode(*assets.code, *assets.encoder, rx, pol.q,
                                     assets.decoder);
            iters[static_cast<std::size_t>(c)] += res.iterations_used;
            const std::int64_t base = f * k;
            for (int i = 0; i < k; ++i) {
                std::int64_t pos = base + i;
                if (pos >= payload_bits) break;  // padding: energy yes, BER no
                bool bit = res.info_bits.get(static_cast<std::size_t>(i));
                if (bit != payload.bits.get(static_cast<std::size_t>(pos)))
                    ++errors[static_cast<std::size_t>(c)];
                received[static_cast<std::size_t>(c)].set(
                    static_cast<std::size_t>(pos), bit);
            }
        }
    });

    std::int64_t total_iters = 0, total_errors = 0;
    for (int c = 0; c < cfg.clients; ++c) {
        total_iters += iters[static_cast<std::size_t>(c)];
        total_errors += errors[static_cast<std::size_t>(c)];
    }
    out.total_iters = static_cast<double>(total_iters);
    out.mean_measured_ber =
        static_cast<double>(total_errors) /
        (static_cast<double>(payload_bits) * cfg.clients);

    for (int c = 0; c < cfg.clients; ++c) {
        quant::QuantizedPayload rp;
        rp.bits = received[static_cast<std::size_t>(c)];
        rp.n_bits = cfg.n_bits;
        rp.dim = dim;
        rp.w_min = payload.w_min;  // scalars ride the error-free side channel
        rp.w_max = payload.w_max;
        out.client_weights[static_cast<std::size_t>(c)] = quant::dequantize(rp);
    }
    return out;
}

std::vector<double> initial_weights(const ModelSpec& spec, std::uint64_t seed) {
    std::vector<double> w(static_cast<std::size_t>(spec.param_count()));
    const std::uint64_t stream = make_stream(StreamPurpose::ModelInit);
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = 0.1 * (draw_unit(seed, stream, i) - 0.5);
    return w;
}

ExperimentResult run_experiment(const FlConfig& cfg, const ModelSpec& spec,
                                const data::Dataset& dataset,
                                const CodeAssets& assets) {
    cfg.validate();
    spec.validate();
    if (dataset.feature_dim != spec.input_dim || dataset.classes != spec.classes)
        throw std::invalid_argument("run_experiment: model/dataset shape mismatch");

    auto model = make_model(spec);
    auto shards =
        data::partition_clients(dataset, cfg.clients, cfg.partition, cfg.seed);
    std::vector<double> weights = initial_weights(spec, cfg.seed);

    ExperimentResult result;
    std::vector<LocalSgdResult> locals(static_cast<std::size_t>(cfg.clients));

    for (int r = 0; r < cfg.rounds; ++r) {
        BroadcastOutcome bc = broadcast_round(weights, cfg, assets, r);

        parallel_for(cfg.clients, cfg.threads, [&](std::int64_t c) {
            locals[static_cast<std::size_t>(c)] = local_sgd(
                *model, dataset, shards[static_cast<std::size_t>(c)],
                bc.client_weights[static_cast<std::size_t>(c)], cfg.local_steps,
                cfg.eta, cfg.batch_size, cfg.seed, r, static_cast<int>(c));
        });

        std::vector<std::vector<double>> deltas;
        deltas.reserve(static_cast<std::size_t>(cfg.clients));
        for (int c = 0; c < cfg.clients; ++c)
            deltas.push_back(locals[static_cast<std::size_t>(c)].delta);
        weights = aggregate(weights, deltas);

        RoundRecord rec;
        rec.round = r;
        rec.target_ber = bc.target_ber;
        rec.q_r = bc.q_r;
        rec.measured_ber = bc.mean_measured_ber;
        rec.saturated = bc.saturated;
        const double frames_total =
            static_cast<double>(bc.frames_per_client) * cfg.clients;
        rec.mean_iters = frames_total > 0 ? bc.total_iters / frames_total : 0.0;
        const double padded_bits_total =
            static_cast<double>(bc.padded_bits_per_client) * cfg.clients;
        const int k = assets.encoder
                          ? assets.encoder->info_bits()
                          : (assets.table ? assets.table->code_n() / 2 : 0);
        rec.energy_j = energy::decoding_energy(
            static_cast<double>(k) * bc.total_iters, 1.0, cfg.energy);
        rec.train_loss = model->loss(weights, dataset, dataset.train_idx);
        rec.test_acc = accuracy(*model, spec, weights, dataset, dataset.test_idx);
        result.rounds.push_back(rec);

        result.total_decode_energy_j += rec.energy_j;
        result.total_tx_energy_j +=
            energy::transceiver_energy(padded_bits_total, cfg.energy);
        result.total_train_energy_j += energy::training_energy(
            static_cast<double>(cfg.local_steps) * cfg.clients, cfg.energy);
        result.total_decode_iterations += bc.total_iters;
        if (bc.saturated) ++result.saturation_warnings;

        if (r == cfg.rounds - 1) {
            std::vector<double> avg(weights.size(), 0.0);
            for (int c = 0; c < cfg.clients; ++c)
                for (std::size_t i = 0; i < avg.size(); ++i)
                    avg[i] += locals[static_cast<std::size_t>(c)].weights[i];
            for (double& v : avg) v /= cfg.clients;
            result.client_avg_weights = std::move(avg);
        }
    }

    result.final_weights = weights;
    result.final_test_acc =
        accuracy(*model, spec, result.final_weights, dataset, dataset.test_idx);
    result.client_avg_test_acc = accuracy(*model, spec,
                                          result.client_avg_weights, dataset,
                                          dataset.test_idx);
    return result;
}

std::string round_records_csv(const std::vector<RoundRecord>& rounds) {
    std::string out =
        "round,target_ber,q_r,measured_ber,mean_iters,energy_j,train_loss,"
        "test_acc\n";
    char buf[320];
    for (const auto& r : rounds) {
        std::snprintf(buf, sizeof buf,
                      "%d,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.round,
                      r.target_ber, r.q_r, r.measured_ber, r.mean_iters,
                      r.energy_j, r.train_loss, r.test_acc);
        out += buf;
    }
    return out;
}

}  // namespace wfl::fl
