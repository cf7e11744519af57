#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "wfl/ldpc.hpp"
#include "wfl/rng.hpp"

using namespace wfl;
using namespace wfl::ldpc;

namespace {

BitVec random_message(int k, std::uint64_t seed, std::uint64_t idx) {
    BitVec m(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        m.set(static_cast<std::size_t>(i), draw_u64(seed, 900, idx * 701 + i) & 1);
    return m;
}

LlrFrame llrs_for_codeword(const BitVec& cw, double magnitude) {
    LlrFrame f;
    f.values.resize(cw.size());
    for (std::size_t i = 0; i < cw.size(); ++i)
        f.values[i] = cw.get(i) ? -magnitude : magnitude;
    return f;
}

// Exhaustive minimum-distance decoding over all 2^k codewords; the
// independent oracle for the toy code.
BitVec exhaustive_decode(const SystematicEncoder& enc, const LlrFrame& rx) {
    const int k = enc.info_bits();
    double best = -1e300;
    BitVec best_msg(static_cast<std::size_t>(k));
    for (std::uint32_t m = 0; m < (1u << k); ++m) {
        BitVec msg(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i)
            msg.set(static_cast<std::size_t>(i), (m >> i) & 1u);
        BitVec cw = enc.encode(msg);
        double corr = 0.0;  // LLR correlation: higher is more likely
        for (std::size_t i = 0; i < cw.size(); ++i)
            corr += cw.get(i) ? -rx.values[i] : rx.values[i];
        if (corr > best) {
            best = corr;
            best_msg = msg;
        }
    }
    return best_msg;
}

}  // namespace

TEST_CASE("construction: (3,6) regularity and declared shape") {
    for (auto [n, seed] : std::vector<std::pair<int, std::uint64_t>>{
             {12, 1}, {48, 3}, {1008, 7}}) {
        auto h = ParityCheckMatrix::construct(n, seed);
        CHECK(h.rows() == n / 2);
        CHECK(h.cols() == n);

        std::vector<int> col_deg(static_cast<std::size_t>(n), 0);
        for (int c = 0; c < h.rows(); ++c) {
            std::vector<int> seen;
            for (int j = 0; j < ParityCheckMatrix::kRowDegree; ++j) {
                int v = h.check_vars()[c * ParityCheckMatrix::kRowDegree + j];
                ++col_deg[static_cast<std::size_t>(v)];
                seen.push_back(v);
            }
            std::sort(seen.begin(), seen.end());
            CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
        }
        for (int deg : col_deg) CHECK(deg == ParityCheckMatrix::kColDegree);
    }
}

TEST_CASE("construction: n=1008 has 3024 entries; determinism; bad n rejected") {
    auto h1 = ParityCheckMatrix::construct(1008, 7);
    CHECK(h1.rows() * ParityCheckMatrix::kRowDegree == 3024);
    auto h2 = ParityCheckMatrix::construct(1008, 7);
    CHECK(h1.check_vars() == h2.check_vars());
    auto h3 = ParityCheckMatrix::construct(1008, 8);
    CHECK(h1.check_vars() != h3.check_vars());

    CHECK_THROWS_AS(ParityCheckMatrix::construct(11, 1), std::invalid_argument);
    CHECK_THROWS_AS(ParityCheckMatrix::construct(13, 1), std::invalid_argument);
    CHECK_THROWS_AS(ParityCheckMatrix::construct(10, 1), std::invalid_argument);
}

TEST_CASE("encoder: linearity, syndrome and info extraction") {
    auto h = ParityCheckMatrix::construct(96, 5);
    auto enc = SystematicEncoder::build(h);
    const int k = enc.info_bits();
    CHECK(k == 48);

    BitVec zero(static_cast<std::size_t>(k));
    CHECK(enc.encode(zero).count_ones() == 0);

    for (int t = 0; t < 25; ++t) {
        BitVec m1 = random_message(k, 100, static_cast<std::uint64_t>(2 * t));
        BitVec m2 = random_message(k, 100, static_cast<std::uint64_t>(2 * t + 1));
        BitVec c1 = enc.encode(m1);
        BitVec c2 = enc.encode(m2);
        CHECK(h.syndrome_ok(c1));
        CHECK(h.syndrome_ok(c2));
        CHECK(enc.extract_info(c1) == m1);

        BitVec mx = m1;
        for (int i = 0; i < k; ++i)
            mx.set(static_cast<std::size_t>(i), m1.get(i) ^ m2.get(i));
        BitVec cx = enc.encode(mx);
        for (std::size_t i = 0; i < cx.size(); ++i)
            CHECK(cx.get(i) == (c1.get(i) ^ c2.get(i)));
    }
}

TEST_CASE("syndrome: zero word passes, single flip fails") {
    auto h = ParityCheckMatrix::construct(60, 2);
    auto enc = SystematicEncoder::build(h);
    BitVec zero(60);
    CHECK(h.syndrome_ok(zero));
    BitVec cw = enc.encode(random_message(enc.info_bits(), 55, 0));
    CHECK(h.syndrome_ok(cw));
    for (int v = 0; v < 60; v += 7) {
        BitVec flipped = cw;
        flipped.flip(static_cast<std::size_t>(v));
        CHECK_FALSE(h.syndrome_ok(flipped));
    }
    BitVec wrong_len(59);
    CHECK_THROWS_AS(h.syndrome_ok(wrong_len), std::invalid_argument);
}

TEST_CASE("decoder floor: clean input exits at iteration 1") {
    auto h = ParityCheckMatrix::construct(1008, 7);
    auto enc = SystematicEncoder::build(h);
    BitVec msg = random_message(enc.info_bits(), 77, 4);
    BitVec cw = enc.encode(msg);
    auto res = min_sum_decode(h, enc, llrs_for_codeword(cw, 50.0), 20);
    CHECK(res.parity_ok);
    CHECK(res.iterations_used == 1);
    CHECK(res.info_bits == msg);
    CHECK(res.codeword == cw);
}

TEST_CASE("decoder corrects one weak flipped bit on the toy code") {
    auto h = ParityCheckMatrix::construct(12, 1);
    auto enc = SystematicEncoder::build(h);
    const int k = enc.info_bits();
    for (std::uint32_t m : {0u, 5u, 21u, 63u}) {
        BitVec msg(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i)
            msg.set(static_cast<std::size_t>(i), (m >> i) & 1u);
        BitVec cw = enc.encode(msg);
        for (int flip = 0; flip < 12; ++flip) {
            LlrFrame rx = llrs_for_codeword(cw, 50.0);
            rx.values[static_cast<std::size_t>(flip)] =
                cw.get(static_cast<std::size_t>(flip)) ? 1.0 : -1.0;
            auto res = min_sum_decode(h, enc, rx, 10);
            CHECK(res.parity_ok);
            CHECK(res.info_bits == msg);
            CHECK(res.info_bits == exhaustive_decode(enc, rx));
        }
    }
}

TEST_CASE("early termination is sound and budget use is monotone") {
    auto h = ParityCheckMatrix::construct(96, 5);
    auto enc = SystematicEncoder::build(h);
    const int k = enc.info_bits();
    for (int t = 0; t < 40; ++t) {
        BitVec msg = random_message(k, 301, static_cast<std::uint64_t>(t));
        BitVec cw = enc.encode(msg);
        LlrFrame rx;
        rx.values.resize(96);
        for (int i = 0; i < 96; ++i) {
            double noise = 1.2 * draw_normal(401, 11, static_cast<std::uint64_t>(t) * 96 + i);
            rx.values[static_cast<std::size_t>(i)] =
                (cw.get(static_cast<std::size_t>(i)) ? -1.0 : 1.0) * 2.0 + noise;
        }
        auto r3 = min_sum_decode(h, enc, rx, 3);
        auto r30 = min_sum_decode(h, enc, rx, 30);
        CHECK(r3.iterations_used <= r30.iterations_used);
        CHECK(r3.iterations_used <= 3);
        CHECK(r30.iterations_used <= 30);
        if (r3.parity_ok) {
            CHECK(h.syndrome_ok(r3.codeword));
            CHECK(r30.parity_ok);
            CHECK(r3.codeword == r30.codeword);
        }
        if (r30.parity_ok) CHECK(h.syndrome_ok(r30.codeword));
        // Determinism of the whole decode path.
        auto again = min_sum_decode(h, enc, rx, 30);
        CHECK(again.codeword == r30.codeword);
        CHECK(again.iterations_used == r30.iterations_used);
    }
}

TEST_CASE("decoder rejects bad inputs") {
    auto h = ParityCheckMatrix::construct(12, 1);
    auto enc = SystematicEncoder::build(h);
    LlrFrame rx;
    rx.values.assign(12, 1.0);
    CHECK_THROWS_AS(min_sum_decode(h, enc, rx, 0), std::invalid_argument);
    rx.values[3] = std::nan("");
    CHECK_THROWS_AS(min_sum_decode(h, enc, rx, 5), std::invalid_argument);
    rx.values.assign(11, 1.0);
    CHECK_THROWS_AS(min_sum_decode(h, enc, rx, 5), std::invalid_argument);
}

TEST_CASE("budget exhaustion reports parity failure") {
    auto h = ParityCheckMatrix::construct(96, 5);
    auto enc = SystematicEncoder::build(h);
    LlrFrame rx;
    rx.values.resize(96);
    for (int i = 0; i < 96; ++i)
        rx.values[static_cast<std::size_t>(i)] =
            draw_normal(777, 3, static_cast<std::uint64_t>(i));
    auto res = min_sum_decode(h, enc, rx, 1);
    CHECK(res.iterations_used == 1);
    CHECK_FALSE(res.parity_ok);
}

TEST_CASE("alist round trip preserves the matrix") {
    auto h = ParityCheckMatrix::construct(48, 9);
    std::stringstream ss;
    h.write_alist(ss);
    auto back = ParityCheckMatrix::read_alist(ss);
    CHECK(back.rows() == h.rows());
    CHECK(back.cols() == h.cols());
    CHECK(back.check_vars() == h.check_vars());
}
