#pragma once

// Rate-1/2 (3,6)-regular LDPC code: seeded construction, systematic
// encoding via GF(2) elimination, and flooding min-sum decoding with
// parity-check early termination.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wfl/bitvec.hpp"

namespace wfl::ldpc {

// Sparse binary parity-check matrix, column degree 3 and row degree 6.
// Construction is deterministic in (n, seed) and retries internally
// (seed+1, seed+2, ...) until the matrix has full row rank, so an encoder
// can always be prepared. Immutable after construction.
class ParityCheckMatrix {
  public:
    // n even, n >= 12. Throws std::invalid_argument otherwise, and
    // std::runtime_error if 16 consecutive attempts stay rank-deficient.
    static ParityCheckMatrix construct(int n, std::uint64_t seed);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::uint64_t seed() const { return seed_; }

    static constexpr int kColDegree = 3;
    static constexpr int kRowDegree = 6;

    // check_vars()[r*6 .. r*6+5] are the variable indices of check r,
    // sorted ascending. var_checks()[v*3 .. v*3+2] likewise.
    const std::vector<int>& check_vars() const { return check_vars_; }
    const std::vector<int>& var_checks() const { return var_checks_; }
    // var_edges()[v*3+j] is the edge slot (index into check-major message
    // arrays) of variable v's j-th adjacency.
    const std::vector<int>& var_edges() const { return var_edges_; }

    // True iff H * bits == 0 over GF(2). Throws on length mismatch.
    bool syndrome_ok(const BitVec& bits) const;

    // Conventional alist text representation.
    void write_alist(std::ostream& os) const;
    static ParityCheckMatrix read_alist(std::istream& is);

  private:
    ParityCheckMatrix() = default;
    void build_var_index();

    int rows_ = 0;
    int cols_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<int> check_vars_;
    std::vector<int> var_checks_;
    std::vector<int> var_edges_;
};

// Maps k = n/2 information bits to an n-bit codeword of H. Information
// bits land at info_positions() of the codeword (the non-pivot columns of
// the eliminated H), parity bits at parity_positions(); H * c == 0 holds
// for the unpermuted H.
class SystematicEncoder {
  public:
    static SystematicEncoder build(const ParityCheckMatrix& h);

    int info_bits() const { return k_; }
    int code_bits() const { return n_; }
    const std::vector<int>& info_positions() const { return info_pos_; }
    const std::vector<int>& parity_positions() const { return parity_pos_; }

    // |msg| must equal info_bits().
    BitVec encode(const BitVec& msg) const;
    // Reads the information positions out of a hard-decision word.
    BitVec extract_info(const BitVec& codeword) const;

  private:
    int n_ = 0;
    int k_ = 0;
    std::vector<int> info_pos_;
    std::vector<int> parity_pos_;
    // parity_rows_[j] holds k bits: parity j = <row j, msg> over GF(2).
    std::vector<std::vector<std::uint64_t>> parity_rows_;
};

struct LlrFrame {
    std::vector<double> values;  // positive => bit 0 more likely
};

struct DecodeResult {
    BitVec info_bits;
    BitVec codeword;  // full hard decision at exit
    int iterations_used = 0;
    bool parity_ok = false;
};

struct DecoderOptions {
    // Normalized min-sum converges with a much lighter tail than the plain
    // update on this code and is the deployed default; `normalized = false`
    // selects the plain variant.
    bool normalized = true;
    double factor = 0.75;
    double clip = 1e3;  // magnitude cap on check-to-variable messages
};

// Flooding min-sum. Runs at least one iteration; after each iteration the
// hard decision is checked against H and the decoder exits early on a zero
// syndrome. iterations_used counts the iterations actually executed and is
// the quantity the energy ledger charges. Throws on non-finite LLRs or a
// length mismatch. Pure function of its arguments; safe to call
// concurrently on one shared code.
DecodeResult min_sum_decode(const ParityCheckMatrix& h,
                            const SystematicEncoder& enc, const LlrFrame& frame,
                            int max_iters,
                            const DecoderOptions& opts = DecoderOptions{});

}  // namespace wfl::ldpc
