#include "wfl/ldpc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "wfl/rng.hpp"

namespace wfl::ldpc {

namespace {

// Edge list under construction: edge e joins check_of[e] and var_of[e].
// Every variable owns 3 consecutive slots, so column degree is 3 by
// construction; check degrees are fixed at 6 by the socket permutation.
struct EdgeGraph {
    int n = 0;
    int m = 0;
    std::vector<int> check_of;  // size 3n, indexed by variable socket

    int var_of_socket(int socket) const { return socket / 3; }
};

bool has_duplicate_edges(const EdgeGraph& g, int* bad_socket) {
    for (int v = 0; v < g.n; ++v) {
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b)
                if (g.check_of[3 * v + a] == g.check_of[3 * v + b]) {
                    *bad_socket = 3 * v + a;
                    return true;
                }
    }
    return false;
}

// Two checks sharing two variables form a length-4 cycle. Returns one
// socket participating in such a cycle, or -1.
int find_four_cycle_socket(const EdgeGraph& g) {
    std::vector<std::vector<int>> check_vars(g.m);
    for (int s = 0; s < 3 * g.n; ++s)
        check_vars[g.check_of[s]].push_back(s / 3);
    // pair_mark[c2] == c1 means the pair (c1, c2) already shares
    // pair_var[c2] within the current c1 scan.
    std::vector<int> pair_mark(g.m, -1);
    std::vector<int> pair_var(g.m, -1);
    for (int c1 = 0; c1 < g.m; ++c1) {
        for (int v : check_vars[c1]) {
            for (int s = 3 * v; s < 3 * v + 3; ++s) {
                int c2 = g.check_of[s];
                if (c2 <= c1) continue;
                if (pair_mark[c2] == c1 && pair_var[c2] != v) return s;
                if (pair_mark[c2] != c1) {
                    pair_mark[c2] = c1;
                    pair_var[c2] = v;
                }
            }
        }
    }
    return -1;
}

bool swap_would_duplicate(const EdgeGraph& g, int socket_a, int socket_b) {
    int va = socket_a / 3, vb = socket_b / 3;
    int ca = g.check_of[socket_a], cb = g.check_of[socket_b];
    if (va == vb) return true;
    for (int s = 3 * va; s < 3 * va + 3; ++s)
        if (s != socket_a && g.check_of[s] == cb) return true;
    for (int s = 3 * vb; s < 3 * vb + 3; ++s)
        if (s != socket_b && g.check_of[s] == ca) return true;
    return false;
}

// One construction attempt: socket permutation, duplicate-edge repair,
// bounded 4-cycle reduction. Returns false if duplicates cannot be
// repaired within budget.
bool try_construct(int n, std::uint64_t seed, EdgeGraph& g) {
    int m = n / 2;
    g.n = n;
    g.m = m;
    g.check_of.assign(3 * n, 0);

    const std::uint64_t stream =
        make_stream(StreamPurpose::CodeConstruct, 0, 0, 0);
    std::uint64_t draw_index = 0;
    auto next_below = [&](std::uint64_t bound) {
        return draw_below(seed, stream, draw_index++, bound);
    };

    // Fisher-Yates over the 3n check sockets; check socket s belongs to
    // check s / 6.
    std::vector<int> sockets(3 * n);
    for (int i = 0; i < 3 * n; ++i) sockets[i] = i;
    for (int i = 3 * n - 1; i > 0; --i) {
        int j = static_cast<int>(next_below(static_cast<std::uint64_t>(i) + 1));
        std::swap(sockets[i], sockets[j]);
    }
    for (int s = 0; s < 3 * n; ++s) g.check_of[s] = sockets[s] / 6;

    // Repair duplicate edges by swapping the offending socket with a
    // random one.
    for (int attempt = 0; attempt < 30 * n; ++attempt) {
        int bad;
        if (!has_duplicate_edges(g, &bad)) break;
        int other = static_cast<int>(next_below(3ull * n));
        if (other == bad || swap_would_duplicate(g, bad, other)) continue;
        std::swap(g.check_of[bad], g.check_of[other]);
    }
    int bad;
    if (has_duplicate_edges(g, &bad)) return false;

    // Best-effort girth-6: up to 1000 random swaps against 4-cycles.
    for (int attempt = 0; attempt < 1000; ++attempt) {
        int s = find_four_cycle_socket(g);
        if (s < 0) break;
        int other = static_cast<int>(next_below(3ull * n));
        if (other == s || swap_would_duplicate(g, s, other)) continue;
        std::swap(g.check_of[s], g.check_of[other]);
    }
    return true;
}

// Dense GF(2) row reduction of H. Returns pivot columns in order; rank is
// pivots.size().
struct Elimination {
    std::vector<std::vector<std::uint64_t>> rows;  // reduced rows
    std::vector<int> pivot_cols;
};

Elimination eliminate(const ParityCheckMatrix& h) {
    int m = h.rows(), n = h.cols();
    int words = (n + 63) / 64;
    Elimination e;
    e.rows.assign(m, std::vector<std::uint64_t>(words, 0));
    for (int r = 0; r < m; ++r)
        for (int j = 0; j < ParityCheckMatrix::kRowDegree; ++j) {
            int v = h.check_vars()[r * ParityCheckMatrix::kRowDegree + j];
            e.rows[r][v >> 6] ^= 1ull << (v & 63);
        }

    int rank = 0;
    for (int col = 0; col < n && rank < m; ++col) {
        int w = col >> 6;
        std::uint64_t mask = 1ull << (col & 63);
        int pivot = -1;
        for (int r = rank; r < m; ++r)
            if (e.rows[r][w] & mask) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        std::swap(e.rows[rank], e.rows[pivot]);
        for (int r = 0; r < m; ++r) {
            if (r != rank && (e.rows[r][w] & mask)) {
                for (int x = 0; x < words; ++x) e.rows[r][x] ^= e.rows[rank][x];
            }
        }
        e.pivot_cols.push_back(col);
        ++rank;
    }
    return e;
}

}  // namespace

ParityCheckMatrix ParityCheckMatrix::construct(int n, std::uint64_t seed) {
    if (n < 12 || n % 2 != 0)
        throw std::invalid_argument(
            "ParityCheckMatrix: n must be even and >= 12");

    for (int retry = 0; retry < 16; ++retry) {
        EdgeGraph g;
        if (!try_construct(n, seed + static_cast<std::uint64_t>(retry), g))
            continue;

        ParityCheckMatrix h;
        h.rows_ = n / 2;
        h.cols_ = n;
        h.seed_ = seed;
        h.check_vars_.assign(static_cast<std::size_t>(h.rows_) * kRowDegree, 0);
        std::vector<int> fill(h.rows_, 0);
        for (int s = 0; s < 3 * n; ++s) {
            int c = g.check_of[s];
            h.check_vars_[c * kRowDegree + fill[c]++] = s / 3;
        }
        for (int c = 0; c < h.rows_; ++c)
            std::sort(h.check_vars_.begin() + c * kRowDegree,
                      h.check_vars_.begin() + (c + 1) * kRowDegree);
        h.build_var_index();

        if (static_cast<int>(eliminate(h).pivot_cols.size()) == h.rows_)
            return h;
    }
    throw std::runtime_error(
        "ParityCheckMatrix: rank-deficient after 16 construction retries");
}

void ParityCheckMatrix::build_var_index() {
    var_checks_.assign(static_cast<std::size_t>(cols_) * kColDegree, 0);
    var_edges_.assign(static_cast<std::size_t>(cols_) * kColDegree, 0);
    std::vector<int> fill(cols_, 0);
    for (int c = 0; c < rows_; ++c)
        for (int j = 0; j < kRowDegree; ++j) {
            int v = check_vars_[c * kRowDegree + j];
            var_checks_[v * kColDegree + fill[v]] = c;
            var_edges_[v * kColDegree + fill[v]] = c * kRowDegree + j;
            ++fill[v];
        }
}

bool ParityCheckMatrix::syndrome_ok(const BitVec& bits) const {
    if (static_cast<int>(bits.size()) != cols_)
        throw std::invalid_argument("syndrome: length mismatch");
    for (int c = 0; c < rows_; ++c) {
        int parity = 0;
        for (int j = 0; j < kRowDegree; ++j)
            parity ^= bits.get(check_vars_[c * kRowDegree + j]) ? 1 : 0;
        if (parity) return false;
    }
    return true;
}

void ParityCheckMatrix::write_alist(std::ostream& os) const {
    os << cols_ << " " << rows_ << "\n";
    os << kColDegree << " " << kRowDegree << "\n";
    for (int v = 0; v < cols_; ++v) os << kColDegree << (v + 1 < cols_ ? " " : "\n");
    for (int c = 0; c < rows_; ++c) os << kRowDegree << (c + 1 < rows_ ? " " : "\n");
    for (int v = 0; v < cols_; ++v) {
        for (int j = 0; j < kColDegree; ++j)
            os << var_checks_[v * kColDegree + j] + 1
               << (j + 1 < kColDegree ? " " : "\n");
    }
    for (int c = 0; c < rows_; ++c) {
        for (int j = 0; j < kRowDegree; ++j)
            os << check_vars_[c * kRowDegree + j] + 1
               << (j + 1 < kRowDegree ? " " : "\n");
    }
}

ParityCheckMatrix ParityCheckMatrix::read_alist(std::istream& is) {
    int n, m, cd, rd;
    if (!(is >> n >> m >> cd >> rd) || cd != kColDegree || rd != kRowDegree)
        throw std::runtime_error("alist: unsupported header");
    for (int i = 0; i < n + m; ++i) {
        int d;
        if (!(is >> d)) throw std::runtime_error("alist: truncated degrees");
    }
    std::vector<int> var_checks(static_cast<std::size_t>(n) * cd);
    for (int i = 0; i < n * cd; ++i) {
        if (!(is >> var_checks[i]))
            throw std::runtime_error("alist: truncated column lists");
    }
    ParityCheckMatrix h;
    h.rows_ = m;
    h.cols_ = n;
    h.seed_ = 0;
    h.check_vars_.assign(static_cast<std::size_t>(m) * rd, 0);
    std::vector<int> fill(m, 0);
    for (int v = 0; v < n; ++v)
        for (int j = 0; j < cd; ++j) {
            int c = var_checks[v * cd + j] - 1;
            if (c < 0 || c >= m || fill[c] >= rd)
                throw std::runtime_error("alist: inconsistent adjacency");
            h.check_vars_[c * rd + fill[c]++] = v;
        }
    for (int c = 0; c < m; ++c)
        std::sort(h.check_vars_.begin() + c * rd,
                  h.check_vars_.begin() + (c + 1) * rd);
    h.build_var_index();
    return h;
}

SystematicEncoder SystematicEncoder::build(const ParityCheckMatrix& h) {
    Elimination e = eliminate(h);
    int m = h.rows(), n = h.cols();
    if (static_cast<int>(e.pivot_cols.size()) != m)
        throw std::runtime_error("SystematicEncoder: H is rank-deficient");

    SystematicEncoder enc;
    enc.n_ = n;
    enc.k_ = n - m;
    enc.parity_pos_ = e.pivot_cols;
    std::vector<bool> is_pivot(n, false);
    for (int c : e.pivot_cols) is_pivot[c] = true;
    for (int v = 0; v < n; ++v)
        if (!is_pivot[v]) enc.info_pos_.push_back(v);

    // In RREF, row j reads c[pivot_j] + sum over free columns f of
    // R[j][f] * c[f] = 0, so the parity at pivot_j is that sum.
    int kwords = (enc.k_ + 63) / 64;
    enc.parity_rows_.assign(m, std::vector<std::uint64_t>(kwords, 0));
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < enc.k_; ++i) {
            int col = enc.info_pos_[i];
            if ((e.rows[j][col >> 6] >> (col & 63)) & 1u)
                enc.parity_rows_[j][i >> 6] |= 1ull << (i & 63);
        }
    return enc;
}

BitVec SystematicEncoder::encode(const BitVec& msg) const {
    if (static_cast<int>(msg.size()) != k_)
        throw std::invalid_argument("encode: message length mismatch");
    BitVec code(static_cast<std::size_t>(n_));
    for (int i = 0; i < k_; ++i)
        if (msg.get(i)) code.set(info_pos_[i], true);
    const auto& mw = msg.words();
    for (int j = 0; j < static_cast<int>(parity_rows_.size()); ++j) {
        std::uint64_t acc = 0;
        const auto& row = parity_rows_[j];
        for (std::size_t w = 0; w < row.size(); ++w) acc ^= row[w] & mw[w];
        if (std::popcount(acc) & 1) code.set(parity_pos_[j], true);
    }
    return code;
}

BitVec SystematicEncoder::extract_info(const BitVec& codeword) const {
    BitVec msg(static_cast<std::size_t>(k_));
    for (int i = 0; i < k_; ++i)
        if (codeword.get(info_pos_[i])) msg.set(i, true);
    return msg;
}

DecodeResult min_sum_decode(const ParityCheckMatrix& h,
                            const SystematicEncoder& enc, const LlrFrame& frame,
                            int max_iters, const DecoderOptions& opts) {
    const int n = h.cols();
    const int m = h.rows();
    constexpr int rd = ParityCheckMatrix::kRowDegree;
    constexpr int cd = ParityCheckMatrix::kColDegree;
    if (static_cast<int>(frame.values.size()) != n)
        throw std::invalid_argument("min_sum_decode: frame length mismatch");
    if (max_iters < 1)
        throw std::invalid_argument("min_sum_decode: max_iters must be >= 1");
    for (double v : frame.values)
        if (!std::isfinite(v))
            throw std::invalid_argument("min_sum_decode: non-finite LLR");

    const int edges = m * rd;
    std::vector<double> v2c(edges);
    std::vector<double> c2v(edges, 0.0);
    for (int c = 0; c < m; ++c)
        for (int j = 0; j < rd; ++j)
            v2c[c * rd + j] = frame.values[h.check_vars()[c * rd + j]];

    BitVec hard(static_cast<std::size_t>(n));
    DecodeResult result;

    for (int iter = 1; iter <= max_iters; ++iter) {
        // Check-node update: sign product and two smallest magnitudes.
        for (int c = 0; c < m; ++c) {
            double min1 = 1e300, min2 = 1e300;
            int min_j = 0;
            unsigned sign_all = 0;
            unsigned signs = 0;
            for (int j = 0; j < rd; ++j) {
                double q = v2c[c * rd + j];
                unsigned s = q < 0.0 ? 1u : 0u;
                signs |= s << j;
                sign_all ^= s;
                double a = std::fabs(q);
                if (a < min1) {
                    min2 = min1;
                    min1 = a;
                    min_j = j;
                } else if (a < min2) {
                    min2 = a;
                }
            }
            for (int j = 0; j < rd; ++j) {
                double mag = (j == min_j) ? min2 : min1;
                if (opts.normalized) mag *= opts.factor;
                if (mag > opts.clip) mag = opts.clip;
                unsigned s = sign_all ^ ((signs >> j) & 1u);
                c2v[c * rd + j] = s ? -mag : mag;
            }
        }
        // Variable-node update and hard decision. LLR >= 0 decodes to 0.
        for (int v = 0; v < n; ++v) {
            double total = frame.values[v];
            const int* ve = &h.var_edges()[v * cd];
            for (int j = 0; j < cd; ++j) total += c2v[ve[j]];
            for (int j = 0; j < cd; ++j) v2c[ve[j]] = total - c2v[ve[j]];
            hard.set(v, total < 0.0);
        }
        result.iterations_used = iter;
        if (h.syndrome_ok(hard)) {
            result.parity_ok = true;
            break;
        }
    }
    result.codeword = hard;
    result.info_bits = enc.extract_info(hard);
    return result;
}

}  // namespace wfl::ldpc
