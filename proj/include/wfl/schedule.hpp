#pragma once

// Per-round target BER sequence and the measured (SNR, Q) -> BER table
// that turns a target into a decoding-iteration budget.

#include <cstdint>
#include <string>
#include <vector>

namespace wfl::sched {

// b_r = (b0 - bL) R^2 / ((R^2 - 1)(r+1)^2) + (bL R^2 - b0) / (R^2 - 1),
// a strictly decreasing 1/(r+1)^2 profile hitting b0 at r = 0 and bL at
// r = R-1.
struct BerSchedule {
    double b0 = 0.1;
    double b_last = 1e-4;
    int rounds = 0;

    void validate() const;
    double target_ber(int r) const;
};

struct CorollaryBound {
    double lhs = 0.0;  // sum_r b_r (1-b_r)^(N-1) / sqrt(T)
    double rhs = 0.0;  // (theta / sqrt(T)) (2 - E/T)
};

// Both sides of the summation bound for the schedule b_r = theta/(r+1)^2
// with T = R*E local steps in total.
CorollaryBound corollary_sum_bound(double theta, int rounds, int local_steps,
                                   int n_bits);

struct CalibrationEntry {
    double snr_db = 0.0;
    int q = 0;
    double ber = 0.0;           // upper confidence bound when !resolved
    double ci_halfwidth = 0.0;  // Wilson 95% half-width
    std::int64_t frames = 0;
    double mean_iters = 0.0;    // mean iterations actually executed
    bool resolved = true;       // reached the error-count stopping rule
};

struct QLookup {
    int q = 0;
    bool saturated = false;  // target below the best tabulated BER
};

class CalibrationTable {
  public:
    CalibrationTable() = default;
    CalibrationTable(int code_n, std::uint64_t code_seed,
                     std::vector<CalibrationEntry> entries);

    int code_n() const { return code_n_; }
    std::uint64_t code_seed() const { return code_seed_; }
    const std::vector<CalibrationEntry>& entries() const { return entries_; }

    // Smallest tabulated Q at this exact SNR whose measured BER meets the
    // target; the largest tabulated Q (flagged) when none does. SNR rows
    // are matched exactly, never interpolated. Throws on an unknown SNR.
    QLookup q_for_target(double snr_db, double target_ber) const;

    const CalibrationEntry& entry(double snr_db, int q) const;
    double mean_iters(double snr_db, int q) const;
    std::vector<double> snr_values() const;
    std::vector<int> q_values(double snr_db) const;

    // Pinned persistence format:
    //   snr_db,q,ber,ci_halfwidth,frames,n,code_seed
    // Mean iterations go to a companion file (same order, header
    //   snr_db,q,mean_iters,frames,n,code_seed)
    // because statistical-mode energy imputation needs them.
    std::string to_csv() const;
    std::string iters_to_csv() const;
    static CalibrationTable from_csv(const std::string& table_csv,
                                     const std::string& iters_csv = "");

  private:
    int code_n_ = 0;
    std::uint64_t code_seed_ = 0;
    std::vector<CalibrationEntry> entries_;
};

}  // namespace wfl::sched
