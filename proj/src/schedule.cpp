#include "wfl/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace wfl::sched {

void BerSchedule::validate() const {
    if (rounds <= 1) throw std::invalid_argument("BerSchedule: rounds must be > 1");
    if (!(b0 > b_last) || !(b_last > 0))
        throw std::invalid_argument("BerSchedule: need b0 > b_last > 0");
    if (b0 > 0.5) throw std::invalid_argument("BerSchedule: b0 must be <= 0.5");
}

double BerSchedule::target_ber(int r) const {
    validate();
    if (r < 0 || r >= rounds)
        throw std::out_of_range("BerSchedule: round index out of range");
    const double r2 = static_cast<double>(rounds) * rounds;
    const double denom = r2 - 1.0;
    const double step = static_cast<double>(r + 1) * (r + 1);
    return (b0 - b_last) * r2 / (denom * step) + (b_last * r2 - b0) / denom;
}

CorollaryBound corollary_sum_bound(double theta, int rounds, int local_steps,
                                   int n_bits) {
    if (theta < 0.0 || theta > 0.5)
        throw std::invalid_argument("corollary_sum_bound: theta in [0, 0.5]");
    if (rounds <= 1 || local_steps < 1 || n_bits < 1)
        throw std::invalid_argument("corollary_sum_bound: bad arguments");
    const double t_total =
        static_cast<double>(rounds) * static_cast<double>(local_steps);
    const double sqrt_t = std::sqrt(t_total);
    double sum = 0.0;
    for (int r = 0; r < rounds; ++r) {
        double br = theta / (static_cast<double>(r + 1) * (r + 1));
        sum += br * std::pow(1.0 - br, n_bits - 1);
    }
    CorollaryBound out;
    out.lhs = sum / sqrt_t;
    out.rhs = theta / sqrt_t * (2.0 - static_cast<double>(local_steps) / t_total);
    return out;
}

CalibrationTable::CalibrationTable(int code_n, std::uint64_t code_seed,
                                   std::vector<CalibrationEntry> entries)
    : code_n_(code_n), code_seed_(code_seed), entries_(std::move(entries)) {
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const CalibrationEntry& a, const CalibrationEntry& b) {
                         if (a.snr_db != b.snr_db) return a.snr_db < b.snr_db;
                         return a.q < b.q;
                     });
}

QLookup CalibrationTable::q_for_target(double snr_db, double target_ber) const {
    int best_q = -1;
    int max_q = -1;
    for (const auto& e : entries_) {
        if (e.snr_db != snr_db) continue;
        max_q = std::max(max_q, e.q);
        if (e.ber <= target_ber && (best_q < 0 || e.q < best_q)) best_q = e.q;
    }
    if (max_q < 0)
        throw std::invalid_argument(
            "q_for_target: SNR not present in calibration table");
    if (best_q >= 0) return QLookup{best_q, false};
    return QLookup{max_q, true};
}

const CalibrationEntry& CalibrationTable::entry(double snr_db, int q) const {
    for (const auto& e : entries_)
        if (e.snr_db == snr_db && e.q == q) return e;
    throw std::invalid_argument("CalibrationTable: no such cell");
}

double CalibrationTable::mean_iters(double snr_db, int q) const {
    const CalibrationEntry& e = entry(snr_db, q);
    if (!(e.mean_iters >= 0.0) || e.mean_iters != e.mean_iters ||
        e.mean_iters == 0.0)
        throw std::runtime_error(
            "CalibrationTable: mean iterations unavailable; regenerate the "
            "table or provide the companion iterations file");
    return e.mean_iters;
}

std::vector<double> CalibrationTable::snr_values() const {
    std::vector<double> v;
    for (const auto& e : entries_)
        if (std::find(v.begin(), v.end(), e.snr_db) == v.end())
            v.push_back(e.snr_db);
    std::sort(v.begin(), v.end());
    return v;
}

std::vector<int> CalibrationTable::q_values(double snr_db) const {
    std::vector<int> v;
    for (const auto& e : entries_)
        if (e.snr_db == snr_db) v.push_back(e.q);
    std::sort(v.begin(), v.end());
    return v;
}

namespace {

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::string CalibrationTable::to_csv() const {
    std::string out = "snr_db,q,ber,ci_halfwidth,frames,n,code_seed\n";
    for (const auto& e : entries_) {
        out += fmt_double(e.snr_db);
        out += ',';
        out += std::to_string(e.q);
        out += ',';
        out += fmt_double(e.ber);
        out += ',';
        out += fmt_double(e.ci_halfwidth);
        out += ',';
        out += std::to_string(e.frames);
        out += ',';
        out += std::to_string(code_n_);
        out += ',';
        out += std::to_string(code_seed_);
        out += '\n';
    }
    return out;
}

std::string CalibrationTable::iters_to_csv() const {
    std::string out = "snr_db,q,mean_iters,frames,n,code_seed\n";
    for (const auto& e : entries_) {
        out += fmt_double(e.snr_db);
        out += ',';
        out += std::to_string(e.q);
        out += ',';
        out += fmt_double(e.mean_iters);
        out += ',';
        out += std::to_string(e.frames);
        out += ',';
        out += std::to_string(code_n_);
        out += ',';
        out += std::to_string(code_seed_);
        out += '\n';
    }
    return out;
}

CalibrationTable CalibrationTable::from_csv(const std::string& table_csv,
                                            const std::string& iters_csv) {
    auto parse_rows = [](const std::string& text, const std::string& header,
                         std::size_t fields) {
        std::vector<std::vector<std::string>> rows;
        std::istringstream is(text);
        std::string line;
        if (!std::getline(is, line) || line != header)
            throw std::runtime_error("CalibrationTable: unexpected CSV header");
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            auto cells = split_line(line);
            if (cells.size() != fields)
                throw std::runtime_error("CalibrationTable: malformed CSV row");
            rows.push_back(std::move(cells));
        }
        return rows;
    };

    auto rows =
        parse_rows(table_csv, "snr_db,q,ber,ci_halfwidth,frames,n,code_seed", 7);
    CalibrationTable t;
    for (const auto& r : rows) {
        CalibrationEntry e;
        e.snr_db = std::stod(r[0]);
        e.q = std::stoi(r[1]);
        e.ber = std::stod(r[2]);
        e.ci_halfwidth = std::stod(r[3]);
        e.frames = std::stoll(r[4]);
        e.mean_iters = 0.0;
        t.code_n_ = std::stoi(r[5]);
        t.code_seed_ = std::stoull(r[6]);
        t.entries_.push_back(e);
    }
    if (!iters_csv.empty()) {
        auto irows =
            parse_rows(iters_csv, "snr_db,q,mean_iters,frames,n,code_seed", 6);
        std::map<std::pair<double, int>, double> iters;
        for (const auto& r : irows)
            iters[{std::stod(r[0]), std::stoi(r[1])}] = std::stod(r[2]);
        for (auto& e : t.entries_) {
            auto it = iters.find({e.snr_db, e.q});
            if (it != iters.end()) e.mean_iters = it->second;
        }
    }
    return t;
}

}  // namespace wfl::sched
