#include "wfl/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace wfl::cfg {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
    std::string msg = "configuration invalid:";
    for (const auto& p : problems) msg += "\n  - " + p;
    return msg;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// Collects typed lookups and records every schema violation.
class SectionReader {
  public:
    SectionReader(const IniDoc& doc, std::vector<std::string>& problems)
        : doc_(doc), problems_(problems) {}

    bool has_section(const std::string& s) const {
        return doc_.sections.count(s) > 0;
    }

    void expect_sections(const std::vector<std::string>& required,
                         const std::vector<std::string>& optional) {
        for (const auto& s : required)
            if (!doc_.sections.count(s))
                problems_.push_back("missing section [" + s + "]");
        for (const auto& [name, kv] : doc_.sections) {
            (void)kv;
            bool known =
                std::find(required.begin(), required.end(), name) !=
                    required.end() ||
                std::find(optional.begin(), optional.end(), name) !=
                    optional.end();
            if (!known) problems_.push_back("unknown section [" + name + "]");
        }
    }

    void finish_section(const std::string& section) {
        auto it = doc_.sections.find(section);
        if (it == doc_.sections.end()) return;
        for (const auto& [key, value] : it->second) {
            (void)value;
            if (!touched_[section].count(key))
                problems_.push_back("unknown key [" + section + "] " + key);
        }
    }

    std::optional<std::string> raw(const std::string& section,
                                   const std::string& key) {
        touched_[section].insert(key);
        auto it = doc_.sections.find(section);
        if (it == doc_.sections.end()) return std::nullopt;
        auto kv = it->second.find(key);
        if (kv == it->second.end()) return std::nullopt;
        return kv->second;
    }

    std::string str(const std::string& section, const std::string& key,
                    const std::string& fallback) {
        auto v = raw(section, key);
        return v ? *v : fallback;
    }

    std::string require_str(const std::string& section, const std::string& key) {
        auto v = raw(section, key);
        if (!v) {
            problems_.push_back("missing key [" + section + "] " + key);
            return "";
        }
        return *v;
    }

    double num(const std::string& section, const std::string& key,
               double fallback) {
        auto v = raw(section, key);
        if (!v) return fallback;
        return parse_num(section, key, *v, fallback);
    }

    std::int64_t integer(const std::string& section, const std::string& key,
                         std::int64_t fallback) {
        auto v = raw(section, key);
        if (!v) return fallback;
        try {
            std::size_t pos = 0;
            std::int64_t x = std::stoll(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("");
            return x;
        } catch (const std::exception&) {
            problems_.push_back("[" + section + "] " + key +
                                " must be an integer, got '" + *v + "'");
            return fallback;
        }
    }

    std::uint64_t uinteger(const std::string& section, const std::string& key,
                           std::uint64_t fallback) {
        auto v = raw(section, key);
        if (!v) return fallback;
        try {
            std::size_t pos = 0;
            std::uint64_t x = std::stoull(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("");
            return x;
        } catch (const std::exception&) {
            problems_.push_back("[" + section + "] " + key +
                                " must be a non-negative integer, got '" + *v +
                                "'");
            return fallback;
        }
    }

    bool boolean(const std::string& section, const std::string& key,
                 bool fallback) {
        auto v = raw(section, key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1") return true;
        if (*v == "false" || *v == "0") return false;
        problems_.push_back("[" + section + "] " + key +
                            " must be true/false, got '" + *v + "'");
        return fallback;
    }

    std::vector<double> num_list(const std::string& section,
                                 const std::string& key,
                                 std::vector<double> fallback) {
        auto v = raw(section, key);
        if (!v) return fallback;
        std::vector<double> out;
        std::stringstream ss(*v);
        std::string cell;
        while (std::getline(ss, cell, ','))
            out.push_back(parse_num(section, key, trim(cell), 0.0));
        if (out.empty())
            problems_.push_back("[" + section + "] " + key + " is empty");
        return out;
    }

    void problem(const std::string& text) { problems_.push_back(text); }

  private:
    double parse_num(const std::string& section, const std::string& key,
                     const std::string& text, double fallback) {
        if (text == "inf" || text == "+inf")
            return std::numeric_limits<double>::infinity();
        try {
            std::size_t pos = 0;
            double x = std::stod(text, &pos);
            if (pos != text.size()) throw std::invalid_argument("");
            return x;
        } catch (const std::exception&) {
            problems_.push_back("[" + section + "] " + key +
                                " must be a number, got '" + text + "'");
            return fallback;
        }
    }

    const IniDoc& doc_;
    std::vector<std::string>& problems_;
    std::map<std::string, std::set<std::string>> touched_;
};

void throw_if_any(const std::vector<std::string>& problems) {
    if (!problems.empty()) throw ConfigError(problems);
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

IniDoc IniDoc::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError({"cannot open config file: " + path});
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

IniDoc IniDoc::parse_text(const std::string& text) {
    IniDoc doc;
    doc.raw_text = text;
    std::vector<std::string> problems;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                problems.push_back("line " + std::to_string(line_no) +
                                   ": malformed section header");
                continue;
            }
            section = trim(t.substr(1, t.size() - 2));
            doc.sections[section];
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            problems.push_back("line " + std::to_string(line_no) +
                               ": expected key = value");
            continue;
        }
        if (section.empty()) {
            problems.push_back("line " + std::to_string(line_no) +
                               ": key outside any [section]");
            continue;
        }
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (doc.sections[section].count(key))
            problems.push_back("line " + std::to_string(line_no) +
                               ": duplicate key '" + key + "'");
        doc.sections[section][key] = value;
    }
    throw_if_any(problems);
    return doc;
}

data::Dataset DatasetSection::build() const {
    if (kind == "csv") return data::load_csv(csv_path, blobs.seed);
    return data::make_blobs(blobs);
}

namespace {

void read_dataset(SectionReader& r, DatasetSection& out) {
    out.kind = r.str("dataset", "kind", "synthetic_blobs");
    if (out.kind != "synthetic_blobs" && out.kind != "csv")
        r.problem("[dataset] kind must be synthetic_blobs or csv");
    out.blobs.classes = static_cast<int>(r.integer("dataset", "classes", 2));
    out.blobs.dim = static_cast<int>(r.integer("dataset", "dim", 20));
    out.blobs.per_class = static_cast<int>(r.integer("dataset", "per_class", 600));
    out.blobs.spread = r.num("dataset", "spread", 1.0);
    out.blobs.seed = r.uinteger("dataset", "seed", 0);
    out.csv_path = r.str("dataset", "path", "");
    if (out.kind == "csv" && out.csv_path.empty())
        r.problem("[dataset] path required for kind = csv");
    r.finish_section("dataset");
}

void read_energy(SectionReader& r, energy::EnergyModel& e) {
    e.decode_pj_per_bit_iter =
        r.num("energy", "decode_pj_per_bit_iter", e.decode_pj_per_bit_iter);
    e.tx_rx_pj_per_bit = r.num("energy", "tx_rx_pj_per_bit", e.tx_rx_pj_per_bit);
    e.train_mj_per_epoch =
        r.num("energy", "train_mj_per_epoch", e.train_mj_per_epoch);
    e.code_rate = r.num("energy", "code_rate", e.code_rate);
    r.finish_section("energy");
}

void read_code(SectionReader& r, int& n, std::uint64_t& seed, bool& plain) {
    n = static_cast<int>(r.integer("code", "n", 1008));
    seed = r.uinteger("code", "seed", 7);
    std::string variant = r.str("code", "min_sum", "normalized");
    if (variant == "plain")
        plain = true;
    else if (variant == "normalized")
        plain = false;
    else
        r.problem("[code] min_sum must be normalized or plain");
    r.finish_section("code");
}

}  // namespace

TrainConfig parse_train_config(const IniDoc& doc) {
    std::vector<std::string> problems;
    SectionReader r(doc, problems);
    r.expect_sections({"experiment", "schedule", "model", "dataset"},
                      {"channel", "code", "energy", "calibration_table",
                       "output"});

    TrainConfig out;
    out.fl.clients = static_cast<int>(r.integer("experiment", "clients", 10));
    out.fl.rounds = static_cast<int>(r.integer("experiment", "rounds", 30));
    out.fl.local_steps =
        static_cast<int>(r.integer("experiment", "local_steps", 5));
    out.fl.eta = r.num("experiment", "learning_rate", 0.01);
    out.fl.batch_size = static_cast<int>(r.integer("experiment", "batch_size", 64));
    out.fl.n_bits = static_cast<int>(r.integer("experiment", "n_bits", 8));
    out.fl.seed = r.uinteger("experiment", "seed", 0);
    std::string mode = r.str("experiment", "mode", "statistical");
    if (mode == "physical")
        out.fl.mode = fl::Mode::Physical;
    else if (mode == "statistical")
        out.fl.mode = fl::Mode::Statistical;
    else if (mode == "error_free")
        out.fl.mode = fl::Mode::ErrorFree;
    else
        r.problem("[experiment] mode must be physical, statistical or error_free");
    std::string part = r.str("experiment", "partition", "iid");
    if (part == "iid")
        out.fl.partition = data::Partition::Iid;
    else if (part == "label_sorted")
        out.fl.partition = data::Partition::LabelSorted;
    else
        r.problem("[experiment] partition must be iid or label_sorted");
    r.finish_section("experiment");

    std::string kind = r.str("schedule", "kind", "adaptive");
    if (kind == "adaptive") {
        out.fl.schedule.kind = fl::ScheduleSpec::Kind::Adaptive;
        out.fl.schedule.adaptive.b0 = r.num("schedule", "b0", 1e-1);
        out.fl.schedule.adaptive.b_last = r.num("schedule", "b_last", 1e-4);
        out.fl.schedule.adaptive.rounds = out.fl.rounds;
    } else if (kind == "fixed_ber") {
        out.fl.schedule.kind = fl::ScheduleSpec::Kind::FixedBer;
        out.fl.schedule.fixed_ber = r.num("schedule", "b", 0.0);
    } else if (kind == "fixed_q") {
        out.fl.schedule.kind = fl::ScheduleSpec::Kind::FixedQ;
        out.fl.schedule.fixed_q = static_cast<int>(r.integer("schedule", "q", 0));
    } else {
        r.problem("[schedule] kind must be adaptive, fixed_ber or fixed_q");
    }
    r.finish_section("schedule");

    out.fl.snr_db = r.num("channel", "snr_db", 2.5);
    if (r.boolean("channel", "noiseless", false))
        out.fl.snr_db = std::numeric_limits<double>::infinity();
    r.finish_section("channel");

    fl::ModelSpec& m = out.model;
    std::string mk = r.str("model", "kind", "logistic_regression");
    if (mk == "logistic_regression")
        m.kind = fl::ModelKind::LogisticRegression;
    else if (mk == "mlp_one_hidden")
        m.kind = fl::ModelKind::MlpOneHidden;
    else
        r.problem("[model] kind must be logistic_regression or mlp_one_hidden");
    m.input_dim = static_cast<int>(r.integer("model", "input_dim", 0));
    m.hidden_dim = static_cast<int>(r.integer("model", "hidden_dim", 0));
    m.classes = static_cast<int>(r.integer("model", "classes", 2));
    r.finish_section("model");

    read_dataset(r, out.dataset);
    read_energy(r, out.fl.energy);
    read_code(r, out.code_n, out.code_seed, out.plain_min_sum);

    out.calibration_table_path = r.str("calibration_table", "path", "");
    r.finish_section("calibration_table");
    out.output_dir = r.str("output", "dir", "");
    r.finish_section("output");

    if (out.fl.mode != fl::Mode::ErrorFree && out.calibration_table_path.empty())
        problems.push_back(
            "[calibration_table] path is required unless mode = error_free");
    throw_if_any(problems);
    return out;
}

CalibrateConfig parse_calibrate_config(const IniDoc& doc) {
    std::vector<std::string> problems;
    SectionReader r(doc, problems);
    r.expect_sections({"calibration"}, {"code", "output"});

    CalibrateConfig out;
    out.job.snr_points = r.num_list("calibration", "snr_points", {1.5, 2.5});
    auto qs = r.num_list("calibration", "q_points",
                         {2, 4, 6, 8, 12, 16, 20, 24, 32, 52});
    out.job.q_points.clear();
    for (double q : qs) {
        if (q < 1 || q != std::floor(q))
            problems.push_back("[calibration] q_points must be positive integers");
        else
            out.job.q_points.push_back(static_cast<int>(q));
    }
    out.job.min_error_bits = r.integer("calibration", "min_error_bits", 100);
    out.job.max_frames = r.integer("calibration", "max_frames", 2000);
    out.job.seed = r.uinteger("calibration", "seed", 0);
    r.finish_section("calibration");

    read_code(r, out.code_n, out.code_seed, out.plain_min_sum);
    out.output_dir = r.str("output", "dir", "");
    r.finish_section("output");
    throw_if_any(problems);
    return out;
}

BoundConfig parse_bound_config(const IniDoc& doc) {
    std::vector<std::string> problems;
    SectionReader r(doc, problems);
    r.expect_sections({"bound"}, {"schedule", "output"});

    BoundConfig out;
    energy::BoundConstants& c = out.constants;
    c.smoothness_l = r.num("bound", "L", 1.0);
    c.sigma_local_sq = r.num("bound", "sigma_local_sq", 0.0);
    c.sigma_global_sq = r.num("bound", "sigma_global_sq", 0.0);
    c.f0_minus_fstar = r.num("bound", "f0_minus_fstar", 0.0);
    c.model_range_m = r.num("bound", "M", 0.0);
    c.clients = static_cast<int>(r.integer("bound", "K", 1));
    c.local_steps = static_cast<int>(r.integer("bound", "E", 1));
    c.rounds = static_cast<int>(r.integer("bound", "R", 1));
    c.n_bits = static_cast<int>(r.integer("bound", "N", 8));
    out.dim = r.integer("bound", "dim", 1);
    std::string eta = r.str("bound", "eta", "theorem");
    if (eta == "theorem") {
        out.eta_from_theorem = true;
    } else {
        try {
            c.eta = std::stod(eta);
        } catch (const std::exception&) {
            problems.push_back("[bound] eta must be a number or 'theorem'");
        }
    }
    out.fixed_ber = r.num("bound", "ber", 0.0);
    r.finish_section("bound");

    if (r.has_section("schedule")) {
        out.use_schedule = true;
        out.schedule.b0 = r.num("schedule", "b0", 1e-1);
        out.schedule.b_last = r.num("schedule", "b_last", 1e-4);
        out.schedule.rounds = c.rounds;
        r.finish_section("schedule");
    }
    out.output_dir = r.str("output", "dir", "");
    r.finish_section("output");
    throw_if_any(problems);
    return out;
}

}  // namespace wfl::cfg
