#include "wfl/energy.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace wfl::energy {

void EnergyModel::validate() const {
    if (decode_pj_per_bit_iter < 0 || tx_rx_pj_per_bit < 0 ||
        train_mj_per_epoch < 0 || code_rate <= 0 || code_rate > 1)
        throw std::invalid_argument("EnergyModel: invalid parameters");
}

double decoding_energy(double payload_bits, double mean_iterations,
                       const EnergyModel& model) {
    if (payload_bits < 0 || mean_iterations < 0)
        throw std::invalid_argument("decoding_energy: negative inputs");
    return payload_bits * mean_iterations * model.decode_pj_per_bit_iter * 1e-12;
}

double transceiver_energy(double payload_bits, const EnergyModel& model) {
    if (payload_bits < 0)
        throw std::invalid_argument("transceiver_energy: negative inputs");
    return payload_bits / model.code_rate * model.tx_rx_pj_per_bit * 1e-12;
}

double training_energy(double epochs, const EnergyModel& model) {
    if (epochs < 0) throw std::invalid_argument("training_energy: negative inputs");
    return epochs * model.train_mj_per_epoch * 1e-3;
}

void BoundConstants::validate() const {
    if (smoothness_l < 0 || sigma_local_sq < 0 || sigma_global_sq < 0 ||
        f0_minus_fstar < 0 || model_range_m < 0)
        throw std::invalid_argument("BoundConstants: negative constant");
    if (clients < 1 || local_steps < 1 || rounds < 1 || n_bits < 1)
        throw std::invalid_argument("BoundConstants: bad counts");
    if (!(eta > 0)) throw std::invalid_argument("BoundConstants: eta must be > 0");
}

bool lr_condition_holds(const BoundConstants& c) {
    const double l = c.smoothness_l;
    const double k = static_cast<double>(c.clients);
    const double e = static_cast<double>(c.local_steps);
    return 1.0 - (k + l) / k * l * c.eta -
               2.0 * l * l * c.eta * c.eta * e * (e - 1.0) >=
           0.0;
}

double theorem_eta(const BoundConstants& c) {
    return 1.0 / (c.smoothness_l *
                  std::sqrt(static_cast<double>(c.rounds) * c.local_steps));
}

BoundReport convergence_bound_rhs(const BoundConstants& c, std::int64_t dim,
                                  const std::vector<double>& ber_sequence) {
    c.validate();
    if (static_cast<int>(ber_sequence.size()) != c.rounds)
        throw std::invalid_argument(
            "convergence_bound_rhs: ber sequence length must equal rounds");

    const double l = c.smoothness_l;
    const double k = static_cast<double>(c.clients);
    const double e = static_cast<double>(c.local_steps);
    const double r = static_cast<double>(c.rounds);
    const double t = r * e;
    const double d = static_cast<double>(dim);
    const double two_n = std::pow(2.0, c.n_bits);
    const double four_n = std::pow(4.0, c.n_bits);
    const double digit_factor = (four_n - 1.0) / (3.0 * (two_n - 1.0) * (two_n - 1.0));

    BoundReport rep;
    for (double b : ber_sequence)
        rep.ber_sum += b * std::pow(1.0 - b, c.n_bits - 1);

    rep.term_init = 2.0 * c.f0_minus_fstar / (c.eta * t);
    rep.term_bit_errors = (l + 1.0) * (l + 1.0) * d * c.model_range_m *
                          c.model_range_m * digit_factor / (c.eta * t) *
                          rep.ber_sum;
    rep.term_variance =
        l * (l + 1.0) * c.eta * (c.sigma_local_sq + c.sigma_global_sq) / k;
    rep.term_drift =
        l * l * c.eta * c.eta * c.sigma_local_sq * (k + 1.0) * (e - 1.0) / k;
    rep.total = rep.term_init + rep.term_bit_errors + rep.term_variance +
                rep.term_drift;
    rep.lr_condition = lr_condition_holds(c);

    rep.c0 = 2.0 * l * c.f0_minus_fstar;
    rep.c1 = l * (l + 1.0) * (l + 1.0) * d * c.model_range_m *
             c.model_range_m * digit_factor;
    rep.c2 = (l + 1.0) * (c.sigma_local_sq + c.sigma_global_sq) / k;
    rep.c3 = l * l * c.sigma_local_sq * (k + 1.0) * (e - 1.0) / k;
    const double sqrt_t = std::sqrt(t);
    rep.simplified_total = rep.c0 / sqrt_t + rep.c1 * rep.ber_sum / sqrt_t +
                           rep.c2 / sqrt_t + rep.c3 / t;
    return rep;
}

std::string bound_report_json(const BoundConstants& c, std::int64_t dim,
                              const std::vector<double>& ber_sequence) {
    BoundReport r = convergence_bound_rhs(c, dim, ber_sequence);
    nlohmann::json j;
    j["constants"] = {{"L", c.smoothness_l},
                      {"sigma_local_sq", c.sigma_local_sq},
                      {"sigma_global_sq", c.sigma_global_sq},
                      {"f0_minus_fstar", c.f0_minus_fstar},
                      {"M", c.model_range_m},
                      {"K", c.clients},
                      {"E", c.local_steps},
                      {"R", c.rounds},
                      {"N", c.n_bits},
                      {"eta", c.eta},
                      {"dim", dim}};
    j["terms"] = {{"initial_gap", r.term_init},
                  {"bit_errors", r.term_bit_errors},
                  {"gradient_variance", r.term_variance},
                  {"local_drift", r.term_drift}};
    j["total"] = r.total;
    j["ber_weighted_sum"] = r.ber_sum;
    j["lr_condition_holds"] = r.lr_condition;
    j["simplified"] = {{"C0", r.c0},
                       {"C1", r.c1},
                       {"C2", r.c2},
                       {"C3", r.c3},
                       {"total_at_theorem_eta", r.simplified_total}};
    return j.dump(2) + "\n";
}

}  // namespace wfl::energy
