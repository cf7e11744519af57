#include "wfl/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wfl::fl {

void ModelSpec::validate() const {
    if (input_dim < 1 || classes < 2)
        throw std::invalid_argument("ModelSpec: bad dimensions");
    if (kind == ModelKind::MlpOneHidden && hidden_dim < 1)
        throw std::invalid_argument("ModelSpec: MLP needs hidden_dim >= 1");
}

int ModelSpec::param_count() const {
    if (kind == ModelKind::LogisticRegression)
        return (input_dim + 1) * classes;
    return (input_dim + 1) * hidden_dim + (hidden_dim + 1) * classes;
}

namespace {

// logits -> probabilities in place, returns -log p[target]
double softmax_ce(std::span<double> scores, int target) {
    double mx = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (double& s : scores) {
        s = std::exp(s - mx);
        sum += s;
    }
    for (double& s : scores) s /= sum;
    return -std::log(std::max(scores[static_cast<std::size_t>(target)], 1e-300));
}

// Layout: W (classes x input, row-major), then bias (classes).
class LogisticModel final : public Objective {
  public:
    explicit LogisticModel(const ModelSpec& spec) : spec_(spec) {}

    int param_count() const override { return spec_.param_count(); }

    double loss_grad(std::span<const double> w, const data::Dataset& data,
                     std::span<const int> batch,
                     std::span<double> grad) const override {
        const int in = spec_.input_dim, cls = spec_.classes;
        std::fill(grad.begin(), grad.end(), 0.0);
        std::vector<double> scores(static_cast<std::size_t>(cls));
        double total = 0.0;
        const double inv = 1.0 / static_cast<double>(batch.size());
        for (int s : batch) {
            const double* x = data.row(s);
            forward(w, x, scores);
            total += softmax_ce(scores, data.labels[static_cast<std::size_t>(s)]);
            for (int c = 0; c < cls; ++c) {
                double g = scores[static_cast<std::size_t>(c)] -
                           (data.labels[static_cast<std::size_t>(s)] == c ? 1.0 : 0.0);
                double* grow = grad.data() + static_cast<std::size_t>(c) * in;
                for (int j = 0; j < in; ++j) grow[j] += inv * g * x[j];
                grad[static_cast<std::size_t>(cls) * in + c] += inv * g;
            }
        }
        return total * inv;
    }

    double loss(std::span<const double> w, const data::Dataset& data,
                std::span<const int> batch) const override {
        const int cls = spec_.classes;
        std::vector<double> scores(static_cast<std::size_t>(cls));
        double total = 0.0;
        for (int s : batch) {
            forward(w, data.row(s), scores);
            total += softmax_ce(scores, data.labels[static_cast<std::size_t>(s)]);
        }
        return total / static_cast<double>(batch.size());
    }

    void forward(std::span<const double> w, const double* x,
                 std::span<double> scores) const {
        const int in = spec_.input_dim, cls = spec_.classes;
        for (int c = 0; c < cls; ++c) {
            const double* wrow = w.data() + static_cast<std::size_t>(c) * in;
            double acc = w[static_cast<std::size_t>(cls) * in + c];
            for (int j = 0; j < in; ++j) acc += wrow[j] * x[j];
            scores[static_cast<std::size_t>(c)] = acc;
        }
    }

  private:
    ModelSpec spec_;
};

// Layout: W1 (hidden x input), b1 (hidden), W2 (classes x hidden),
// b2 (classes); tanh activations.
class MlpModel final : public Objective {
  public:
    explicit MlpModel(const ModelSpec& spec) : spec_(spec) {}

    int param_count() const override { return spec_.param_count(); }

    double loss_grad(std::span<const double> w, const data::Dataset& data,
                     std::span<const int> batch,
                     std::span<double> grad) const override {
        const int in = spec_.input_dim, hid = spec_.hidden_dim,
                  cls = spec_.classes;
        const std::size_t w1 = 0, b1 = static_cast<std::size_t>(hid) * in,
                          w2 = b1 + hid,
                          b2 = w2 + static_cast<std::size_t>(cls) * hid;
        std::fill(grad.begin(), grad.end(), 0.0);
        std::vector<double> h(static_cast<std::size_t>(hid));
        std::vector<double> scores(static_cast<std::size_t>(cls));
        std::vector<double> dh(static_cast<std::size_t>(hid));
        double total = 0.0;
        const double inv = 1.0 / static_cast<double>(batch.size());
        for (int s : batch) {
            const double* x = data.row(s);
            for (int a = 0; a < hid; ++a) {
                const double* row = w.data() + w1 + static_cast<std::size_t>(a) * in;
                double acc = w[b1 + a];
                for (int j = 0; j < in; ++j) acc += row[j] * x[j];
                h[static_cast<std::size_t>(a)] = std::tanh(acc);
            }
            for (int c = 0; c < cls; ++c) {
                const double* row = w.data() + w2 + static_cast<std::size_t>(c) * hid;
                double acc = w[b2 + c];
                for (int a = 0; a < hid; ++a) acc += row[a] * h[static_cast<std::size_t>(a)];
                scores[static_cast<std::size_t>(c)] = acc;
            }
            total += softmax_ce(scores, data.labels[static_cast<std::size_t>(s)]);
            std::fill(dh.begin(), dh.end(), 0.0);
            for (int c = 0; c < cls; ++c) {
                double g = scores[static_cast<std::size_t>(c)] -
                           (data.labels[static_cast<std::size_t>(s)] == c ? 1.0 : 0.0);
                double* grow = grad.data() + w2 + static_cast<std::size_t>(c) * hid;
                for (int a = 0; a < hid; ++a) {
                    grow[a] += inv * g * h[static_cast<std::size_t>(a)];
                    dh[static_cast<std::size_t>(a)] +=
                        g * w[w2 + static_cast<std::size_t>(c) * hid + a];
                }
                grad[b2 + c] += inv * g;
            }
            for (int a = 0; a < hid; ++a) {
                double ha = h[static_cast<std::size_t>(a)];
                double da = dh[static_cast<std::size_t>(a)] * (1.0 - ha * ha);
                double* grow = grad.data() + w1 + static_cast<std::size_t>(a) * in;
                for (int j = 0; j < in; ++j) grow[j] += inv * da * x[j];
                grad[b1 + a] += inv * da;
            }
        }
        return total * inv;
    }

    double loss(std::span<const double> w, const data::Dataset& data,
                std::span<const int> batch) const override {
        const int cls = spec_.classes;
        std::vector<double> scores(static_cast<std::size_t>(cls));
        double total = 0.0;
        for (int s : batch) {
            class_scores(spec_, w, data.row(s), scores);
            total += softmax_ce(scores, data.labels[static_cast<std::size_t>(s)]);
        }
        return total / static_cast<double>(batch.size());
    }

  private:
    ModelSpec spec_;
};

}  // namespace

void class_scores(const ModelSpec& spec, std::span<const double> w,
                  const double* x, std::span<double> scores) {
    const int in = spec.input_dim, cls = spec.classes;
    if (spec.kind == ModelKind::LogisticRegression) {
        for (int c = 0; c < cls; ++c) {
            const double* row = w.data() + static_cast<std::size_t>(c) * in;
            double acc = w[static_cast<std::size_t>(cls) * in + c];
            for (int j = 0; j < in; ++j) acc += row[j] * x[j];
            scores[static_cast<std::size_t>(c)] = acc;
        }
        return;
    }
    const int hid = spec.hidden_dim;
    const std::size_t b1 = static_cast<std::size_t>(hid) * in, w2 = b1 + hid,
                      b2 = w2 + static_cast<std::size_t>(cls) * hid;
    std::vector<double> h(static_cast<std::size_t>(hid));
    for (int a = 0; a < hid; ++a) {
        const double* row = w.data() + static_cast<std::size_t>(a) * in;
        double acc = w[b1 + a];
        for (int j = 0; j < in; ++j) acc += row[j] * x[j];
        h[static_cast<std::size_t>(a)] = std::tanh(acc);
    }
    for (int c = 0; c < cls; ++c) {
        const double* row = w.data() + w2 + static_cast<std::size_t>(c) * hid;
        double acc = w[b2 + c];
        for (int a = 0; a < hid; ++a) acc += row[a] * h[static_cast<std::size_t>(a)];
        scores[static_cast<std::size_t>(c)] = acc;
    }
}

std::unique_ptr<Objective> make_model(const ModelSpec& spec) {
    spec.validate();
    if (spec.kind == ModelKind::LogisticRegression)
        return std::make_unique<LogisticModel>(spec);
    return std::make_unique<MlpModel>(spec);
}

double accuracy(const Objective&, const ModelSpec& spec,
                std::span<const double> w, const data::Dataset& data,
                std::span<const int> samples) {
    std::vector<double> scores(static_cast<std::size_t>(spec.classes));
    std::int64_t hit = 0;
    for (int s : samples) {
        class_scores(spec, w, data.row(s), scores);
        int best = static_cast<int>(
            std::max_element(scores.begin(), scores.end()) - scores.begin());
        if (best == data.labels[static_cast<std::size_t>(s)]) ++hit;
    }
    return static_cast<double>(hit) / static_cast<double>(samples.size());
}

}  // namespace wfl::fl
