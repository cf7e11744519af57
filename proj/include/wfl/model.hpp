#pragma once

// Training objectives over a flat weight vector. Two desk-scale model
// kinds stand in for the DNNs: multinomial logistic regression and a
// one-hidden-layer tanh MLP, both with analytic gradients. The Objective
// interface is what the engine trains against; tests inject synthetic
// objectives through it.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wfl/dataset.hpp"

namespace wfl::fl {

class Objective {
  public:
    virtual ~Objective() = default;
    virtual int param_count() const = 0;
    // Mean loss over the batch; accumulates nothing, writes the full
    // gradient into grad (size param_count()).
    virtual double loss_grad(std::span<const double> w,
                             const data::Dataset& data,
                             std::span<const int> batch,
                             std::span<double> grad) const = 0;
    virtual double loss(std::span<const double> w, const data::Dataset& data,
                        std::span<const int> batch) const = 0;
};

enum class ModelKind { LogisticRegression, MlpOneHidden };

struct ModelSpec {
    ModelKind kind = ModelKind::LogisticRegression;
    int input_dim = 0;
    int hidden_dim = 0;  // MLP only
    int classes = 2;

    int param_count() const;
    void validate() const;
};

// Cross-entropy classifier factory for the spec above.
std::unique_ptr<Objective> make_model(const ModelSpec& spec);

// Fraction of correctly argmax-classified samples.
double accuracy(const Objective& model, const ModelSpec& spec,
                std::span<const double> w, const data::Dataset& data,
                std::span<const int> samples);

// Class scores for one sample (used by accuracy; exposed for tests).
void class_scores(const ModelSpec& spec, std::span<const double> w,
                  const double* x, std::span<double> scores);

}  // namespace wfl::fl
