// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace geodiv {

/// Hyperparameters of the supplementation experiment and its linear probe.
struct EvalConfig {
    double learning_rate = 5e-3;
    std::size_t epochs = 250;
    std::size_t batch_size = 512;
    std::size_t warmup_epochs = 50;
    double weight_decay = 0.01;
    std::vector<double> ratios{1.0, 0.9, 0.7, 0.5, 0.3, 0.1, 0.0};
    double split_fraction = 0.9;
    std::uint64_t seed = 0;
    std::string rep_type = "clip";
    /// Reps averaged for donor rankings; empty means every rep in the store.
    std::vector<std::string> similarity_reps;

    /// Throws ConfigError.
    void validate() const;
};

/// Linear warmup from 0 to learning_rate over warmup_epochs, then cosine
/// decay reaching 0 at `epochs`.
double warmup_cosine_lr(const EvalConfig& config, std::size_t epoch);

/// AdamW with decoupled weight decay.
class AdamW {
public:
    AdamW(std::size_t n_params, double weight_decay, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

    void step(std::span<double> params, std::span<const double> grads, double lr);
    std::size_t steps() const noexcept { return t_; }

private:
    double weight_decay_, beta1_, beta2_, eps_;
    std::vector<double> m_, v_;
    std::size_t t_ = 0;
};

/// One training or test example. `x` points into a Store, which must outlive
/// the sample.
struct Sample {
    std::string image_id;
    std::size_t label = 0;
    std::string topic;
    std::string country;  // empty for high-resource donors
    std::span<const double> x;
};

/// Affine map embedding -> class logits, read through a softmax.
struct LinearProbe {
    std::size_t n_classes = 0;
    std::size_t dim = 0;
    std::vector<double> weights;  // n_classes x dim, row-major
    std::vector<double> bias;     // n_classes
    double final_loss = 0.0;

    LinearProbe() = default;
    LinearProbe(std::size_t classes, std::size_t dimension)
        : n_classes(classes), dim(dimension), weights(classes * dimension), bias(classes) {}

    std::vector<double> logits(std::span<const double> x) const;
    std::size_t predict(std::span<const double> x) const;
};

/// Mean softmax cross-entropy over `batch`. When `grad` is non-null it
/// receives d(loss)/d(weights, bias) with the probe's shapes.
double softmax_cross_entropy(const LinearProbe& probe, std::span<const Sample> batch, LinearProbe* grad = nullptr);

/// Trains from zero weights with seeded per-epoch shuffling; the last partial
/// batch is kept. Throws DivergenceError on a non-finite loss and DomainError
/// when fewer than two classes are present.
LinearProbe train_linear_probe(std::span<const Sample> train, std::size_t n_classes, const EvalConfig& config);

double accuracy(const LinearProbe& probe, std::span<const Sample> samples);

}  // namespace geodiv
