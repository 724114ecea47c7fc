// SPDX-License-Identifier: Apache-2.0
#include "geodiv/probe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "geodiv/error.hpp"
#include "geodiv/rng.hpp"

namespace geodiv {

void EvalConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be positive");
    if (epochs == 0) throw ConfigError("epochs must be positive");
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (warmup_epochs > epochs) throw ConfigError("warmup_epochs must not exceed epochs");
    if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) throw ConfigError("weight_decay must be non-negative");
    if (!(split_fraction > 0.0 && split_fraction < 1.0)) throw ConfigError("split_fraction must lie in (0, 1)");
    if (ratios.empty()) throw ConfigError("at least one replacement ratio is required");
    for (double r : ratios)
        if (!(r >= 0.0 && r <= 1.0)) throw ConfigError(fmt::format("ratio {} outside [0, 1]", r));
    if (rep_type.empty()) throw ConfigError("rep_type must be set");
}

double warmup_cosine_lr(const EvalConfig& config, std::size_t epoch) {
    const auto w = static_cast<double>(config.warmup_epochs);
    const auto e = static_cast<double>(epoch);
    const auto total = static_cast<double>(config.epochs);
    if (epoch < config.warmup_epochs) return config.learning_rate * e / w;
    if (epoch >= config.epochs) return 0.0;
    const double progress = (e - w) / (total - w);
    return config.learning_rate * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

AdamW::AdamW(std::size_t n_params, double weight_decay, double beta1, double beta2, double eps)
    : weight_decay_(weight_decay), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n_params), v_(n_params) {}

void AdamW::step(std::span<double> params, std::span<const double> grads, double lr) {
    if (params.size() != m_.size() || grads.size() != m_.size()) throw DomainError("AdamW: parameter size mismatch");
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        params[i] *= 1.0 - lr * weight_decay_;
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i] * grads[i];
        const double m_hat = m_[i] / c1;
        const double v_hat = v_[i] / c2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + eps_);
    }
}

std::vector<double> LinearProbe::logits(std::span<const double> x) const {
    if (x.size() != dim) throw DomainError("probe: input dimension mismatch");
    std::vector<double> z(bias);
    for (std::size_t c = 0; c < n_classes; ++c) {
        const double* w = weights.data() + c * dim;
        double s = 0.0;
        for (std::size_t j = 0; j < dim; ++j) s += w[j] * x[j];
        z[c] += s;
    }
    return z;
}

std::size_t LinearProbe::predict(std::span<const double> x) const {
    const auto z = logits(x);
    return static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
}

namespace {

template <typename Get>
double cross_entropy_impl(const LinearProbe& probe, std::size_t n, Get&& get, LinearProbe* grad) {
    if (n == 0) throw DomainError("softmax_cross_entropy: empty batch");
    if (grad) {
        grad->n_classes = probe.n_classes;
        grad->dim = probe.dim;
        grad->weights.assign(probe.weights.size(), 0.0);
        grad->bias.assign(probe.bias.size(), 0.0);
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    double loss = 0.0;
    std::vector<double> p(probe.n_classes);
    for (std::size_t k = 0; k < n; ++k) {
        const Sample& s = get(k);
        if (s.label >= probe.n_classes) throw DomainError("softmax_cross_entropy: label out of range");
        const auto z = probe.logits(s.x);
        const double zmax = *std::max_element(z.begin(), z.end());
        double sum = 0.0;
        for (std::size_t c = 0; c < z.size(); ++c) {
            p[c] = std::exp(z[c] - zmax);
            sum += p[c];
        }
        loss += (std::log(sum) + zmax - z[s.label]) * inv_n;
        if (!grad) continue;
        for (std::size_t c = 0; c < z.size(); ++c) {
            const double g = (p[c] / sum - (c == s.label ? 1.0 : 0.0)) * inv_n;
            grad->bias[c] += g;
            double* gw = grad->weights.data() + c * probe.dim;
            for (std::size_t j = 0; j < probe.dim; ++j) gw[j] += g * s.x[j];
        }
    }
    return loss;
}

}  // namespace

double softmax_cross_entropy(const LinearProbe& probe, std::span<const Sample> batch, LinearProbe* grad) {
    return cross_entropy_impl(probe, batch.size(), [&](std::size_t k) -> const Sample& { return batch[k]; }, grad);
}

LinearProbe train_linear_probe(std::span<const Sample> train, std::size_t n_classes, const EvalConfig& config) {
    config.validate();
    if (train.empty()) throw DomainError("train_linear_probe: empty training set");
    std::set<std::size_t> labels;
    for (const auto& s : train) labels.insert(s.label);
    if (labels.size() < 2) throw DomainError("train_linear_probe: need at least two classes in the training set");
    if (*labels.rbegin() >= n_classes) throw DomainError("train_linear_probe: label out of range");
    const std::size_t dim = train.front().x.size();
    for (const auto& s : train)
        if (s.x.size() != dim) throw DomainError("train_linear_probe: inconsistent input dimensions");

    LinearProbe probe(n_classes, dim);
    AdamW weights_opt(probe.weights.size(), config.weight_decay);
    AdamW bias_opt(probe.bias.size(), config.weight_decay);
    auto rng = Rng::derive(config.seed, "probe-shuffle");

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    LinearProbe grad;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const double lr = warmup_cosine_lr(config, epoch);
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const auto end = std::min(order.size(), start + config.batch_size);
            const double loss = cross_entropy_impl(
                probe, end - start, [&](std::size_t k) -> const Sample& { return train[order[start + k]]; }, &grad);
            if (!std::isfinite(loss))
                throw DivergenceError(epoch, fmt::format("linear probe diverged: non-finite loss at epoch {}", epoch));
            weights_opt.step(probe.weights, grad.weights, lr);
            bias_opt.step(probe.bias, grad.bias, lr);
        }
    }
    probe.final_loss = softmax_cross_entropy(probe, train);
    if (!std::isfinite(probe.final_loss))
        throw DivergenceError(config.epochs, "linear probe diverged: non-finite final loss");
    return probe;
}

double accuracy(const LinearProbe& probe, std::span<const Sample> samples) {
    if (samples.empty()) throw DomainError("accuracy: empty sample set");
    std::size_t hits = 0;
    for (const auto& s : samples) hits += probe.predict(s.x) == s.label ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(samples.size());
}

}  // namespace geodiv
