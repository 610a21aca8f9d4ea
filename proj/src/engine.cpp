#include "abimca/engine.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "abimca/core/error.hpp"

namespace abimca {

void AbimcaConfig::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("abimca config: " + what); };
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be positive");
    if (train_cycles < 1) fail("train_cycles must be at least 1");
    if (!(detection_threshold >= 0.0) || !std::isfinite(detection_threshold)) fail("eta must be >= 0");
    if (!(theta_factor >= 1.0) || !std::isfinite(theta_factor)) fail("theta_factor must be >= 1");
    if (window_length < 2) fail("window_length must be at least 2");
    if (stride < 1) fail("stride must be at least 1");
    if (!(score_weight > 0.0) || !std::isfinite(score_weight)) fail("score_weight must be positive");
    if (!(penalty_weight >= 0.0)) fail("penalty_weight must be >= 0");
}

double score(double loss_total, std::span<const double> latent, const AbimcaConfig& config) {
    double dev = 0.0;
    for (double h : latent) dev += std::abs(config.latent_center - h);
    if (!latent.empty()) dev /= static_cast<double>(latent.size());
    return config.score_weight * dev + loss_total / config.score_weight;
}

Label SubseqRegistry::add(AeModel model, std::size_t created_at) {
    models_.push_back(std::move(model));
    created_.push_back(created_at);
    return static_cast<Label>(models_.size());
}

double score_window(const AeModel& model, const Matrix& window, const AbimcaConfig& config) {
    const ForwardResult fwd = forward(model, window);
    const LossBreakdown l = loss(window, fwd.reconstruction, fwd.latent, config.train_config());
    return score(l.total, fwd.latent, config);
}

Engine::Engine(std::size_t dims, AbimcaConfig config) : config_(config) {
    config_.validate();
    base_ = init_model(dims, config_.seed);
}

StepResult Engine::process_window(const SlidingWindow& window) {
    StepResult res;
    res.t = window.end_index();
    const TrainConfig tc = config_.train_config();
    try {
        for (std::size_t k = 0; k < config_.train_cycles; ++k) train_step(base_, window.values, tc);
    } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " at t=" + std::to_string(res.t), static_cast<long>(res.t));
    }
    const ForwardResult fwd = forward(base_, window.values);
    res.loss = loss(window.values, fwd.reconstruction, fwd.latent, tc);
    res.base_score = score(res.loss.total, fwd.latent, config_);
    if (!std::isfinite(res.base_score)) {
        throw NumericError("non-finite base score at t=" + std::to_string(res.t), static_cast<long>(res.t));
    }

    res.subseq_scores.reserve(registry_.size());
    for (std::size_t i = 0; i < registry_.size(); ++i) {
        res.subseq_scores.push_back(score_window(registry_.model(static_cast<Label>(i + 1)), window.values, config_));
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < res.subseq_scores.size(); ++i) {
        if (res.subseq_scores[i] < res.subseq_scores[best]) best = i;
    }
    if (!res.subseq_scores.empty() && res.subseq_scores[best] < config_.recognition_threshold()) {
        res.label = static_cast<Label>(best + 1);
    } else if (res.base_score <= config_.detection_threshold) {
        res.label = registry_.add(base_, res.t);
    }
    return res;
}

LabelArray propagate_labels(std::size_t n, std::span<const std::size_t> window_ends, std::span<const Label> labels) {
    LabelArray out(n, 0);
    Label current = 0;
    std::size_t w = 0;
    for (std::size_t t = 0; t < n; ++t) {
        while (w < window_ends.size() && window_ends[w] == t) current = labels[w++];
        out[t] = current;
    }
    return out;
}

OnlineResult run_online(const TimeSeries& series, const AbimcaConfig& config,
                        const std::optional<StandardizationStats>& stats) {
    config.validate();
    if (series.length() < config.window_length) throw std::invalid_argument("run_online: series shorter than window");
    const StandardizationStats st = stats ? *stats : fit_stats(series);
    const TimeSeries z = standardize(series, st);

    Engine engine(series.dims(), config);
    engine.registry().stats = st;
    OnlineResult out;
    std::vector<std::size_t> ends;
    std::vector<Label> labels;
    for (std::size_t s : window_starts(z.length(), config.window_length, config.stride)) {
        StepResult r = engine.process_window(window_at(z, s, config.window_length));
        ends.push_back(r.t);
        labels.push_back(r.label);
        out.steps.push_back(std::move(r));
    }
    out.labels = propagate_labels(series.length(), ends, labels);
    out.registry = engine.registry();
    return out;
}

OfflineResult predict_offline_detailed(const TimeSeries& series, const SubseqRegistry& registry,
                                       const AbimcaConfig& config) {
    config.validate();
    if (registry.empty()) throw std::invalid_argument("predict_offline: empty registry");
    if (series.length() < config.window_length) throw std::invalid_argument("predict_offline: series shorter than window");
    const TimeSeries z = registry.stats.mean.empty() ? series : standardize(series, registry.stats);

    OfflineResult out;
    std::vector<Label> labels;
    for (std::size_t s : window_starts(z.length(), config.window_length, config.stride)) {
        const SlidingWindow w = window_at(z, s, config.window_length);
        std::vector<double> sc;
        for (std::size_t i = 0; i < registry.size(); ++i) {
            sc.push_back(score_window(registry.model(static_cast<Label>(i + 1)), w.values, config));
        }
        std::size_t best = 0;
        for (std::size_t i = 1; i < sc.size(); ++i) {
            if (sc[i] < sc[best]) best = i;
        }
        const bool known = !config.allow_unknown_in_predict || sc[best] < config.recognition_threshold();
        labels.push_back(known ? static_cast<Label>(best + 1) : 0);
        out.window_ends.push_back(w.end_index());
        out.scores.push_back(std::move(sc));
    }
    out.labels = propagate_labels(series.length(), out.window_ends, labels);
    return out;
}

LabelArray predict_offline(const TimeSeries& series, const SubseqRegistry& registry, const AbimcaConfig& config) {
    return predict_offline_detailed(series, registry, config).labels;
}

}  // namespace abimca
