#include "abimca/datasets.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "abimca/core/rng.hpp"

namespace abimca {
namespace {

using State = std::array<double, 3>;

template <class F>
TimeSeries integrate_rk4(F&& f, State x, double dt, std::size_t steps, const char* name) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument(std::string(name) + ": dt must be positive");
    if (steps < 2) throw std::invalid_argument(std::string(name) + ": steps must be at least 2");

    auto axpy = [](const State& a, double h, const State& k) {
        return State{a[0] + h * k[0], a[1] + h * k[1], a[2] + h * k[2]};
    };
    Matrix values(3, steps);
    for (std::size_t t = 0; t < steps; ++t) {
        for (int i = 0; i < 3; ++i) {
            if (!std::isfinite(x[i])) {
                throw std::runtime_error(std::string(name) + ": state diverged at step " + std::to_string(t));
            }
            values(i, t) = x[i];
        }
        const State k1 = f(x);
        const State k2 = f(axpy(x, dt / 2, k1));
        const State k3 = f(axpy(x, dt / 2, k2));
        const State k4 = f(axpy(x, dt, k3));
        for (int i = 0; i < 3; ++i) x[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
    return TimeSeries(std::move(values), {"x", "y", "z"}, dt);
}

}  // namespace

TimeSeries gen_lorenz(const LorenzParams& p) {
    auto f = [&](const State& v) {
        return State{p.s * (v[1] - v[0]), p.r * v[0] - v[1] - v[0] * v[2], v[0] * v[1] - p.b * v[2]};
    };
    return integrate_rk4(f, {p.x0, p.y0, p.z0}, p.dt, p.steps, "gen_lorenz");
}

TimeSeries gen_thomas(const ThomasParams& p) {
    auto f = [&](const State& v) {
        return State{std::sin(v[1]) - p.b * v[0], std::sin(v[2]) - p.b * v[1], std::sin(v[0]) - p.b * v[2]};
    };
    return integrate_rk4(f, {p.x0, p.y0, p.z0}, p.dt, p.steps, "gen_thomas");
}

LabeledSeries gen_step_regimes(const StepRegimeSpec& spec) {
    const auto& levels = spec.regime_levels;
    if (levels.size() < 2) throw std::invalid_argument("gen_step_regimes: need at least 2 regimes");
    if (spec.dwell < 2) throw std::invalid_argument("gen_step_regimes: dwell must be at least 2");
    if (spec.repeats < 1) throw std::invalid_argument("gen_step_regimes: repeats must be at least 1");
    if (!(spec.noise_std >= 0.0)) throw std::invalid_argument("gen_step_regimes: noise_std must be >= 0");
    const std::size_t d = levels.front().size();
    if (d == 0) throw std::invalid_argument("gen_step_regimes: empty level vector");
    for (const auto& l : levels) {
        if (l.size() != d) throw std::invalid_argument("gen_step_regimes: level dimensions differ");
    }

    const std::size_t n = levels.size() * spec.dwell * spec.repeats;
    Matrix values(d, n);
    LabelArray labels(n);
    Rng rng(spec.seed);
    std::size_t t = 0;
    for (std::size_t r = 0; r < spec.repeats; ++r) {
        for (std::size_t g = 0; g < levels.size(); ++g) {
            for (std::size_t k = 0; k < spec.dwell; ++k, ++t) {
                labels[t] = static_cast<Label>(g + 1);
                for (std::size_t f = 0; f < d; ++f) {
                    values(f, t) = levels[g][f] + (spec.noise_std > 0.0 ? rng.normal(0.0, spec.noise_std) : 0.0);
                }
            }
        }
    }
    return {TimeSeries(std::move(values)), std::move(labels)};
}

StepRegimeSpec default_step_spec(std::size_t dwell, std::size_t repeats, double noise_std, std::uint64_t seed) {
    StepRegimeSpec spec;
    spec.regime_levels = {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.5}, {1.0, 1.0, 1.0}, {0.0, 1.0, 0.5}};
    spec.dwell = dwell;
    spec.repeats = repeats;
    spec.noise_std = noise_std;
    spec.seed = seed;
    return spec;
}

LabeledSeries gen_perfect_metric_dataset(std::size_t cycle_repeats) {
    if (cycle_repeats < 1) throw std::invalid_argument("gen_perfect_metric_dataset: cycle_repeats must be >= 1");
    constexpr double pi = std::numbers::pi;
    constexpr double radius = 8.0;
    constexpr double pitch = 0.01;  // axial advance per step of cluster 1
    constexpr std::size_t turns = 8;
    constexpr std::size_t spt1 = 64, spt3 = 32;
    constexpr std::size_t n1 = spt1 * turns + spt1 / 2;
    constexpr std::size_t n3 = spt3 * turns + spt3 / 2;
    constexpr std::size_t k2 = 256, k4 = 224;

    const double w1 = 2 * pi / spt1, w3 = 2 * pi / spt3;
    const double v1 = std::hypot(w1 * radius, pitch);
    const double v3 = std::hypot(w3 * radius, 2 * pitch);
    const double c2 = (v3 - v1) / (2.0 * k2);
    const double travel2 = v1 * k2 + c2 * k2 * k2;
    const double c4 = (v3 * k4 - travel2) / (static_cast<double>(k4) * k4);

    const std::size_t n = cycle_repeats * (n1 + k2 + n3 + k4);
    Matrix values(3, n);
    LabelArray labels(n);
    std::array<double, 3> pos{0.0, 0.0, 0.0};
    std::size_t t = 0;
    auto emit = [&](Label id, double dx, double dy, double dz) {
        values(0, t) = pos[0] + dx;
        values(1, t) = pos[1] + dy;
        values(2, t) = pos[2] + dz;
        labels[t++] = id;
    };
    auto helix = [&](Label id, std::size_t steps, double w, double axial, double theta0) {
        for (std::size_t k = 1; k <= steps; ++k) {
            const double th = theta0 + w * static_cast<double>(k);
            emit(id, axial * static_cast<double>(k), radius * (std::cos(th) - std::cos(theta0)),
                 radius * (std::sin(th) - std::sin(theta0)));
        }
    };
    auto straight = [&](Label id, std::size_t steps, double lin, double quad) {
        for (std::size_t k = 1; k <= steps; ++k) {
            const double kk = static_cast<double>(k);
            emit(id, 0.0, lin * kk + quad * kk * kk, 0.0);
        }
    };
    auto advance = [&] {
        for (int i = 0; i < 3; ++i) pos[i] = values(i, t - 1);
    };

    for (std::size_t r = 0; r < cycle_repeats; ++r) {
        helix(1, n1, w1, pitch, -pi / 2);
        advance();
        straight(2, k2, -v1, -c2);
        advance();
        helix(3, n3, w3, -2 * pitch, pi / 2);
        advance();
        straight(4, k4, v3, -c4);
        advance();
    }
    return {TimeSeries(std::move(values), {"x", "y", "z"}), std::move(labels)};
}

}  // namespace abimca
