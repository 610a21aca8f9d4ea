#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "abimca/timeseries.hpp"

namespace abimca {

struct LorenzParams {
    double s = 10.0;
    double r = 28.0;
    double b = 2.667;
    double x0 = 0.0, y0 = 1.0, z0 = 1.05;
    double dt = 0.01;
    std::size_t steps = 10000;
};

/// The default start is off the invariant diagonal x = y = z. Starting on it
/// (e.g. (1,1,1)) gives a straight-line trajectory.
struct ThomasParams {
    double b = 0.1615;
    double x0 = 0.1, y0 = 0.0, z0 = -0.1;
    double dt = 0.05;
    std::size_t steps = 5000;
};

struct StepRegimeSpec {
    std::vector<std::vector<double>> regime_levels;
    std::size_t dwell = 50;
    std::size_t repeats = 1;
    double noise_std = 0.0;
    std::uint64_t seed = 0;
};

struct LabeledSeries {
    TimeSeries series;
    LabelArray labels;
};

/// Fixed-step RK4 integration. Throws std::invalid_argument on dt <= 0 or
/// steps < 2 and std::runtime_error if the state becomes non-finite.
TimeSeries gen_lorenz(const LorenzParams& params);
TimeSeries gen_thomas(const ThomasParams& params);

/// Visits each level for `dwell` steps, the whole cycle `repeats` times, with
/// N(0, noise_std) noise per entry. Labels are the 1-based regime index.
LabeledSeries gen_step_regimes(const StepRegimeSpec& spec);

/// Four-cluster 3D trajectory with constant curve parameters per cluster:
///   1  helix along +x, 64 samples per turn
///   2  straight along -y with constant acceleration
///   3  helix along -x, 32 samples per turn
///   4  straight along +y with constant acceleration
/// Straight segments are speed-matched to the neighbouring helices and each
/// cycle returns to its starting point.
LabeledSeries gen_perfect_metric_dataset(std::size_t cycle_repeats = 6);

/// The four-level stepped 3D series used by the online clustering examples.
StepRegimeSpec default_step_spec(std::size_t dwell = 100, std::size_t repeats = 2, double noise_std = 0.01,
                                 std::uint64_t seed = 7);

}  // namespace abimca
