#pragma once

#include <cstdint>
#include <vector>

#include "abimca/core/matrix.hpp"
#include "abimca/timeseries.hpp"

namespace abimca {

/// Per-step curvature, torsion, speed and acceleration magnitude.
struct CurveParams {
    std::vector<double> kappa;
    std::vector<double> tau;
    std::vector<double> speed;
    std::vector<double> accel;

    std::size_t size() const noexcept { return kappa.size(); }
};

/// Unit tangent, normal and binormal per step (3 x n). Columns flagged
/// degenerate are zero.
struct FrenetFrame {
    Matrix e1, e2, e3;
    std::vector<std::uint8_t> e1_defined;
    std::vector<std::uint8_t> e2_defined;
    std::vector<std::uint8_t> e3_defined;
};

inline constexpr double kDegenerateEps = 1e-12;

/// First derivative with unit spacing: central differences inside, 2nd-order
/// one-sided stencils at both ends. Rows are features, columns time.
Matrix diff1(const Matrix& x);

/// Applies diff1 `order` times (1..3). Throws std::invalid_argument if the
/// order is outside 1..3 or the series has fewer than 4 steps.
Matrix differentiate(const TimeSeries& series, int order);
Matrix differentiate(const Matrix& x, int order);

/// Gram-Schmidt frame from the first three derivatives. d = 2 inputs are
/// embedded in 3D with a zero third coordinate; d = 1 is rejected.
FrenetFrame frenet_frame(const TimeSeries& series);

/// kappa = <de1/dt, e2> / |x'|, tau = <de2/dt, e3> / |x'|, v = |x'|, a = |x''|.
/// Steps with a degenerate frame get kappa = tau = 0.
CurveParams curve_params(const TimeSeries& series);

}  // namespace abimca
