#include "abimca/curve_geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace abimca {
namespace {

double col_dot(const Matrix& a, std::size_t i, const Matrix& b, std::size_t j) {
    double s = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) s += a(r, i) * b(r, j);
    return s;
}

double col_norm(const Matrix& a, std::size_t i) { return std::sqrt(col_dot(a, i, a, i)); }

Matrix embed_3d(const TimeSeries& series) {
    if (series.dims() < 2) throw std::invalid_argument("curve geometry needs at least 2 features");
    if (series.length() < 4) throw std::invalid_argument("curve geometry needs at least 4 time steps");
    if (series.dims() >= 3) return series.values();
    Matrix out(3, series.length(), 0.0);
    for (std::size_t f = 0; f < 2; ++f) {
        for (std::size_t t = 0; t < series.length(); ++t) out(f, t) = series(f, t);
    }
    return out;
}

struct FrameWork {
    FrenetFrame frame;
    Matrix xd, xdd;
};

FrameWork build_frame(const Matrix& x) {
    const std::size_t d = x.rows(), n = x.cols();
    Matrix xd = diff1(x);
    Matrix xdd = diff1(xd);
    const Matrix xddd = diff1(xdd);

    FrenetFrame fr{Matrix(d, n), Matrix(d, n), Matrix(d, n), std::vector<std::uint8_t>(n),
                   std::vector<std::uint8_t>(n), std::vector<std::uint8_t>(n)};
    for (std::size_t t = 0; t < n; ++t) {
        const double v = col_norm(xd, t);
        if (v < kDegenerateEps) continue;
        fr.e1_defined[t] = 1;
        for (std::size_t r = 0; r < d; ++r) fr.e1(r, t) = xd(r, t) / v;

        const double p1 = col_dot(xdd, t, fr.e1, t);
        std::vector<double> e2b(d);
        for (std::size_t r = 0; r < d; ++r) e2b[r] = xdd(r, t) - p1 * fr.e1(r, t);
        double n2 = 0.0;
        for (double c : e2b) n2 += c * c;
        n2 = std::sqrt(n2);
        if (n2 < kDegenerateEps) continue;
        fr.e2_defined[t] = 1;
        for (std::size_t r = 0; r < d; ++r) fr.e2(r, t) = e2b[r] / n2;

        const double q1 = col_dot(xddd, t, fr.e1, t);
        const double q2 = col_dot(xddd, t, fr.e2, t);
        std::vector<double> e3b(d);
        for (std::size_t r = 0; r < d; ++r) e3b[r] = xddd(r, t) - q1 * fr.e1(r, t) - q2 * fr.e2(r, t);
        double n3 = 0.0;
        for (double c : e3b) n3 += c * c;
        n3 = std::sqrt(n3);
        if (n3 < kDegenerateEps) continue;
        fr.e3_defined[t] = 1;
        for (std::size_t r = 0; r < d; ++r) fr.e3(r, t) = e3b[r] / n3;
    }
    return {std::move(fr), std::move(xd), std::move(xdd)};
}

}  // namespace

Matrix diff1(const Matrix& x) {
    const std::size_t d = x.rows(), n = x.cols();
    if (n < 3) throw std::invalid_argument("diff1: need at least 3 time steps");
    Matrix out(d, n);
    for (std::size_t r = 0; r < d; ++r) {
        const auto in = x.row(r);
        auto o = out.row(r);
        o[0] = (-3.0 * in[0] + 4.0 * in[1] - in[2]) / 2.0;
        for (std::size_t t = 1; t + 1 < n; ++t) o[t] = (in[t + 1] - in[t - 1]) / 2.0;
        o[n - 1] = (3.0 * in[n - 1] - 4.0 * in[n - 2] + in[n - 3]) / 2.0;
    }
    return out;
}

Matrix differentiate(const Matrix& x, int order) {
    if (order < 1 || order > 3) throw std::invalid_argument("differentiate: order must be 1, 2 or 3");
    if (x.cols() < 4) throw std::invalid_argument("differentiate: need at least 4 time steps");
    Matrix out = diff1(x);
    for (int k = 1; k < order; ++k) out = diff1(out);
    return out;
}

Matrix differentiate(const TimeSeries& series, int order) { return differentiate(series.values(), order); }

FrenetFrame frenet_frame(const TimeSeries& series) { return build_frame(embed_3d(series)).frame; }

CurveParams curve_params(const TimeSeries& series) {
    const auto [fr, xd, xdd] = build_frame(embed_3d(series));
    const std::size_t n = xd.cols();
    const Matrix de1 = diff1(fr.e1);
    const Matrix de2 = diff1(fr.e2);

    CurveParams cp{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t t = 0; t < n; ++t) {
        const double v = col_norm(xd, t);
        cp.speed[t] = v;
        cp.accel[t] = col_norm(xdd, t);
        if (fr.e1_defined[t] && fr.e2_defined[t]) cp.kappa[t] = col_dot(de1, t, fr.e2, t) / v;
        if (fr.e1_defined[t] && fr.e2_defined[t] && fr.e3_defined[t]) cp.tau[t] = col_dot(de2, t, fr.e3, t) / v;
    }
    return cp;
}

}  // namespace abimca
