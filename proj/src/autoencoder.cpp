#include "abimca/autoencoder.hpp"

#include <cmath>
#include <stdexcept>

#include "abimca/core/error.hpp"
#include "abimca/core/rng.hpp"
#include "abimca/simd/kernels.hpp"

namespace abimca {
namespace {

struct GruOffsets {
    std::size_t in = 0, hid = 0;
    std::size_t Wz = 0, Wr = 0, Wn = 0, Uz = 0, Ur = 0, Un = 0, bz = 0, br = 0, bin = 0, bhn = 0;
};

struct Layout {
    GruOffsets enc_fwd, enc_bwd, dec;
    std::size_t P = 0, bp = 0, Wo = 0, bo = 0, total = 0;
};

GruOffsets place_gru(std::size_t& at, std::size_t in, std::size_t hid) {
    GruOffsets g;
    g.in = in;
    g.hid = hid;
    for (std::size_t* w : {&g.Wz, &g.Wr, &g.Wn}) {
        *w = at;
        at += hid * in;
    }
    for (std::size_t* u : {&g.Uz, &g.Ur, &g.Un}) {
        *u = at;
        at += hid * hid;
    }
    for (std::size_t* b : {&g.bz, &g.br, &g.bin, &g.bhn}) {
        *b = at;
        at += hid;
    }
    return g;
}

Layout make_layout(std::size_t d) {
    const std::size_t h = d - 1, l = d - 1;
    Layout lay;
    std::size_t at = 0;
    lay.enc_fwd = place_gru(at, d, h);
    lay.enc_bwd = place_gru(at, d, h);
    lay.P = at;
    at += l * 2 * h;
    lay.bp = at;
    at += l;
    lay.dec = place_gru(at, l, h);
    lay.Wo = at;
    at += d * h;
    lay.bo = at;
    at += d;
    lay.total = at;
    return lay;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y = A x + y for a row-major rows x cols block.
void matvec_add(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t i = 0; i < rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols; ++j) s += a[i * cols + j] * x[j];
        y[i] += s;
    }
}

// y += A^T g
void matvec_t_add(const double* a, std::size_t rows, std::size_t cols, const double* g, double* y) {
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) y[j] += a[i * cols + j] * g[i];
    }
}

// dA += g x^T
void outer_add(double* da, std::size_t rows, std::size_t cols, const double* g, const double* x) {
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) da[i * cols + j] += g[i] * x[j];
    }
}

// Runs a GRU over `steps` inputs; input(t) returns a pointer to x_t.
template <class Input>
std::vector<double> gru_forward(const double* theta, const GruOffsets& g, std::size_t steps, Input input,
                                GruTrace& trace, Matrix* states = nullptr) {
    const std::size_t H = g.hid, I = g.in;
    trace = {Matrix(H, steps), Matrix(H, steps), Matrix(H, steps), Matrix(H, steps), Matrix(H, steps)};
    std::vector<double> h(H, 0.0), az(H), ar(H), hn(H), an(H);
    for (std::size_t t = 0; t < steps; ++t) {
        const double* x = input(t);
        for (std::size_t k = 0; k < H; ++k) {
            az[k] = theta[g.bz + k];
            ar[k] = theta[g.br + k];
            hn[k] = theta[g.bhn + k];
            an[k] = theta[g.bin + k];
        }
        matvec_add(theta + g.Wz, H, I, x, az.data());
        matvec_add(theta + g.Uz, H, H, h.data(), az.data());
        matvec_add(theta + g.Wr, H, I, x, ar.data());
        matvec_add(theta + g.Ur, H, H, h.data(), ar.data());
        matvec_add(theta + g.Un, H, H, h.data(), hn.data());
        matvec_add(theta + g.Wn, H, I, x, an.data());
        for (std::size_t k = 0; k < H; ++k) {
            const double z = sigmoid(az[k]);
            const double r = sigmoid(ar[k]);
            const double n = std::tanh(an[k] + r * hn[k]);
            trace.h_prev(k, t) = h[k];
            trace.z(k, t) = z;
            trace.r(k, t) = r;
            trace.n(k, t) = n;
            trace.hn(k, t) = hn[k];
            h[k] = (1.0 - z) * n + z * h[k];
            if (states) (*states)(k, t) = h[k];
        }
    }
    return h;
}

// Backpropagates through a GRU pass. dh_step(t) returns the external
// gradient on the output state at step t (may be null); dh_last is added at
// the final step. dx_step(t) receives the input gradient (may be null).
template <class Input, class DhStep, class DxStep>
void gru_backward(const double* theta, double* grad, const GruOffsets& g, std::size_t steps, Input input,
                  const GruTrace& trace, std::span<const double> dh_last, DhStep dh_step, DxStep dx_step) {
    const std::size_t H = g.hid, I = g.in;
    std::vector<double> dh(dh_last.begin(), dh_last.end());
    std::vector<double> dprev(H), daz(H), dar(H), dan(H), dhn(H), hp(H), dx(I);
    for (std::size_t tt = steps; tt-- > 0;) {
        if (const double* ext = dh_step(tt)) {
            for (std::size_t k = 0; k < H; ++k) dh[k] += ext[k];
        }
        const double* x = input(tt);
        for (std::size_t k = 0; k < H; ++k) {
            const double z = trace.z(k, tt), r = trace.r(k, tt), n = trace.n(k, tt);
            hp[k] = trace.h_prev(k, tt);
            const double dn = dh[k] * (1.0 - z);
            const double dz = dh[k] * (hp[k] - n);
            dprev[k] = dh[k] * z;
            dan[k] = dn * (1.0 - n * n);
            const double dr = dan[k] * trace.hn(k, tt);
            dhn[k] = dan[k] * r;
            daz[k] = dz * z * (1.0 - z);
            dar[k] = dr * r * (1.0 - r);
        }
        outer_add(grad + g.Wz, H, I, daz.data(), x);
        outer_add(grad + g.Wr, H, I, dar.data(), x);
        outer_add(grad + g.Wn, H, I, dan.data(), x);
        outer_add(grad + g.Uz, H, H, daz.data(), hp.data());
        outer_add(grad + g.Ur, H, H, dar.data(), hp.data());
        outer_add(grad + g.Un, H, H, dhn.data(), hp.data());
        for (std::size_t k = 0; k < H; ++k) {
            grad[g.bz + k] += daz[k];
            grad[g.br + k] += dar[k];
            grad[g.bin + k] += dan[k];
            grad[g.bhn + k] += dhn[k];
        }
        matvec_t_add(theta + g.Uz, H, H, daz.data(), dprev.data());
        matvec_t_add(theta + g.Ur, H, H, dar.data(), dprev.data());
        matvec_t_add(theta + g.Un, H, H, dhn.data(), dprev.data());
        if (double* out = dx_step(tt)) {
            std::fill(dx.begin(), dx.end(), 0.0);
            matvec_t_add(theta + g.Wz, H, I, daz.data(), dx.data());
            matvec_t_add(theta + g.Wr, H, I, dar.data(), dx.data());
            matvec_t_add(theta + g.Wn, H, I, dan.data(), dx.data());
            for (std::size_t j = 0; j < I; ++j) out[j] += dx[j];
        }
        dh = dprev;
    }
}

void append_gru_blocks(std::vector<ParamBlock>& out, const std::string& prefix, const GruOffsets& g) {
    const std::size_t H = g.hid, I = g.in;
    out.push_back({prefix + ".Wz", g.Wz, H, I, false});
    out.push_back({prefix + ".Wr", g.Wr, H, I, false});
    out.push_back({prefix + ".Wn", g.Wn, H, I, false});
    out.push_back({prefix + ".Uz", g.Uz, H, H, false});
    out.push_back({prefix + ".Ur", g.Ur, H, H, false});
    out.push_back({prefix + ".Un", g.Un, H, H, false});
    out.push_back({prefix + ".bz", g.bz, H, 1, true});
    out.push_back({prefix + ".br", g.br, H, 1, true});
    out.push_back({prefix + ".bin", g.bin, H, 1, true});
    out.push_back({prefix + ".bhn", g.bhn, H, 1, true});
}

}  // namespace

std::vector<ParamBlock> param_layout(std::size_t d) {
    if (d < 2) throw std::invalid_argument("autoencoder: input dimension must be at least 2");
    const Layout lay = make_layout(d);
    const std::size_t h = d - 1, l = d - 1;
    std::vector<ParamBlock> out;
    append_gru_blocks(out, "enc_fwd", lay.enc_fwd);
    append_gru_blocks(out, "enc_bwd", lay.enc_bwd);
    out.push_back({"proj.P", lay.P, l, 2 * h, false});
    out.push_back({"proj.b", lay.bp, l, 1, true});
    append_gru_blocks(out, "dec", lay.dec);
    out.push_back({"out.W", lay.Wo, d, h, false});
    out.push_back({"out.b", lay.bo, d, 1, true});
    return out;
}

AeModel::AeModel(std::size_t d) : d_(d) {
    if (d < 2) throw std::invalid_argument("autoencoder: input dimension must be at least 2");
    theta_.assign(make_layout(d).total, 0.0);
}

std::span<double> AeModel::block(const std::string& name) {
    for (const auto& b : param_layout(d_)) {
        if (b.name == name) return std::span<double>(theta_).subspan(b.offset, b.size());
    }
    throw std::out_of_range("AeModel: unknown parameter block " + name);
}

std::span<const double> AeModel::block(const std::string& name) const {
    return const_cast<AeModel*>(this)->block(name);
}

bool AeModel::all_finite() const noexcept {
    for (double v : theta_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

AeModel init_model(std::size_t d, std::uint64_t seed) {
    AeModel m(d);
    Rng rng(seed);
    auto theta = m.params();
    for (const auto& b : param_layout(d)) {
        if (b.is_bias) continue;
        for (std::size_t i = 0; i < b.size(); ++i) {
            const bool zeroed = rng.uniform01() < 0.1;
            theta[b.offset + i] = zeroed ? 0.0 : rng.normal(0.0, 0.01);
        }
    }
    return m;
}

ForwardResult forward(const AeModel& model, const Matrix& window) {
    const std::size_t d = model.dims();
    if (d == 0) throw std::invalid_argument("forward: uninitialized model");
    if (window.rows() != d) throw std::invalid_argument("forward: window feature count does not match model");
    if (window.cols() < 1) throw std::invalid_argument("forward: empty window");
    const std::size_t steps = window.cols(), H = model.hidden(), L = model.latent();
    const Layout lay = make_layout(d);
    const double* theta = model.params().data();

    // Columns of the window as contiguous input vectors.
    const Matrix cols = window.transposed();
    ForwardResult res;
    auto& c = res.cache;
    const auto hf = gru_forward(theta, lay.enc_fwd, steps, [&](std::size_t t) { return cols.row(t).data(); },
                                c.enc_fwd);
    const auto hb = gru_forward(
        theta, lay.enc_bwd, steps, [&](std::size_t t) { return cols.row(steps - 1 - t).data(); }, c.enc_bwd);

    c.concat.assign(hf.begin(), hf.end());
    c.concat.insert(c.concat.end(), hb.begin(), hb.end());
    res.latent.assign(theta + lay.bp, theta + lay.bp + L);
    matvec_add(theta + lay.P, L, 2 * H, c.concat.data(), res.latent.data());
    for (double& v : res.latent) v = sigmoid(v);

    c.dec_states = Matrix(H, steps);
    gru_forward(theta, lay.dec, steps, [&](std::size_t) { return res.latent.data(); }, c.dec, &c.dec_states);

    res.reconstruction = Matrix(d, steps);
    std::vector<double> s(H), y(d);
    for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t k = 0; k < H; ++k) s[k] = c.dec_states(k, t);
        std::copy(theta + lay.bo, theta + lay.bo + d, y.begin());
        matvec_add(theta + lay.Wo, d, H, s.data(), y.data());
        for (std::size_t f = 0; f < d; ++f) res.reconstruction(f, t) = y[f];
    }
    return res;
}

LossBreakdown loss(const Matrix& window, const Matrix& reconstruction, std::span<const double> latent,
                   const TrainConfig& config) {
    if (window.rows() != reconstruction.rows() || window.cols() != reconstruction.cols()) {
        throw std::invalid_argument("loss: reconstruction shape does not match window");
    }
    LossBreakdown out;
    const auto w = window.flat(), r = reconstruction.flat();
    for (std::size_t i = 0; i < w.size(); ++i) out.mse += (w[i] - r[i]) * (w[i] - r[i]);
    out.mse /= static_cast<double>(w.size());
    for (double h : latent) out.penalty += std::abs(h - config.latent_center);
    out.penalty *= config.penalty_weight;
    out.total = out.mse + out.penalty;
    return out;
}

AeGradient backward(const AeModel& model, const ForwardResult& fwd, const Matrix& window,
                    const TrainConfig& config) {
    const std::size_t d = model.dims(), H = model.hidden(), L = model.latent();
    const std::size_t steps = window.cols();
    if (window.rows() != d || fwd.reconstruction.cols() != steps) {
        throw std::invalid_argument("backward: window does not match forward pass");
    }
    const Layout lay = make_layout(d);
    const double* theta = model.params().data();
    AeGradient grad(d);
    double* g = grad.params().data();
    const auto& c = fwd.cache;

    // Output layer.
    const double scale = 2.0 / static_cast<double>(d * steps);
    Matrix ds(steps, H, 0.0);  // gradient on decoder state per step
    std::vector<double> dy(d), s(H);
    for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t f = 0; f < d; ++f) dy[f] = scale * (fwd.reconstruction(f, t) - window(f, t));
        for (std::size_t k = 0; k < H; ++k) s[k] = c.dec_states(k, t);
        outer_add(g + lay.Wo, d, H, dy.data(), s.data());
        for (std::size_t f = 0; f < d; ++f) g[lay.bo + f] += dy[f];
        matvec_t_add(theta + lay.Wo, d, H, dy.data(), ds.row(t).data());
    }

    // Decoder; its input at every step is the latent vector.
    std::vector<double> dlatent(L, 0.0);
    const std::vector<double> zero_h(H, 0.0);
    gru_backward(
        theta, g, lay.dec, steps, [&](std::size_t) { return fwd.latent.data(); }, c.dec, zero_h,
        [&](std::size_t t) { return static_cast<const double*>(ds.row(t).data()); },
        [&](std::size_t) { return dlatent.data(); });

    // Penalty subgradient, sign(0) = 0.
    for (std::size_t i = 0; i < L; ++i) {
        const double dev = fwd.latent[i] - config.latent_center;
        dlatent[i] += config.penalty_weight * static_cast<double>((dev > 0.0) - (dev < 0.0));
    }

    // Logistic and projection.
    std::vector<double> da(L), dconcat(2 * H, 0.0);
    for (std::size_t i = 0; i < L; ++i) da[i] = dlatent[i] * fwd.latent[i] * (1.0 - fwd.latent[i]);
    outer_add(g + lay.P, L, 2 * H, da.data(), c.concat.data());
    for (std::size_t i = 0; i < L; ++i) g[lay.bp + i] += da[i];
    matvec_t_add(theta + lay.P, L, 2 * H, da.data(), dconcat.data());

    // Encoder directions; only the final state feeds the latent.
    const Matrix cols = window.transposed();
    auto no_step = [](std::size_t) { return static_cast<const double*>(nullptr); };
    auto no_dx = [](std::size_t) { return static_cast<double*>(nullptr); };
    gru_backward(
        theta, g, lay.enc_fwd, steps, [&](std::size_t t) { return cols.row(t).data(); }, c.enc_fwd,
        std::span<const double>(dconcat).first(H), no_step, no_dx);
    gru_backward(
        theta, g, lay.enc_bwd, steps, [&](std::size_t t) { return cols.row(steps - 1 - t).data(); }, c.enc_bwd,
        std::span<const double>(dconcat).subspan(H, H), no_step, no_dx);
    return grad;
}

void sgd_step(AeModel& model, const AeGradient& grad, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("sgd_step: learning rate must be positive");
    if (grad.param_count() != model.param_count()) throw std::invalid_argument("sgd_step: gradient shape mismatch");
    if (!grad.all_finite()) throw NumericError("sgd_step: non-finite gradient");
    simd::axpy(-alpha, grad.params(), model.params());
    if (!model.all_finite()) throw NumericError("sgd_step: parameters became non-finite");
}

LossBreakdown train_step(AeModel& model, const Matrix& window, const TrainConfig& config) {
    const ForwardResult fwd = forward(model, window);
    const LossBreakdown l = loss(window, fwd.reconstruction, fwd.latent, config);
    sgd_step(model, backward(model, fwd, window, config), config.learning_rate);
    return l;
}

}  // namespace abimca
