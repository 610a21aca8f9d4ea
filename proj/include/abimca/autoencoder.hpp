#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "abimca/core/matrix.hpp"
#include "abimca/timeseries.hpp"

namespace abimca {

struct TrainConfig {
    double learning_rate = 1e-3;
    double penalty_weight = 1e-10;  // lambda
    double latent_center = 0.5;     // c_lc
    std::uint64_t seed = 0;
};

struct LossBreakdown {
    double total = 0.0;
    double mse = 0.0;
    double penalty = 0.0;
};

/// A named slice of the flat parameter vector, stored row-major.
struct ParamBlock {
    std::string name;
    std::size_t offset = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    bool is_bias = false;

    std::size_t size() const noexcept { return rows * cols; }
};

/// Parameter order for input dimension d, hidden size H = d-1, latent L = d-1.
/// Each GRU (enc_fwd, enc_bwd, dec) contributes, in order:
///   Wz Wr Wn (H x in), Uz Ur Un (H x H), bz br bin bhn (H)
/// with in = d for the encoder and in = L for the decoder. The full order is
///   enc_fwd.*, enc_bwd.*, proj.P (L x 2H), proj.b (L), dec.*, out.W (d x H), out.b (d)
std::vector<ParamBlock> param_layout(std::size_t d);

/// Recurrent autoencoder parameters in one flat vector (layout above).
///
/// Encoder: bidirectional single-layer GRU over the window columns, both
/// directions starting from a zero state. Latent h = logistic(P [h_fwd; h_bwd] + b).
/// Decoder: GRU fed h at every step from a zero state, then y_t = W s_t + b.
///
/// The same type holds gradients.
class AeModel {
public:
    AeModel() = default;
    /// All-zero parameters. Throws std::invalid_argument for d < 2.
    explicit AeModel(std::size_t d);

    std::size_t dims() const noexcept { return d_; }
    std::size_t hidden() const noexcept { return d_ - 1; }
    std::size_t latent() const noexcept { return d_ - 1; }

    std::span<double> params() noexcept { return theta_; }
    std::span<const double> params() const noexcept { return theta_; }
    std::size_t param_count() const noexcept { return theta_.size(); }

    /// View of one named block. Throws std::out_of_range for unknown names.
    std::span<double> block(const std::string& name);
    std::span<const double> block(const std::string& name) const;

    bool all_finite() const noexcept;

    friend bool operator==(const AeModel&, const AeModel&) = default;

private:
    std::size_t d_ = 0;
    std::vector<double> theta_;
};

using AeGradient = AeModel;

/// Per-step intermediates of one GRU pass (H x steps each).
struct GruTrace {
    Matrix h_prev, z, r, n, hn;
};

struct ForwardCache {
    GruTrace enc_fwd, enc_bwd, dec;
    std::vector<double> concat;  // [h_fwd; h_bwd]
    Matrix dec_states;           // H x zeta
};

struct ForwardResult {
    Matrix reconstruction;  // d x zeta
    std::vector<double> latent;
    ForwardCache cache;
};

/// Sparse initialization: each weight entry is zeroed with probability 0.1,
/// otherwise drawn from N(0, 0.01^2). Biases are zero.
AeModel init_model(std::size_t d, std::uint64_t seed);

/// Throws std::invalid_argument if the window has a different feature count.
ForwardResult forward(const AeModel& model, const Matrix& window);
inline ForwardResult forward(const AeModel& model, const SlidingWindow& window) {
    return forward(model, window.values);
}

/// mse = sum (w - w~)^2 / (d zeta), penalty = lambda sum |h_i - c_lc|.
LossBreakdown loss(const Matrix& window, const Matrix& reconstruction, std::span<const double> latent,
                   const TrainConfig& config);

/// Exact gradient of loss() with respect to every parameter.
AeGradient backward(const AeModel& model, const ForwardResult& fwd, const Matrix& window, const TrainConfig& config);

/// theta -= alpha * grad. Throws NumericError on a non-finite gradient or
/// std::invalid_argument if alpha <= 0 or the shapes differ.
void sgd_step(AeModel& model, const AeGradient& grad, double alpha);

/// Forward, loss, backward and one SGD update. Returns the pre-update loss.
LossBreakdown train_step(AeModel& model, const Matrix& window, const TrainConfig& config);

}  // namespace abimca
