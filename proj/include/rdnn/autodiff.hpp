#pragma once

#include <functional>
#include <vector>

#include "rdnn/common.hpp"
#include "rdnn/network.hpp"

namespace rdnn {

// First and second derivative data of the network output at one point.
struct Jet {
    VectorXd value;  // U
    VectorXd dx;     // dU/dx
    VectorXd dt;     // dU/dt
    VectorXd dxx;    // d2U/dx2
};

// Which derivative channels a forward trace propagates.  dxx needs the dx
// pre-activations, so enabling dxx forces dx.
struct ChannelMask {
    bool dx = true;
    bool dt = true;
    bool dxx = true;

    static ChannelMask value_only() { return {false, false, false}; }
    static ChannelMask value_dx() { return {true, false, false}; }
    static ChannelMask full() { return {true, true, true}; }
};

// Per-layer parameter gradient, same shapes as NetworkParams.
struct GradAccum {
    std::vector<MatrixXd> wbar;
    std::vector<VectorXd> bbar;

    explicit GradAccum(const NetworkParams& net) {
        for (int l = 0; l < net.num_layers(); ++l) {
            wbar.emplace_back(MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
            bbar.emplace_back(VectorXd::Zero(net.biases[l].size()));
        }
    }

    void reset() {
        for (auto& w : wbar) w.setZero();
        for (auto& b : bbar) b.setZero();
    }

    // Same flat layout as to_flat(NetworkParams).
    VectorXd to_flat() const {
        long n = 0;
        for (std::size_t l = 0; l < wbar.size(); ++l) n += wbar[l].size() + bbar[l].size();
        VectorXd flat(n);
        long off = 0;
        for (std::size_t l = 0; l < wbar.size(); ++l) {
            std::memcpy(flat.data() + off, wbar[l].data(), sizeof(double) * wbar[l].size());
            off += wbar[l].size();
            std::memcpy(flat.data() + off, bbar[l].data(), sizeof(double) * bbar[l].size());
            off += bbar[l].size();
        }
        return flat;
    }
};

// Forward pass that carries (value, d/dx, d/dt, d2/dx2) through every layer,
// then backpropagates loss adjoints of those channels into parameter space.
//
// Hidden layer l (activation A = tanh):
//   Zv = W a + b,   Zx = W ax,   Zt = W at,   Zxx = W axx
//   A  = tanh(Zv),  s1 = 1-A^2,  s2 = -2 A s1,  s3 = s1 (6 A^2 - 2)
//   Ax  = s1 Zx,   At = s1 Zt,   Axx = s2 Zx^2 + s1 Zxx
// The output layer is affine, so its channels are plain matrix products.
//
// Backward (element-wise in the batch):
//   Zxx_bar = s1 Axx_bar
//   Zx_bar  = s1 Ax_bar + 2 s2 Zx Axx_bar
//   Zt_bar  = s1 At_bar
//   Zv_bar  = s1 Av_bar + s2 (Zx Ax_bar + Zt At_bar + Zxx Axx_bar) + s3 Zx^2 Axx_bar
//   Wbar += Zv_bar a' + Zx_bar ax' + Zt_bar at' + Zxx_bar axx'   (' = transpose
//   of the previous layer's channels), bbar += rowsum(Zv_bar), and each
//   channel's adjoint flows to the previous layer through W^T.
class BatchTrace {
  public:
    BatchTrace(const NetworkParams& net, const MatrixXd& inputs, ChannelMask mask)
        : net_(&net), mask_(mask) {
        if (inputs.rows() != 2)
            throw Error("BatchTrace: inputs must be 2 x N (x row, t row)");
        if (net.input_dim() != 2)
            throw Error("BatchTrace: network input dimension must be 2");
        if (mask_.dxx) mask_.dx = true;

        const long n = inputs.cols();
        const int L = net.num_layers();
        a_.resize(L);
        ax_.resize(L);
        at_.resize(L);
        axx_.resize(L);
        zx_.resize(L);
        zt_.resize(L);
        zxx_.resize(L);

        a_[0] = inputs;
        if (mask_.dx) {
            ax_[0] = MatrixXd::Zero(2, n);
            ax_[0].row(0).setOnes();
        }
        if (mask_.dt) {
            at_[0] = MatrixXd::Zero(2, n);
            at_[0].row(1).setOnes();
        }
        if (mask_.dxx) axx_[0] = MatrixXd::Zero(2, n);

        for (int l = 0; l < L; ++l) {
            const MatrixXd& w = net.weights[l];
            MatrixXd zv = (w * a_[l]).colwise() + net.biases[l];
            MatrixXd zx, zt, zxx;
            if (mask_.dx) zx.noalias() = w * ax_[l];
            if (mask_.dt) zt.noalias() = w * at_[l];
            if (mask_.dxx) zxx.noalias() = w * axx_[l];

            if (l + 1 == L) {
                out_v_ = std::move(zv);
                if (mask_.dx) out_x_ = std::move(zx);
                if (mask_.dt) out_t_ = std::move(zt);
                if (mask_.dxx) out_xx_ = std::move(zxx);
            } else {
                MatrixXd act = fast_tanh(zv);
                auto s1 = [&act] { return 1.0 - act.array().square(); };
                if (mask_.dx) ax_[l + 1] = (s1() * zx.array()).matrix();
                if (mask_.dt) at_[l + 1] = (s1() * zt.array()).matrix();
                if (mask_.dxx)
                    axx_[l + 1] = (-2.0 * act.array() * s1() * zx.array().square() +
                                   s1() * zxx.array())
                                      .matrix();
                a_[l + 1] = std::move(act);
                if (mask_.dx) zx_[l + 1] = std::move(zx);
                if (mask_.dt) zt_[l + 1] = std::move(zt);
                if (mask_.dxx) zxx_[l + 1] = std::move(zxx);
            }
        }

        const int d_out = net.output_dim();
        bar_v_ = MatrixXd::Zero(d_out, n);
        if (mask_.dx) bar_x_ = MatrixXd::Zero(d_out, n);
        if (mask_.dt) bar_t_ = MatrixXd::Zero(d_out, n);
        if (mask_.dxx) bar_xx_ = MatrixXd::Zero(d_out, n);
    }

    long batch_size() const { return a_[0].cols(); }
    const ChannelMask& mask() const { return mask_; }

    const MatrixXd& value() const { return out_v_; }
    const MatrixXd& dx() const { return require(out_x_, "dx"); }
    const MatrixXd& dt() const { return require(out_t_, "dt"); }
    const MatrixXd& dxx() const { return require(out_xx_, "dxx"); }

    // Adjoint seeds dLoss/dchannel, zero until the caller fills them.
    MatrixXd& adj_value() { return bar_v_; }
    MatrixXd& adj_dx() { return require(bar_x_, "dx"); }
    MatrixXd& adj_dt() { return require(bar_t_, "dt"); }
    MatrixXd& adj_dxx() { return require(bar_xx_, "dxx"); }

    // Accumulates parameter gradients for the seeded adjoints into g.
    void backward(GradAccum& g) const {
        const int L = net_->num_layers();
        MatrixXd bv = bar_v_, bx = bar_x_, bt = bar_t_, bxx = bar_xx_;
        for (int l = L - 1; l >= 0; --l) {
            const MatrixXd& w = net_->weights[l];
            MatrixXd zv_bar, zx_bar, zt_bar, zxx_bar;
            if (l + 1 == L) {
                zv_bar = std::move(bv);
                if (mask_.dx) zx_bar = std::move(bx);
                if (mask_.dt) zt_bar = std::move(bt);
                if (mask_.dxx) zxx_bar = std::move(bxx);
            } else {
                const auto A = a_[l + 1].array();
                const auto s1 = 1.0 - A.square();
                if (mask_.dxx) {
                    const auto zx = zx_[l + 1].array();
                    const auto s2 = -2.0 * A * s1;
                    const auto s3 = s1 * (6.0 * A.square() - 2.0);
                    zxx_bar = (s1 * bxx.array()).matrix();
                    zx_bar = (s1 * bx.array() + 2.0 * s2 * zx * bxx.array()).matrix();
                    zv_bar = (s1 * bv.array() + s2 * zx * bx.array() +
                              s3 * zx.square() * bxx.array() +
                              s2 * zxx_[l + 1].array() * bxx.array())
                                 .matrix();
                    if (mask_.dt) {
                        zt_bar = (s1 * bt.array()).matrix();
                        zv_bar.array() += s2 * zt_[l + 1].array() * bt.array();
                    }
                } else {
                    zv_bar = (s1 * bv.array()).matrix();
                    if (mask_.dx) {
                        const auto s2 = -2.0 * A * s1;
                        zx_bar = (s1 * bx.array()).matrix();
                        zv_bar.array() += s2 * zx_[l + 1].array() * bx.array();
                    }
                    if (mask_.dt) {
                        const auto s2 = -2.0 * A * s1;
                        zt_bar = (s1 * bt.array()).matrix();
                        zv_bar.array() += s2 * zt_[l + 1].array() * bt.array();
                    }
                }
            }

            g.wbar[l].noalias() += zv_bar * a_[l].transpose();
            if (mask_.dx) g.wbar[l].noalias() += zx_bar * ax_[l].transpose();
            if (mask_.dt) g.wbar[l].noalias() += zt_bar * at_[l].transpose();
            if (mask_.dxx) g.wbar[l].noalias() += zxx_bar * axx_[l].transpose();
            g.bbar[l] += zv_bar.rowwise().sum();

            if (l > 0) {
                bv.noalias() = w.transpose() * zv_bar;
                if (mask_.dx) bx.noalias() = w.transpose() * zx_bar;
                if (mask_.dt) bt.noalias() = w.transpose() * zt_bar;
                if (mask_.dxx) bxx.noalias() = w.transpose() * zxx_bar;
            }
        }
    }

  private:
    static const MatrixXd& require(const MatrixXd& m, const char* name) {
        if (m.size() == 0) throw Error(std::string("BatchTrace: channel not enabled: ") + name);
        return m;
    }
    static MatrixXd& require(MatrixXd& m, const char* name) {
        if (m.size() == 0) throw Error(std::string("BatchTrace: channel not enabled: ") + name);
        return m;
    }

    const NetworkParams* net_;
    ChannelMask mask_;
    // a_[0] holds the inputs; a_[l] for l >= 1 the post-activation channels.
    std::vector<MatrixXd> a_, ax_, at_, axx_;
    // Pre-activation derivative channels of hidden layers, needed backward.
    std::vector<MatrixXd> zx_, zt_, zxx_;
    MatrixXd out_v_, out_x_, out_t_, out_xx_;
    MatrixXd bar_v_, bar_x_, bar_t_, bar_xx_;
};

inline Jet evaluate_jet(const NetworkParams& net, double x, double t) {
    MatrixXd in(2, 1);
    in << x, t;
    BatchTrace trace(net, in, ChannelMask::full());
    return Jet{trace.value().col(0), trace.dx().col(0), trace.dt().col(0), trace.dxx().col(0)};
}

// Central-difference gradient of an arbitrary scalar loss over the flat
// parameter vector.  Reference oracle for the analytic backward pass.
inline VectorXd finite_difference_gradient(
    const std::function<double(const NetworkParams&)>& loss, const NetworkParams& net,
    double h_scale = 1e-6) {
    NetworkParams work = net;
    VectorXd flat = to_flat(net);
    VectorXd grad(flat.size());
    for (long i = 0; i < flat.size(); ++i) {
        const double p = flat(i);
        const double h = h_scale * std::max(1.0, std::abs(p));
        flat(i) = p + h;
        from_flat(work, flat);
        const double fp = loss(work);
        flat(i) = p - h;
        from_flat(work, flat);
        const double fm = loss(work);
        flat(i) = p;
        grad(i) = (fp - fm) / (2.0 * h);
    }
    from_flat(work, flat);
    return grad;
}

}  // namespace rdnn
