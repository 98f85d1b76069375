#include "bookctl/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bookctl/rng.hpp"

namespace bookctl {

namespace {
constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;
}  // namespace

// Layout: W1 [hidden x input], b1 [hidden], W2 [hidden], b2 [1].
QNetwork::QNetwork(int input_dim, int hidden_dim, double learning_rate, std::uint64_t seed)
    : input_(input_dim), hidden_(hidden_dim), lr_(learning_rate) {
    if (input_dim < 1 || hidden_dim < 1) {
        throw std::invalid_argument("mlp: dimensions must be >= 1");
    }
    const std::size_t count =
        static_cast<std::size_t>(hidden_) * input_ + hidden_ + hidden_ + 1;
    w_.assign(count, 0.0);
    m_.assign(count, 0.0);
    v_.assign(count, 0.0);
    Rng rng(seed);
    const double limit1 = std::sqrt(6.0 / (input_ + hidden_));
    const double limit2 = std::sqrt(6.0 / (hidden_ + 1));
    for (int i = 0; i < hidden_ * input_; ++i) w_[i] = (2.0 * rng.uniform() - 1.0) * limit1;
    for (int i = 0; i < hidden_; ++i) {
        w_[static_cast<std::size_t>(hidden_) * input_ + hidden_ + i] =
            (2.0 * rng.uniform() - 1.0) * limit2;
    }
}

double QNetwork::forward(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != input_) {
        throw std::invalid_argument("mlp: input dimension mismatch");
    }
    const double* W1 = w_.data();
    const double* b1 = w_.data() + static_cast<std::size_t>(hidden_) * input_;
    const double* W2 = b1 + hidden_;
    const double b2 = W2[hidden_];
    double out = b2;
    for (int h = 0; h < hidden_; ++h) {
        double z = b1[h];
        const double* row = W1 + static_cast<std::size_t>(h) * input_;
        for (int i = 0; i < input_; ++i) z += row[i] * x[i];
        if (z > 0.0) out += W2[h] * z;
    }
    return out;
}

double QNetwork::loss_and_gradient(const std::vector<double>& x, double target,
                                   std::vector<double>& grad) const {
    if (static_cast<int>(x.size()) != input_) {
        throw std::invalid_argument("mlp: input dimension mismatch");
    }
    grad.assign(w_.size(), 0.0);
    const double* W1 = w_.data();
    const double* b1 = w_.data() + static_cast<std::size_t>(hidden_) * input_;
    const double* W2 = b1 + hidden_;
    const double b2 = W2[hidden_];

    std::vector<double> z(hidden_);
    double q = b2;
    for (int h = 0; h < hidden_; ++h) {
        double s = b1[h];
        const double* row = W1 + static_cast<std::size_t>(h) * input_;
        for (int i = 0; i < input_; ++i) s += row[i] * x[i];
        z[h] = s;
        if (s > 0.0) q += W2[h] * s;
    }
    const double err = q - target;
    const double loss = err * err;
    const double dq = 2.0 * err;

    double* gW1 = grad.data();
    double* gb1 = grad.data() + static_cast<std::size_t>(hidden_) * input_;
    double* gW2 = gb1 + hidden_;
    gW2[hidden_] = dq;  // b2
    for (int h = 0; h < hidden_; ++h) {
        const double a = z[h] > 0.0 ? z[h] : 0.0;
        gW2[h] = dq * a;
        if (z[h] > 0.0) {
            const double dz = dq * W2[h];
            gb1[h] = dz;
            double* row = gW1 + static_cast<std::size_t>(h) * input_;
            for (int i = 0; i < input_; ++i) row[i] = dz * x[i];
        }
    }
    return loss;
}

double QNetwork::train_step(const std::vector<double>& x, double target) {
    for (double v : x) {
        if (!std::isfinite(v)) throw std::invalid_argument("mlp: non-finite input");
    }
    if (!std::isfinite(target)) throw std::invalid_argument("mlp: non-finite target");

    std::vector<double> grad;
    const double loss = loss_and_gradient(x, target, grad);
    if (!std::isfinite(loss)) {
        throw std::runtime_error("mlp: non-finite loss after " + std::to_string(step_) +
                                 " updates");
    }
    ++step_;
    const double correction1 = 1.0 - std::pow(kBeta1, static_cast<double>(step_));
    const double correction2 = 1.0 - std::pow(kBeta2, static_cast<double>(step_));
    for (std::size_t i = 0; i < w_.size(); ++i) {
        m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * grad[i];
        v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * grad[i] * grad[i];
        const double mhat = m_[i] / correction1;
        const double vhat = v_[i] / correction2;
        w_[i] -= lr_ * mhat / (std::sqrt(vhat) + kEps);
    }
    return loss;
}

void QNetwork::restore_optimizer(const std::vector<double>& m, const std::vector<double>& v,
                                 long step) {
    if (m.size() != w_.size() || v.size() != w_.size()) {
        throw std::invalid_argument("mlp: optimizer state size mismatch");
    }
    m_ = m;
    v_ = v;
    step_ = step;
}

}  // namespace bookctl
