#pragma once

#include <cstdint>
#include <vector>

namespace bookctl {

// One-hidden-layer perceptron with a scalar output: linear -> rectifier ->
// linear, trained on squared error with adaptive-moment updates. Parameters
// live in one flat vector (W1, b1, W2, b2) so the optimizer state and the
// finite-difference tests can address them uniformly.
class QNetwork {
  public:
    QNetwork(int input_dim, int hidden_dim, double learning_rate, std::uint64_t seed);

    int input_dim() const { return input_; }
    int hidden_dim() const { return hidden_; }
    double learning_rate() const { return lr_; }

    double forward(const std::vector<double>& x) const;

    // Squared-error loss and its analytic gradient at the current weights;
    // does not modify the network.
    double loss_and_gradient(const std::vector<double>& x, double target,
                             std::vector<double>& grad) const;

    // One adaptive-moment update on (x, target); returns the pre-update loss.
    // Throws on non-finite inputs or loss.
    double train_step(const std::vector<double>& x, double target);

    std::vector<double>& params() { return w_; }
    const std::vector<double>& params() const { return w_; }

    std::size_t param_count() const { return w_.size(); }
    long steps_taken() const { return step_; }

    // Serialization hooks for policy files.
    const std::vector<double>& adam_m() const { return m_; }
    const std::vector<double>& adam_v() const { return v_; }
    void restore_optimizer(const std::vector<double>& m, const std::vector<double>& v, long step);

  private:
    int input_;
    int hidden_;
    double lr_;
    std::vector<double> w_;
    std::vector<double> m_;
    std::vector<double> v_;
    long step_ = 0;
};

}  // namespace bookctl
