#include "cco/ddpg.hpp"

#include <algorithm>
#include <cmath>

namespace cco {

Mlp::Mlp(const std::vector<int>& widths, Output out, Rng& rng) : output(out) {
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        int fan_in = widths[l], fan_out = widths[l + 1];
        double scale = std::sqrt(2.0 / fan_in);
        Eigen::MatrixXd w(fan_out, fan_in);
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = scale * rng.normal();
        weights.push_back(std::move(w));
        biases.push_back(Eigen::VectorXd::Zero(fan_out));
    }
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& in) const {
    Eigen::VectorXd h = in;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        h = weights[l] * h + biases[l];
        if (l + 1 < weights.size())
            h = h.cwiseMax(0.0);
        else if (output == Output::Tanh)
            h = h.array().tanh().matrix();
    }
    return h;
}

Mlp::Trace Mlp::forward_trace(const Eigen::VectorXd& in) const {
    Trace tr;
    Eigen::VectorXd h = in;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        tr.inputs.push_back(h);
        h = weights[l] * h + biases[l];
        if (l + 1 < weights.size())
            h = h.cwiseMax(0.0);
        else if (output == Output::Tanh)
            h = h.array().tanh().matrix();
    }
    tr.out = h;
    return tr;
}

Mlp::Grads Mlp::zero_grads() const {
    Grads g;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        g.w.push_back(Eigen::MatrixXd::Zero(weights[l].rows(), weights[l].cols()));
        g.b.push_back(Eigen::VectorXd::Zero(biases[l].size()));
    }
    g.input = Eigen::VectorXd::Zero(weights.front().cols());
    return g;
}

void Mlp::backward(const Trace& tr, const Eigen::VectorXd& grad_out, Grads& g) const {
    Eigen::VectorXd delta = grad_out;
    if (output == Output::Tanh)
        delta = delta.cwiseProduct((1.0 - tr.out.array().square()).matrix());

    for (std::size_t li = weights.size(); li-- > 0;) {
        g.w[li] += delta * tr.inputs[li].transpose();
        g.b[li] += delta;
        Eigen::VectorXd upstream = weights[li].transpose() * delta;
        if (li == 0) {
            g.input += upstream;
            break;
        }
        // rectifier mask: layer li's input is the post-activation of li-1
        delta = upstream.cwiseProduct(
            (tr.inputs[li].array() > 0.0).cast<double>().matrix());
    }
}

AdamState::AdamState(const Mlp& net) {
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        mw_.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
        vw_.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
        mb_.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
        vb_.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
    }
}

void AdamState::step(Mlp& net, const Mlp::Grads& grads, double lr) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    ++t_;
    double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        mw_[l] = b1 * mw_[l] + (1.0 - b1) * grads.w[l];
        vw_[l] = b2 * vw_[l] + (1.0 - b2) * grads.w[l].cwiseProduct(grads.w[l]);
        net.weights[l].array() -=
            lr * (mw_[l].array() / c1) / ((vw_[l].array() / c2).sqrt() + eps);
        mb_[l] = b1 * mb_[l] + (1.0 - b1) * grads.b[l];
        vb_[l] = b2 * vb_[l] + (1.0 - b2) * grads.b[l].cwiseProduct(grads.b[l]);
        net.biases[l].array() -= lr * (mb_[l].array() / c1) / ((vb_[l].array() / c2).sqrt() + eps);
    }
}

void ReplayBuffer::add(Transition t) {
    if (entries_.size() < capacity_) {
        entries_.push_back(std::move(t));
    } else {
        entries_[cursor_] = std::move(t);
    }
    cursor_ = (cursor_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch, Rng& rng) const {
    // partial Fisher-Yates over the occupied slots
    std::vector<std::size_t> idx(entries_.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    batch = std::min(batch, idx.size());
    for (std::size_t i = 0; i < batch; ++i) {
        std::size_t j = i + rng.index(idx.size() - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(batch);
    return idx;
}

Eigen::VectorXd encode_state(int n_sectors) { return Eigen::VectorXd::Ones(n_sectors); }

Configuration decode_action(const Eigen::VectorXd& action) {
    const Eigen::Index n = action.size() / 2;
    std::vector<double> u(action.size());
    for (Eigen::Index i = 0; i < action.size(); ++i)
        u[i] = (std::clamp(action[i], -1.0, 1.0) + 1.0) / 2.0;
    return decode_point(u);
}

double ddpg_reward(const ObjectivePair& pair, double lambda, double cell_count) {
    return -scalarize(pair, lambda) / cell_count;
}

DdpgAgent::DdpgAgent(int state_dim, int action_dim, const DdpgHyperparams& hp,
                     std::uint64_t seed)
    : hp_(hp), buffer_(5000), rng_(mix_seed(seed, 0xDD96)) {
    std::vector<int> aw{state_dim};
    aw.insert(aw.end(), hp.actor_hidden.begin(), hp.actor_hidden.end());
    aw.push_back(action_dim);
    std::vector<int> cw{state_dim + action_dim};
    cw.insert(cw.end(), hp.critic_hidden.begin(), hp.critic_hidden.end());
    cw.push_back(1);

    actor = Mlp(aw, Mlp::Output::Tanh, rng_);
    critic = Mlp(cw, Mlp::Output::Linear, rng_);
    target_actor = actor;
    target_critic = critic;
    actor_opt_ = AdamState(actor);
    critic_opt_ = AdamState(critic);
}

Eigen::VectorXd DdpgAgent::act_deterministic(const Eigen::VectorXd& state) const {
    return actor.forward(state);
}

Eigen::VectorXd DdpgAgent::act(const Eigen::VectorXd& state, long t) {
    Eigen::VectorXd a = actor.forward(state);
    double sd = std::sqrt(schedule_.variance(t));
    for (Eigen::Index i = 0; i < a.size(); ++i)
        a[i] = std::clamp(a[i] + sd * rng_.normal(), -1.0, 1.0);
    return a;
}

std::optional<DdpgAgent::TrainStats> DdpgAgent::train_step() {
    const std::size_t batch = static_cast<std::size_t>(hp_.batch_size);
    if (buffer_.size() < batch) return std::nullopt;

    auto idx = buffer_.sample_indices(batch, rng_);
    const double inv_b = 1.0 / static_cast<double>(batch);

    // critic regression toward y = r + discount * Q_target(s, actor_target(s))
    Mlp::Grads cg = critic.zero_grads();
    double critic_loss = 0.0;
    for (std::size_t i : idx) {
        const Transition& tr = buffer_[i];
        double y = tr.reward;
        if (hp_.discount != 0.0) {
            Eigen::VectorXd at = target_actor.forward(tr.state);
            Eigen::VectorXd sa(tr.state.size() + at.size());
            sa << tr.state, at;
            y += hp_.discount * target_critic.forward(sa)[0];
        }
        Eigen::VectorXd sa(tr.state.size() + tr.action.size());
        sa << tr.state, tr.action;
        Mlp::Trace t = critic.forward_trace(sa);
        double err = t.out[0] - y;
        critic_loss += err * err * inv_b;
        Eigen::VectorXd go(1);
        go[0] = 2.0 * err * inv_b;
        critic.backward(t, go, cg);
    }
    critic_opt_.step(critic, cg, hp_.critic_lr);

    // actor ascends Q(s, actor(s)); Adam minimizes, so feed -dQ/dtheta
    Mlp::Grads ag = actor.zero_grads();
    double actor_obj = 0.0;
    const Eigen::Index sdim = buffer_[0].state.size();
    for (std::size_t i : idx) {
        const Transition& tr = buffer_[i];
        Mlp::Trace ta = actor.forward_trace(tr.state);
        Eigen::VectorXd sa(sdim + ta.out.size());
        sa << tr.state, ta.out;
        Mlp::Trace tc = critic.forward_trace(sa);
        actor_obj += tc.out[0] * inv_b;

        Mlp::Grads cg2 = critic.zero_grads();
        Eigen::VectorXd go(1);
        go[0] = 1.0;
        critic.backward(tc, go, cg2);
        Eigen::VectorXd dq_da = cg2.input.tail(ta.out.size());
        actor.backward(ta, (-inv_b) * dq_da, ag);
    }
    actor_opt_.step(actor, ag, hp_.actor_lr);

    soft_update(target_actor, actor);
    soft_update(target_critic, critic);
    return TrainStats{critic_loss, actor_obj};
}

void DdpgAgent::soft_update(Mlp& target, const Mlp& live) const {
    for (std::size_t l = 0; l < live.weights.size(); ++l) {
        target.weights[l] = (1.0 - hp_.tau) * target.weights[l] + hp_.tau * live.weights[l];
        target.biases[l] = (1.0 - hp_.tau) * target.biases[l] + hp_.tau * live.biases[l];
    }
}

std::vector<DdpgRecord> ddpg_run(const CoverageTensor& tensor, const Thresholds& thresholds,
                                 double lambda, long iterations, std::uint64_t seed,
                                 const DdpgHyperparams& hp) {
    const int n = tensor.n_sectors;
    const double cells = static_cast<double>(tensor.grid.cell_count());
    DdpgAgent agent(n, 2 * n, hp, seed);
    Eigen::VectorXd state = encode_state(n);

    std::vector<DdpgRecord> history;
    history.reserve(static_cast<std::size_t>(iterations));
    for (long t = 0; t < iterations; ++t) {
        Eigen::VectorXd action = agent.act(state, t);
        Configuration config = decode_action(action);
        ObjectivePair pair = evaluate(config, tensor, thresholds);
        double reward = ddpg_reward(pair, lambda, cells);
        agent.buffer().add({state, action, reward});
        agent.train_step();
        history.push_back({std::move(config), pair, reward, lambda});
    }
    return history;
}

std::vector<DdpgRecord> lambda_sweep(const CoverageTensor& tensor, const Thresholds& thresholds,
                                     long iterations_per_lambda, std::uint64_t seed,
                                     const DdpgHyperparams& hp) {
    std::vector<DdpgRecord> combined;
    for (int k = 0; k <= 10; ++k) {
        double lambda = k / 10.0;
        auto run = ddpg_run(tensor, thresholds, lambda, iterations_per_lambda,
                            mix_seed(seed, 0x7A + k), hp);
        combined.insert(combined.end(), std::make_move_iterator(run.begin()),
                        std::make_move_iterator(run.end()));
    }
    return combined;
}

}  // namespace cco
