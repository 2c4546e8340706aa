#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "cco/configuration.hpp"
#include "cco/objectives.hpp"
#include "cco/random.hpp"

namespace cco {

// Small fully connected net: rectifier hidden layers, tanh or linear output.
class Mlp {
public:
    enum class Output { Tanh, Linear };

    Mlp() = default;
    Mlp(const std::vector<int>& widths, Output output, Rng& rng);

    Eigen::VectorXd forward(const Eigen::VectorXd& in) const;

    struct Trace {
        std::vector<Eigen::VectorXd> inputs;  // input to each layer
        Eigen::VectorXd out;
    };
    Trace forward_trace(const Eigen::VectorXd& in) const;

    struct Grads {
        std::vector<Eigen::MatrixXd> w;
        std::vector<Eigen::VectorXd> b;
        Eigen::VectorXd input;  // gradient w.r.t. the network input
    };
    Grads zero_grads() const;
    // accumulates parameter gradients into g, returns via g.input as well
    void backward(const Trace& trace, const Eigen::VectorXd& grad_out, Grads& g) const;

    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    Output output = Output::Linear;
};

// Adam moments matching an Mlp's parameter shapes.
class AdamState {
public:
    AdamState() = default;
    explicit AdamState(const Mlp& net);
    void step(Mlp& net, const Mlp::Grads& grads, double lr);

private:
    std::vector<Eigen::MatrixXd> mw_, vw_;
    std::vector<Eigen::VectorXd> mb_, vb_;
    long t_ = 0;
};

struct Transition {
    Eigen::VectorXd state;
    Eigen::VectorXd action;
    double reward = 0.0;
};

// FIFO ring buffer, uniform batch sampling without replacement.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 5000) : capacity_(capacity) {}

    void add(Transition t);
    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition& operator[](std::size_t i) const { return entries_[i]; }
    std::vector<std::size_t> sample_indices(std::size_t batch, Rng& rng) const;

private:
    std::size_t capacity_;
    std::size_t cursor_ = 0;
    std::vector<Transition> entries_;
};

struct ExplorationSchedule {
    double initial_variance = 1.0;
    double decay = 0.9996;
    double floor = 1e-3;

    double variance(long t) const {
        return std::max(floor, initial_variance * std::pow(decay, static_cast<double>(t)));
    }
};

struct DdpgHyperparams {
    double actor_lr = 1e-4;
    double critic_lr = 1e-3;
    int batch_size = 64;
    double tau = 0.005;
    double discount = 0.0;  // single-step episodes
    std::vector<int> actor_hidden{64, 64};
    std::vector<int> critic_hidden{64, 64};
};

// Constant all-sectors-operational state vector.
Eigen::VectorXd encode_state(int n_sectors = kNumSectors);

// [-1,1]^(2n) action to a Configuration: first half downtilts, second half
// powers, both affinely rescaled (downtilt rounded to the lattice).
Configuration decode_action(const Eigen::VectorXd& action);

// Negated, cell-normalized scalarization: larger is better, 0 is perfect.
double ddpg_reward(const ObjectivePair& pair, double lambda, double cell_count);

class DdpgAgent {
public:
    DdpgAgent(int state_dim, int action_dim, const DdpgHyperparams& hp, std::uint64_t seed);

    Eigen::VectorXd act(const Eigen::VectorXd& state, long t);
    Eigen::VectorXd act_deterministic(const Eigen::VectorXd& state) const;

    struct TrainStats {
        double critic_loss = 0.0;
        double actor_objective = 0.0;
    };
    // no-op (nullopt) until the buffer holds a full batch
    std::optional<TrainStats> train_step();

    ReplayBuffer& buffer() { return buffer_; }
    const ExplorationSchedule& schedule() const { return schedule_; }
    const DdpgHyperparams& hyperparams() const { return hp_; }
    void set_tau(double tau) { hp_.tau = tau; }

    // exposed for tests
    Mlp actor, critic, target_actor, target_critic;

private:
    void soft_update(Mlp& target, const Mlp& live) const;

    DdpgHyperparams hp_;
    ExplorationSchedule schedule_;
    ReplayBuffer buffer_;
    AdamState actor_opt_, critic_opt_;
    Rng rng_;
};

struct DdpgRecord {
    Configuration config;
    ObjectivePair pair;
    double reward = 0.0;
    double lambda = 0.0;
};

std::vector<DdpgRecord> ddpg_run(const CoverageTensor& tensor, const Thresholds& thresholds,
                                 double lambda, long iterations, std::uint64_t seed,
                                 const DdpgHyperparams& hp = {});

// Fresh agent per lambda in {0.0, 0.1, ..., 1.0}; concatenated histories.
std::vector<DdpgRecord> lambda_sweep(const CoverageTensor& tensor, const Thresholds& thresholds,
                                     long iterations_per_lambda, std::uint64_t seed,
                                     const DdpgHyperparams& hp = {});

}  // namespace cco
