#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "phishdqn/dataset.hpp"
#include "phishdqn/features.hpp"
#include "phishdqn/network.hpp"
#include "phishdqn/rng.hpp"

namespace phishdqn {

/// One labeled-stream transition: the agent saw `state`, guessed `action`,
/// earned `reward`, and the stream advanced to `next_state`. `terminal`
/// marks the last sample of an episode; its next_state is a placeholder and
/// never enters a TD target.
struct Experience {
    FeatureVector state;
    int action = 0;
    int reward = 0;
    FeatureVector next_state;
    bool terminal = false;
};

/// Bounded FIFO of experiences. Once full, each store evicts the oldest.
class ReplayMemory {
  public:
    explicit ReplayMemory(std::size_t capacity);

    void store(Experience e);
    std::size_t size() const { return size_; }
    std::size_t capacity() const { return buffer_.size(); }
    /// i = 0 addresses the oldest retained entry.
    const Experience& oldest(std::size_t i) const;

  private:
    std::vector<Experience> buffer_;
    std::size_t head_ = 0;  // slot the next store writes
    std::size_t size_ = 0;
};

struct AgentConfig {
    double gamma = 0.9;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    std::uint64_t epsilon_decay_steps = 10000;
    std::size_t batch_size = 32;
    std::uint64_t target_sync_every = 500;
    std::uint64_t episodes = 10;
    std::size_t replay_capacity = 10000;
    std::size_t learn_start = 500;
    std::uint64_t seed = 42;
    NetworkSpec network{};
};

struct TrainingStats {
    std::vector<double> episode_reward;
    std::vector<double> episode_accuracy;
    std::vector<double> loss_trace;    // one entry per gradient step (batch mean)
    std::vector<double> epsilon_trace; // value at each episode start, plus the final value
    std::uint64_t transitions_stored = 0;
    std::uint64_t gradient_steps = 0;
};

struct TrainResult {
    NetworkParams params;
    AdamState adam;
    TrainingStats stats;
};

/// +1 when the guessed label matches the true one, -1 otherwise.
int reward(int action, int label);

struct ActionChoice {
    int action = 0;
    bool was_random = false;
};

/// With probability epsilon picks uniformly from {0, 1}; otherwise argmax
/// over q,tie resolved to action 0.
ActionChoice select_action(const std::array<double, 2>& q, double epsilon, SplitMix64& rng);

/// Linear decay from epsilon_start to epsilon_end over epsilon_decay_steps
/// environment steps, clamped afterwards.
double epsilon_at(const AgentConfig& config, std::uint64_t step);

/// Uniform sample without replacement. Throws InsufficientExperience when
/// the memory holds fewer than batch_size entries.
std::vector<Experience> sample_minibatch(const ReplayMemory& memory, std::size_t batch_size,
                                         SplitMix64& rng);

/// reward if terminal, else reward + gamma * max(next_q). next_q comes from
/// the frozen target network, never the online one.
double td_target_from_q(double reward_value, bool terminal, const std::array<double, 2>& next_q,
                        double gamma);
double td_target(const Experience& e, const NetworkParams& target_params, double gamma);

/// Runs config.episodes epochs over the dataset. Each episode reshuffles
/// the sample order, walks it one transition at a time (epsilon-greedy
/// action, reward against the true label, next state = next sample, last
/// sample terminal), stores every transition, and after the warm-up fill
/// performs one minibatch Adam step per consumed sample against TD targets
/// from a target network. The target copy refreshes at every episode start
/// and every target_sync_every gradient steps. Fully deterministic under
/// config.seed. Throws NonFiniteLoss if any batch loss is non-finite.
TrainResult train(const VectorizedDataset& data, const AgentConfig& config);

struct Classification {
    int label = 0;
    double q_phishing = 0.0;
};

/// Label 1 exactly when q[1] >= 0.5 (boundary inclusive), else 0. The
/// softmax head keeps q[0] + q[1] = 1, so this coincides with argmax
/// everywhere except the exact tie, which the rule resolves to 1.
Classification classify(const NetworkParams& params, const FeatureVector& x);

}  // namespace phishdqn
