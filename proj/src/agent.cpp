#include "phishdqn/agent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "phishdqn/errors.hpp"

namespace phishdqn {

ReplayMemory::ReplayMemory(std::size_t capacity) {
    if (capacity == 0) {
        throw EmptyInput("replay memory capacity must be at least 1");
    }
    buffer_.resize(capacity);
}

void ReplayMemory::store(Experience e) {
    buffer_[head_] = std::move(e);
    head_ = (head_ + 1) % buffer_.size();
    if (size_ < buffer_.size()) {
        ++size_;
    }
}

const Experience& ReplayMemory::oldest(std::size_t i) const {
    if (i >= size_) {
        throw std::out_of_range("replay memory index " + std::to_string(i) + " with size " +
                                std::to_string(size_));
    }
    const std::size_t cap = buffer_.size();
    const std::size_t first = (head_ + cap - size_) % cap;
    return buffer_[(first + i) % cap];
}

int reward(int action, int label) {
    return action == label ? 1 : -1;
}

ActionChoice select_action(const std::array<double, 2>& q, double epsilon, SplitMix64& rng) {
    if (epsilon > 0.0 && rng.next_double() < epsilon) {
        return {static_cast<int>(rng.bounded(2)), true};
    }
    return {q[1] > q[0] ? 1 : 0, false};
}

double epsilon_at(const AgentConfig& config, std::uint64_t step) {
    if (config.epsilon_decay_steps == 0 || step >= config.epsilon_decay_steps) {
        return config.epsilon_end;
    }
    const double frac =
        static_cast<double>(step) / static_cast<double>(config.epsilon_decay_steps);
    return config.epsilon_start + (config.epsilon_end - config.epsilon_start) * frac;
}

std::vector<Experience> sample_minibatch(const ReplayMemory& memory, std::size_t batch_size,
                                         SplitMix64& rng) {
    if (memory.size() < batch_size) {
        throw InsufficientExperience("replay memory holds " + std::to_string(memory.size()) +
                                     " experiences, minibatch needs " +
                                     std::to_string(batch_size));
    }
    std::vector<std::size_t> idx(memory.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // Partial Fisher-Yates: the first batch_size slots end up as a uniform
    // draw without replacement.
    std::vector<Experience> batch;
    batch.reserve(batch_size);
    for (std::size_t j = 0; j < batch_size; ++j) {
        const std::size_t k = j + static_cast<std::size_t>(rng.bounded(idx.size() - j));
        std::swap(idx[j], idx[k]);
        batch.push_back(memory.oldest(idx[j]));
    }
    return batch;
}

double td_target_from_q(double reward_value, bool terminal, const std::array<double, 2>& next_q,
                        double gamma) {
    if (terminal) {
        return reward_value;
    }
    return reward_value + gamma * std::max(next_q[0], next_q[1]);
}

double td_target(const Experience& e, const NetworkParams& target_params, double gamma) {
    if (e.terminal) {
        return static_cast<double>(e.reward);
    }
    const auto next_q = forward(target_params, e.next_state);
    return td_target_from_q(static_cast<double>(e.reward), false, next_q, gamma);
}

TrainResult train(const VectorizedDataset& data, const AgentConfig& config) {
    if (data.samples.empty()) {
        throw EmptyInput("training requires a nonempty dataset");
    }
    if (config.batch_size == 0) {
        throw EmptyInput("batch size must be at least 1");
    }

    SplitMix64 rng(config.seed);
    TrainResult result;
    result.params = init_network(config.network, rng.next_u64());
    result.adam = make_adam_state(config.network);
    NetworkParams target = result.params;
    ReplayMemory memory(config.replay_capacity);
    TrainingStats& stats = result.stats;

    const std::size_t n = data.samples.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Sampling needs a full batch regardless of how low learn_start is set.
    const std::size_t min_fill = std::max(config.learn_start, config.batch_size);
    std::uint64_t env_step = 0;

    for (std::uint64_t episode = 0; episode < config.episodes; ++episode) {
        target = result.params;
        stats.epsilon_trace.push_back(epsilon_at(config, env_step));
        rng.shuffle(order);
        double episode_reward = 0.0;
        std::size_t correct = 0;

        for (std::size_t t = 0; t < n; ++t) {
            const Sample& cur = data.samples[order[t]];
            const auto q = forward(result.params, cur.features);
            const auto choice = select_action(q, epsilon_at(config, env_step), rng);
            const int r = reward(choice.action, cur.label);
            episode_reward += r;
            if (r > 0) {
                ++correct;
            }

            Experience e;
            e.state = cur.features;
            e.action = choice.action;
            e.reward = r;
            e.terminal = (t + 1 == n);
            e.next_state = e.terminal ? cur.features : data.samples[order[t + 1]].features;
            memory.store(std::move(e));
            ++stats.transitions_stored;
            ++env_step;

            if (memory.size() < min_fill) {
                continue;
            }
            const auto batch = sample_minibatch(memory, config.batch_size, rng);
            Gradients total = zero_gradients(config.network);
            double loss_sum = 0.0;
            for (const Experience& ex : batch) {
                const double y = td_target(ex, target, config.gamma);
                ForwardTrace trace;
                const auto qv = forward(result.params, ex.state, &trace);
                const double resid = y - qv[static_cast<std::size_t>(ex.action)];
                loss_sum += resid * resid;
                accumulate(total, backward(result.params, trace, ex.action, y));
            }
            const double loss = loss_sum / static_cast<double>(batch.size());
            if (!std::isfinite(loss)) {
                throw NonFiniteLoss("training diverged: non-finite loss at gradient step " +
                                    std::to_string(stats.gradient_steps + 1));
            }
            stats.loss_trace.push_back(loss);
            adam_step(result.params, total, result.adam, batch.size());
            ++stats.gradient_steps;
            if (config.target_sync_every > 0 &&
                stats.gradient_steps % config.target_sync_every == 0) {
                target = result.params;
            }
        }

        stats.episode_reward.push_back(episode_reward);
        stats.episode_accuracy.push_back(static_cast<double>(correct) / static_cast<double>(n));
    }
    stats.epsilon_trace.push_back(epsilon_at(config, env_step));
    return result;
}

Classification classify(const NetworkParams& params, const FeatureVector& x) {
    const auto q = forward(params, x);
    Classification c;
    c.q_phishing = q[1];
    c.label = q[1] >= 0.5 ? 1 : 0;
    return c;
}

}  // namespace phishdqn
