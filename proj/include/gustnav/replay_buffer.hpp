#pragma once

#include <cstddef>
#include <vector>

#include "gustnav/rng.hpp"

namespace gustnav {

struct Transition {
    std::vector<double> state;
    std::vector<double> action;
    double reward = 0.0;
    std::vector<double> next_state;
    bool terminal = false;
};

// Fixed-capacity ring with Combined Experience Replay sampling: batches are
// uniform with replacement except the final slot, which is always the most
// recently pushed transition.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 1000000);

    void push(Transition t);
    std::vector<const Transition*> sample_cer(std::size_t n, Rng& rng) const;

    std::size_t size() const { return count_; }
    std::size_t capacity() const { return capacity_; }
    const Transition& latest() const;

    // Raw slot access in storage order, for checkpointing.
    const Transition& slot(std::size_t i) const { return storage_[i]; }
    std::size_t write_index() const { return write_index_; }
    void restore_slot(Transition t);  // appends during checkpoint load
    void set_write_index(std::size_t i) {
        write_index_ = i;
        if (count_ > 0) latest_ = count_ < capacity_ ? count_ - 1 : (i + capacity_ - 1) % capacity_;
    }

private:
    std::size_t capacity_;
    std::vector<Transition> storage_;
    std::size_t write_index_ = 0;
    std::size_t count_ = 0;
    std::size_t latest_ = 0;
};

}  // namespace gustnav
