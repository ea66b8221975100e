#include "gustnav/replay_buffer.hpp"

#include <string>

#include "gustnav/errors.hpp"

namespace gustnav {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    storage_.reserve(capacity < 4096 ? capacity : 4096);
}

void ReplayBuffer::push(Transition t) {
    if (t.state.size() != t.next_state.size())
        throw ShapeError("ReplayBuffer::push: state/next_state lengths differ");
    if (count_ > 0) {
        const Transition& ref = storage_[latest_];
        if (t.state.size() != ref.state.size() || t.action.size() != ref.action.size())
            throw ShapeError("ReplayBuffer::push: transition dimensions differ from buffer contents");
    }
    if (count_ < capacity_) {
        storage_.push_back(std::move(t));
        latest_ = count_;
        ++count_;
        write_index_ = count_ % capacity_;
    } else {
        storage_[write_index_] = std::move(t);
        latest_ = write_index_;
        write_index_ = (write_index_ + 1) % capacity_;
    }
}

const Transition& ReplayBuffer::latest() const {
    if (count_ == 0) throw std::out_of_range("ReplayBuffer::latest: buffer is empty");
    return storage_[latest_];
}

std::vector<const Transition*> ReplayBuffer::sample_cer(std::size_t n, Rng& rng) const {
    if (count_ == 0) throw std::out_of_range("ReplayBuffer::sample_cer: buffer is empty");
    if (n == 0) throw std::invalid_argument("ReplayBuffer::sample_cer: n must be >= 1");
    std::vector<const Transition*> batch(n);
    for (std::size_t i = 0; i + 1 < n; ++i) batch[i] = &storage_[rng.uniform_index(count_)];
    batch[n - 1] = &storage_[latest_];
    return batch;
}

void ReplayBuffer::restore_slot(Transition t) {
    storage_.push_back(std::move(t));
    count_ = storage_.size();
}

}  // namespace gustnav
