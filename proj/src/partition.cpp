#include "bisim/partition.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace bisim {

Partition::Partition(std::vector<std::size_t> block_of) : block_of_(std::move(block_of)) {
    if (block_of_.empty()) {
        block_count_ = 0;
        return;
    }
    block_count_ = *std::max_element(block_of_.begin(), block_of_.end()) + 1;
    std::vector<bool> used(block_count_, false);
    for (std::size_t b : block_of_) {
        used[b] = true;
    }
    if (std::find(used.begin(), used.end(), false) != used.end()) {
        throw std::invalid_argument("Partition: block ids must be dense with no empty block");
    }
}

Partition Partition::singletons(std::size_t n) {
    std::vector<std::size_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    return Partition(std::move(ids));
}

Partition Partition::single_block(std::size_t n) {
    return Partition(std::vector<std::size_t>(n, 0));
}

std::vector<std::vector<std::size_t>> Partition::blocks() const {
    std::vector<std::vector<std::size_t>> out(block_count_);
    for (std::size_t s = 0; s < block_of_.size(); ++s) {
        out[block_of_[s]].push_back(s);
    }
    return out;
}

Partition canonical(const std::vector<std::size_t>& labels) {
    std::map<std::size_t, std::size_t> renumber;
    std::vector<std::size_t> ids(labels.size());
    for (std::size_t s = 0; s < labels.size(); ++s) {
        auto [it, inserted] = renumber.try_emplace(labels[s], renumber.size());
        ids[s] = it->second;
    }
    return Partition(std::move(ids));
}

} // namespace bisim
