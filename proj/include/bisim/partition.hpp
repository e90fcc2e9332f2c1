#pragma once

#include <cstddef>
#include <vector>

namespace bisim {

/// Assignment of states to blocks 0..block_count()-1; every block is nonempty.
class Partition {
public:
    Partition() = default;
    /// Throws std::invalid_argument unless ids are dense and every block is used.
    explicit Partition(std::vector<std::size_t> block_of);

    static Partition singletons(std::size_t n);
    static Partition single_block(std::size_t n);

    std::size_t size() const { return block_of_.size(); }
    std::size_t block_count() const { return block_count_; }
    std::size_t block_of(std::size_t s) const { return block_of_[s]; }
    const std::vector<std::size_t>& assignment() const { return block_of_; }

    /// Members of every block, each in increasing state order.
    std::vector<std::vector<std::size_t>> blocks() const;

    bool operator==(const Partition&) const = default;

private:
    std::vector<std::size_t> block_of_;
    std::size_t block_count_ = 0;
};

/// Relabels blocks so that block ids appear in order of their lowest member.
Partition canonical(const std::vector<std::size_t>& labels);

} // namespace bisim
