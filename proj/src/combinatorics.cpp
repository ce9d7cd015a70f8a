#include "pgfl/combinatorics.hpp"

#include <algorithm>
#include <stdexcept>

namespace pgfl {

bool is_canonical_partition(const Partition& p, std::size_t m) {
    std::vector<bool> seen(m, false);
    std::size_t prev_min = 0;
    for (std::size_t b = 0; b < p.blocks.size(); ++b) {
        const auto& block = p.blocks[b];
        if (block.empty()) return false;
        if (b > 0 && block.front() <= prev_min) return false;
        prev_min = block.front();
        for (std::size_t i = 0; i < block.size(); ++i) {
            if (block[i] >= m || seen[block[i]]) return false;
            if (i > 0 && block[i] <= block[i - 1]) return false;
            seen[block[i]] = true;
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool s) { return s; });
}

PartitionStream::PartitionStream(std::size_t m, std::optional<std::size_t> max_block)
    : m_(m), cap_(max_block.value_or(m == 0 ? 1 : m)), rgs_(m, 0), block_sizes_(m, 0), blocks_before_(m + 1, 0) {
    if (max_block && *max_block == 0) throw std::invalid_argument("partitions: max_block must be >= 1");
}

// Greedy smallest labels for positions pos..m-1, given a valid prefix.
void PartitionStream::fill_from(std::size_t pos) {
    for (std::size_t i = pos; i < m_; ++i) {
        const std::size_t used = blocks_before_[i];
        std::size_t v = 0;
        while (v < used && block_sizes_[v] >= cap_) ++v;
        rgs_[i] = v;
        ++block_sizes_[v];
        blocks_before_[i + 1] = (v == used) ? used + 1 : used;
    }
}

bool PartitionStream::next() {
    if (done_) return false;
    if (!started_) {
        started_ = true;
        fill_from(0);
        rebuild_blocks();
        return true;
    }
    // Position 0 always carries label 0, so backtrack over 1..m-1.
    for (std::size_t i = m_; i-- > 1;) {
        const std::size_t used = blocks_before_[i];
        --block_sizes_[rgs_[i]];
        std::size_t v = rgs_[i] + 1;
        while (v < used && block_sizes_[v] >= cap_) ++v;
        if (v <= used) {
            rgs_[i] = v;
            ++block_sizes_[v];
            blocks_before_[i + 1] = (v == used) ? used + 1 : used;
            fill_from(i + 1);
            rebuild_blocks();
            return true;
        }
    }
    done_ = true;
    return false;
}

void PartitionStream::rebuild_blocks() {
    const std::size_t count = blocks_before_[m_];
    current_.blocks.assign(count, {});
    for (std::size_t i = 0; i < m_; ++i) current_.blocks[rgs_[i]].push_back(i);
}

SubsetStream::SubsetStream(std::size_t m) : m_(m) {
    if (m >= 64) throw std::invalid_argument("subsets: m must be < 64");
    end_mask_ = std::uint64_t{1} << m;
}

bool SubsetStream::next() {
    if (next_mask_ >= end_mask_) return false;
    const std::uint64_t mask = next_mask_++;
    current_.mask = mask;
    current_.kept.clear();
    current_.dropped.clear();
    for (std::size_t i = 0; i < m_; ++i) {
        if (mask & (std::uint64_t{1} << i)) {
            current_.kept.push_back(i);
        } else {
            current_.dropped.push_back(i);
        }
    }
    return true;
}

std::uint64_t bell(std::size_t m) {
    if (m > 20) throw std::out_of_range("bell: m > 20 overflows the supported range");
    // Bell triangle: each row starts with the last entry of the previous row.
    std::vector<std::uint64_t> row{1};
    for (std::size_t n = 0; n < m; ++n) {
        std::vector<std::uint64_t> next{row.back()};
        for (auto v : row) next.push_back(next.back() + v);
        row = std::move(next);
    }
    return row.front();
}

}  // namespace pgfl
