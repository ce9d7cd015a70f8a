#pragma once

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <optional>
#include <vector>

namespace pgfl {

/// Set partition of {0, ..., m-1} in canonical form: indices ascend inside
/// each block and blocks are ordered by their smallest element.
struct Partition {
    std::vector<std::vector<std::size_t>> blocks;

    [[nodiscard]] std::size_t size() const { return blocks.size(); }
    friend bool operator==(const Partition&, const Partition&) = default;
};

/// Split of {0, ..., m-1} into a kept subset W and its complement.
struct SubsetSplit {
    std::uint64_t mask = 0;
    std::vector<std::size_t> kept;
    std::vector<std::size_t> dropped;
};

/// True when `p` is a canonical partition of {0, ..., m-1}.
bool is_canonical_partition(const Partition& p, std::size_t m);

/// Streams the set partitions of {0, ..., m-1} as restricted growth strings.
///
/// Enumeration is iterative with O(m) state. When `max_block` is given,
/// branches that would grow a block beyond it are never entered, so the
/// stream yields exactly the partitions whose blocks all fit.
class PartitionStream {
public:
    explicit PartitionStream(std::size_t m, std::optional<std::size_t> max_block = std::nullopt);

    /// Advances to the next partition; false once exhausted.
    bool next();
    [[nodiscard]] const Partition& current() const { return current_; }
    /// Restricted growth string of the current partition (block label per index).
    [[nodiscard]] const std::vector<std::size_t>& labels() const { return rgs_; }

    class iterator {
    public:
        using iterator_category = std::input_iterator_tag;
        using value_type = Partition;
        using difference_type = std::ptrdiff_t;
        using pointer = const Partition*;
        using reference = const Partition&;

        iterator() = default;
        explicit iterator(PartitionStream* s) : stream_(s) { advance(); }
        reference operator*() const { return stream_->current(); }
        pointer operator->() const { return &stream_->current(); }
        iterator& operator++() {
            advance();
            return *this;
        }
        void operator++(int) { advance(); }
        friend bool operator==(const iterator& a, const iterator& b) { return a.stream_ == b.stream_; }

    private:
        void advance() {
            if (stream_ && !stream_->next()) stream_ = nullptr;
        }
        PartitionStream* stream_ = nullptr;
    };

    iterator begin() { return iterator(this); }
    iterator end() { return iterator(); }

private:
    void fill_from(std::size_t pos);
    void rebuild_blocks();

    std::size_t m_;
    std::size_t cap_;
    bool started_ = false;
    bool done_ = false;
    std::vector<std::size_t> rgs_;
    std::vector<std::size_t> block_sizes_;
    std::vector<std::size_t> blocks_before_;  // number of blocks used by rgs_[0..i)
    Partition current_;
};

inline PartitionStream partitions(std::size_t m, std::optional<std::size_t> max_block = std::nullopt) {
    return PartitionStream(m, max_block);
}

/// Streams all 2^m subset splits in increasing kept-mask order.
class SubsetStream {
public:
    explicit SubsetStream(std::size_t m);

    bool next();
    [[nodiscard]] const SubsetSplit& current() const { return current_; }

private:
    std::size_t m_;
    std::uint64_t next_mask_ = 0;
    std::uint64_t end_mask_;
    SubsetSplit current_;
};

inline SubsetStream subsets(std::size_t m) { return SubsetStream(m); }

/// Bell number via the Bell triangle. Throws std::out_of_range for m > 20.
std::uint64_t bell(std::size_t m);

}  // namespace pgfl
