#ifndef SING_FACT_SET_H
#define SING_FACT_SET_H

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sing {

/// Fixed-width bit set over the fact indices of a task.
class FactSet {
    std::vector<std::uint64_t> words;
    int num_bits = 0;

public:
    FactSet() = default;
    explicit FactSet(int num_facts);
    FactSet(int num_facts, std::span<const int> facts);

    int size() const {
        return num_bits;
    }

    bool test(int fact) const {
        return (words[fact >> 6] >> (fact & 63)) & 1u;
    }
    void set(int fact) {
        words[fact >> 6] |= std::uint64_t(1) << (fact & 63);
    }
    void reset(int fact) {
        words[fact >> 6] &= ~(std::uint64_t(1) << (fact & 63));
    }

    bool contains_all(std::span<const int> facts) const {
        for (int f : facts)
            if (!test(f))
                return false;
        return true;
    }
    bool contains_any(std::span<const int> facts) const {
        for (int f : facts)
            if (test(f))
                return true;
        return false;
    }
    bool is_subset_of(const FactSet &other) const;

    int count() const;
    std::vector<int> indices() const;

    std::size_t hash() const;
    const std::vector<std::uint64_t> &raw_words() const {
        return words;
    }

    bool operator==(const FactSet &other) const = default;
    std::strong_ordering operator<=>(const FactSet &other) const;
};

struct FactSetHash {
    std::size_t operator()(const FactSet &s) const {
        return s.hash();
    }
};
}

#endif
