#include "sing/fact_set.h"

#include <bit>

using namespace std;

namespace sing {
FactSet::FactSet(int num_facts)
    : words((num_facts + 63) / 64, 0), num_bits(num_facts) {
}

FactSet::FactSet(int num_facts, span<const int> facts)
    : FactSet(num_facts) {
    for (int f : facts)
        set(f);
}

bool FactSet::is_subset_of(const FactSet &other) const {
    for (size_t i = 0; i < words.size(); ++i)
        if (words[i] & ~other.words[i])
            return false;
    return true;
}

int FactSet::count() const {
    int n = 0;
    for (uint64_t w : words)
        n += popcount(w);
    return n;
}

vector<int> FactSet::indices() const {
    vector<int> result;
    for (size_t i = 0; i < words.size(); ++i) {
        uint64_t w = words[i];
        while (w) {
            int bit = countr_zero(w);
            result.push_back(static_cast<int>(i * 64 + bit));
            w &= w - 1;
        }
    }
    return result;
}

size_t FactSet::hash() const {
    // splitmix-style mixing per word
    uint64_t h = 0x9e3779b97f4a7c15ull ^ static_cast<uint64_t>(num_bits);
    for (uint64_t w : words) {
        uint64_t z = w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        h ^= z ^ (z >> 31);
    }
    return static_cast<size_t>(h);
}

strong_ordering FactSet::operator<=>(const FactSet &other) const {
    if (auto c = num_bits <=> other.num_bits; c != 0)
        return c;
    for (size_t i = 0; i < words.size(); ++i)
        if (auto c = words[i] <=> other.words[i]; c != 0)
            return c;
    return strong_ordering::equal;
}
}
