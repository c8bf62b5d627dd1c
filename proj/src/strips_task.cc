#include "sing/strips_task.h"

#include <algorithm>

using namespace std;

namespace sing {
static void sort_unique(vector<int> &v) {
    sort(v.begin(), v.end());
    v.erase(unique(v.begin(), v.end()), v.end());
}

void Action::normalize() {
    sort_unique(pre);
    sort_unique(add);
    sort_unique(del);
    vector<int> kept;
    set_difference(del.begin(), del.end(), add.begin(), add.end(),
                   back_inserter(kept));
    del = move(kept);
}

static uint64_t fnv1a(uint64_t h, const void *data, size_t len) {
    const auto *bytes = static_cast<const unsigned char *>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

uint64_t StripsTask::fingerprint() const {
    uint64_t h = 0xcbf29ce484222325ull;
    for (const string &name : fact_names) {
        h = fnv1a(h, name.data(), name.size());
        h = fnv1a(h, "\n", 1);
    }
    if (variables) {
        for (const auto &group : variables->value_facts) {
            int32_t n = static_cast<int32_t>(group.size());
            h = fnv1a(h, &n, sizeof(n));
        }
    }
    return h;
}

void StripsTask::check_invariants() const {
    const int n = num_facts();
    auto check_range = [n](const vector<int> &facts, const string &what) {
        for (int f : facts)
            if (f < 0 || f >= n)
                throw TaskError(what + " refers to fact " + to_string(f) +
                                " outside 0.." + to_string(n - 1));
    };
    check_range(init, "initial state");
    check_range(goal, "goal");
    for (const Action &a : actions) {
        check_range(a.pre, "precondition of " + a.name);
        check_range(a.add, "add effect of " + a.name);
        check_range(a.del, "delete effect of " + a.name);
        for (int f : a.add)
            if (find(a.del.begin(), a.del.end(), f) != a.del.end())
                throw TaskError("action " + a.name + " adds and deletes " +
                                fact_names[f]);
    }
    if (variables) {
        int total = 0;
        for (const auto &group : variables->value_facts)
            total += static_cast<int>(group.size());
        if (total != n)
            throw TaskError("variable groups do not partition the facts");
    }
}
}
