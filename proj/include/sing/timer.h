#ifndef SING_TIMER_H
#define SING_TIMER_H

#include <chrono>
#include <limits>

namespace sing {
using Clock = std::chrono::steady_clock;

class Timer {
    Clock::time_point start = Clock::now();

public:
    double seconds() const {
        return std::chrono::duration<double>(Clock::now() - start).count();
    }
};

class Deadline {
    Clock::time_point at = Clock::time_point::max();

public:
    Deadline() = default;
    static Deadline after(double seconds) {
        Deadline d;
        if (seconds < 1e9)
            d.at = Clock::now() +
                   std::chrono::duration_cast<Clock::duration>(
                       std::chrono::duration<double>(seconds));
        return d;
    }
    static Deadline never() {
        return Deadline();
    }
    bool expired() const {
        return at != Clock::time_point::max() && Clock::now() >= at;
    }
    double remaining() const {
        if (at == Clock::time_point::max())
            return std::numeric_limits<double>::infinity();
        return std::chrono::duration<double>(at - Clock::now()).count();
    }
};
}

#endif
