#pragma once

#include <cstdint>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace blesim {

// Simulation timestamps are integer microseconds since run start. One
// microsecond equals one bit at the 1 Mbps BLE rate, so packet boundaries
// always land on exact ticks.
using SimTime = std::uint64_t;

inline constexpr SimTime kMicrosPerSecond = 1'000'000;
inline constexpr SimTime kMicrosPerMilli = 1'000;

inline SimTime seconds(double s) { return static_cast<SimTime>(s * 1e6 + 0.5); }
inline SimTime millis(double ms) { return static_cast<SimTime>(ms * 1e3 + 0.5); }

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a runtime invariant is violated. `what()` starts with the
// invariant identity so the CLI can print it before exiting with code 3.
struct InvariantViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw InvariantViolation(what);
}

enum class EventKind {
    PacketStart,
    PacketEnd,
    ConnectionAnchor,
    SensorRead,
    UserAction,
    Timer,
};

inline const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::PacketStart: return "packet-start";
        case EventKind::PacketEnd: return "packet-end";
        case EventKind::ConnectionAnchor: return "connection-anchor";
        case EventKind::SensorRead: return "sensor-read";
        case EventKind::UserAction: return "user-action";
        case EventKind::Timer: return "timer";
    }
    return "?";
}

using EventHandle = std::uint64_t;

// Deterministic event queue. Equal-time events dispatch in insertion order
// (sequence counter tie-break); cancellation is by handle so duplicate
// payloads stay unambiguous.
class Simulator {
public:
    EventHandle schedule(SimTime t, EventKind kind, std::function<void()> fn) {
        if (t < now_)
            throw InvariantViolation("schedule-in-past: event precedes current clock");
        Entry e;
        e.time = t;
        e.sequence = next_sequence_++;
        e.id = next_id_++;
        e.kind = kind;
        e.fn = std::move(fn);
        queue_.push(std::move(e));
        return e.id;
    }

    void cancel(EventHandle h) { cancelled_.insert(h); }

    // Dispatches every pending event with time <= t, then advances the clock
    // to exactly t. Returns the number of dispatched (non-cancelled) events.
    std::size_t run_until(SimTime t) {
        if (t < now_)
            throw InvariantViolation("run-until-past: target precedes current clock");
        std::size_t dispatched = 0;
        while (!queue_.empty() && queue_.top().time <= t) {
            Entry e = queue_.top();
            queue_.pop();
            if (auto it = cancelled_.find(e.id); it != cancelled_.end()) {
                cancelled_.erase(it);
                continue;
            }
            require(e.time >= now_, "clock-monotonic: dispatch time went backwards");
            now_ = e.time;
            ++dispatched;
            e.fn();
        }
        now_ = t;
        return dispatched;
    }

    SimTime now() const { return now_; }
    bool empty() const { return queue_.empty(); }

private:
    struct Entry {
        SimTime time = 0;
        std::uint64_t sequence = 0;
        EventHandle id = 0;
        EventKind kind = EventKind::Timer;
        std::function<void()> fn;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.sequence > b.sequence;
        }
    };

    SimTime now_ = 0;
    std::uint64_t next_sequence_ = 0;
    EventHandle next_id_ = 1;
    std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
    std::unordered_set<EventHandle> cancelled_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Turns one 64-bit word into a uniform double in (0,1]. The 53-bit mantissa
// path is bit-stable across platforms, unlike std:: distributions.
inline double u64_to_unit(std::uint64_t x) {
    return (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;
}

// One standard normal sample derived from a hash key (Box-Muller on two
// splitmix64 expansions). Order-free: the value depends only on the key.
inline double hashed_normal(std::uint64_t key) {
    const double u1 = u64_to_unit(splitmix64(key));
    const double u2 = u64_to_unit(splitmix64(key ^ 0x6a09e667f3bcc909ULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Named, independently seeded random stream. Each consumer (channel,
// traffic, interference, user) owns one so adding a new stochastic component
// cannot perturb the draws of existing ones.
class RngStream {
public:
    RngStream() : RngStream(0, "default") {}
    RngStream(std::uint64_t seed, const std::string& stream_id) {
        state_ = splitmix64(seed ^ fnv1a64(stream_id));
        if (state_ == 0) state_ = 0x9e3779b97f4a7c15ULL;
    }

    std::uint64_t next_u64() {
        // xorshift64* keeps the stream definition self-contained and
        // byte-stable across standard library versions.
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545f4914f6cdd1dULL;
    }

    double uniform01() { return u64_to_unit(next_u64()); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    std::uint64_t uniform_u64(std::uint64_t n) {
        // modulo bias is < 2^-40 for any n this simulator uses
        return n == 0 ? 0 : next_u64() % n;
    }

    bool bernoulli(double p) { return uniform01() <= p; }

    double normal(double mean, double sigma) {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    std::uint64_t state_;
};

// Registry of named streams for one run. Streams are created lazily but
// their sequences depend only on (seed, stream-id).
class RngPool {
public:
    explicit RngPool(std::uint64_t seed = 0) : seed_(seed) {}

    RngStream& stream(const std::string& id) {
        auto it = streams_.find(id);
        if (it == streams_.end())
            it = streams_.emplace(id, RngStream(seed_, id)).first;
        return it->second;
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::map<std::string, RngStream> streams_;
};

}  // namespace blesim
