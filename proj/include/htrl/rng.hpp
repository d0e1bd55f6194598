#pragma once

// Counter-based splittable RNG. A stream is identified by a 64-bit key
// derived from (seed, stream path); the i-th output is a strong mix of
// key + i, so draws are random-access and independent of scheduling.

#include <cstdint>
#include <initializer_list>

namespace htrl {

namespace detail {
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
}  // namespace detail

// Hash-combines a seed with a path of stream ids. Used to derive
// per-replication keys: derive_key(master_seed, {n, rep, purpose}).
inline std::uint64_t derive_key(std::uint64_t seed,
                                std::initializer_list<std::uint64_t> path = {}) {
    std::uint64_t k = detail::mix64(seed + detail::kGolden);
    for (std::uint64_t p : path) {
        k = detail::mix64(k ^ (p + detail::kGolden + (k << 6) + (k >> 2)));
    }
    return k;
}

class CounterRng {
  public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}
    CounterRng(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
        : key_(derive_key(seed, path)) {}

    std::uint64_t next_u64() { return detail::mix64(key_ + (++counter_) * detail::kGolden); }

    // Uniform on (0, 1]: never returns 0, so inverse-tail transforms stay finite.
    double unit_oc() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Uniform on (0, 1).
    double unit_oo() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    bool fair_bit() { return (next_u64() >> 63) != 0; }

    double rademacher() { return fair_bit() ? 1.0 : -1.0; }

    void skip(std::uint64_t k) { counter_ += k; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace htrl
