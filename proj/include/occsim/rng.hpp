#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace occsim {

/// Philox4x32-10 block function (Salmon et al., Random123). Exposed for
/// known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based random stream. A stream is identified by a 64-bit key; the
/// n-th output is a pure function of (key, n), so a stream can be derived
/// anywhere from its identity path without sharing state between threads.
///
/// Satisfies UniformRandomBitGenerator.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t key = 0) : key_(key) {}

    /// Stream for a hierarchical identity, e.g. (seed, household, occupant, day).
    static Rng stream(std::uint64_t base_seed, std::initializer_list<std::uint64_t> path);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return next_u64(); }

    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform integer on [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);

    std::uint64_t key() const { return key_; }
    /// Number of 64-bit words consumed so far.
    std::uint64_t position() const { return block_ * 2 - (have_spare_ ? 1 : 0); }

private:
    std::uint64_t key_;
    std::uint64_t block_ = 0;
    std::uint64_t spare_ = 0;
    bool have_spare_ = false;
};

/// SplitMix64 finalizer, used to fold identity paths into stream keys.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic child seed for (base, index); adding children never
/// perturbs existing ones.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

} // namespace occsim
