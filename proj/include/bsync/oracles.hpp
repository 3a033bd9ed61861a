#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bsync/control_graph.hpp"
#include "bsync/error.hpp"
#include "bsync/poset.hpp"
#include "bsync/random.hpp"

namespace bsync {

struct BruteForceLimits {
    std::size_t max_vertices = 12;
    std::size_t max_extensions = 10'000'000;
};

/// Every linear extension, lexicographic by label. Throws TooLarge.
std::vector<Execution> brute_force_extensions(const Poset& p, const BruteForceLimits& limits = {},
                                              const Deadline& deadline = {});
std::vector<Execution> brute_force_extensions(const ControlGraph& g, const BruteForceLimits& limits = {});

/// Extension count by memoized search over down-sets; no enumeration.
/// Throws TooLarge past `max_states` distinct down-sets.
BigInt brute_force_count(const Poset& p, std::size_t max_states = 5'000'000, const Deadline& deadline = {});

std::vector<Execution> brute_force_sampler(const Poset& p, std::size_t k, std::uint64_t seed,
                                           const BruteForceLimits& limits = {});

/// Adjacent-transposition Markov chain. Approximate: its bias shrinks with
/// burn_in and steps_between but never vanishes.
std::vector<Execution> mcmc_sampler(const Poset& p, std::size_t k, std::size_t burn_in, std::size_t steps_between,
                                    std::uint64_t seed);

struct ChiSquare {
    double statistic = 0;
    double p_value = 1;
};

/// Pearson test against the uniform law on `support`. Throws UnknownOutcome.
ChiSquare chi_square_uniformity(const std::vector<Execution>& samples, const std::vector<Execution>& support);

}  // namespace bsync
