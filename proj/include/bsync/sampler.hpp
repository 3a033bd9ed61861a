#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bsync/bits.hpp"
#include "bsync/random.hpp"

namespace bsync {

using SamplePoint = std::map<std::string, double>;

/// Walks down the splits, taking each branch with probability proportional
/// to its exact extension count.
const FormulaTree& choose_branch(const Decomposition& d, RandomSource& rng);

/// Inverse-CDF replay of the leaf integrations, outermost first. Throws
/// TieDetected when two coordinates collide, NumericalFailure when an
/// interval carries no mass.
SamplePoint sample_point(const FormulaTree& leaf, RandomSource& rng);

/// Elements by increasing coordinate. Throws TieDetected.
Execution rank_to_execution(const SamplePoint& p);

/// Reusable sampler over one decomposition. Not thread-safe; give each
/// thread its own instance or its own RandomSource.
class Sampler {
public:
    explicit Sampler(Decomposition d);

    const Decomposition& decomposition() const { return d_; }

    /// One uniform linear extension; collisions are resampled.
    Execution sample(RandomSource& rng) const;
    std::vector<Execution> sample(std::size_t k, RandomSource& rng) const;

    struct Compiled;  // leaf integrands with double coefficients

private:
    Decomposition d_;
    std::map<const FormulaTree*, std::shared_ptr<const Compiled>> compiled_;
};

std::vector<Execution> sample_execution(const Poset& p, std::size_t k, std::uint64_t seed);
std::vector<Execution> sample_execution(const ControlGraph& g, std::size_t k, std::uint64_t seed);

}  // namespace bsync
