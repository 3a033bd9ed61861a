#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bsync/poset.hpp"
#include "bsync/process.hpp"
#include "bsync/random.hpp"

namespace bsync {

/// Series-parallel shape in alternating normal form: no Seq directly under a
/// Seq, no Par directly under a Par, composite nodes have >= 2 children.
struct SPTree {
    enum class Kind { Atom, Seq, Par };

    Kind kind = Kind::Atom;
    std::string label;             ///< Atom only
    std::vector<SPTree> children;  ///< Seq (in order) / Par
    std::size_t size = 1;          ///< number of atoms

    static SPTree atom(std::string label);
    /// Both flatten nested nodes of the same kind.
    static SPTree seq(std::vector<SPTree> children);
    static SPTree par(std::vector<SPTree> children);

    std::string to_string() const;
    bool operator==(const SPTree&) const = default;
};

/// Stack-disciplined barrier usage: each sync pops the innermost open barrier.
bool is_fork_join(const Process& p);

/// Throws NotForkJoin, or NotSeriesParallel when a thread that never joins
/// makes the causal order N-shaped.
SPTree sp_tree(const Process& p);

/// The order an SPTree denotes.
Poset sp_poset(const SPTree& t);

BigInt fj_count(const SPTree& t);
Execution fj_sample(const SPTree& t, RandomSource& rng);

bool is_promise_process(const Process& p);
/// Throws NotPromise.
bool is_arch(const Process& p);

/// Random fork-join term with `size` actions a1..an. Throws InvalidParameters.
Process gen_fork_join(std::size_t size, RandomSource& rng);
/// Random arch term: n actions, k promises. Throws InvalidParameters.
Process gen_arch(std::size_t n, std::size_t k, RandomSource& rng);

}  // namespace bsync
