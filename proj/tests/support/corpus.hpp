#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bsync/poset.hpp"
#include "bsync/process.hpp"
#include "bsync/random.hpp"

namespace bsync::testing {

std::string data_path(const std::string& name);
std::string read_file(const std::string& path);

/// Every well-formed term with at most `max_actions` actions, barriers drawn
/// from {B, C}, each barrier bound once at the top, and at most `max_nodes`
/// syntax nodes. Labels are a, b, c, ... in left-to-right order.
std::vector<Process> exhaustive_terms(std::size_t max_actions, std::size_t max_nodes);

/// Random well-formed term with roughly `actions` actions and up to
/// `barriers` bound barriers; may deadlock.
Process random_term(std::size_t actions, std::size_t barriers, RandomSource& rng);

/// Random term whose control graph is deadlock-free.
Process random_deadlock_free(std::size_t max_actions, RandomSource& rng);

/// Random DAG on n labelled vertices v0..v{n-1}; each forward pair is an edge
/// with probability `density`.
Poset random_poset(std::size_t n, double density, RandomSource& rng);

Poset eight();
Poset crown();
Poset three();

}  // namespace bsync::testing
