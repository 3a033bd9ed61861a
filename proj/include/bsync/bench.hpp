#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bsync {

struct BenchCell {
    std::string method;
    /// "ok", "Timeout", "MemLimit", "TooLarge" or "NotApplicable".
    std::string status = "ok";
    std::string count;  ///< decimal, empty if the method does not count
    double count_seconds = 0;
    double sample_seconds = 0;
    std::size_t draws = 0;
    std::size_t invalid_draws = 0;
    std::optional<double> chi_square, p_value;
};

struct BenchRow {
    std::string cls;     ///< "fj" or "arch"
    std::string params;  ///< "10" or "10:2"
    std::uint64_t seed = 0;
    std::size_t actions = 0;
    std::string count;  ///< agreed count, empty if no method finished
    bool agree = true;
    std::vector<BenchCell> cells;
};

struct BenchReport {
    std::vector<BenchRow> rows;

    /// No count disagreement and no invalid draw anywhere.
    bool consistent() const;
    std::string to_json(int indent = 2) const;
    std::string to_table() const;
};

struct BenchOptions {
    unsigned threads = 1;
};

/// Runs a JSON spec:
///
///     {"timeout": 30, "samples": 100,
///      "methods": ["fj", "bits", "bruteforce", "mcmc"],
///      "instances": [{"class": "fj", "size": 10, "seeds": [1, 2]},
///                    {"class": "arch", "n": 10, "k": 2, "seeds": [1]}]}
///
/// Per-cell failures are recorded, not thrown. Throws InvalidParameters on a
/// malformed spec.
BenchReport bench_run(std::string_view spec_json, const BenchOptions& options = {});

}  // namespace bsync
