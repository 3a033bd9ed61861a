#include "bsync/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <mutex>
#include <new>
#include <thread>

#include "bsync/bits.hpp"
#include "bsync/control_graph.hpp"
#include "bsync/error.hpp"
#include "bsync/oracles.hpp"
#include "bsync/sampler.hpp"
#include "bsync/subclasses.hpp"
#include "json.hpp"

namespace bsync {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Task {
    std::string cls;
    std::size_t size = 0, n = 0, k = 0;
    std::uint64_t seed = 0;
};

struct Spec {
    double timeout = 30;
    std::size_t samples = 100;
    std::vector<std::string> methods;
    std::vector<Task> tasks;
};

Spec parse_spec(std::string_view text) {
    Spec s;
    try {
        const json j = json::parse(text);
        s.timeout = j.value("timeout", 30.0);
        s.samples = j.value("samples", std::size_t{100});
        s.methods = j.value("methods", std::vector<std::string>{"fj", "bits", "bruteforce"});
        for (const auto& m : s.methods)
            if (m != "fj" && m != "bits" && m != "bruteforce" && m != "mcmc")
                throw InvalidParameters("unknown method '" + m + "'");
        for (const auto& inst : j.at("instances")) {
            Task t;
            t.cls = inst.at("class").get<std::string>();
            if (t.cls == "fj") {
                t.size = inst.at("size").get<std::size_t>();
            } else if (t.cls == "arch") {
                t.n = inst.at("n").get<std::size_t>();
                t.k = inst.at("k").get<std::size_t>();
            } else {
                throw InvalidParameters("unknown class '" + t.cls + "'");
            }
            for (const auto& seed : inst.value("seeds", std::vector<std::uint64_t>{0})) {
                t.seed = seed;
                s.tasks.push_back(t);
            }
        }
    } catch (const json::exception& e) {
        throw InvalidParameters(std::string("bad bench spec: ") + e.what());
    }
    return s;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Runs body, mapping resource failures onto the cell status.
void guarded(BenchCell& cell, const std::function<void()>& body) {
    try {
        body();
    } catch (const Timeout&) {
        cell.status = "Timeout";
    } catch (const std::bad_alloc&) {
        cell.status = "MemLimit";
    } catch (const TooLarge&) {
        cell.status = "TooLarge";
    } catch (const NotApplicable&) {
        cell.status = "NotApplicable";
    }
}

BenchRow run_task(const Task& t, const Spec& spec) {
    BenchRow row;
    row.cls = t.cls;
    row.seed = t.seed;
    RandomSource gen(t.seed);
    Process term = t.cls == "fj" ? gen_fork_join(t.size, gen) : gen_arch(t.n, t.k, gen);
    row.params = t.cls == "fj" ? std::to_string(t.size) : std::to_string(t.n) + ":" + std::to_string(t.k);
    row.actions = term.size();

    // The syntactic graph construction is quadratic; huge fork-joins skip it.
    std::optional<Poset> order;
    if (row.actions <= 3000) order = to_poset(build_ctg(term));
    std::optional<std::vector<Execution>> support;
    if (order && order->size() <= 10) {
        const Poset& poset = *order;
        try {
            auto all = brute_force_extensions(poset, {10, 5000});
            support = std::move(all);
        } catch (const TooLarge&) {
        }
    }

    for (const auto& method : spec.methods) {
        BenchCell cell;
        cell.method = method;
        const Deadline deadline{std::chrono::duration<double>(spec.timeout)};
        RandomSource rng(t.seed ^ 0x5eed5eed5eedull);
        std::vector<Execution> draws;
        guarded(cell, [&] {
            auto t0 = Clock::now();
            if (method != "fj" && !order) throw TooLarge("instance too large for a graph-based method");
            if (method == "fj") {
                SPTree sp = sp_tree(term);
                cell.count = fj_count(sp).get_str();
                cell.count_seconds = seconds_since(t0);
                t0 = Clock::now();
                for (std::size_t i = 0; i < spec.samples; ++i) {
                    deadline.check();
                    draws.push_back(fj_sample(sp, rng));
                }
            } else if (method == "bits") {
                Decomposition d = decompose(*order, {}, deadline);
                cell.count = d.count().get_str();
                cell.count_seconds = seconds_since(t0);
                t0 = Clock::now();
                Sampler s(std::move(d));
                for (std::size_t i = 0; i < spec.samples; ++i) {
                    deadline.check();
                    draws.push_back(s.sample(rng));
                }
            } else if (method == "bruteforce") {
                cell.count = brute_force_count(*order, 5'000'000, deadline).get_str();
                cell.count_seconds = seconds_since(t0);
                t0 = Clock::now();
                if (support)
                    for (std::size_t i = 0; i < spec.samples; ++i) draws.push_back((*support)[rng.below(support->size())]);
            } else {
                const std::size_t n = order->size();
                draws = mcmc_sampler(*order, spec.samples, 50 * n * n + 100, 4 * n * n + 10, rng.next());
            }
            cell.sample_seconds = seconds_since(t0);
        });
        cell.draws = draws.size();
        if (order)
            for (const auto& e : draws) cell.invalid_draws += !is_linear_extension(*order, e);
        if (support && !draws.empty() && cell.invalid_draws == 0) {
            auto chi = chi_square_uniformity(draws, *support);
            cell.chi_square = chi.statistic;
            cell.p_value = chi.p_value;
        }
        if (!cell.count.empty()) {
            if (row.count.empty())
                row.count = cell.count;
            else if (row.count != cell.count)
                row.agree = false;
        }
        row.cells.push_back(std::move(cell));
    }
    return row;
}

}  // namespace

bool BenchReport::consistent() const {
    for (const auto& r : rows) {
        if (!r.agree) return false;
        for (const auto& c : r.cells)
            if (c.invalid_draws) return false;
    }
    return true;
}

std::string BenchReport::to_json(int indent) const {
    json rows_j = json::array();
    for (const auto& r : rows) {
        json cells = json::array();
        for (const auto& c : r.cells) {
            json cj = {{"method", c.method},         {"status", c.status},
                       {"count_seconds", c.count_seconds}, {"sample_seconds", c.sample_seconds},
                       {"draws", c.draws},           {"invalid_draws", c.invalid_draws}};
            if (!c.count.empty()) cj["count"] = c.count;
            if (c.chi_square) cj["chi_square"] = *c.chi_square;
            if (c.p_value) cj["p_value"] = *c.p_value;
            cells.push_back(cj);
        }
        rows_j.push_back({{"class", r.cls},
                          {"params", r.params},
                          {"seed", r.seed},
                          {"actions", r.actions},
                          {"count", r.count},
                          {"agree", r.agree},
                          {"methods", cells}});
    }
    return json{{"consistent", consistent()}, {"rows", rows_j}}.dump(indent);
}

std::string BenchReport::to_table() const {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-6s %-8s %6s %-24s %-10s %-13s %10s %10s %8s\n", "class", "params", "seed", "count",
                  "method", "status", "count(s)", "gen(s)", "p");
    out += buf;
    for (const auto& r : rows) {
        std::string count = r.count.size() > 24 ? r.count.substr(0, 10) + "...(" + std::to_string(r.count.size()) + "d)"
                                                 : r.count;
        for (const auto& c : r.cells) {
            std::snprintf(buf, sizeof buf, "%-6s %-8s %6llu %-24s %-10s %-13s %10.4f %10.4f %8s\n", r.cls.c_str(),
                          r.params.c_str(), static_cast<unsigned long long>(r.seed), count.c_str(), c.method.c_str(),
                          c.status.c_str(), c.count_seconds, c.sample_seconds,
                          c.p_value ? std::to_string(*c.p_value).substr(0, 6).c_str() : "-");
            out += buf;
        }
        if (!r.agree) out += "  !! counts disagree\n";
    }
    return out;
}

BenchReport bench_run(std::string_view spec_json, const BenchOptions& options) {
    const Spec spec = parse_spec(spec_json);
    BenchReport report;
    report.rows.resize(spec.tasks.size());
    const unsigned workers = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(spec.tasks.size())));
    std::size_t next = 0;
    std::mutex mu;
    std::exception_ptr failure;
    auto worker = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (next >= spec.tasks.size() || failure) return;
                i = next++;
            }
            try {
                report.rows[i] = run_task(spec.tasks[i], spec);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return report;
}

}  // namespace bsync
