// bsync: command-line front end.
//
// Exit codes: 0 ok, 1 usage, 2 parse/validation, 3 deadlock, 4 method not
// applicable, 5 resource limit, 6 benchmark disagreement, 7 internal error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bsync/bench.hpp"
#include "bsync/bits.hpp"
#include "bsync/control_graph.hpp"
#include "bsync/error.hpp"
#include "bsync/oracles.hpp"
#include "bsync/sampler.hpp"
#include "bsync/subclasses.hpp"
#include "json.hpp"

namespace {

using namespace bsync;

std::string slurp(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CLI::ValidationError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_to(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CLI::ValidationError("cannot write '" + path + "'");
    out << text;
}

Process load_process(const std::string& path, bool auto_rename = false) {
    return validate(parse_process(slurp(path)), {auto_rename}).term;
}

Poset load_order(const std::string& path, bool as_poset) {
    if (as_poset) return parse_poset(slurp(path));
    ControlGraph g = build_ctg(load_process(path));
    return to_poset(g);  // DeadlockedGraph names the residual barriers
}

std::string line(const Execution& e) {
    std::string s;
    for (const auto& a : e) s += (s.empty() ? "" : " ") + a;
    return s;
}

struct Options {
    std::string file;
    std::string method = "bits";
    bool as_poset = false;
    bool auto_rename = false;
    std::string dot_out;
    bool edges = false;
    std::size_t count = 1;
    std::uint64_t seed = 0;
    bool json = false;
    std::size_t burn_in = 0, thin = 0;
    std::string cls = "fj";
    std::size_t size = 10, promises = 0;
    std::string out = "-";
    unsigned threads = 1;
};

int cmd_parse(const Options& o) {
    Process p = parse_process(slurp(o.file));
    std::cout << ast_dump(p);
    ValidationReport r = validate(p, {o.auto_rename});
    std::cout << "text: " << to_text(r.term) << "\n";
    std::cout << "actions: " << r.labels.size() << "\n";
    for (const auto& [from, to] : r.renamed) std::cout << "renamed: " << from << " -> " << to << "\n";
    for (const auto& b : r.unused_barriers) std::cout << "unused barrier: " << b << "\n";
    return 0;
}

int cmd_ctg(const Options& o) {
    ControlGraph g = build_ctg(load_process(o.file, o.auto_rename));
    if (!o.dot_out.empty()) write_to(o.dot_out, to_dot(g));
    if (o.edges || o.dot_out.empty()) std::cout << to_edge_list(g);
    if (has_deadlock(g)) {
        auto residual = residual_barriers(g);
        std::cerr << "deadlock: ";
        if (residual.empty()) {
            std::cerr << "the control graph has a cycle\n";
        } else {
            std::cerr << "residual barrier";
            for (const auto& b : residual) std::cerr << " " << b;
            std::cerr << "\n";
        }
        return 3;
    }
    std::cerr << "deadlock-free\n";
    return 0;
}

int cmd_count(const Options& o) {
    BigInt n;
    if (o.method == "fj") {
        if (o.as_poset) throw NotApplicable("--method fj needs a process, not a poset");
        n = fj_count(sp_tree(load_process(o.file, o.auto_rename)));
    } else if (o.method == "bits") {
        n = count_executions(load_order(o.file, o.as_poset));
    } else {
        n = brute_force_count(load_order(o.file, o.as_poset));
    }
    std::cout << n.get_str() << "\n";
    return 0;
}

int cmd_sample(const Options& o) {
    std::vector<Execution> out;
    RandomSource rng(o.seed);
    if (o.method == "fj") {
        if (o.as_poset) throw NotApplicable("--method fj needs a process, not a poset");
        SPTree t = sp_tree(load_process(o.file, o.auto_rename));
        for (std::size_t i = 0; i < o.count; ++i) out.push_back(fj_sample(t, rng));
    } else {
        Poset p = load_order(o.file, o.as_poset);
        if (o.method == "bits") {
            Sampler s(decompose(p));
            out = s.sample(o.count, rng);
        } else if (o.method == "bruteforce") {
            out = brute_force_sampler(p, o.count, o.seed);
        } else {
            const std::size_t n = p.size();
            out = mcmc_sampler(p, o.count, o.burn_in ? o.burn_in : 50 * n * n + 100, o.thin ? o.thin : 4 * n * n + 10,
                               o.seed);
        }
    }
    if (o.json) {
        std::cout << nlohmann::json(out).dump() << "\n";
    } else {
        for (const auto& e : out) std::cout << line(e) << "\n";
    }
    return 0;
}

int cmd_classify(const Options& o) {
    Process p = load_process(o.file, o.auto_rename);
    auto yes = [](bool b) { return b ? "yes" : "no"; };
    ControlGraph g = build_ctg(p);
    const bool dead = has_deadlock(g);
    std::cout << "actions: " << p.size() << "\n";
    std::cout << "deadlock-free: " << yes(!dead) << "\n";
    const bool fj = is_fork_join(p);
    std::cout << "fork-join: " << yes(fj) << "\n";
    if (fj) {
        std::string sp = "yes";
        try {
            sp_tree(p);
        } catch (const NotSeriesParallel&) {
            sp = "no";
        }
        std::cout << "series-parallel: " << sp << "\n";
    }
    const bool promise = is_promise_process(p);
    std::cout << "promise: " << yes(promise) << "\n";
    std::cout << "arch: " << (promise ? yes(is_arch(p)) : "no") << "\n";
    std::cout << "bit-decomposable: " << (dead ? "n/a" : yes(is_bit_decomposable(g))) << "\n";
    return 0;
}

int cmd_gen(const Options& o) {
    RandomSource rng(o.seed);
    Process p = o.cls == "fj" ? gen_fork_join(o.size, rng) : gen_arch(o.size, o.promises, rng);
    std::cout << to_text(p) << "\n";
    return 0;
}

int cmd_bench(const Options& o) {
    BenchReport r = bench_run(slurp(o.file), {o.threads});
    write_to(o.out, r.to_json() + "\n");
    if (o.out != "-") std::cout << r.to_table();
    if (!r.consistent()) {
        std::cerr << "benchmark: methods disagree\n";
        return 6;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Barrier-synchronization process toolkit"};
    app.require_subcommand(1);
    Options o;
    if (const char* env = std::getenv("BSYNC_THREADS")) o.threads = static_cast<unsigned>(std::max(1, std::atoi(env)));
    app.add_option("--threads", o.threads, "Worker threads (default: $BSYNC_THREADS or 1)")->check(CLI::PositiveNumber);

    auto file_arg = [&](CLI::App* sub) { sub->add_option("FILE", o.file, "Input file ('-' for stdin)")->required(); };
    auto rename_flag = [&](CLI::App* sub) { sub->add_flag("--auto-rename", o.auto_rename, "Rename repeated labels"); };

    auto* parse = app.add_subcommand("parse", "Dump the syntax tree and validation report");
    file_arg(parse);
    rename_flag(parse);

    auto* ctg = app.add_subcommand("ctg", "Control graph and deadlock verdict");
    file_arg(ctg);
    rename_flag(ctg);
    ctg->add_option("--dot", o.dot_out, "Write Graphviz DOT here ('-' for stdout)");
    ctg->add_flag("--edges", o.edges, "Print the edge list even with --dot");

    const std::vector<std::string> count_methods{"bits", "fj", "bruteforce"};
    auto* count = app.add_subcommand("count", "Exact number of executions");
    file_arg(count);
    rename_flag(count);
    count->add_option("--method", o.method)->check(CLI::IsMember(count_methods));
    count->add_flag("--poset", o.as_poset, "Input is a `u -> v` edge list");

    auto* sample = app.add_subcommand("sample", "Uniform random executions");
    file_arg(sample);
    rename_flag(sample);
    sample->add_option("--method", o.method)->check(CLI::IsMember({"bits", "fj", "bruteforce", "mcmc"}));
    sample->add_option("--count", o.count);
    sample->add_option("--seed", o.seed);
    sample->add_flag("--json", o.json, "Emit a JSON array");
    sample->add_flag("--poset", o.as_poset, "Input is a `u -> v` edge list");
    sample->add_option("--burn-in", o.burn_in, "mcmc only");
    sample->add_option("--thin", o.thin, "mcmc only: steps between draws");

    auto* classify = app.add_subcommand("classify", "Subclass membership");
    file_arg(classify);
    rename_flag(classify);

    auto* gen = app.add_subcommand("gen", "Random fork-join or arch process");
    gen->add_option("--class", o.cls)->check(CLI::IsMember({"fj", "arch"}));
    gen->add_option("--size", o.size, "Number of actions")->required();
    gen->add_option("--promises", o.promises, "arch only");
    gen->add_option("--seed", o.seed);

    auto* bench = app.add_subcommand("bench", "Run a benchmark spec");
    bench->add_option("SPEC", o.file, "Benchmark spec (JSON)")->required();
    bench->add_option("--out", o.out, "Report destination ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (parse->parsed()) return cmd_parse(o);
        if (ctg->parsed()) return cmd_ctg(o);
        if (count->parsed()) return cmd_count(o);
        if (sample->parsed()) return cmd_sample(o);
        if (classify->parsed()) return cmd_classify(o);
        if (gen->parsed()) return cmd_gen(o);
        if (bench->parsed()) return cmd_bench(o);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const SyntaxError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DeadlockedGraph& e) {
        std::cerr << "deadlock: " << e.what() << "\n";
        return 3;
    } catch (const NotApplicable& e) {
        std::cerr << "not applicable: " << e.what() << "\n";
        return 4;
    } catch (const InvalidParameters& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ResourceLimit& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return 5;
    } catch (const GraphError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::bad_alloc&) {
        std::cerr << "resource limit: out of memory\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 7;
    }
    return 1;
}
