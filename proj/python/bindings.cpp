#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include <chrono>

#include "bsync/bench.hpp"
#include "bsync/bits.hpp"
#include "bsync/control_graph.hpp"
#include "bsync/error.hpp"
#include "bsync/oracles.hpp"
#include "bsync/sampler.hpp"
#include "bsync/subclasses.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace bsync;

namespace {

// Via bytes: Python refuses decimal strings of more than a few thousand digits.
py::int_ to_py(const BigInt& n) {
    std::string buf((mpz_sizeinbase(n.get_mpz_t(), 2) + 7) / 8, '\0');
    std::size_t len = 0;
    mpz_export(buf.data(), &len, -1, 1, 0, 0, n.get_mpz_t());
    buf.resize(len);
    py::int_ mag = py::module_::import("builtins").attr("int").attr("from_bytes")(py::bytes(buf), "little");
    return sgn(n) < 0 ? py::int_(-mag) : mag;
}

Deadline deadline_of(std::optional<double> seconds) {
    return seconds ? Deadline(std::chrono::duration<double>(*seconds)) : Deadline();
}

std::vector<Execution> fj_draws(const Process& p, std::size_t k, std::uint64_t seed) {
    SPTree t = sp_tree(p);
    RandomSource rng(seed);
    std::vector<Execution> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(fj_sample(t, rng));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Counting and uniform sampling of executions of barrier-synchronized processes";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<SyntaxError>(m, "ParseError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    auto graph = py::register_exception<GraphError>(m, "GraphError", base.ptr());
    py::register_exception<DeadlockedGraph>(m, "DeadlockError", graph.ptr());
    py::register_exception<NotApplicable>(m, "NotApplicable", base.ptr());
    py::register_exception<InvalidParameters>(m, "InvalidParameters", base.ptr());
    auto limit = py::register_exception<ResourceLimit>(m, "ResourceLimit", base.ptr());
    py::register_exception<Timeout>(m, "Timeout", limit.ptr());

    py::class_<Process>(m, "Process")
        .def_property_readonly("size", &Process::size)
        .def("ast", [](const Process& p) { return ast_dump(p); })
        .def("__str__", [](const Process& p) { return to_text(p); })
        .def("__repr__", [](const Process& p) { return "Process('" + to_text(p) + "')"; })
        .def(py::self == py::self);

    py::class_<Poset>(m, "Poset")
        .def_property_readonly("elements", &Poset::elements)
        .def_property_readonly("covering", &Poset::covering_labels)
        .def("less", [](const Poset& p, const std::string& a, const std::string& b) {
            return p.less(p.index_of(a), p.index_of(b));
        })
        .def("__len__", &Poset::size)
        .def("__str__", [](const Poset& p) { return to_edge_list(p); });

    py::class_<ControlGraph>(m, "ControlGraph")
        .def_property_readonly("vertices",
                               [](const ControlGraph& g) {
                                   std::vector<std::string> out;
                                   for (const auto& v : g.vertices) out.push_back(v.id());
                                   return out;
                               })
        .def_property_readonly("edges",
                               [](const ControlGraph& g) {
                                   std::vector<std::pair<std::string, std::string>> out;
                                   for (const auto& [a, b] : g.edges) out.emplace_back(a.id(), b.id());
                                   return out;
                               })
        .def_property_readonly("deadlock", [](const ControlGraph& g) { return has_deadlock(g); })
        .def("residual_barriers", &residual_barriers)
        .def("to_dot", [](const ControlGraph& g) { return to_dot(g); })
        .def("to_poset", [](const ControlGraph& g) { return to_poset(g); })
        .def("__str__", [](const ControlGraph& g) { return to_edge_list(g); });

    m.def("parse", &parse_process, "text"_a);
    m.def("parse_poset", &parse_poset, "text"_a);
    m.def(
        "validate",
        [](const Process& p, bool auto_rename) {
            ValidationReport r = validate(p, {auto_rename});
            return py::dict("term"_a = r.term, "labels"_a = r.labels, "unused_barriers"_a = r.unused_barriers,
                            "renamed"_a = r.renamed);
        },
        "process"_a, "auto_rename"_a = false);
    m.def(
        "executions",
        [](const Process& p, std::size_t limit) {
            EnumerationResult r = enumerate_executions(p, limit);
            return py::dict("executions"_a = r.executions, "deadlock"_a = r.deadlock,
                            "deadlock_trace"_a = r.deadlock_trace);
        },
        "process"_a, "limit"_a = 1'000'000, "Every complete run, found by exploring the transition system.");

    m.def("ctg", &build_ctg, "process"_a);
    m.def("encode_poset", &encode_poset, "poset"_a);
    m.def("is_linear_extension", &is_linear_extension, "poset"_a, "execution"_a);

    m.def(
        "count",
        [](const Poset& p, const std::string& method, std::optional<double> timeout) {
            if (method == "bits") return to_py(count_executions(p, deadline_of(timeout)));
            if (method == "bruteforce") return to_py(brute_force_count(p, 5'000'000, deadline_of(timeout)));
            throw InvalidParameters("unknown counting method '" + method + "'");
        },
        "poset"_a, "method"_a = "bits", "timeout"_a = py::none());
    m.def(
        "fj_count", [](const Process& p) { return to_py(fj_count(sp_tree(p))); }, "process"_a);
    m.def(
        "decomposition_json", [](const Poset& p) { return decomposition_to_json(decompose(p)); }, "poset"_a);

    m.def(
        "sample",
        [](const Poset& p, std::size_t k, std::uint64_t seed, const std::string& method) {
            if (method == "bits") return sample_execution(p, k, seed);
            if (method == "bruteforce") return brute_force_sampler(p, k, seed);
            if (method == "mcmc") {
                const std::size_t n = p.size();
                return mcmc_sampler(p, k, 50 * n * n + 100, 4 * n * n + 10, seed);
            }
            throw InvalidParameters("unknown sampling method '" + method + "'");
        },
        "poset"_a, "k"_a = 1, "seed"_a = 0, "method"_a = "bits");
    m.def("fj_sample", &fj_draws, "process"_a, "k"_a = 1, "seed"_a = 0);

    m.def("is_fork_join", &is_fork_join, "process"_a);
    m.def("is_promise", &is_promise_process, "process"_a);
    m.def("is_arch", &is_arch, "process"_a);
    m.def("is_bit_decomposable", py::overload_cast<const Poset&>(&is_bit_decomposable), "poset"_a);

    m.def(
        "gen_fork_join",
        [](std::size_t size, std::uint64_t seed) {
            RandomSource rng(seed);
            return gen_fork_join(size, rng);
        },
        "size"_a, "seed"_a = 0);
    m.def(
        "gen_arch",
        [](std::size_t n, std::size_t k, std::uint64_t seed) {
            RandomSource rng(seed);
            return gen_arch(n, k, rng);
        },
        "n"_a, "k"_a, "seed"_a = 0);

    m.def(
        "bench",
        [](const std::string& spec, unsigned threads) {
            BenchReport r;
            {
                py::gil_scoped_release release;
                r = bench_run(spec, {threads});
            }
            return py::dict("json"_a = r.to_json(), "table"_a = r.to_table(), "consistent"_a = r.consistent());
        },
        "spec"_a, "threads"_a = 1);
}
