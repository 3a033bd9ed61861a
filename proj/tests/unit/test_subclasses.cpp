#include <map>

#include "bsync/bench.hpp"
#include "bsync/bits.hpp"
#include "bsync/control_graph.hpp"
#include "bsync/error.hpp"
#include "bsync/oracles.hpp"
#include "bsync/subclasses.hpp"
#include "corpus.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace bsync;

namespace {

Process P(const char* text) { return parse_process(text); }
SPTree At(const char* s) { return SPTree::atom(s); }

}  // namespace

TEST_CASE("is_fork_join") {
    CHECK(is_fork_join(P("nu(B) [x.<B>0 || <B>t1.0 || <B>t2.0]")));
    CHECK(is_fork_join(P("nu(B) [a1.<B> a2.0 || <B> b1.0 || c1.<B> 0]")));
    // outer barrier joined while the inner one is still open
    CHECK_FALSE(is_fork_join(P("nu(B) nu(C) [a.<B><C>0 || <C>b.0 || <B>c.0]")));
    CHECK_FALSE(is_fork_join(P(testing::read_file(testing::data_path("fig2_sys.bsp")).c_str())));
    CHECK(is_fork_join(P("0")));
}

TEST_CASE("sp_tree") {
    CHECK(sp_tree(P("a.b.0")) == SPTree::seq({At("a"), At("b")}));
    CHECK(sp_tree(P("a.(b.0 || c.0)")) == SPTree::seq({At("a"), SPTree::par({At("b"), At("c")})}));
    CHECK(sp_tree(P("nu(B) [a1.<B> a2.0 || <B> b1.0 || c1.<B> 0]")) ==
          SPTree::seq({SPTree::par({At("a1"), At("c1")}), SPTree::par({At("a2"), At("b1")})}));
    CHECK_THROWS_AS(sp_tree(P(testing::read_file(testing::data_path("fig2_sys.bsp")).c_str())), NotForkJoin);
    // fork-join by the stack rule, but the order is an N
    CHECK_THROWS_AS(sp_tree(P("nu(B) [a.(x.0 || y.<B>z.0) || w.<B>0]")), NotSeriesParallel);
}

TEST_CASE("sp_tree agrees with the control graph") {
    RandomSource rng(21);
    for (int i = 0; i < 300; ++i) {
        Process p = gen_fork_join(1 + rng.below(20), rng);
        CAPTURE(to_text(p));
        CHECK(sp_poset(sp_tree(p)) == to_poset(build_ctg(p)));
    }
}

TEST_CASE("fj_count") {
    CHECK(fj_count(SPTree::seq({At("a"), At("b"), At("c")})) == 1);
    CHECK(fj_count(SPTree::par({At("a"), At("b")})) == 2);
    CHECK(fj_count(SPTree::seq({At("a"), SPTree::par({SPTree::seq({At("b"), At("c")}), At("d")})})) == 3);
    RandomSource rng(8);
    for (int i = 0; i < 100; ++i) {
        Process p = gen_fork_join(1 + rng.below(12), rng);
        CHECK(fj_count(sp_tree(p)) == brute_force_count(to_poset(build_ctg(p))));
    }
}

TEST_CASE("fj_sample") {
    RandomSource rng(4);
    auto chain = SPTree::seq({At("a"), At("b"), At("c")});
    for (int i = 0; i < 20; ++i) CHECK(fj_sample(chain, rng) == Execution{"a", "b", "c"});

    std::map<Execution, int> freq;
    auto ab = SPTree::par({At("a"), At("b")});
    for (int i = 0; i < 10000; ++i) ++freq[fj_sample(ab, rng)];
    CHECK(freq.size() == 2);
    CHECK(std::abs(freq[{"a", "b"}] - 5000) < 4 * 50);

    auto t = SPTree::seq({At("a"), SPTree::par({At("b"), At("c")})});
    std::vector<Execution> draws;
    for (int i = 0; i < 10000; ++i) draws.push_back(fj_sample(t, rng));
    auto support = brute_force_extensions(sp_poset(t));
    CHECK(chi_square_uniformity(draws, support).p_value > 0.001);

    Process p = gen_fork_join(30, rng);
    Poset order = to_poset(build_ctg(p));
    SPTree sp = sp_tree(p);
    for (int i = 0; i < 200; ++i) CHECK(is_linear_extension(order, fj_sample(sp, rng)));
}

TEST_CASE("promise and arch recognizers") {
    CHECK(is_promise_process(P("nu(B) [a.<B>0 || b.<B>0]")));
    CHECK(is_promise_process(P("0")));
    CHECK(is_promise_process(P("m.nu(B) [x.<B>y.0 || p.q.<B>0]")));
    // a fork-join join: the right thread does not end at the barrier
    CHECK_FALSE(is_promise_process(P("nu(B) [a.<B>0 || <B>b.0]")));
    // bare parallel composition outside a spawn
    CHECK_FALSE(is_promise_process(P("a.0 || b.0")));

    CHECK(is_arch(P("nu(B) [(nu(C) [m.<B><C>0 || q.<C>0]) || p.<B>0]")));
    CHECK_FALSE(is_arch(P("nu(B) [(<B> nu(C) [<C>0 || q.<C>0]) || p.<B>0]")));
    CHECK(is_arch(P("a.b.c.0")));
    CHECK_THROWS_AS(is_arch(P("a.0 || b.0")), NotPromise);
}

TEST_CASE("generators") {
    RandomSource rng(99);
    CHECK(gen_fork_join(1, rng) == P("a1.0"));
    CHECK(gen_arch(4, 0, rng) == P("m1.m2.m3.m4.0"));
    CHECK_THROWS_AS(gen_fork_join(0, rng), InvalidParameters);
    CHECK_THROWS_AS(gen_arch(2, 3, rng), InvalidParameters);
    for (int i = 0; i < 200; ++i) {
        Process f = gen_fork_join(1 + rng.below(25), rng);
        CHECK(is_fork_join(f));
        CHECK_NOTHROW(validate(f));
        CHECK(is_bit_decomposable(build_ctg(f)));
        std::size_t n = 1 + rng.below(15), k = rng.below(n + 1);
        Process a = gen_arch(n, k, rng);
        CHECK(a.size() == n);
        CHECK(is_arch(a));
    }
    RandomSource x(5), y(5);
    CHECK(gen_fork_join(50, x) == gen_fork_join(50, y));
}

TEST_CASE("brute force oracles") {
    CHECK(brute_force_extensions(testing::eight()).size() == 14);
    CHECK(brute_force_extensions(parse_poset("a\nb\nc\n")).size() == 6);
    CHECK(brute_force_extensions(testing::three()).size() == 3);
    CHECK_THROWS_AS(brute_force_extensions(parse_poset("a\nb\nc\nd\n"), {3}), TooLarge);
    CHECK(brute_force_count(testing::eight()) == 14);

    auto chain = parse_poset("a -> b\nb -> c\n");
    for (const auto& e : brute_force_sampler(chain, 20, 1)) CHECK(e == Execution{"a", "b", "c"});
    for (const auto& e : mcmc_sampler(chain, 20, 10, 10, 1)) CHECK(e == Execution{"a", "b", "c"});

    auto pair = parse_poset("a\nb\n");
    int ab = 0;
    for (const auto& e : brute_force_sampler(pair, 10000, 2)) ab += e.front() == "a";
    CHECK(std::abs(ab - 5000) < 200);
    ab = 0;
    for (const auto& e : mcmc_sampler(pair, 10000, 100, 7, 3)) ab += e.front() == "a";
    CHECK(std::abs(ab - 5000) < 300);

    auto many = brute_force_sampler(testing::eight(), 100000, 5);
    CHECK(std::set<Execution>(many.begin(), many.end()).size() == 14);
}

TEST_CASE("chi_square_uniformity") {
    std::vector<Execution> support{{"a"}, {"b"}, {"c"}};
    std::vector<Execution> even;
    for (int i = 0; i < 100; ++i)
        for (const auto& s : support) even.push_back(s);
    auto flat = chi_square_uniformity(even, support);
    CHECK(flat.statistic == doctest::Approx(0.0));
    CHECK(flat.p_value == doctest::Approx(1.0));
    std::vector<Execution> skew(300, Execution{"a"});
    CHECK(chi_square_uniformity(skew, support).statistic == doctest::Approx(600.0));
    CHECK_THROWS_AS(chi_square_uniformity({{"z"}}, support), UnknownOutcome);
}

TEST_CASE("bench_run") {
    const char* spec = R"({"timeout": 20, "samples": 50, "methods": ["fj", "bits", "bruteforce", "mcmc"],
                           "instances": [{"class": "fj", "size": 10, "seeds": [1, 2]},
                                         {"class": "fj", "size": 30, "seeds": [3]},
                                         {"class": "arch", "n": 10, "k": 2, "seeds": [1]}]})";
    BenchReport r = bench_run(spec, {2});
    REQUIRE(r.rows.size() == 4);
    CHECK(r.consistent());
    for (const auto& row : r.rows) {
        CHECK(row.agree);
        CHECK_FALSE(row.count.empty());
    }
    // fj does not apply to arch instances that are not fork-join
    auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["rows"].size() == 4);
    CHECK(r.to_table().find("class") == 0);
    CHECK_THROWS_AS(bench_run("{\"instances\": [{\"class\": \"zz\"}]}"), InvalidParameters);
}
