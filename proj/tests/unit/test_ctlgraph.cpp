#include "bsync/control_graph.hpp"
#include "bsync/error.hpp"
#include "bsync/oracles.hpp"
#include "corpus.hpp"
#include "doctest.h"

using namespace bsync;

namespace {

using Edges = std::set<std::pair<Node, Node>>;

Node A(const std::string& s) { return Node::action(s); }

ControlGraph ctg(const char* text) { return build_ctg(parse_process(text)); }

std::vector<std::pair<std::string, std::string>> cover(const Poset& p) { return p.covering_labels(); }

}  // namespace

TEST_CASE("prefix_node") {
    ControlGraph empty;
    auto g = prefix_node(A("x"), empty);
    CHECK(g.vertices == std::set<Node>{A("x")});
    CHECK(g.edges.empty());

    ControlGraph b;
    b.vertices = {A("b")};
    auto ab = prefix_node(A("a"), b);
    CHECK(ab.edges == Edges{{A("a"), A("b")}});

    // B ~> graph of <C>a.0
    ControlGraph ca = prefix_node(Node::barrier("C"), prefix_node(A("a"), {}));
    auto bca = prefix_node(Node::barrier("B"), ca);
    CHECK(bca.edges == Edges{{Node::barrier("B"), Node::barrier("C")}, {Node::barrier("C"), A("a")}});

    CHECK_THROWS_AS(prefix_node(A("a"), ab), DuplicateNode);
}

TEST_CASE("eliminate_barrier") {
    const Node B = Node::barrier("B");
    ControlGraph g;
    g.vertices = {B, A("a"), A("b")};
    g.edges = {{B, A("a")}, {B, A("b")}};
    auto r = eliminate_barrier(g, "B");
    CHECK(r.vertices == std::set<Node>{A("a"), A("b")});
    CHECK(r.edges.empty());

    ControlGraph loop;
    loop.vertices = {B, A("a")};
    loop.edges = {{B, B}, {B, A("a")}};
    auto kept = eliminate_barrier(loop, "B");
    CHECK(kept.edges.count({B, B}) == 1);
    CHECK(has_deadlock(kept));

    ControlGraph plain;
    plain.vertices = {A("a"), A("b")};
    plain.edges = {{A("a"), A("b")}};
    CHECK(eliminate_barrier(plain, "B") == plain);

    // a -> B -> b becomes a -> b
    ControlGraph through;
    through.vertices = {A("a"), B, A("b")};
    through.edges = {{A("a"), B}, {B, A("b")}};
    CHECK(eliminate_barrier(through, B).edges == Edges{{A("a"), A("b")}});
}

TEST_CASE("build_ctg: worked examples") {
    auto ok = ctg("nu(B) nu(C) [<B><C>a.0 || <B><C>b.0]");
    CHECK(ok.vertices == std::set<Node>{A("a"), A("b")});
    CHECK(ok.edges.empty());
    CHECK_FALSE(has_deadlock(ok));

    auto dead = ctg("nu(B) nu(C) [<B><C>a.0 || <C><B>b.0]");
    CHECK(has_deadlock(dead));
    CHECK(residual_barriers(dead) == std::vector<std::string>{"B"});

    auto intro = ctg("nu(B) [a1.<B> a2.0 || <B> b1.0 || c1.<B> 0]");
    CHECK_FALSE(has_deadlock(intro));
    CHECK(intro.edges.size() == 4);
}

TEST_CASE("build_ctg: sixteen-action system") {
    auto g = build_ctg(parse_process(testing::read_file(testing::data_path("fig2_sys.bsp"))));
    CHECK_FALSE(has_deadlock(g));
    CHECK(g.vertices.size() == 16);
    const Edges expected = {
        {A("init"), A("step1")},   {A("init"), A("gen")},      {A("init"), A("fork")},     {A("step1"), A("step2")},
        {A("step1"), A("load")},   {A("step2"), A("step3")},   {A("step3"), A("step4")},   {A("step4"), A("end")},
        {A("load"), A("xform")},   {A("xform"), A("step4")},   {A("gen"), A("yield1")},    {A("yield1"), A("step3")},
        {A("yield1"), A("yield2")}, {A("yield2"), A("end")},   {A("fork"), A("comp1")},    {A("fork"), A("comp2_1")},
        {A("comp2_1"), A("comp2_2")}, {A("comp1"), A("join")}, {A("comp2_2"), A("join")}, {A("join"), A("end")},
    };
    CHECK(g.edges == expected);
}

TEST_CASE("build_ctg drops edges made transitive by a barrier") {
    // Before reduction this graph has a -> b (through C) and a -> c -> b (through B).
    auto g = ctg("nu(B) nu(C) [a.(<B>0 || <C>0) || <C>c.<B>0 || <B>b.0]");
    CHECK_FALSE(has_deadlock(g));
    CHECK(g.edges == Edges{{A("a"), A("c")}, {A("c"), A("b")}});
}

TEST_CASE("to_poset") {
    auto k22 = to_poset(ctg("nu(B) [a1.<B>0 || a2.<B>0 || <B>b1.0 || <B>b2.0]"));
    CHECK(k22.size() == 4);
    CHECK(cover(k22).size() == 4);
    CHECK(k22.less(k22.index_of("a1"), k22.index_of("b2")));

    auto chain = to_poset(ctg("a.b.c.0"));
    CHECK(cover(chain) == std::vector<std::pair<std::string, std::string>>{{"a", "b"}, {"b", "c"}});

    CHECK(to_poset(ControlGraph{}).empty());
    CHECK_THROWS_AS(to_poset(ctg("nu(B) nu(C) [<B><C>a.0 || <C><B>b.0]")), DeadlockedGraph);
}

TEST_CASE("encode_poset") {
    auto single = Poset::from_relations({"a"}, {});
    CHECK(encode_poset(single) == parse_process("nu(B_a) <B_a>a.0"));

    auto two = Poset::from_relations({"a", "b"}, {{"a", "b"}});
    CHECK(to_poset(build_ctg(encode_poset(two))) == two);

    CHECK(to_poset(build_ctg(encode_poset(testing::crown()))) == testing::crown());
    CHECK(to_poset(build_ctg(encode_poset(testing::eight()))) == testing::eight());

    RandomSource rng(11);
    for (int i = 0; i < 100; ++i) {
        Poset p = testing::random_poset(1 + rng.below(9), 0.35, rng);
        Process enc = encode_poset(p);
        CHECK_NOTHROW(validate(enc));
        CHECK(to_poset(build_ctg(enc)) == p);
    }
}

TEST_CASE("dot and edge list output") {
    auto dead = ctg("nu(B) nu(C) [<B><C>a.0 || <C><B>b.0]");
    auto dot = to_dot(dead);
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("shape=box") != std::string::npos);
    CHECK(to_edge_list(ctg("a.b.0")) == "a -> b\n");
}

TEST_CASE("poset parsing and validation") {
    auto p = parse_poset("a -> b\nb -> c\na -> c\nd\n");
    CHECK(p.size() == 4);
    CHECK(p.covering().size() == 2);
    CHECK_THROWS_AS(parse_poset("a -> b\nb -> a\n"), CyclicInput);
    CHECK_THROWS_AS(parse_poset("a -> \n"), SyntaxError);
    CHECK_THROWS_AS(Poset::from_covering({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}, {"a", "c"}}),
                    NotTransitivelyReduced);
    CHECK(is_linear_extension(p, {"a", "d", "b", "c"}));
    CHECK_FALSE(is_linear_extension(p, {"b", "a", "d", "c"}));
    CHECK_FALSE(is_linear_extension(p, {"a", "b", "c"}));
}
