#include "bsync/subclasses.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

#include "bsync/error.hpp"

namespace bsync {

// ---------------------------------------------------------------------------
// SPTree

SPTree SPTree::atom(std::string label) { return SPTree{Kind::Atom, std::move(label), {}, 1}; }

namespace {

SPTree compose(SPTree::Kind kind, std::vector<SPTree> children) {
    std::vector<SPTree> flat;
    for (auto& c : children) {
        if (c.size == 0) continue;
        if (c.kind == kind) {
            for (auto& g : c.children) flat.push_back(std::move(g));
        } else {
            flat.push_back(std::move(c));
        }
    }
    if (flat.size() == 1) return std::move(flat.front());
    SPTree t{kind, {}, std::move(flat), 0};
    for (const auto& c : t.children) t.size += c.size;
    return t;
}

}  // namespace

SPTree SPTree::seq(std::vector<SPTree> children) { return compose(Kind::Seq, std::move(children)); }
SPTree SPTree::par(std::vector<SPTree> children) { return compose(Kind::Par, std::move(children)); }

std::string SPTree::to_string() const {
    if (kind == Kind::Atom) return label;
    std::string out = kind == Kind::Seq ? "Seq(" : "Par(";
    for (std::size_t i = 0; i < children.size(); ++i) {
        if (i) out += ", ";
        out += children[i].to_string();
    }
    return out + ")";
}

// ---------------------------------------------------------------------------
// Fork-join recognition

namespace {

struct StackCell {
    const std::string* name;
    const StackCell* next;
};

class FjChecker {
public:
    bool check(const Process& p, const StackCell* st) {
        const Process* cur = &p;
        for (;;) {
            switch (cur->kind()) {
                case Process::Kind::Stop:
                    return true;
                case Process::Kind::Act:
                    cur = &cur->cont();
                    break;
                case Process::Kind::Sync:
                    if (!st || *st->name != cur->name()) return false;
                    st = st->next;
                    cur = &cur->cont();
                    break;
                case Process::Kind::New:
                    arena_.push_back({&cur->name(), st});
                    st = &arena_.back();
                    cur = &cur->cont();
                    break;
                case Process::Kind::Par:
                    if (!check(cur->left(), st)) return false;
                    cur = &cur->right();
                    break;
            }
        }
    }

private:
    std::deque<StackCell> arena_;
};

}  // namespace

bool is_fork_join(const Process& p) { return FjChecker().check(p, nullptr); }

// ---------------------------------------------------------------------------
// Fork-join to series-parallel tree
//
// Every subterm is cut into levels: level j holds the actions that run after
// the subterm has passed j barriers of the enclosing stack. A level carries a
// binary SP fragment whose nodes record which actions reach the next barrier
// (joined), and whether any thread of the subterm reaches it at all.

namespace {

enum class Joined : unsigned char { None, Partial, Full };

class SpBuilder {
public:
    struct Piece {
        int node = -1;
        bool part = false;
    };
    using Levels = std::deque<Piece>;

    Levels translate(const Process& p) {
        std::vector<const Process*> chain;
        const Process* cur = &p;
        while (cur->kind() == Process::Kind::Act || cur->kind() == Process::Kind::Sync) {
            chain.push_back(cur);
            cur = &cur->cont();
        }
        Levels lv;
        switch (cur->kind()) {
            case Process::Kind::Par: {
                Levels a = translate(cur->left());
                Levels b = translate(cur->right());
                if (a.size() >= b.size()) {
                    for (std::size_t j = 0; j < b.size(); ++j) a[j] = {par(a[j].node, b[j].node), a[j].part || b[j].part};
                    lv = std::move(a);
                } else {
                    for (std::size_t j = 0; j < a.size(); ++j) b[j] = {par(a[j].node, b[j].node), a[j].part || b[j].part};
                    lv = std::move(b);
                }
                break;
            }
            case Process::Kind::New: {
                lv = translate(cur->cont());
                Piece x = pop(lv), y = pop(lv);
                lv.push_front(close(x, y));
                break;
            }
            default:
                break;
        }
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            if ((*it)->kind() == Process::Kind::Sync) {
                lv.push_front({-1, true});
            } else {
                Piece first = pop(lv);
                int a = atom((*it)->name(), first.part);
                lv.push_front({seq(a, first.node), first.part});
            }
        }
        return lv;
    }

    SPTree finish(int root) const {
        if (root < 0) return SPTree{SPTree::Kind::Seq, {}, {}, 0};
        return convert(root);
    }

private:
    struct BNode {
        SPTree::Kind kind;
        Joined st;
        int l = -1, r = -1;
        const std::string* label = nullptr;
    };

    static Piece pop(Levels& lv) {
        if (lv.empty()) return {};
        Piece p = lv.front();
        lv.pop_front();
        return p;
    }

    Joined st(int n) const { return nodes_[static_cast<std::size_t>(n)].st; }
    const BNode& at(int n) const { return nodes_[static_cast<std::size_t>(n)]; }

    int make(BNode b) {
        nodes_.push_back(b);
        return static_cast<int>(nodes_.size() - 1);
    }

    int atom(const std::string& label, bool joined) {
        return make({SPTree::Kind::Atom, joined ? Joined::Full : Joined::None, -1, -1, &label});
    }

    int seq(int a, int b) {
        if (a < 0) return b;
        if (b < 0) return a;
        Joined s = st(b) == Joined::Full ? Joined::Full : st(a) == Joined::None ? Joined::None : Joined::Partial;
        return make({SPTree::Kind::Seq, s, a, b, nullptr});
    }

    int par(int a, int b) {
        if (a < 0) return b;
        if (b < 0) return a;
        Joined s = st(a) == st(b) && st(a) != Joined::Partial ? st(a) : Joined::Partial;
        return make({SPTree::Kind::Par, s, a, b, nullptr});
    }

    // A root marked None hides whatever its descendants still record.
    void shield(int n) {
        if (n >= 0) nodes_[static_cast<std::size_t>(n)].st = Joined::None;
    }

    // Barrier between level x (before) and level y (after).
    Piece close(Piece x, Piece y) {
        if (x.node < 0) return y;
        int node;
        if (y.node < 0)
            node = x.node;
        else if (st(x.node) == Joined::None)
            node = par(x.node, y.node);
        else
            node = attach(x.node, y.node);
        if (!y.part) shield(node);
        return {node, y.part};
    }

    // Places y after exactly the joined actions of t.
    int attach(int t, int y) {
        struct Frame {
            bool seq_left;  // Seq(node, sub) or Par(node, sub)
            int node;
        };
        std::vector<Frame> frames;
        int cur = t, rest = -1, sub = -1;
        for (;;) {
            if (st(cur) == Joined::Full) {
                sub = seq(cur, rest < 0 ? y : par(rest, y));
                break;
            }
            const BNode n = at(cur);  // copy: make() may reallocate
            if (n.kind == SPTree::Kind::Seq) {
                if (st(n.r) != Joined::None) {
                    frames.push_back({true, n.l});
                    cur = n.r;
                } else {
                    rest = seq(n.r, rest);
                    cur = n.l;
                }
                continue;
            }
            if (n.kind != SPTree::Kind::Par || rest >= 0)
                throw NotSeriesParallel("a thread that never joins makes the causal order N-shaped");
            std::vector<int> nones, fulls, partials, todo{cur};
            while (!todo.empty()) {
                int v = todo.back();
                todo.pop_back();
                const BNode& b = at(v);
                if (b.kind == SPTree::Kind::Par && b.st == Joined::Partial) {
                    todo.push_back(b.r);
                    todo.push_back(b.l);
                } else {
                    (b.st == Joined::None ? nones : b.st == Joined::Full ? fulls : partials).push_back(v);
                }
            }
            int none_part = -1;
            for (int v : nones) none_part = par(none_part, v);
            if (partials.empty()) {
                int full_part = -1;
                for (int v : fulls) full_part = par(full_part, v);
                frames.push_back({false, none_part});
                sub = seq(full_part, y);
                break;
            }
            if (partials.size() == 1 && fulls.empty()) {
                frames.push_back({false, none_part});
                cur = partials.front();
                continue;
            }
            throw NotSeriesParallel("a thread that never joins makes the causal order N-shaped");
        }
        for (auto it = frames.rbegin(); it != frames.rend(); ++it) sub = it->seq_left ? seq(it->node, sub) : par(it->node, sub);
        return sub;
    }

    SPTree convert(int root) const {
        const BNode& r = at(root);
        if (r.kind == SPTree::Kind::Atom) return SPTree::atom(*r.label);
        // Gather the maximal same-kind cluster in order, without recursion.
        std::vector<int> parts, todo{root};
        while (!todo.empty()) {
            int v = todo.back();
            todo.pop_back();
            const BNode& b = at(v);
            if (b.kind == r.kind) {
                todo.push_back(b.r);
                todo.push_back(b.l);
            } else {
                parts.push_back(v);
            }
        }
        SPTree t{r.kind, {}, {}, 0};
        t.children.reserve(parts.size());
        for (int v : parts) {
            t.children.push_back(convert(v));
            t.size += t.children.back().size;
        }
        return t;
    }

    std::vector<BNode> nodes_;
};

}  // namespace

SPTree sp_tree(const Process& p) {
    if (!is_fork_join(p)) throw NotForkJoin("process does not follow the fork-join barrier discipline");
    SpBuilder b;
    auto levels = b.translate(p);
    return b.finish(levels.empty() ? -1 : levels.front().node);
}

namespace {

struct Ends {
    std::vector<std::string> min, max;
};

Ends sp_edges(const SPTree& t, std::vector<std::string>& elems, std::vector<std::pair<std::string, std::string>>& rel) {
    if (t.kind == SPTree::Kind::Atom) {
        elems.push_back(t.label);
        return {{t.label}, {t.label}};
    }
    Ends out;
    std::vector<Ends> ends;
    for (const auto& c : t.children) ends.push_back(sp_edges(c, elems, rel));
    if (ends.empty()) return out;
    if (t.kind == SPTree::Kind::Par) {
        for (auto& e : ends) {
            out.min.insert(out.min.end(), e.min.begin(), e.min.end());
            out.max.insert(out.max.end(), e.max.begin(), e.max.end());
        }
        return out;
    }
    for (std::size_t i = 0; i + 1 < ends.size(); ++i)
        for (const auto& a : ends[i].max)
            for (const auto& b : ends[i + 1].min) rel.emplace_back(a, b);
    return {ends.front().min, ends.back().max};
}

}  // namespace

Poset sp_poset(const SPTree& t) {
    std::vector<std::string> elems;
    std::vector<std::pair<std::string, std::string>> rel;
    sp_edges(t, elems, rel);
    return Poset::from_relations(std::move(elems), rel);
}

// ---------------------------------------------------------------------------
// Counting and sampling

namespace {

void collect_factors(const SPTree& t, std::vector<BigInt>& factors) {
    for (const auto& c : t.children) collect_factors(c, factors);
    if (t.kind != SPTree::Kind::Par) return;
    unsigned long acc = 0;
    for (const auto& c : t.children) {
        acc += c.size;
        if (acc == c.size) continue;
        BigInt b;
        mpz_bin_uiui(b.get_mpz_t(), acc, c.size);
        factors.push_back(std::move(b));
    }
}

BigInt product(std::vector<BigInt>& xs) {
    if (xs.empty()) return 1;
    // Balanced pairwise products keep the operands of similar size.
    while (xs.size() > 1) {
        std::vector<BigInt> next;
        next.reserve((xs.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < xs.size(); i += 2) next.push_back(xs[i] * xs[i + 1]);
        if (xs.size() % 2) next.push_back(std::move(xs.back()));
        xs = std::move(next);
    }
    return xs.front();
}

void sample_into(const SPTree& t, RandomSource& rng, Execution& out) {
    switch (t.kind) {
        case SPTree::Kind::Atom:
            out.push_back(t.label);
            return;
        case SPTree::Kind::Seq:
            for (const auto& c : t.children) sample_into(c, rng, out);
            return;
        case SPTree::Kind::Par: {
            std::vector<Execution> parts(t.children.size());
            std::vector<std::uint32_t> slots;
            slots.reserve(t.size);
            for (std::size_t i = 0; i < t.children.size(); ++i) {
                sample_into(t.children[i], rng, parts[i]);
                slots.insert(slots.end(), parts[i].size(), static_cast<std::uint32_t>(i));
            }
            for (std::size_t i = slots.size(); i > 1; --i) std::swap(slots[i - 1], slots[rng.below(i)]);
            std::vector<std::size_t> next(parts.size(), 0);
            for (auto s : slots) out.push_back(std::move(parts[s][next[s]++]));
            return;
        }
    }
}

}  // namespace

BigInt fj_count(const SPTree& t) {
    std::vector<BigInt> factors;
    collect_factors(t, factors);
    return product(factors);
}

Execution fj_sample(const SPTree& t, RandomSource& rng) {
    Execution out;
    out.reserve(t.size);
    sample_into(t, rng, out);
    return out;
}

// ---------------------------------------------------------------------------
// Promises

namespace {

bool promise_body(const Process& q, const std::string& b) {
    const Process* cur = &q;
    while (cur->kind() == Process::Kind::Act) cur = &cur->cont();
    return cur->kind() == Process::Kind::Sync && cur->name() == b && cur->cont().is_stop();
}

}  // namespace

bool is_promise_process(const Process& p) {
    std::set<std::string> pending;
    const Process* cur = &p;
    for (;;) {
        switch (cur->kind()) {
            case Process::Kind::Stop:
                return pending.empty();
            case Process::Kind::Act:
                cur = &cur->cont();
                break;
            case Process::Kind::Sync:
                if (!pending.erase(cur->name())) return false;
                cur = &cur->cont();
                break;
            case Process::Kind::New: {
                const Process& body = cur->cont();
                if (body.kind() != Process::Kind::Par || pending.count(cur->name()) ||
                    !promise_body(body.right(), cur->name()))
                    return false;
                pending.insert(cur->name());
                cur = &body.left();
                break;
            }
            case Process::Kind::Par:
                return false;
        }
    }
}

bool is_arch(const Process& p) {
    if (!is_promise_process(p)) throw NotPromise("process is not a promise process");
    bool synced = false;
    const Process* cur = &p;
    for (;;) {
        switch (cur->kind()) {
            case Process::Kind::Stop:
                return true;
            case Process::Kind::Act:
                cur = &cur->cont();
                break;
            case Process::Kind::Sync:
                synced = true;
                cur = &cur->cont();
                break;
            case Process::Kind::New:
                if (synced) return false;
                cur = &cur->cont().left();
                break;
            case Process::Kind::Par:
                return false;
        }
    }
}

// ---------------------------------------------------------------------------
// Generators

namespace {

// Uniform plane tree with n nodes and out-degrees in {0,1,2,3}, given as its
// preorder degree sequence. Degrees are drawn i.i.d. with weight theta^d,
// conditioned on summing to n-1 (every such sequence is then equally likely),
// and the cycle lemma picks the one rotation that is a valid preorder code.
std::vector<int> plane_tree(std::size_t n, RandomSource& rng) {
    // theta solves 2t^3 + t^2 - 1 = 0, which makes the mean degree 1.
    double theta = 0.65;
    for (int i = 0; i < 50; ++i) theta -= (2 * theta * theta * theta + theta * theta - 1) / (6 * theta * theta + 2 * theta);
    const double w[4] = {1, theta, theta * theta, theta * theta * theta};
    const double z = w[0] + w[1] + w[2] + w[3];
    std::vector<int> d(n);
    for (;;) {
        long long sum = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            double u = rng.uniform_open() * z;
            int k = 0;
            while (k < 3 && u >= w[k]) u -= w[k++];
            d[i] = k;
            sum += k;
        }
        const long long last = static_cast<long long>(n) - 1 - sum;
        if (last < 0 || last > 3) continue;
        // The first n-1 draws already carry their weights; the forced last one must too.
        if (rng.uniform_open() >= w[last]) continue;
        d[n - 1] = static_cast<int>(last);
        break;
    }
    long long s = 0, best = 0;
    std::size_t cut = 0;
    for (std::size_t i = 0; i < n; ++i) {
        s += d[i] - 1;
        if (s < best) best = s, cut = i + 1;
    }
    std::rotate(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(cut % n), d.end());
    return d;
}

// Node with degree 0 is a final action, 1 a sequence, 2 an unjoined fork
// a.(L || R), 3 a joined fork a.nu(J)[L.<J>0 || R.<J>0 || <J>C].
Process emit_fork_join(const std::vector<int>& degree) {
    const std::size_t n = degree.size();
    std::vector<std::vector<std::size_t>> kids(n);
    std::vector<std::size_t> open;  // nodes still expecting children
    for (std::size_t v = 0; v < n; ++v) {
        if (!open.empty()) {
            const std::size_t p = open.back();
            kids[p].push_back(v);
            if (kids[p].size() == static_cast<std::size_t>(degree[p])) open.pop_back();
        }
        if (degree[v] > 0) open.push_back(v);
    }
    // Thread endings are plain: 0 or <J>0. tail[v] is that barrier's number, 0 for none.
    std::vector<std::size_t> tail(n, 0), barrier(n, 0);
    std::size_t barriers = 0;
    for (std::size_t v = 0; v < n; ++v) {
        if (degree[v] == 3) {
            barrier[v] = ++barriers;
            tail[kids[v][0]] = tail[kids[v][1]] = barrier[v];
            tail[kids[v][2]] = tail[v];
        } else {
            for (auto c : kids[v]) tail[c] = tail[v];
        }
    }
    auto ending = [](std::size_t b) {
        return b ? Process::sync("J" + std::to_string(b), Process::stop()) : Process::stop();
    };
    std::vector<Process> out(n);
    for (std::size_t v = n; v-- > 0;) {
        const std::string label = "a" + std::to_string(v + 1);
        Process body;
        switch (degree[v]) {
            case 0: body = ending(tail[v]); break;
            case 1: body = std::move(out[kids[v][0]]); break;
            case 2: body = Process::par(std::move(out[kids[v][0]]), std::move(out[kids[v][1]])); break;
            default: {
                const std::string b = "J" + std::to_string(barrier[v]);
                body = Process::nu(b, Process::par(Process::par(std::move(out[kids[v][0]]), std::move(out[kids[v][1]])),
                                                   Process::sync(b, std::move(out[kids[v][2]]))));
            }
        }
        out[v] = Process::act(label, std::move(body));
        for (auto c : kids[v]) out[c] = Process();
    }
    return out[0];
}

Process chain(const std::vector<std::string>& labels, Process tail) {
    for (auto it = labels.rbegin(); it != labels.rend(); ++it) tail = Process::act(*it, std::move(tail));
    return tail;
}

}  // namespace

Process gen_fork_join(std::size_t size, RandomSource& rng) {
    if (size == 0) throw InvalidParameters("fork-join size must be at least 1");
    return emit_fork_join(plane_tree(size, rng));
}

Process gen_arch(std::size_t n, std::size_t k, RandomSource& rng) {
    if (k > n) throw InvalidParameters("arch needs at least one action per promise (k <= n)");
    // Slots 0..k-1 are promise bodies, k..3k are the main-thread segments.
    std::vector<std::size_t> per_slot(3 * k + 1, 0);
    for (std::size_t i = 0; i < k; ++i) per_slot[i] = 1;
    for (std::size_t i = k; i < n; ++i) ++per_slot[rng.below(3 * k + 1)];
    std::vector<std::size_t> order(k);
    for (std::size_t i = 0; i < k; ++i) order[i] = i;
    for (std::size_t i = k; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    std::vector<std::vector<std::string>> seg(2 * k + 1);
    std::size_t m = 0;
    for (std::size_t s = 0; s <= 2 * k; ++s)
        for (std::size_t j = 0; j < per_slot[k + s]; ++j) seg[s].push_back("m" + std::to_string(++m));
    auto barrier = [](std::size_t i) { return "P" + std::to_string(i + 1); };

    Process main = chain(seg[2 * k], Process::stop());
    for (std::size_t j = k; j-- > 0;) main = chain(seg[k + j], Process::sync(barrier(order[j]), std::move(main)));
    for (std::size_t i = k; i-- > 0;) {
        std::vector<std::string> body;
        for (std::size_t j = 0; j < per_slot[i]; ++j)
            body.push_back("p" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
        Process promise = chain(body, Process::sync(barrier(i), Process::stop()));
        main = chain(seg[i], Process::nu(barrier(i), Process::par(std::move(main), std::move(promise))));
    }
    return main;
}

}  // namespace bsync
