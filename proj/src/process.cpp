#include "bsync/process.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "bsync/error.hpp"

namespace bsync {

struct Process::Node {
    Kind kind = Kind::Stop;
    std::string name;
    Process a;  // cont / body / left
    Process b;  // right
    std::size_t size = 0;

    Node() : a(nullptr), b(nullptr) {}
    Node(Kind k, std::string n, Process first, Process second)
        : kind(k), name(std::move(n)), a(std::move(first)), b(std::move(second)) {
        size = (kind == Kind::Act ? 1 : 0) + (a.node_ ? a.size() : 0) + (b.node_ ? b.size() : 0);
    }

    // Long prefix chains would otherwise unwind recursively.
    ~Node() {
        std::vector<std::shared_ptr<const Node>> pending;
        auto take = [&pending](Process& p) {
            if (p.node_) pending.push_back(std::move(p.node_));
        };
        take(a);
        take(b);
        while (!pending.empty()) {
            std::shared_ptr<const Node> n = std::move(pending.back());
            pending.pop_back();
            if (n.use_count() == 1) {
                auto& owned = const_cast<Node&>(*n);
                take(owned.a);
                take(owned.b);
            }
        }
    }
};

Process::Process() {
    static const auto stop_node = std::make_shared<const Node>();
    node_ = stop_node;
}
Process::Process(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Process Process::stop() { return Process(); }

Process Process::act(std::string label, Process cont) {
    return Process(std::make_shared<Node>(Kind::Act, std::move(label), std::move(cont), Process{nullptr}));
}

Process Process::sync(std::string barrier, Process cont) {
    return Process(std::make_shared<Node>(Kind::Sync, std::move(barrier), std::move(cont), Process{nullptr}));
}

Process Process::nu(std::string barrier, Process body) {
    return Process(std::make_shared<Node>(Kind::New, std::move(barrier), std::move(body), Process{nullptr}));
}

Process Process::par(Process left, Process right) {
    return Process(std::make_shared<Node>(Kind::Par, std::string{}, std::move(left), std::move(right)));
}

Process::Kind Process::kind() const { return node_->kind; }
const std::string& Process::name() const { return node_->name; }
const Process& Process::cont() const { return node_->a; }
const Process& Process::left() const { return node_->a; }
const Process& Process::right() const { return node_->b; }
std::size_t Process::size() const { return node_->size; }

bool operator==(const Process& x, const Process& y) {
    std::vector<std::pair<const Process::Node*, const Process::Node*>> todo{{x.node_.get(), y.node_.get()}};
    while (!todo.empty()) {
        auto [p, q] = todo.back();
        todo.pop_back();
        if (p == q) continue;
        if (!p || !q) return false;
        if (p->kind != q->kind || p->name != q->name || p->size != q->size) return false;
        todo.emplace_back(p->a.node_.get(), q->a.node_.get());
        todo.emplace_back(p->b.node_.get(), q->b.node_.get());
    }
    return true;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

enum class Tok { Ident, Zero, Dot, LAngle, RAngle, LParen, RParen, LBracket, RBracket, Bar2, Comma, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t pos;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip();
            if (i_ >= src_.size()) {
                out.push_back({Tok::End, "", i_});
                return out;
            }
            const std::size_t start = i_;
            const char c = src_[i_];
            if (ident_start(c)) {
                while (i_ < src_.size() && ident_char(src_[i_])) ++i_;
                // `name#k` is the auto-rename suffix, not a comment.
                if (i_ + 1 < src_.size() && src_[i_] == '#' &&
                    std::isdigit(static_cast<unsigned char>(src_[i_ + 1]))) {
                    ++i_;
                    while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
                }
                out.push_back({Tok::Ident, std::string(src_.substr(start, i_ - start)), start});
                continue;
            }
            ++i_;
            switch (c) {
                case '0': out.push_back({Tok::Zero, "0", start}); break;
                case '.': out.push_back({Tok::Dot, ".", start}); break;
                case '<': out.push_back({Tok::LAngle, "<", start}); break;
                case '>': out.push_back({Tok::RAngle, ">", start}); break;
                case '(': out.push_back({Tok::LParen, "(", start}); break;
                case ')': out.push_back({Tok::RParen, ")", start}); break;
                case '[': out.push_back({Tok::LBracket, "[", start}); break;
                case ']': out.push_back({Tok::RBracket, "]", start}); break;
                case ',': out.push_back({Tok::Comma, ",", start}); break;
                case '|':
                    if (i_ < src_.size() && src_[i_] == '|') {
                        ++i_;
                        out.push_back({Tok::Bar2, "||", start});
                        break;
                    }
                    throw SyntaxError(start, "'||'");
                default:
                    throw SyntaxError(start, "a process term");
            }
        }
    }

private:
    void skip() {
        while (i_ < src_.size()) {
            const char c = src_[i_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i_;
            } else if (c == '#') {
                while (i_ < src_.size() && src_[i_] != '\n') ++i_;
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t i_ = 0;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Process parse() {
        Process p = parse_par();
        expect(Tok::End, "end of input");
        return p;
    }

private:
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }

    const Token& expect(Tok kind, const char* what) {
        if (peek().kind != kind) throw SyntaxError(peek().pos, what);
        return toks_[pos_++];
    }

    bool accept(Tok kind) {
        if (peek().kind != kind) return false;
        ++pos_;
        return true;
    }

    Process parse_par() {
        Process acc = parse_unary();
        while (accept(Tok::Bar2)) acc = Process::par(std::move(acc), parse_unary());
        return acc;
    }

    Process parse_unary() {
        // Prefixes are collected iteratively so that long chains do not recurse.
        std::vector<std::pair<Process::Kind, std::string>> prefixes;
        Process tail;
        for (;;) {
            const Token& t = peek();
            if (t.kind == Tok::Ident && t.text == "nu" && peek(1).kind == Tok::LParen) {
                pos_ += 2;
                std::vector<std::string> names{expect(Tok::Ident, "barrier name").text};
                while (accept(Tok::Comma)) names.push_back(expect(Tok::Ident, "barrier name").text);
                expect(Tok::RParen, "')'");
                accept(Tok::Dot);
                tail = parse_par();
                for (auto it = names.rbegin(); it != names.rend(); ++it) tail = Process::nu(*it, std::move(tail));
                break;
            }
            if (t.kind == Tok::Ident) {
                ++pos_;
                expect(Tok::Dot, "'.' after action label");
                prefixes.emplace_back(Process::Kind::Act, t.text);
                continue;
            }
            if (accept(Tok::LAngle)) {
                std::string name = expect(Tok::Ident, "barrier name").text;
                expect(Tok::RAngle, "'>'");
                accept(Tok::Dot);
                prefixes.emplace_back(Process::Kind::Sync, std::move(name));
                continue;
            }
            if (accept(Tok::Zero)) break;
            if (accept(Tok::LParen)) {
                tail = parse_par();
                expect(Tok::RParen, "')'");
                break;
            }
            if (accept(Tok::LBracket)) {
                tail = parse_par();
                expect(Tok::RBracket, "']'");
                break;
            }
            throw SyntaxError(t.pos, "a process term");
        }
        for (auto it = prefixes.rbegin(); it != prefixes.rend(); ++it) {
            tail = it->first == Process::Kind::Act ? Process::act(std::move(it->second), std::move(tail))
                                                   : Process::sync(std::move(it->second), std::move(tail));
        }
        return tail;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

Process parse_process(std::string_view text) { return Parser(Lexer(text).run()).parse(); }

// ---------------------------------------------------------------------------
// Printing

namespace {

bool ends_with_nu(const Process& p) {
    const Process* cur = &p;
    while (cur->kind() == Process::Kind::Act || cur->kind() == Process::Kind::Sync) cur = &cur->cont();
    return cur->kind() == Process::Kind::New;
}

void print_par(const Process& p, std::string& out);

void print_unary(const Process& p, std::string& out) {
    const Process* cur = &p;
    for (;;) {
        switch (cur->kind()) {
            case Process::Kind::Act:
                out += cur->name();
                out += '.';
                cur = &cur->cont();
                if (cur->kind() == Process::Kind::Par) {
                    out += '(';
                    print_par(*cur, out);
                    out += ')';
                    return;
                }
                continue;
            case Process::Kind::Sync:
                out += '<';
                out += cur->name();
                out += '>';
                cur = &cur->cont();
                if (cur->kind() == Process::Kind::Par) {
                    out += '(';
                    print_par(*cur, out);
                    out += ')';
                    return;
                }
                continue;
            case Process::Kind::New:
                out += "nu(";
                out += cur->name();
                out += ") ";
                cur = &cur->cont();
                if (cur->kind() == Process::Kind::Par) {
                    out += '[';
                    print_par(*cur, out);
                    out += ']';
                    return;
                }
                continue;
            case Process::Kind::Stop:
                out += '0';
                return;
            case Process::Kind::Par:
                out += '[';
                print_par(*cur, out);
                out += ']';
                return;
        }
    }
}

void print_operand(const Process& p, std::string& out) {
    if (ends_with_nu(p)) {
        out += '(';
        print_unary(p, out);
        out += ')';
    } else {
        print_unary(p, out);
    }
}

void print_par(const Process& p, std::string& out) {
    if (p.kind() != Process::Kind::Par) {
        print_unary(p, out);
        return;
    }
    // Left spine of a left-associated chain prints flat.
    std::vector<const Process*> rights;
    const Process* cur = &p;
    while (cur->kind() == Process::Kind::Par) {
        rights.push_back(&cur->right());
        cur = &cur->left();
    }
    print_operand(*cur, out);
    for (auto it = rights.rbegin(); it != rights.rend(); ++it) {
        out += " || ";
        print_operand(**it, out);
    }
}

void dump(const Process& p, int depth, std::ostringstream& os) {
    const Process* cur = &p;
    for (;;) {
        os << std::string(static_cast<std::size_t>(depth) * 2, ' ');
        switch (cur->kind()) {
            case Process::Kind::Stop: os << "stop\n"; return;
            case Process::Kind::Act: os << "act " << cur->name() << '\n'; break;
            case Process::Kind::Sync: os << "sync " << cur->name() << '\n'; break;
            case Process::Kind::New: os << "nu " << cur->name() << '\n'; break;
            case Process::Kind::Par:
                os << "par\n";
                dump(cur->left(), depth + 1, os);
                dump(cur->right(), depth + 1, os);
                return;
        }
        cur = &cur->cont();
        ++depth;
    }
}

}  // namespace

std::string to_text(const Process& p) {
    std::string out;
    print_par(p, out);
    return out;
}

std::string ast_dump(const Process& p) {
    std::ostringstream os;
    dump(p, 0, os);
    return os.str();
}

// ---------------------------------------------------------------------------
// Validation

namespace {

struct Validator {
    const ValidationOptions& options;
    ValidationReport report;
    std::map<std::string, int> seen;
    std::set<std::string> taken;
    // One entry per enclosing binder: name and whether it has been used.
    std::vector<std::pair<std::string, bool>> scope;

    std::string fresh(const std::string& label) {
        int k = ++seen[label];
        if (k == 1) return label;
        if (!options.auto_rename) throw DuplicateLabel(label);
        std::string candidate;
        do {
            candidate = label + "#" + std::to_string(k++);
        } while (taken.count(candidate));
        seen[label] = k - 1;
        return candidate;
    }

    void use(const std::string& barrier) {
        for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
            if (it->first == barrier) {
                it->second = true;
                return;
            }
        }
        throw UnboundBarrier(barrier);
    }

    Process walk(const Process& p) {
        std::vector<std::pair<Process::Kind, std::string>> chain;
        const Process* cur = &p;
        bool changed = false;
        while (cur->kind() == Process::Kind::Act || cur->kind() == Process::Kind::Sync) {
            if (cur->kind() == Process::Kind::Act) {
                std::string name = fresh(cur->name());
                taken.insert(name);
                report.labels.push_back(name);
                if (name != cur->name()) {
                    report.renamed.emplace_back(cur->name(), name);
                    changed = true;
                }
                chain.emplace_back(Process::Kind::Act, std::move(name));
            } else {
                use(cur->name());
                chain.emplace_back(Process::Kind::Sync, cur->name());
            }
            cur = &cur->cont();
        }
        Process tail = *cur;
        switch (cur->kind()) {
            case Process::Kind::New: {
                scope.emplace_back(cur->name(), false);
                Process body = walk(cur->cont());
                if (!scope.back().second) report.unused_barriers.push_back(cur->name());
                scope.pop_back();
                if (body != cur->cont()) tail = Process::nu(cur->name(), std::move(body));
                break;
            }
            case Process::Kind::Par: {
                Process l = walk(cur->left());
                Process r = walk(cur->right());
                if (l != cur->left() || r != cur->right()) tail = Process::par(std::move(l), std::move(r));
                break;
            }
            default:
                break;
        }
        if (!changed && tail == *cur) return p;
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            tail = it->first == Process::Kind::Act ? Process::act(std::move(it->second), std::move(tail))
                                                   : Process::sync(std::move(it->second), std::move(tail));
        }
        return tail;
    }
};

void collect_labels(const Process& p, std::set<std::string>& out) {
    std::vector<const Process*> todo{&p};
    while (!todo.empty()) {
        const Process* cur = todo.back();
        todo.pop_back();
        switch (cur->kind()) {
            case Process::Kind::Stop: break;
            case Process::Kind::Act: out.insert(cur->name()); [[fallthrough]];
            case Process::Kind::Sync:
            case Process::Kind::New: todo.push_back(&cur->cont()); break;
            case Process::Kind::Par:
                todo.push_back(&cur->left());
                todo.push_back(&cur->right());
                break;
        }
    }
}

}  // namespace

ValidationReport validate(const Process& p, const ValidationOptions& options) {
    Validator v{options, {}, {}, {}, {}};
    if (options.auto_rename) collect_labels(p, v.taken);
    v.report.term = v.walk(p);
    return std::move(v.report);
}

// ---------------------------------------------------------------------------
// Semantics

Process sync_b(const Process& p, const std::string& barrier) {
    switch (p.kind()) {
        case Process::Kind::Stop:
        case Process::Kind::Act:
            return p;
        case Process::Kind::Par: {
            Process l = sync_b(p.left(), barrier);
            Process r = sync_b(p.right(), barrier);
            if (l == p.left() && r == p.right()) return p;
            return Process::par(std::move(l), std::move(r));
        }
        case Process::Kind::New: {
            if (p.name() == barrier) return p;
            Process body = sync_b(p.cont(), barrier);
            if (body == p.cont()) return p;
            return Process::nu(p.name(), std::move(body));
        }
        case Process::Kind::Sync:
            return p.name() == barrier ? p.cont() : p;
    }
    return p;
}

bool wait_b(const Process& p, const std::string& barrier) {
    std::vector<const Process*> todo{&p};
    while (!todo.empty()) {
        const Process* cur = todo.back();
        todo.pop_back();
        switch (cur->kind()) {
            case Process::Kind::Stop: break;
            case Process::Kind::Act: todo.push_back(&cur->cont()); break;
            case Process::Kind::Par:
                todo.push_back(&cur->left());
                todo.push_back(&cur->right());
                break;
            case Process::Kind::New:
                if (cur->name() != barrier) todo.push_back(&cur->cont());
                break;
            case Process::Kind::Sync:
                if (cur->name() == barrier) return true;
                todo.push_back(&cur->cont());
                break;
        }
    }
    return false;
}

namespace {

void step_into(const Process& p, std::vector<Transition>& out) {
    switch (p.kind()) {
        case Process::Kind::Stop:
        case Process::Kind::Sync:
            return;
        case Process::Kind::Act:
            out.push_back({p.name(), p.cont()});
            return;
        case Process::Kind::Par: {
            std::vector<Transition> sub;
            step_into(p.left(), sub);
            for (auto& t : sub) out.push_back({std::move(t.label), Process::par(std::move(t.target), p.right())});
            sub.clear();
            step_into(p.right(), sub);
            for (auto& t : sub) out.push_back({std::move(t.label), Process::par(p.left(), std::move(t.target))});
            return;
        }
        case Process::Kind::New: {
            Process synced = sync_b(p.cont(), p.name());
            if (wait_b(synced, p.name())) {
                // lift: the barrier is still incomplete
                std::vector<Transition> sub;
                step_into(p.cont(), sub);
                for (auto& t : sub) out.push_back({std::move(t.label), Process::nu(p.name(), std::move(t.target))});
            } else {
                // sync: the binder is discharged
                step_into(synced, out);
            }
            return;
        }
    }
}

bool has_pending(const Process& p) {
    std::vector<const Process*> todo{&p};
    while (!todo.empty()) {
        const Process* cur = todo.back();
        todo.pop_back();
        switch (cur->kind()) {
            case Process::Kind::Stop: break;
            case Process::Kind::Act:
            case Process::Kind::Sync: return true;
            case Process::Kind::New: todo.push_back(&cur->cont()); break;
            case Process::Kind::Par:
                todo.push_back(&cur->left());
                todo.push_back(&cur->right());
                break;
        }
    }
    return false;
}

}  // namespace

// Complete barriers are discharged first. Without this, nu(B) nu(C) <C><B>a.0
// is stuck: sync_B is taken before the inner <C> has gone, and the sync rule
// for C then leaves <B>a.0, on which no rule applies.
std::vector<Transition> step(const Process& p) {
    std::vector<Transition> out;
    step_into(settle(p), out);
    return out;
}

Process settle(const Process& p) {
    switch (p.kind()) {
        case Process::Kind::Par: {
            Process l = settle(p.left());
            Process r = settle(p.right());
            if (l == p.left() && r == p.right()) return p;
            return Process::par(std::move(l), std::move(r));
        }
        case Process::Kind::New: {
            Process body = settle(p.cont());
            Process synced = sync_b(body, p.name());
            if (!wait_b(synced, p.name())) return settle(synced);
            if (body == p.cont()) return p;
            return Process::nu(p.name(), std::move(body));
        }
        default:
            return p;
    }
}

bool is_terminated(const Process& p) { return !has_pending(settle(p)); }

EnumerationResult enumerate_executions(const Process& p, std::size_t limit) {
    EnumerationResult result;
    Execution path;
    struct Frame {
        std::vector<Transition> moves;
        std::size_t next = 0;
    };
    std::vector<Frame> stack;
    auto visit = [&](const Process& state) {
        auto moves = step(state);
        if (!moves.empty()) {
            stack.push_back({std::move(moves), 0});
            return;
        }
        if (is_terminated(state)) {
            if (result.executions.size() >= limit) throw LimitExceeded(limit);
            result.executions.push_back(path);
        } else if (!result.deadlock) {
            result.deadlock = true;
            result.deadlock_trace = path;
            result.deadlock_state = state;
        }
    };
    visit(p);
    while (!stack.empty()) {
        Frame& top = stack.back();
        if (top.next == top.moves.size()) {
            stack.pop_back();
            if (!path.empty()) path.pop_back();
            continue;
        }
        const Transition& t = top.moves[top.next++];
        path.push_back(t.label);
        const std::size_t depth = stack.size();
        Process target = t.target;
        visit(target);
        if (stack.size() == depth) path.pop_back();  // leaf
    }
    std::sort(result.executions.begin(), result.executions.end());
    result.executions.erase(std::unique(result.executions.begin(), result.executions.end()),
                            result.executions.end());
    return result;
}

}  // namespace bsync
