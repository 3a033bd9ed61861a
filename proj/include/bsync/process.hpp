#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bsync {

/// A complete execution: one label per action, in firing order.
using Execution = std::vector<std::string>;

/// Immutable term of the barrier calculus.
///
/// Terms share structure: copying a Process is a reference-count bump, and
/// derivatives produced by step() reuse every untouched subterm.
class Process {
public:
    enum class Kind { Stop, Act, Sync, New, Par };

    Process();  // Stop

    static Process stop();
    static Process act(std::string label, Process cont);
    static Process sync(std::string barrier, Process cont);
    static Process nu(std::string barrier, Process body);
    static Process par(Process left, Process right);

    Kind kind() const;
    bool is_stop() const { return kind() == Kind::Stop; }

    /// Action label (Act) or barrier name (Sync, New).
    const std::string& name() const;
    /// Continuation of Act/Sync, body of New.
    const Process& cont() const;
    const Process& left() const;
    const Process& right() const;

    /// Number of Act nodes.
    std::size_t size() const;

    friend bool operator==(const Process& a, const Process& b);
    friend bool operator!=(const Process& a, const Process& b) { return !(a == b); }

private:
    struct Node;
    explicit Process(std::shared_ptr<const Node> node);
    std::shared_ptr<const Node> node_;
};

/// Parses the concrete syntax:
///
///     proc := "0" | ident "." proc | "<" ident ">" proc
///           | "nu" "(" ident ")" proc | proc "||" proc
///           | "(" proc ")" | "[" proc "]"
///
/// `||` is left-associative and binds loosest; `nu(B) P` extends as far right
/// as possible. Also accepted: `nu(A, B) P` for nested binders, an optional
/// "." after `<B>` and after `nu(...)`, and `#` comments.
Process parse_process(std::string_view text);

/// Renders a term in the concrete syntax; parse_process(to_text(p)) == p.
std::string to_text(const Process& p);

/// Indented tree dump, one node per line.
std::string ast_dump(const Process& p);

struct ValidationOptions {
    /// Rewrite repeated labels to `name#k` instead of failing.
    bool auto_rename = false;
};

struct ValidationReport {
    Process term;                           ///< the input, or its renamed copy
    std::vector<std::string> labels;        ///< in left-to-right order
    std::vector<std::string> unused_barriers;
    std::vector<std::pair<std::string, std::string>> renamed;  ///< (old, new)
};

/// Throws DuplicateLabel or UnboundBarrier.
ValidationReport validate(const Process& p, const ValidationOptions& options = {});

Process sync_b(const Process& p, const std::string& barrier);
bool wait_b(const Process& p, const std::string& barrier);

struct Transition {
    std::string label;
    Process target;
};

/// All one-step derivatives, leftmost-innermost first. Barriers that are
/// already complete are discharged silently before the rules are applied.
std::vector<Transition> step(const Process& p);

/// Resolves every barrier whose synchronization is complete without firing an
/// action. A maximal state is terminated iff its settled form holds no Act or
/// Sync node.
Process settle(const Process& p);
bool is_terminated(const Process& p);

struct EnumerationResult {
    std::vector<Execution> executions;  ///< complete runs only, lexicographic
    bool deadlock = false;
    std::optional<Execution> deadlock_trace;  ///< first stuck prefix found
    std::optional<Process> deadlock_state;
};

/// Exhaustive DFS over the transition system. Throws LimitExceeded when more
/// than `limit` complete executions exist.
EnumerationResult enumerate_executions(const Process& p, std::size_t limit = 1'000'000);

}  // namespace bsync
