#pragma once

#include <chrono>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace bsync {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// -- front end --------------------------------------------------------------

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t position, std::string expected)
        : Error("syntax error at offset " + std::to_string(position) + ": expected " + expected),
          position_(position), expected_(std::move(expected)) {}

    std::size_t position() const { return position_; }
    const std::string& expected() const { return expected_; }

private:
    std::size_t position_;
    std::string expected_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class DuplicateLabel : public ValidationError {
public:
    explicit DuplicateLabel(std::string label)
        : ValidationError("duplicate action label '" + label + "'"), label_(std::move(label)) {}
    const std::string& label() const { return label_; }

private:
    std::string label_;
};

class UnboundBarrier : public ValidationError {
public:
    explicit UnboundBarrier(std::string name)
        : ValidationError("barrier '" + name + "' is used outside the scope of any nu(" + name + ")"),
          name_(std::move(name)) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

// -- graphs -----------------------------------------------------------------

class GraphError : public Error {
public:
    using Error::Error;
};

class DuplicateNode : public GraphError {
public:
    using GraphError::GraphError;
};

/// The control graph still holds a cycle or an unresolved barrier.
class DeadlockedGraph : public GraphError {
public:
    using GraphError::GraphError;
};

class NotTransitivelyReduced : public GraphError {
public:
    using GraphError::GraphError;
};

class CyclicInput : public GraphError {
public:
    using GraphError::GraphError;
};

// -- counting / sampling ----------------------------------------------------

/// n! * Vol came out non-integral: an internal consistency failure.
class NonIntegerVolume : public Error {
public:
    using Error::Error;
};

class NumericalFailure : public Error {
public:
    using Error::Error;
};

class TieDetected : public Error {
public:
    using Error::Error;
};

class MissingVariable : public Error {
public:
    using Error::Error;
};

class UnknownOutcome : public Error {
public:
    using Error::Error;
};

// -- method applicability ---------------------------------------------------

class NotApplicable : public Error {
public:
    using Error::Error;
};

class NotForkJoin : public NotApplicable {
public:
    using NotApplicable::NotApplicable;
};

/// The process passes the fork-join judgment but its causal order contains an N.
class NotSeriesParallel : public NotApplicable {
public:
    using NotApplicable::NotApplicable;
};

class NotPromise : public NotApplicable {
public:
    using NotApplicable::NotApplicable;
};

class InvalidParameters : public Error {
public:
    using Error::Error;
};

// -- resources --------------------------------------------------------------

class ResourceLimit : public Error {
public:
    using Error::Error;
};

class LimitExceeded : public ResourceLimit {
public:
    explicit LimitExceeded(std::size_t limit)
        : ResourceLimit("more than " + std::to_string(limit) + " executions"), limit_(limit) {}
    std::size_t limit() const { return limit_; }

private:
    std::size_t limit_;
};

class TooLarge : public ResourceLimit {
public:
    using ResourceLimit::ResourceLimit;
};

class Timeout : public ResourceLimit {
public:
    Timeout() : ResourceLimit("time budget exhausted") {}
};

/// Cooperative wall-clock budget. Long-running loops call check() periodically.
class Deadline {
public:
    using Clock = std::chrono::steady_clock;

    Deadline() = default;
    explicit Deadline(std::chrono::duration<double> budget)
        : limited_(true),
          at_(Clock::now() + std::chrono::duration_cast<Clock::duration>(budget)) {}

    static Deadline never() { return {}; }

    bool expired() const { return limited_ && Clock::now() >= at_; }
    void check() const {
        if (expired()) throw Timeout();
    }

private:
    bool limited_ = false;
    Clock::time_point at_{};
};

}  // namespace bsync
