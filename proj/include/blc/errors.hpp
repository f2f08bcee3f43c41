#pragma once

#include <stdexcept>
#include <string>

namespace blc {

/// Fields on different grids, wrong rank, wrong component count.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An operation was called outside its documented domain (block index out of
/// range, index constraints of a continuity estimate violated, ...).
class PreconditionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A computed identity that must hold on the grid did not (Bony reconstruction,
/// Minkowski ordering). Signals a bug, not bad input.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Non-finite values or runaway critical norms.
class BlowupError : public std::runtime_error {
public:
    BlowupError(const std::string& what, double last_valid_time)
        : std::runtime_error(what), last_valid_time_(last_valid_time) {}

    double last_valid_time() const noexcept { return last_valid_time_; }

private:
    double last_valid_time_;
};

}  // namespace blc
