#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gdm {

/// Malformed input text. Carries the 1-based line number where parsing stopped.
class ParseError : public std::runtime_error {
  public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// Well-formed input that violates a data invariant (index range, count mismatch, ...).
class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Caller passed arguments outside an operation's domain.
class ArgumentError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A precondition on the data that the operation cannot work around.
class PreconditionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A cluster centroid coincides with the data center, so the extension ray is undefined.
class DegenerateClusterError : public std::runtime_error {
  public:
    explicit DegenerateClusterError(std::size_t cluster)
        : std::runtime_error("cluster " + std::to_string(cluster) +
                             " has its centroid at the data center; the extension direction is "
                             "undefined (try a smaller number of topics)"),
          cluster_(cluster) {}

    std::size_t cluster() const noexcept { return cluster_; }

  private:
    std::size_t cluster_;
};

}  // namespace gdm
