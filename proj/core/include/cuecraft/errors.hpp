#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cuecraft {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Network or HTTP failure. Only retryable failures are re-attempted by the oracle.
class TransportError : public Error {
public:
    TransportError(const std::string& what, bool retryable)
        : Error(what), retryable_(retryable) {}
    bool retryable() const noexcept { return retryable_; }

private:
    bool retryable_;
};

class TemplateError : public Error {
public:
    using Error::Error;
};

/// A model reply did not have the requested shape. Thrown by reply parsers and
/// caught by the oracle's repair loop; never escapes the oracle as this exact type.
class ReplyFormatError : public Error {
public:
    using Error::Error;
};

class ScoreParseError : public Error {
public:
    using Error::Error;
};

/// The model named an option that is not in the rule's candidate pool.
class ChoiceOutOfPool : public ReplyFormatError {
public:
    using ReplyFormatError::ReplyFormatError;
};

/// An edit request came back byte-identical to its input.
class NoOpMutation : public ReplyFormatError {
public:
    using ReplyFormatError::ReplyFormatError;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class RuleParseError : public Error {
public:
    using Error::Error;
};

class NoDivisibleNode : public Error {
public:
    using Error::Error;
};

class EmptyGeneration : public Error {
public:
    using Error::Error;
};

class EmptyTree : public Error {
public:
    using Error::Error;
};

class NoValidVerdicts : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class DegenerateInput : public Error {
public:
    using Error::Error;
};

class DatasetParseError : public Error {
public:
    DatasetParseError(const std::string& what, std::size_t record_index)
        : Error(what), record_index_(record_index) {}
    std::size_t record_index() const noexcept { return record_index_; }

private:
    std::size_t record_index_;
};

class AlignmentError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace cuecraft
