#pragma once

#include <stdexcept>
#include <string>

namespace xpc {

enum class ErrorKind {
    InvalidArgument,
    Parse,
    DuplicateId,
    OutOfBounds,
    DimensionMismatch,
    VocabularyMismatch,
    SingleClass,
    EmptyVocabulary,
    EmptyDocument,
    ClassTooSmall,
    NoPositives,
    Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace xpc
