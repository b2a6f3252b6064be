#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aid {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual const char* kind() const noexcept { return "error"; }
};

class InvalidArgument : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "invalid_argument"; }
};

/// Malformed input text; `offset` is the byte position reported by the parser.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }
    const char* kind() const noexcept override { return "parse_error"; }

private:
    std::size_t offset_;
};

/// Well-formed input that does not follow the expected schema.
class SchemaError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "schema_error"; }
};

class IoError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "io_error"; }
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, int epoch) : Error(what), epoch_(epoch) {}
    int epoch() const noexcept { return epoch_; }
    const char* kind() const noexcept override { return "divergence"; }

private:
    int epoch_;
};

#define AID_CHECK(cond, msg)                                  \
    do {                                                      \
        if (!(cond)) throw ::aid::InvalidArgument(msg);       \
    } while (0)

}  // namespace aid
