#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ldf {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed term, triple or query text. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A binding substitution that would produce an ill-typed pattern.
class BindingError : public Error {
public:
    using Error::Error;
};

class LoadError : public Error {
public:
    using Error::Error;
};

/// Malformed fragment request (query string).
class RequestError : public Error {
public:
    using Error::Error;
};

class TransportError : public Error {
public:
    using Error::Error;
};

/// Non-200 answer from a fragment server.
class HttpStatusError : public Error {
public:
    HttpStatusError(int status, const std::string& reason)
        : Error("HTTP " + std::to_string(status) + ": " + reason), status_(status), reason_(reason) {}
    int status() const noexcept { return status_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    int status_;
    std::string reason_;
};

class TimeoutError : public Error {
public:
    TimeoutError() : Error("query execution timed out") {}
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace ldf
