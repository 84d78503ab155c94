#pragma once

#include <stdexcept>
#include <string>

namespace appaudit {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed binary input (zip, binary XML, resource table).
class DecodeError : public Error {
public:
    explicit DecodeError(const std::string& what) : Error(what) {}
};

/// Structurally valid input whose content violates the expected schema.
class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& what) : Error(what) {}
};

} // namespace appaudit
