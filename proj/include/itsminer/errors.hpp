#pragma once

#include <stdexcept>
#include <string>

namespace itsminer {

// Base for all toolkit exceptions so callers can catch one type at the CLI
// boundary and still branch on the concrete kind below it.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- transport / ingest ------------------------------------------------------
class NetworkError : public Error {
public:
    using Error::Error;
};
class AuthError : public Error {
public:
    using Error::Error;
};
class ProtocolError : public Error {
public:
    using Error::Error;
};
class UnknownProject : public Error {
public:
    using Error::Error;
};
class UnknownIssue : public Error {
public:
    using Error::Error;
};

// --- corpus / persistence ----------------------------------------------------
class IoError : public Error {
public:
    using Error::Error;
};
class SchemaError : public Error {
public:
    SchemaError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_number(line) {}
    std::size_t line_number;
};
class InvalidInterval : public Error {
public:
    using Error::Error;
};

// --- features ----------------------------------------------------------------
class InvalidRange : public Error {
public:
    using Error::Error;
};
class EmptyVocabulary : public Error {
public:
    using Error::Error;
};

// --- learn -------------------------------------------------------------------
class SingleClassError : public Error {
public:
    using Error::Error;
};
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// --- eval --------------------------------------------------------------------
class LengthMismatch : public Error {
public:
    using Error::Error;
};
class EmptyInput : public Error {
public:
    using Error::Error;
};
class DegenerateSeries : public Error {
public:
    using Error::Error;
};

// --- runner ------------------------------------------------------------------
class ConfigError : public Error {
public:
    using Error::Error;
};
class EmptyWindow : public Error {
public:
    using Error::Error;
};
class TooFewDocuments : public Error {
public:
    using Error::Error;
};

}  // namespace itsminer
