#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace txadv {

// Base for every error the library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// -- dataset --------------------------------------------------------------

class UnknownColumnError : public Error {
public:
    explicit UnknownColumnError(const std::string& column)
        : Error("unknown column: " + column), column(column) {}
    std::string column;
};

class MissingColumnError : public Error {
public:
    explicit MissingColumnError(const std::string& column)
        : Error("missing column: " + column), column(column) {}
    std::string column;
};

class RowParseError : public Error {
public:
    RowParseError(std::size_t row, const std::string& column, const std::string& reason)
        : Error("row " + std::to_string(row) + ", column '" + column + "': " + reason),
          row(row), column(column), reason(reason) {}
    std::size_t row;
    std::string column;
    std::string reason;
};

class EmptyDatasetError : public Error {
public:
    explicit EmptyDatasetError(const std::string& what) : Error(what) {}
};

class BadClassMixError : public Error {
public:
    explicit BadClassMixError(const std::string& what) : Error(what) {}
};

class TooFewRowsError : public Error {
public:
    explicit TooFewRowsError(const std::string& what) : Error(what) {}
};

// -- preprocess -----------------------------------------------------------

class WrongSchemaError : public Error {
public:
    explicit WrongSchemaError(const std::string& what) : Error(what) {}
};

class SchemaMismatchError : public Error {
public:
    explicit SchemaMismatchError(const std::string& what) : Error(what) {}
};

class SingleClassDatasetError : public Error {
public:
    explicit SingleClassDatasetError(const std::string& what) : Error(what) {}
};

// -- models ---------------------------------------------------------------

class WidthMismatchError : public Error {
public:
    WidthMismatchError(std::size_t expected, std::size_t got)
        : Error("feature width mismatch: expected " + std::to_string(expected) +
                ", got " + std::to_string(got)) {}
};

class BadLabelError : public Error {
public:
    explicit BadLabelError(const std::string& what) : Error(what) {}
};

class DegenerateKError : public Error {
public:
    DegenerateKError(int k, std::size_t n_train)
        : Error("k=" + std::to_string(k) + " exceeds training size " + std::to_string(n_train)) {}
};

// -- attacks --------------------------------------------------------------

class NegativePctError : public Error {
public:
    explicit NegativePctError(const std::string& what) : Error(what) {}
};

class NRowsTooLargeError : public Error {
public:
    NRowsTooLargeError(std::size_t requested, std::size_t available)
        : Error("requested " + std::to_string(requested) + " rows, dataset has " +
                std::to_string(available)) {}
};

class UnknownGroupError : public Error {
public:
    explicit UnknownGroupError(const std::string& what) : Error(what) {}
};

class ClassAbsentError : public Error {
public:
    explicit ClassAbsentError(const std::string& what) : Error(what) {}
};

class EmptyMaskError : public Error {
public:
    explicit EmptyMaskError(const std::string& what) : Error(what) {}
};

// -- defense / eval -------------------------------------------------------

class CodecMismatchError : public Error {
public:
    explicit CodecMismatchError(const std::string& what) : Error(what) {}
};

class EmptyConfusionError : public Error {
public:
    explicit EmptyConfusionError(const std::string& what) : Error(what) {}
};

class LengthMismatchError : public Error {
public:
    explicit LengthMismatchError(const std::string& what) : Error(what) {}
};

// -- cli ------------------------------------------------------------------

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

// Violated operation precondition that has no dedicated error in the
// contract (e.g. encoding a dataset that was never imputed).
class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& what) : Error(what) {}
};

}  // namespace txadv
