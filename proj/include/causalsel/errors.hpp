#pragma once

#include <stdexcept>
#include <string>

namespace causalsel {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConstantColumn : Error {
    explicit ConstantColumn(const std::string& name)
        : Error("column has zero variance: " + name), column(name) {}
    std::string column;
};

struct SingularSubmatrix : Error {
    using Error::Error;
};

struct InsufficientSamples : Error {
    using Error::Error;
};

struct UnknownNode : Error {
    explicit UnknownNode(const std::string& name) : Error("unknown node: " + name) {}
};

struct UnknownColumn : Error {
    explicit UnknownColumn(const std::string& name) : Error("unknown column: " + name) {}
};

struct MissingSepset : Error {
    MissingSepset(const std::string& a, const std::string& b)
        : Error("no separating set recorded for pair (" + a + ", " + b + ")") {}
};

struct NodeSetMismatch : Error {
    using Error::Error;
};

struct NotADag : Error {
    using Error::Error;
};

struct CollinearParents : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct TooFewRows : Error {
    using Error::Error;
};

struct DegenerateFold : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(int row, const std::string& column, const std::string& what)
        : Error("row " + std::to_string(row) + ", column \"" + column + "\": " + what),
          row(row), column(column) {}
    int row;
    std::string column;
};

struct DuplicateColumn : Error {
    explicit DuplicateColumn(const std::string& name) : Error("duplicate column name: " + name) {}
};

struct InvalidArgument : Error {
    using Error::Error;
};

}  // namespace causalsel
