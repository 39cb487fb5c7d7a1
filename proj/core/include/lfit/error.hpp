#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lfit
{

class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Mismatch between a value and the VariableSchema it is checked against.
class schema_error : public error
{
public:
    using error::error;
};

class parse_error : public error
{
    std::size_t _line;
    std::size_t _column;

public:
    parse_error( const std::string& what, std::size_t line, std::size_t column )
        : error{ "line " + std::to_string( line ) + ", column " + std::to_string( column ) + ": " + what },
          _line{ line }, _column{ column } {}

    [[nodiscard]] std::size_t line() const { return _line; }
    [[nodiscard]] std::size_t column() const { return _column; }
};

} // namespace lfit
