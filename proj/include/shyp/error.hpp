#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace shyp {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent configuration document.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : Error(what), line_(line), column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double achieved_rel_error)
        : Error(what), achieved_(achieved_rel_error) {}
    double achieved() const { return achieved_; }

private:
    double achieved_;
};

// The 2x2 normal-equation system is singular or too close to it.
class SingularSystemError : public Error {
public:
    SingularSystemError(const std::string& what, double one_minus_dn)
        : Error(what), one_minus_dn_(one_minus_dn) {}
    double one_minus_dn() const { return one_minus_dn_; }

private:
    double one_minus_dn_;
};

// Overflow or a covariance that cannot be repaired by clipping.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace shyp
