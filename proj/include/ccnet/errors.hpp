#pragma once

#include <stdexcept>
#include <string>

namespace ccnet {

/// Raised when a value object is constructed in violation of its invariants.
class InvalidArgument : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised for inputs where the requested quantity is undefined (e.g. 0/0).
class DegenerateInput : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

/// Raised when adaptive quadrature exhausts its subdivision budget.
class QuadratureFailure : public std::runtime_error
{
  public:
    QuadratureFailure(std::string const& what, double achieved_error)
        : std::runtime_error(what + " (achieved error estimate " + std::to_string(achieved_error) + ")")
        , achieved_error_(achieved_error)
    {
    }

    double achieved_error() const noexcept { return achieved_error_; }

  private:
    double achieved_error_;
};

/// Raised by the configuration loader; `key()` names the offending entry.
class ConfigError : public std::runtime_error
{
  public:
    ConfigError(std::string key, std::string const& what)
        : std::runtime_error(key.empty() ? what : "config key '" + key + "': " + what), key_(std::move(key))
    {
    }

    std::string const& key() const noexcept { return key_; }

  private:
    std::string key_;
};

}  // namespace ccnet
