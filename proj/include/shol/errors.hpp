#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace shol {

using complex = std::complex<double>;

class error : public std::runtime_error {
public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

class invalid_domain_error : public error {
public:
  using error::error;
};

class invalid_parameter_error : public error {
public:
  using error::error;
};

class mode_error : public error {
public:
  using error::error;
};

class invalid_target_error : public error {
public:
  using error::error;
};

// Evaluation hit a singular operation or produced a non-finite value.
// Carries the offending point.
class numerical_error : public error {
public:
  numerical_error(const std::string& what, complex where)
      : error(what + " at z = (" + std::to_string(where.real()) + ", " +
              std::to_string(where.imag()) + ")"),
        where_(where) {}

  complex where() const noexcept { return where_; }

private:
  complex where_;
};

class parse_error : public error {
public:
  parse_error(const std::string& what, std::size_t position, std::string expected)
      : error(what + " (at position " + std::to_string(position) + ")"),
        position_(position),
        expected_(std::move(expected)) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& expected() const noexcept { return expected_; }

private:
  std::size_t position_;
  std::string expected_;
};

}  // namespace shol
