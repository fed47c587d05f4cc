// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace thzpoint
{

// Base of every error raised by the library.
class error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class domain_error : public error
{
public:
  using error::error;
};

// Argument is valid mathematically but not supported by this implementation.
class unsupported_error : public error
{
public:
  using error::error;
};

// Quadrature/root-finding failure, catastrophic cancellation, overflow.
class numeric_error : public error
{
public:
  using error::error;
};

// Parameter combination for which a formula is singular.
class degenerate_parameter_error : public error
{
public:
  using error::error;
};

} // namespace thzpoint
