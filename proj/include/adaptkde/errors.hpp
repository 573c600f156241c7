#pragma once

#include <stdexcept>
#include <string>

namespace adaptkde {

struct InvalidParameter : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};

struct IncompatibleGrid : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};

struct InvalidStep : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};

struct EmptyGrid : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct IllPosedModel : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct UnsupportedOperation : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct IncompleteFamily : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct OutOfValidity : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

} // namespace adaptkde
