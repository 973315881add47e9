#pragma once

#include <stdexcept>
#include <string>

namespace hfavg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A query point fell outside the region on which a potential is declared valid.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace hfavg
