#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace dcmzk {

using BigInt = boost::multiprecision::cpp_int;

// Error families map onto CLI exit codes: parse 2, resource 3,
// transport 4, precondition 5.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

class ParseError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

class ResourceError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

class TransportError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

class PreconditionError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 5; }
};

class DegreeMismatch : public PreconditionError {
 public:
  DegreeMismatch(std::size_t lhs, std::size_t rhs)
      : PreconditionError("degree mismatch: " + std::to_string(lhs) + " vs " +
                          std::to_string(rhs)) {}
};

class OrderExceedsCap : public ResourceError {
 public:
  OrderExceedsCap(BigInt order, std::size_t cap)
      : ResourceError("group order " + order.str() + " exceeds cap " + std::to_string(cap)),
        order_(std::move(order)),
        cap_(cap) {}
  const BigInt& order() const noexcept { return order_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  BigInt order_;
  std::size_t cap_;
};

class StateSpaceTooLarge : public ResourceError {
 public:
  using ResourceError::ResourceError;
};

class RestartCapExceeded : public ResourceError {
 public:
  RestartCapExceeded(std::size_t stage, std::size_t cap)
      : ResourceError("stage " + std::to_string(stage) + " exceeded " + std::to_string(cap) +
                      " attempts") {}
};

class NotInDoubleCoset : public PreconditionError {
 public:
  NotInDoubleCoset() : PreconditionError("s is not in GH") {}
};

class RequiresYesInstance : public PreconditionError {
 public:
  RequiresYesInstance() : PreconditionError("operation requires a YES instance (s in GH)") {}
};

class RequiresNoInstance : public PreconditionError {
 public:
  RequiresNoInstance() : PreconditionError("operation requires a NO instance (s not in GH)") {}
};

class SizeMismatch : public PreconditionError {
 public:
  SizeMismatch(std::size_t lhs, std::size_t rhs)
      : PreconditionError("point sets differ in size: " + std::to_string(lhs) + " vs " +
                          std::to_string(rhs)) {}
};

}  // namespace dcmzk
