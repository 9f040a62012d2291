#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace horae {

/// Base class for every error raised by the toolkit. Callers that only care
/// about "something went wrong with the input" can catch this one type.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition stated on an operation was violated by the caller.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

class DanglingReference : public Error {
public:
  explicit DanglingReference(std::string name)
      : Error("dangling reference: " + name), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

class DuplicateId : public Error {
public:
  explicit DuplicateId(std::string id)
      : Error("duplicate id: " + id), id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

private:
  std::string id_;
};

class InvalidInterpretation : public Error {
public:
  using Error::Error;
};

/// Raised when an interpretation does not cover every event or timestamp
/// an evaluation needs.
class PartialInterpretation : public Error {
public:
  explicit PartialInterpretation(std::vector<std::string> missing);
  const std::vector<std::string>& missing() const noexcept { return missing_; }

private:
  std::vector<std::string> missing_;
};

class FormulaTooLarge : public Error {
public:
  using Error::Error;
};

class ClauseBudgetExceeded : public Error {
public:
  using Error::Error;
};

class TooManyEvents : public Error {
public:
  using Error::Error;
};

} // namespace horae
