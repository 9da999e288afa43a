#pragma once

#include <stdexcept>
#include <string>

namespace dmmd {

// Every failure raised by the library derives from Error so callers can
// catch the whole family in one place; the subclasses carry the category.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Raised when a class-conditional quantity is requested for a class with
// no members in one of the domains.
class ClassAbsent : public Error {
 public:
  ClassAbsent(int cls, const std::string& what)
      : Error(what), cls_(cls) {}
  int cls() const noexcept { return cls_; }

 private:
  int cls_;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

// Target pseudo labels that leave no class usable for the class-wise terms.
class UnusableLabels : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::size_t column, const std::string& what)
      : Error(what), row_(row), column_(column) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

}  // namespace dmmd
