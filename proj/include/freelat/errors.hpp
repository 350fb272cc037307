#ifndef FREELAT_ERRORS_HPP
#define FREELAT_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace freelat {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A caller-supplied parameter is outside its admissible range.
class ParameterError : public Error {
public:
  using Error::Error;
};

/// A mathematical function was evaluated outside its domain.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Vector/matrix dimensions are inconsistent.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// Evaluation requested at a singular point.
class SingularityError : public Error {
public:
  using Error::Error;
};

/// An expression occurring in an evaluation has an unassigned generator.
class UnassignedGeneratorError : public Error {
public:
  explicit UnassignedGeneratorError(int index)
      : Error("generator " + std::to_string(index) + " has no assignment"),
        index_(index) {}
  int index() const { return index_; }

private:
  int index_;
};

/// Textual expression or spec string could not be parsed.
class ParseError : public Error {
public:
  using Error::Error;
};

/// A domination certificate was rejected; carries the witness functional.
class CertificateError : public Error {
public:
  CertificateError(const std::string& msg, std::vector<double> witness)
      : Error(msg), witness_(std::move(witness)) {}
  const std::vector<double>& witness() const { return witness_; }

private:
  std::vector<double> witness_;
};

/// An input violated a documented precondition that is spot-checked.
class ContractError : public Error {
public:
  using Error::Error;
};

/// A mathematical property the library promises failed to verify at runtime.
class PropertyError : public Error {
public:
  using Error::Error;
};

/// Grid resolution is too coarse for the requested computation.
class ResolutionError : public Error {
public:
  using Error::Error;
};

}  // namespace freelat

#endif  // FREELAT_ERRORS_HPP
