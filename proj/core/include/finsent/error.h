#ifndef FINSENT_ERROR_H_
#define FINSENT_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace finsent {

// Root of every exception thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data or arguments. The CLI maps these to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// File system failures. The CLI maps these to exit code 2.
class IoError : public Error {
 public:
  using Error::Error;
};

// Scoring backend failures. The CLI maps these to exit code 2.
class BackendError : public Error {
 public:
  using Error::Error;
};

// corpus_ingest

class MalformedLine : public ValidationError {
 public:
  MalformedLine(std::size_t line_no, const std::string& why);
  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

class EncodingError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidRatios : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MalformedRecord : public ValidationError {
 public:
  MalformedRecord(std::size_t index, const std::string& why);
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// tokenization

class DuplicateToken : public ValidationError {
 public:
  explicit DuplicateToken(const std::string& token);
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

class MissingUnk : public ValidationError {
 public:
  MissingUnk();
};

// nsp_dataset

class InsufficientCorpus : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidSize : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// concatenation

class TooFewSentences : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// scoring_backend

class InvalidInput : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ScorerUnavailable : public BackendError {
 public:
  using BackendError::BackendError;
};

class Timeout : public BackendError {
 public:
  using BackendError::BackendError;
};

class RemoteError : public BackendError {
 public:
  RemoteError(int status, const std::string& why);
  int status() const { return status_; }

 private:
  int status_;
};

// A 2xx response whose body violates the wire contract.
class InvalidResponse : public BackendError {
 public:
  using BackendError::BackendError;
};

// evaluation

class LengthMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UnknownLabel : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class EmptyMatrix : public ValidationError {
 public:
  EmptyMatrix();
};

class InvalidProbability : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidSizes : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// freeze_planner

class InvalidConfig : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidLayer : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace finsent

#endif  // FINSENT_ERROR_H_
