#include "finsent/error.h"

namespace finsent {

MalformedLine::MalformedLine(std::size_t line_no, const std::string& why)
    : ValidationError("malformed line " + std::to_string(line_no) + ": " + why),
      line_no_(line_no) {}

MalformedRecord::MalformedRecord(std::size_t index, const std::string& why)
    : ValidationError("malformed record " + std::to_string(index) + ": " + why),
      index_(index) {}

DuplicateToken::DuplicateToken(const std::string& token)
    : ValidationError("duplicate vocabulary token: " + token), token_(token) {}

MissingUnk::MissingUnk() : ValidationError("vocabulary has no [UNK] token") {}

RemoteError::RemoteError(int status, const std::string& why)
    : BackendError("remote error (HTTP " + std::to_string(status) + "): " + why),
      status_(status) {}

EmptyMatrix::EmptyMatrix()
    : ValidationError("confusion matrix has no records") {}

}  // namespace finsent
