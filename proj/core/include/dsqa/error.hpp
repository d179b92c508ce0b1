#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dsqa {

enum class ErrorCode {
  Schema,
  Tier,
  Row,
  Session,
  NotMaterialized,
  Busy,
  Ingest,        // retryable transport/upstream failure
  Parse,         // malformed payload or document
  NotFound,
  Config,
  MockMiss,
  Provider,
  Storage,
  Syntax,
  UnknownIdentifier,
  ReadOnly,
  MultipleStatements,
  Unsupported,
  Resolution,
  Planning,
  Execution,
  Timeout,
  Render,
  Template,
  Instantiation,
  Annotation,
  Domain,
  UndefinedGold,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. `detail` carries auxiliary context
/// such as the offending SQL text or a field path.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string detail = {})
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace dsqa
