#include "gpuheat/errors.hpp"

namespace gpuheat {

namespace {

std::string join(const std::vector<FieldError>& errors) {
  std::string out = "invalid scenario:";
  for (const auto& e : errors) out += "\n  " + e.path + ": " + e.message;
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<FieldError> errors)
    : Error(join(errors)), errors_(std::move(errors)) {}

}  // namespace gpuheat
