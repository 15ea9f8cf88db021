//
// Project molfuse - Copyright 2026 The molfuse Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace molfuse {

// Error codes cover every failure mode the library reports. The CLI maps
// categories to exit codes (config=2, data=3, runtime=4).
enum class Errc {
  kSyntax,            // malformed SMILES text
  kValence,           // chemically invalid molecule
  kEmptyInput,        // empty SMILES string
  kEmptyCorpus,       // no usable corpus lines
  kBudgetTooSmall,    // vocabulary budget below base alphabet
  kUnknownCharacter,  // tokenizer met a unit outside the base set
  kInvalidId,         // token id outside vocabulary
  kParseError,        // malformed data file
  kDimensionMismatch, // property row width disagrees with the spec
  kShapeMismatch,     // tensor shapes do not conform
  kSequenceTooLong,   // sequence exceeds model max length
  kIdOutOfRange,      // embedding id outside table
  kBatchTooSmall,     // batch has fewer pairs than the op requires
  kIoError,           // filesystem failure
  kVersionMismatch,   // checkpoint magic/version/layout mismatch
  kCheckpointMissing, // no checkpoint at the given path
  kInvalidSmiles,     // input molecule rejected by the parser
  kLabelParseError,   // dataset label not numeric
  kEmptySplit,        // train/valid/test split has no rows
  kSchemaError,       // report file lacks expected fields
  kConfigError,       // bad key, value, or missing section
};

enum class ErrorCategory { kConfig, kData, kRuntime };

constexpr ErrorCategory category_of(Errc code) {
  switch (code) {
  case Errc::kConfigError:
  case Errc::kBudgetTooSmall:
    return ErrorCategory::kConfig;
  case Errc::kSyntax:
  case Errc::kValence:
  case Errc::kEmptyInput:
  case Errc::kEmptyCorpus:
  case Errc::kUnknownCharacter:
  case Errc::kInvalidId:
  case Errc::kParseError:
  case Errc::kDimensionMismatch:
  case Errc::kInvalidSmiles:
  case Errc::kLabelParseError:
  case Errc::kEmptySplit:
  case Errc::kSchemaError:
    return ErrorCategory::kData;
  default:
    return ErrorCategory::kRuntime;
  }
}

constexpr std::string_view errc_name(Errc code) {
  switch (code) {
  case Errc::kSyntax: return "SyntaxError";
  case Errc::kValence: return "ValenceError";
  case Errc::kEmptyInput: return "EmptyInput";
  case Errc::kEmptyCorpus: return "EmptyCorpus";
  case Errc::kBudgetTooSmall: return "BudgetTooSmall";
  case Errc::kUnknownCharacter: return "UnknownCharacter";
  case Errc::kInvalidId: return "InvalidId";
  case Errc::kParseError: return "ParseError";
  case Errc::kDimensionMismatch: return "DimensionMismatch";
  case Errc::kShapeMismatch: return "ShapeMismatch";
  case Errc::kSequenceTooLong: return "SequenceTooLong";
  case Errc::kIdOutOfRange: return "IdOutOfRange";
  case Errc::kBatchTooSmall: return "BatchTooSmall";
  case Errc::kIoError: return "IOError";
  case Errc::kVersionMismatch: return "VersionMismatch";
  case Errc::kCheckpointMissing: return "CheckpointMissing";
  case Errc::kInvalidSmiles: return "InvalidSMILES";
  case Errc::kLabelParseError: return "LabelParseError";
  case Errc::kEmptySplit: return "EmptySplit";
  case Errc::kSchemaError: return "SchemaError";
  case Errc::kConfigError: return "ConfigError";
  }
  return "Error";
}

class Error : public std::runtime_error {
public:
  Error(Errc code, std::string message, std::string input = {})
      : std::runtime_error(std::string(errc_name(code)) + ": " + message +
                           (input.empty() ? "" : " (input: " + input + ")")),
        code_(code), message_(std::move(message)), input_(std::move(input)) {}

  Errc code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }
  const std::string &message() const noexcept { return message_; }
  const std::string &input() const noexcept { return input_; }

private:
  Errc code_;
  std::string message_;
  std::string input_;
};

[[noreturn]] inline void raise(Errc code, std::string message,
                               std::string input = {}) {
  throw Error(code, std::move(message), std::move(input));
}

} // namespace molfuse
