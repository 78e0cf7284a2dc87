// include/addbench/error.hpp

// Copyright 2026  The addbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace addbench {

enum class ErrorCode {
  // corpus
  MissingFile,
  DuplicateId,
  BadLabel,
  BadManifest,
  EmptyAudio,
  UnsupportedRate,
  BadWave,
  BadLength,
  // codec
  BadSpec,
  ToolNotFound,
  ToolFailed,
  OutputUnreadable,
  // channel
  BadFrame,
  BadParams,
  NoMask,
  // features
  BadGrid,
  BadCache,
  // detector
  TooFewFrames,
  KindMismatch,
  LengthMismatch,
  ClassMissing,
  DimMismatch,
  BadModel,
  // evaluation
  OneClassOnly,
  MissingScores,
  // datasetgen
  InsufficientData,
  EmptyCorpus,
  TooSmall,
  // cli
  BadConfig,
  StageInputMissing,
  StaleCache,
};

std::string_view to_string(ErrorCode code);

/// Every module reports failures through this exception; `code()` is the
/// machine-readable kind and `what()` carries the diagnostic.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace addbench
