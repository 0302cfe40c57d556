// Copyright 2026 The uhdiqa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace uhdiqa {

enum class ErrorCode {
  // dataset
  MissingColumn,
  DuplicateImageId,
  NonFiniteMos,
  ExclusiveInTrain,
  EmptySubset,
  InvalidSplit,
  ParseError,
  // views
  CellTooSmall,
  CropLargerThanImage,
  InvalidView,
  ImageIo,
  // metrics / losses
  InvalidInput,
  LengthMismatch,
  ZeroVariance,
  SingularDesign,
  DegenerateRange,
  // ranking
  DuplicateTeam,
  UnmatchedIds,
  // budget
  ShapeMismatch,
  // predictor
  TooFewRows,
  MissingFeature,
  EmptyUnlabeled,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::DuplicateImageId: return "DuplicateImageId";
    case ErrorCode::NonFiniteMos: return "NonFiniteMos";
    case ErrorCode::ExclusiveInTrain: return "ExclusiveInTrain";
    case ErrorCode::EmptySubset: return "EmptySubset";
    case ErrorCode::InvalidSplit: return "InvalidSplit";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::CellTooSmall: return "CellTooSmall";
    case ErrorCode::CropLargerThanImage: return "CropLargerThanImage";
    case ErrorCode::InvalidView: return "InvalidView";
    case ErrorCode::ImageIo: return "ImageIo";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::DuplicateTeam: return "DuplicateTeam";
    case ErrorCode::UnmatchedIds: return "UnmatchedIds";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::MissingFeature: return "MissingFeature";
    case ErrorCode::EmptyUnlabeled: return "EmptyUnlabeled";
  }
  return "Unknown";
}

/// Every recoverable failure in the library is raised as an Error carrying a
/// machine-checkable code next to the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace uhdiqa
