/*
 * Copyright 2026 The SGR Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SGR_ERROR_H_
#define SGR_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace sgr {

enum class ErrorCode {
  // Session log ingestion.
  kMalformedRecord,
  kMissingField,
  kUnorderedTimestamps,
  kBadClickValue,
  kDuplicateDocIdInQuery,
  kEmptySession,
  kStepOutOfRange,
  kEmptyCorpus,
  // Graphs and symbolic text.
  kEdgeNotFound,
  kSyntaxError,
  kUnknownEdgeType,
  kNodeTextConflict,
  kDuplicateEdge,
  kClauseShapeMismatch,
  kInvalidTemplate,
  kEmptyGraph,
  kNoClickEdges,
  // Scorers.
  kRemoteTimeout,
  kRemoteProtocolError,
  kTokenNotInVocabulary,
  kInvalidTarget,
  kEmptyCorpusStats,
  kInvalidConfig,
  // Losses.
  kEmptyTarget,
  kNoPositives,
  kIndexOutOfRange,
  // Ranking and evaluation.
  kEmptyCandidates,
  kDuplicateQueryKey,
  kMalformedRunLine,
  kMalformedQrelsLine,
  // Generic.
  kInvalidArgument,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// True for failures caused by the environment (network, filesystem) rather
// than by the caller's input. The CLI maps these to exit code 2.
bool IsRuntimeError(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sgr

#endif  // SGR_ERROR_H_
