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

#include "sgr/error.h"

#include <string>

namespace sgr {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kMissingField: return "MissingField";
    case ErrorCode::kUnorderedTimestamps: return "UnorderedTimestamps";
    case ErrorCode::kBadClickValue: return "BadClickValue";
    case ErrorCode::kDuplicateDocIdInQuery: return "DuplicateDocIdInQuery";
    case ErrorCode::kEmptySession: return "EmptySession";
    case ErrorCode::kStepOutOfRange: return "StepOutOfRange";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kEdgeNotFound: return "EdgeNotFound";
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kUnknownEdgeType: return "UnknownEdgeType";
    case ErrorCode::kNodeTextConflict: return "NodeTextConflict";
    case ErrorCode::kDuplicateEdge: return "DuplicateEdge";
    case ErrorCode::kClauseShapeMismatch: return "ClauseShapeMismatch";
    case ErrorCode::kInvalidTemplate: return "InvalidTemplate";
    case ErrorCode::kEmptyGraph: return "EmptyGraph";
    case ErrorCode::kNoClickEdges: return "NoClickEdges";
    case ErrorCode::kRemoteTimeout: return "RemoteTimeout";
    case ErrorCode::kRemoteProtocolError: return "RemoteProtocolError";
    case ErrorCode::kTokenNotInVocabulary: return "TokenNotInVocabulary";
    case ErrorCode::kInvalidTarget: return "InvalidTarget";
    case ErrorCode::kEmptyCorpusStats: return "EmptyCorpusStats";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kEmptyTarget: return "EmptyTarget";
    case ErrorCode::kNoPositives: return "NoPositives";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kEmptyCandidates: return "EmptyCandidates";
    case ErrorCode::kDuplicateQueryKey: return "DuplicateQueryKey";
    case ErrorCode::kMalformedRunLine: return "MalformedRunLine";
    case ErrorCode::kMalformedQrelsLine: return "MalformedQrelsLine";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

bool IsRuntimeError(ErrorCode code) {
  switch (code) {
    case ErrorCode::kRemoteTimeout:
    case ErrorCode::kRemoteProtocolError:
    case ErrorCode::kTokenNotInVocabulary:
    case ErrorCode::kIo:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

}  // namespace sgr
