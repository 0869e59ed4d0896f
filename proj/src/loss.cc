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

#include "sgr/loss.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace sgr {

double Softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

LossValue LinkLoss(double p, int z) {
  if (z != 0 && z != 1) {
    throw Error(ErrorCode::kInvalidArgument, "link label must be 0 or 1");
  }
  if (std::isnan(p)) throw Error(ErrorCode::kInvalidArgument, "p is NaN");
  const double q = std::clamp(p, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
  const double v = z == 1 ? -std::log(q) : -std::log1p(-q);
  return {v, {v}};
}

LossValue NodeLoss(const ContinuationScore& cont) {
  if (cont.token_logprobs.empty()) {
    throw Error(ErrorCode::kEmptyTarget, "no target tokens");
  }
  LossValue out;
  out.components.reserve(cont.token_logprobs.size());
  double total = 0;
  for (double lp : cont.token_logprobs) {
    out.components.push_back(-lp);
    total += lp;
  }
  out.value = -total;
  return out;
}

LossValue ContrastiveLoss(const ContinuationScore& with_history,
                          const ContinuationScore& without_history,
                          ContrastiveForm form) {
  if (with_history.token_logprobs.empty() ||
      without_history.token_logprobs.empty()) {
    throw Error(ErrorCode::kEmptyTarget, "no target tokens");
  }
  const double delta = with_history.total - without_history.total;
  double v;
  if (form == ContrastiveForm::kLogSigmoid) {
    v = Softplus(-delta);
  } else {
    v = -MakeAnswerScore(delta, 0.0).prob_yes;
  }
  return {v, {delta}};
}

LossValue RankLoss(std::span<const double> scores,
                   std::span<const std::size_t> positive_indices) {
  if (positive_indices.empty()) {
    throw Error(ErrorCode::kNoPositives, "rank loss needs a positive");
  }
  for (std::size_t i : positive_indices) {
    if (i >= scores.size()) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "positive index " + std::to_string(i) + " outside " +
                      std::to_string(scores.size()) + " scores");
    }
  }
  const double top = *std::max_element(scores.begin(), scores.end());
  double sum = 0;
  for (double s : scores) sum += std::exp(s - top);
  const double log_z = top + std::log(sum);
  LossValue out;
  for (std::size_t i : positive_indices) {
    const double term = log_z - scores[i];
    out.components.push_back(term);
    out.value += term;
  }
  return out;
}

}  // namespace sgr
