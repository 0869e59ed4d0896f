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

#ifndef SGR_LOSS_H_
#define SGR_LOSS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "sgr/scorer.h"

namespace sgr {

struct LossValue {
  double value = 0;
  // Per-item terms: per token for node loss, per positive for rank loss.
  std::vector<double> components;
};

inline constexpr double kProbabilityEpsilon = 1e-7;

// Binary cross-entropy of a link probability against label z in {0, 1}.
// p is clamped to [eps, 1 - eps]. Throws kInvalidArgument for other labels.
LossValue LinkLoss(double p, int z);

// Negative log-likelihood of the target tokens. Throws kEmptyTarget.
LossValue NodeLoss(const ContinuationScore& cont);

enum class ContrastiveForm {
  // -log sigmoid(with - without), the Bradley-Terry pair loss.
  kLogSigmoid,
  // -sigmoid(with - without), literally as often printed. Negative valued.
  kNegSigmoid,
};

// Compares the target log-likelihood with and without session history.
// Throws kEmptyTarget when either side has no tokens.
LossValue ContrastiveLoss(const ContinuationScore& with_history,
                          const ContinuationScore& without_history,
                          ContrastiveForm form = ContrastiveForm::kLogSigmoid);

// Listwise softmax NLL, summed over positives. Throws kNoPositives or
// kIndexOutOfRange.
LossValue RankLoss(std::span<const double> scores,
                   std::span<const std::size_t> positive_indices);

// log(1 + exp(x)) without overflow.
double Softplus(double x);

}  // namespace sgr

#endif  // SGR_LOSS_H_
