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

#ifndef SGR_METRICS_H_
#define SGR_METRICS_H_

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace sgr {

// doc_id -> relevance grade.
using QrelsRow = std::map<std::string, int, std::less<>>;
// query key -> judgments.
using Qrels = std::map<std::string, QrelsRow, std::less<>>;

// Parses `qid iter doc_id grade` lines. Throws kMalformedQrelsLine.
Qrels ParseQrels(std::string_view text);

struct RunEntry {
  std::string doc_id;
  int rank = 0;
  double score = 0;
  std::string tag;
};

struct Run {
  // Query keys in order of first appearance.
  std::vector<std::string> query_order;
  std::map<std::string, std::vector<RunEntry>, std::less<>> entries;
};

// Parses `qid Q0 doc_id rank score tag` lines, keeping file order within
// each query. Throws kMalformedRunLine, also for a doc listed twice.
Run ParseRun(std::string_view text);

// Score descending, doc_id descending on ties: the order trec_eval ranks by.
void SortForEvaluation(std::vector<RunEntry>& entries);

// Relevance is grade > 0. R counts every relevant judged document, so
// unretrieved relevant documents lower the precision average.
double AveragePrecision(std::span<const std::string> ranked, const QrelsRow& qrels);
double ReciprocalRank(std::span<const std::string> ranked, const QrelsRow& qrels);
// Linear gain, log2(rank + 1) discount; the ideal list is the judged grades
// sorted descending.
double NdcgAtK(std::span<const std::string> ranked, const QrelsRow& qrels, int k);

struct QueryMetrics {
  std::string query_key;
  double average_precision = 0;
  double reciprocal_rank = 0;
  std::vector<double> ndcg;  // parallel to MetricReport::ks
  bool retrieved = false;
};

struct MetricReport {
  std::vector<int> ks;
  std::vector<QueryMetrics> per_query;  // qrels order
  double map = 0;
  double mrr = 0;
  std::vector<double> ndcg;
  std::vector<std::string> warnings;
};

// Scores every qrels query; ones the run never mentions score 0. Run
// queries without judgments are skipped with a warning.
MetricReport EvaluateRun(const Run& run, const Qrels& qrels, std::vector<int> ks);
MetricReport Evaluate(std::string_view run_text, std::string_view qrels_text,
                      std::vector<int> ks);

nlohmann::json ReportToJson(const MetricReport& report, bool per_query);
std::string ReportToTable(const MetricReport& report, bool per_query);

}  // namespace sgr

#endif  // SGR_METRICS_H_
