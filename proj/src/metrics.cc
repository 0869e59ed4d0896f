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

#include "sgr/metrics.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

#include "sgr/error.h"
#include "sgr/text_util.h"

namespace sgr {
namespace {

template <typename Fn>
void ForEachLine(std::string_view text, Fn fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) fn(line_no, line);
    pos = end + 1;
  }
}

bool ParseInt(const std::string& s, int* out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool ParseDouble(const std::string& s, double* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  *out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(*out);
}

bool IsRelevant(const QrelsRow& qrels, std::string_view doc) {
  auto it = qrels.find(doc);
  return it != qrels.end() && it->second > 0;
}

int Grade(const QrelsRow& qrels, std::string_view doc) {
  auto it = qrels.find(doc);
  return it == qrels.end() ? 0 : std::max(it->second, 0);
}

}  // namespace

Qrels ParseQrels(std::string_view text) {
  Qrels qrels;
  ForEachLine(text, [&](std::size_t line_no, std::string_view line) {
    const auto fields = Tokenize(line);
    const auto fail = [&](const std::string& why) {
      throw Error(ErrorCode::kMalformedQrelsLine,
                  "line " + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() != 4) {
      fail("expected 4 fields, got " + std::to_string(fields.size()));
    }
    int grade;
    if (!ParseInt(fields[3], &grade)) fail("grade is not an integer");
    if (grade < 0) fail("grade is negative");
    if (!qrels[fields[0]].emplace(fields[2], grade).second) {
      fail("duplicate judgment for " + fields[0] + " " + fields[2]);
    }
  });
  return qrels;
}

Run ParseRun(std::string_view text) {
  Run run;
  std::map<std::string, std::set<std::string>, std::less<>> seen;
  ForEachLine(text, [&](std::size_t line_no, std::string_view line) {
    const auto fields = Tokenize(line);
    const auto fail = [&](const std::string& why) {
      throw Error(ErrorCode::kMalformedRunLine,
                  "line " + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() != 6) {
      fail("expected 6 fields, got " + std::to_string(fields.size()));
    }
    RunEntry e;
    e.doc_id = fields[2];
    if (!ParseInt(fields[3], &e.rank)) fail("rank is not an integer");
    if (!ParseDouble(fields[4], &e.score)) fail("score is not a finite number");
    e.tag = fields[5];
    if (!seen[fields[0]].insert(e.doc_id).second) {
      fail("document " + e.doc_id + " listed twice for " + fields[0]);
    }
    auto [it, inserted] = run.entries.try_emplace(fields[0]);
    if (inserted) run.query_order.push_back(fields[0]);
    it->second.push_back(std::move(e));
  });
  return run;
}

void SortForEvaluation(std::vector<RunEntry>& entries) {
  std::sort(entries.begin(), entries.end(),
            [](const RunEntry& a, const RunEntry& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.doc_id > b.doc_id;
            });
}

double AveragePrecision(std::span<const std::string> ranked,
                        const QrelsRow& qrels) {
  std::size_t total_relevant = 0;
  for (const auto& [doc, grade] : qrels) total_relevant += grade > 0;
  if (total_relevant == 0) return 0;
  double sum = 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (IsRelevant(qrels, ranked[i])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(total_relevant);
}

double ReciprocalRank(std::span<const std::string> ranked,
                      const QrelsRow& qrels) {
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (IsRelevant(qrels, ranked[i])) return 1.0 / static_cast<double>(i + 1);
  }
  return 0;
}

double NdcgAtK(std::span<const std::string> ranked, const QrelsRow& qrels,
               int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  const std::size_t cut = static_cast<std::size_t>(k);
  double dcg = 0;
  for (std::size_t i = 0; i < std::min(cut, ranked.size()); ++i) {
    dcg += Grade(qrels, ranked[i]) / std::log2(static_cast<double>(i + 2));
  }
  std::vector<int> grades;
  for (const auto& [doc, grade] : qrels) {
    if (grade > 0) grades.push_back(grade);
  }
  std::sort(grades.rbegin(), grades.rend());
  double idcg = 0;
  for (std::size_t i = 0; i < std::min(cut, grades.size()); ++i) {
    idcg += grades[i] / std::log2(static_cast<double>(i + 2));
  }
  return idcg > 0 ? dcg / idcg : 0.0;
}

MetricReport EvaluateRun(const Run& run, const Qrels& qrels,
                         std::vector<int> ks) {
  for (int k : ks) {
    if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  }
  MetricReport report;
  report.ks = std::move(ks);
  report.ndcg.assign(report.ks.size(), 0.0);
  for (const auto& key : run.query_order) {
    if (!qrels.contains(key)) {
      report.warnings.push_back("run query " + key +
                                " has no judgments; skipped");
    }
  }
  for (const auto& [key, row] : qrels) {
    QueryMetrics m;
    m.query_key = key;
    m.ndcg.assign(report.ks.size(), 0.0);
    auto it = run.entries.find(key);
    if (it != run.entries.end()) {
      m.retrieved = true;
      std::vector<RunEntry> sorted = it->second;
      SortForEvaluation(sorted);
      std::vector<std::string> ranked;
      ranked.reserve(sorted.size());
      for (const auto& e : sorted) ranked.push_back(e.doc_id);
      m.average_precision = AveragePrecision(ranked, row);
      m.reciprocal_rank = ReciprocalRank(ranked, row);
      for (std::size_t i = 0; i < report.ks.size(); ++i) {
        m.ndcg[i] = NdcgAtK(ranked, row, report.ks[i]);
      }
    }
    report.map += m.average_precision;
    report.mrr += m.reciprocal_rank;
    for (std::size_t i = 0; i < report.ks.size(); ++i) {
      report.ndcg[i] += m.ndcg[i];
    }
    report.per_query.push_back(std::move(m));
  }
  if (!report.per_query.empty()) {
    const double n = static_cast<double>(report.per_query.size());
    report.map /= n;
    report.mrr /= n;
    for (double& v : report.ndcg) v /= n;
  }
  return report;
}

MetricReport Evaluate(std::string_view run_text, std::string_view qrels_text,
                      std::vector<int> ks) {
  const Qrels qrels = ParseQrels(qrels_text);
  const Run run = ParseRun(run_text);
  return EvaluateRun(run, qrels, std::move(ks));
}

nlohmann::json ReportToJson(const MetricReport& report, bool per_query) {
  const auto metrics = [&](double ap, double rr, const std::vector<double>& ndcg) {
    nlohmann::json j = {{"map", ap}, {"mrr", rr}};
    for (std::size_t i = 0; i < report.ks.size(); ++i) {
      j["ndcg@" + std::to_string(report.ks[i])] = ndcg[i];
    }
    return j;
  };
  nlohmann::json out;
  out["num_queries"] = report.per_query.size();
  out["mean"] = metrics(report.map, report.mrr, report.ndcg);
  if (per_query) {
    nlohmann::json rows = nlohmann::json::object();
    for (const auto& m : report.per_query) {
      rows[m.query_key] = metrics(m.average_precision, m.reciprocal_rank, m.ndcg);
    }
    out["per_query"] = std::move(rows);
  }
  if (!report.warnings.empty()) out["warnings"] = report.warnings;
  return out;
}

std::string ReportToTable(const MetricReport& report, bool per_query) {
  std::vector<std::string> header = {"map", "mrr"};
  for (int k : report.ks) header.push_back("ndcg@" + std::to_string(k));
  std::size_t key_width = 4;
  if (per_query) {
    for (const auto& m : report.per_query) {
      key_width = std::max(key_width, m.query_key.size());
    }
  }
  const auto width = [&](std::size_t col) {
    return static_cast<int>(std::max<std::size_t>(header[col].size(), 6)) + 2;
  };
  std::string out;
  char buf[64];
  const auto pad = [&](const std::string& key) {
    out += key;
    out.append(key_width - std::min(key_width, key.size()), ' ');
  };
  pad("qkey");
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%*s", width(i), header[i].c_str());
    out += buf;
  }
  out += '\n';
  const auto row = [&](const std::string& key, double ap, double rr,
                       const std::vector<double>& ndcg) {
    pad(key);
    std::vector<double> values = {ap, rr};
    values.insert(values.end(), ndcg.begin(), ndcg.end());
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%*.4f", width(i), values[i]);
      out += buf;
    }
    out += '\n';
  };
  if (per_query) {
    for (const auto& m : report.per_query) {
      row(m.query_key, m.average_precision, m.reciprocal_rank, m.ndcg);
    }
  }
  row("all", report.map, report.mrr, report.ndcg);
  return out;
}

}  // namespace sgr
