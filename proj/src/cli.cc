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

#include "sgr/cli.h"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sgr/error.h"
#include "sgr/grammar.h"
#include "sgr/graph.h"
#include "sgr/loss.h"
#include "sgr/metrics.h"
#include "sgr/pretrain.h"
#include "sgr/ranker.h"
#include "sgr/remote_scorer.h"
#include "sgr/scorer.h"
#include "sgr/session.h"
#include "sgr/text_util.h"

namespace sgr {
namespace {

using nlohmann::json;

constexpr std::size_t kNoBudget = std::numeric_limits<std::size_t>::max();

// Thrown after diagnostics were already written; carries the exit code.
struct CliFailure {
  int code;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw Error(ErrorCode::kIo, "cannot write " + path);
      stream_ = &file_;
      path_ = path;
    }
  }

  std::ostream& operator*() { return *stream_; }

  void Close() {
    stream_->flush();
    if (!*stream_) throw Error(ErrorCode::kIo, "write failed for " + path_);
  }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
  std::string path_ = "<stdout>";
};

std::vector<Session> LoadSessions(const std::string& path, std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  ParseResult parsed = ParseSessionLog(in);
  if (!parsed.errors.empty()) {
    for (const LineError& e : parsed.errors) {
      err << path << ":" << e.line << ": " << e.reason << "\n";
    }
    err << parsed.errors.size() << " malformed line(s) in " << path << "\n";
    throw CliFailure{kExitValidation};
  }
  return std::move(parsed.sessions);
}

struct StepRef {
  std::size_t session;
  int step;
};

std::vector<StepRef> Steps(const std::vector<Session>& sessions, bool last_only) {
  std::vector<StepRef> out;
  for (std::size_t s = 0; s < sessions.size(); ++s) {
    const int m = static_cast<int>(sessions[s].queries.size());
    for (int i = last_only ? m : 1; i <= m; ++i) out.push_back({s, i});
  }
  return out;
}

ScorerConfig LoadScorerConfig(const std::string& path) {
  if (path.empty()) return {};
  json j;
  try {
    j = json::parse(ReadFile(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidConfig, path + ": " + e.what());
  }
  return ScorerConfigFromJson(j);
}

std::unique_ptr<Scorer> MakeScorer(const ScorerConfig& config,
                                   const std::vector<Session>& corpus) {
  ValidateScorerConfig(config);
  switch (config.kind) {
    case ScorerKind::kMock:
      return std::make_unique<MockScorer>(config.seed, config.mock_vocab_size);
    case ScorerKind::kBm25:
      return std::make_unique<Bm25Scorer>(BuildBm25Stats(corpus), config.k1,
                                          config.b, config.mock_vocab_size);
    case ScorerKind::kRemote:
      return std::make_unique<RemoteScorer>(config);
  }
  return nullptr;
}

std::vector<int> ParseKs(const std::string& text) {
  std::vector<int> ks;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int k = std::stoi(item, &used);
      if (used != item.size() || k < 1) throw std::invalid_argument(item);
      ks.push_back(k);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, "bad --k entry \"" + item + "\"");
    }
  }
  if (ks.empty()) throw Error(ErrorCode::kInvalidArgument, "--k is empty");
  return ks;
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string input, output;
};

int Ingest(const IngestArgs& a, std::ostream& out, std::ostream& err) {
  std::ifstream in(a.input, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + a.input);
  const ParseResult parsed = ParseSessionLog(in);
  Output o(a.output, out);
  for (const Session& s : parsed.sessions) *o << SerializeSessionRecord(s) << "\n";
  o.Close();
  for (const LineError& e : parsed.errors) {
    err << a.input << ":" << e.line << ": " << e.reason << "\n";
  }
  err << parsed.sessions.size() << " session(s) ok, " << parsed.errors.size()
      << " rejected\n";
  return parsed.errors.empty() ? kExitOk : kExitValidation;
}

struct StatsArgs {
  std::string input;
};

int Stats(const StatsArgs& a, std::ostream& out, std::ostream& err) {
  const auto sessions = LoadSessions(a.input, err);
  out << StatsToJson(ComputeStats(sessions)).dump(2) << "\n";
  return kExitOk;
}

struct BuildGraphArgs {
  std::string input, output, format = "json", session;
  int step = 0;
};

int BuildGraphCmd(const BuildGraphArgs& a, std::ostream& out, std::ostream& err) {
  const auto sessions = LoadSessions(a.input, err);
  Output o(a.output, out);
  std::size_t emitted = 0;
  for (const Session& s : sessions) {
    if (!a.session.empty() && s.session_id != a.session) continue;
    const int m = static_cast<int>(s.queries.size());
    for (int i = 1; i <= m; ++i) {
      if (a.step != 0 && i != a.step) continue;
      const SessionGraph g = BuildGraph(MakeContext(s, i));
      if (a.format == "dot") {
        *o << GraphToDot(g, QueryKey(s.session_id, i));
      } else {
        *o << json{{"session_id", s.session_id}, {"step", i},
                   {"graph", GraphToJson(g)}}
                  .dump()
           << "\n";
      }
      ++emitted;
    }
  }
  o.Close();
  if (emitted == 0 && (!a.session.empty() || a.step != 0)) {
    err << "no (session, step) matched the filters\n";
    return kExitValidation;
  }
  return kExitOk;
}

struct SerializeArgs {
  std::string input, output;
  std::size_t budget = kNoBudget;
  int jobs = 1;
};

int SerializeCmd(const SerializeArgs& a, std::ostream& out, std::ostream& err) {
  const auto sessions = LoadSessions(a.input, err);
  const auto steps = Steps(sessions, false);
  std::vector<std::string> lines(steps.size());
  ParallelFor(steps.size(), a.jobs, [&](std::size_t k) {
    const Session& s = sessions[steps[k].session];
    const SessionGraph g = BuildGraph(MakeContext(s, steps[k].step));
    lines[k] = json{{"session_id", s.session_id},
                    {"step", steps[k].step},
                    {"text", TruncateGraphText(g, a.budget).text}}
                   .dump();
  });
  Output o(a.output, out);
  for (const auto& line : lines) *o << line << "\n";
  o.Close();
  return kExitOk;
}

struct GenPretrainArgs {
  std::string input, output, task = "all", steps = "all";
  double neg_ratio = 1.0, sample_rate = 1.0;
  std::uint64_t seed = 0;
  std::size_t budget = kNoBudget;
  int jobs = 1;
};

int GenPretrain(const GenPretrainArgs& a, std::ostream& out, std::ostream& err) {
  if (!(a.neg_ratio > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "--neg-ratio must be positive");
  }
  if (!(a.sample_rate >= 0 && a.sample_rate <= 1)) {
    throw Error(ErrorCode::kInvalidArgument, "--sample-rate must lie in [0, 1]");
  }
  const bool link = a.task == "all" || a.task == "link";
  const bool node = a.task == "all" || a.task == "node";
  const bool contrastive = a.task == "all" || a.task == "contrastive";
  const auto sessions = LoadSessions(a.input, err);
  const auto steps = Steps(sessions, a.steps == "last");

  SamplerOptions options;
  options.neg_ratio = a.neg_ratio;
  options.sample_rate = a.sample_rate;
  options.budget = a.budget;

  std::vector<std::vector<PretrainSample>> results(steps.size());
  ParallelFor(steps.size(), a.jobs, [&](std::size_t k) {
    const Session& s = sessions[steps[k].session];
    const SessionGraph g = BuildGraph(MakeContext(s, steps[k].step));
    if (g.edges().empty()) return;
    const SampleOrigin origin{s.session_id, steps[k].step};
    const std::uint64_t seed = DeriveSeed(a.seed, s.session_id, steps[k].step);
    auto& bucket = results[k];
    const auto append = [&](std::vector<PretrainSample> v) {
      bucket.insert(bucket.end(), std::make_move_iterator(v.begin()),
                    std::make_move_iterator(v.end()));
    };
    if (link) append(GenerateLinkSamples(g, origin, options, seed));
    if (node) append(GenerateNodeSamples(g, origin, options, MixSeed(seed ^ 1)));
    const bool has_click =
        std::any_of(g.edges().begin(), g.edges().end(),
                    [](const Edge& e) { return e.type == EdgeType::kClickOn; });
    if (contrastive && has_click) {
      append(GenerateContrastiveSamples(g, origin, options, MixSeed(seed ^ 2)));
    }
  });
  Output o(a.output, out);
  std::size_t count = 0;
  for (const auto& batch : results) {
    for (const auto& sample : batch) {
      *o << SampleToJson(sample).dump() << "\n";
      ++count;
    }
  }
  o.Close();
  err << count << " sample(s) from " << steps.size() << " graph(s)\n";
  return kExitOk;
}

struct RankArgs {
  std::string input, out, qrels_out, scorer, config, tag = "sgr",
      steps = "all", score_field = "prob", on_error = "fail-query", endpoint;
  std::size_t budget = kNoBudget;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

int Rank(const RankArgs& a, std::ostream& out, std::ostream& err) {
  ScorerConfig config = LoadScorerConfig(a.config);
  if (!a.scorer.empty()) config.kind = ParseScorerKind(a.scorer);
  if (a.seed) config.seed = *a.seed;
  if (!a.endpoint.empty()) config.endpoint = a.endpoint;
  ValidateScorerConfig(config);
  const auto sessions = LoadSessions(a.input, err);
  std::unique_ptr<Scorer> scorer = MakeScorer(config, sessions);

  RankOptions options;
  options.budget = a.budget;
  options.score_field =
      a.score_field == "logit" ? ScoreField::kYesLogit : ScoreField::kProbYes;
  options.failure_policy = a.on_error == "fail-candidate"
                               ? FailurePolicy::kFailCandidate
                               : FailurePolicy::kFailQuery;
  options.candidate_jobs =
      config.kind == ScorerKind::kRemote ? config.max_in_flight : 1;

  std::vector<StepRef> steps;
  for (const StepRef& r : Steps(sessions, a.steps == "last")) {
    if (!sessions[r.session].queries[r.step - 1].candidates.empty()) {
      steps.push_back(r);
    }
  }
  std::vector<SessionContext> contexts(steps.size());
  std::vector<RankedList> lists(steps.size());
  ParallelFor(steps.size(), a.jobs, [&](std::size_t k) {
    contexts[k] = MakeContext(sessions[steps[k].session], steps[k].step);
    lists[k] = RankCandidates(contexts[k], *scorer, options);
  });
  const std::string run = EmitRunFile(lists, a.tag);
  Output o(a.out, out);
  *o << run;
  o.Close();
  if (!a.qrels_out.empty()) {
    Output q(a.qrels_out, out);
    *q << EmitQrels(contexts);
    q.Close();
  }
  err << "ranked " << lists.size() << " quer" << (lists.size() == 1 ? "y" : "ies")
      << "\n";
  return kExitOk;
}

struct AuditArgs {
  std::string samples, scores, scorer, config, run, qrels, output,
      contrastive_form = "log-sigmoid";
};

std::vector<double> Doubles(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw Error(ErrorCode::kMalformedRecord, std::string("score line needs ") + key);
  }
  return j[key].get<std::vector<double>>();
}

int AuditLoss(const AuditArgs& a, std::ostream& out, std::ostream&) {
  if (a.samples.empty() && a.run.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "give --samples and/or --run with --qrels");
  }
  if (!a.samples.empty() && a.scores.empty() && a.scorer.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--samples needs --scores or --scorer");
  }
  if (!a.run.empty() && a.qrels.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--run needs --qrels");
  }
  const ContrastiveForm form = a.contrastive_form == "sigmoid"
                                   ? ContrastiveForm::kNegSigmoid
                                   : ContrastiveForm::kLogSigmoid;
  std::map<std::string, std::pair<std::size_t, double>> totals;
  Output o(a.output, out);

  if (!a.samples.empty()) {
    std::vector<PretrainSample> samples;
    {
      std::istringstream in(ReadFile(a.samples));
      std::string line;
      std::size_t n = 0;
      while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        try {
          samples.push_back(SampleFromJson(json::parse(line)));
        } catch (const json::parse_error& e) {
          throw Error(ErrorCode::kMalformedRecord,
                      a.samples + ":" + std::to_string(n) + ": " + e.what());
        } catch (const Error& e) {
          throw Error(e.code(), a.samples + ":" + std::to_string(n) + ": " + e.what());
        }
      }
    }
    std::vector<json> scores;
    std::unique_ptr<Scorer> scorer;
    if (!a.scores.empty()) {
      std::istringstream in(ReadFile(a.scores));
      std::string line;
      std::size_t n = 0;
      while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        try {
          scores.push_back(json::parse(line));
        } catch (const json::parse_error& e) {
          throw Error(ErrorCode::kMalformedRecord,
                      a.scores + ":" + std::to_string(n) + ": " + e.what());
        }
      }
      if (scores.size() != samples.size()) {
        throw Error(ErrorCode::kInvalidArgument,
                    std::to_string(samples.size()) + " samples but " +
                        std::to_string(scores.size()) + " score lines");
      }
    } else {
      ScorerConfig config = LoadScorerConfig(a.config);
      config.kind = ParseScorerKind(a.scorer);
      scorer = MakeScorer(config, {});
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const PretrainSample& s = samples[i];
      LossValue loss;
      try {
        switch (s.task) {
          case TaskKind::kLinkPred: {
            double p;
            if (scorer) {
              p = scorer->ScoreAnswer(s.input).prob_yes;
            } else if (scores[i].contains("prob_yes")) {
              p = scores[i]["prob_yes"].get<double>();
            } else {
              p = MakeAnswerScore(scores[i].at("yes_logit").get<double>(),
                                  scores[i].at("no_logit").get<double>())
                      .prob_yes;
            }
            loss = LinkLoss(p, *s.label);
            break;
          }
          case TaskKind::kNodeGen:
            loss = NodeLoss(scorer ? scorer->ScoreContinuation(s.input, *s.target)
                                   : MakeContinuationScore(
                                         Doubles(scores[i], "token_logprobs")));
            break;
          case TaskKind::kContrastive:
            if (scorer) {
              loss = ContrastiveLoss(scorer->ScoreContinuation(s.input, *s.target),
                                     scorer->ScoreContinuation(*s.alt_input, *s.target),
                                     form);
            } else {
              loss = ContrastiveLoss(
                  MakeContinuationScore(Doubles(scores[i], "with_history")),
                  MakeContinuationScore(Doubles(scores[i], "without_history")), form);
            }
            break;
          case TaskKind::kRank:
            break;
        }
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kMalformedRecord,
                    "score line " + std::to_string(i + 1) + ": " + e.what());
      }
      const std::string task(TaskKindName(s.task));
      *o << json{{"index", i}, {"task", task}, {"loss", loss.value},
                 {"session_id", s.meta.session_id}, {"step", s.meta.step},
                 {"target", s.meta.target}}
                .dump()
         << "\n";
      totals[task].first += 1;
      totals[task].second += loss.value;
    }
  }

  if (!a.run.empty()) {
    const Qrels qrels = ParseQrels(ReadFile(a.qrels));
    const Run run = ParseRun(ReadFile(a.run));
    for (const auto& key : run.query_order) {
      const auto& entries = run.entries.at(key);
      std::vector<double> values;
      std::vector<std::size_t> positives;
      auto row = qrels.find(key);
      for (std::size_t i = 0; i < entries.size(); ++i) {
        values.push_back(entries[i].score);
        if (row != qrels.end()) {
          auto g = row->second.find(entries[i].doc_id);
          if (g != row->second.end() && g->second > 0) positives.push_back(i);
        }
      }
      if (positives.empty()) continue;
      const LossValue loss = RankLoss(values, positives);
      *o << json{{"query_key", key}, {"task", "rank"}, {"loss", loss.value},
                 {"positives", positives.size()}}
                .dump()
         << "\n";
      totals["rank"].first += 1;
      totals["rank"].second += loss.value;
    }
  }

  json agg = json::object();
  for (const auto& [task, t] : totals) {
    agg[task] = {{"count", t.first},
                 {"sum", t.second},
                 {"mean", t.first ? t.second / static_cast<double>(t.first) : 0.0}};
  }
  *o << json{{"aggregate", agg}}.dump() << "\n";
  o.Close();
  return kExitOk;
}

struct EvaluateArgs {
  std::string run, qrels, k = "1,3,5,10", format = "json";
  bool per_query = false;
};

int EvaluateCmd(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  const auto ks = ParseKs(a.k);
  const MetricReport report = Evaluate(ReadFile(a.run), ReadFile(a.qrels), ks);
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";
  if (a.format == "table") {
    out << ReportToTable(report, a.per_query);
  } else {
    out << ReportToJson(report, a.per_query).dump(2) << "\n";
  }
  return kExitOk;
}

struct BucketsArgs {
  std::string input, by = "session";
};

int Buckets(const BucketsArgs& a, std::ostream& out, std::ostream& err) {
  const auto sessions = LoadSessions(a.input, err);
  std::vector<std::pair<std::string, int>> items;
  for (const Session& s : sessions) {
    const int m = static_cast<int>(s.queries.size());
    if (a.by == "step") {
      for (int i = 1; i <= m; ++i) items.emplace_back(QueryKey(s.session_id, i), i);
    } else {
      items.emplace_back(s.session_id, m);
    }
  }
  const BucketPartition p = BucketByLength(items);
  out << json{{"short", p.short_keys},
              {"medium", p.medium_keys},
              {"long", p.long_keys},
              {"counts",
               {{"short", p.short_keys.size()},
                {"medium", p.medium_keys.size()},
                {"long", p.long_keys.size()}}}}
             .dump(2)
      << "\n";
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Session search toolkit: session graphs, symbolic prompts, "
               "pretraining data, listwise ranking and TREC evaluation.",
               "sgr"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  int result = kExitOk;
  std::function<int()> action;
  const auto existing = CLI::ExistingFile;

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Validate a session log and write it back canonically");
  c_ingest->add_option("-i,--input", ingest.input, "Session JSONL")->required()->check(existing);
  c_ingest->add_option("-o,--output", ingest.output, "Canonical JSONL (default stdout)");
  c_ingest->callback([&] { action = [&] { return Ingest(ingest, out, err); }; });

  StatsArgs stats;
  auto* c_stats = app.add_subcommand("stats", "Corpus statistics as JSON");
  c_stats->add_option("-i,--input", stats.input, "Session JSONL")->required()->check(existing);
  c_stats->callback([&] { action = [&] { return Stats(stats, out, err); }; });

  BuildGraphArgs bg;
  auto* c_bg = app.add_subcommand("build-graph", "Dump session graphs as JSONL or DOT");
  c_bg->add_option("-i,--input", bg.input, "Session JSONL")->required()->check(existing);
  c_bg->add_option("-o,--output", bg.output, "Output file (default stdout)");
  c_bg->add_option("--format", bg.format, "json or dot")
      ->check(CLI::IsMember({"json", "dot"}))->capture_default_str();
  c_bg->add_option("--session", bg.session, "Only this session_id");
  c_bg->add_option("--step", bg.step, "Only this 1-based step (0 = all)")
      ->check(CLI::NonNegativeNumber);
  c_bg->callback([&] { action = [&] { return BuildGraphCmd(bg, out, err); }; });

  SerializeArgs ser;
  auto* c_ser = app.add_subcommand("serialize", "Symbolic graph text per (session, step) as JSONL");
  c_ser->add_option("-i,--input", ser.input, "Session JSONL")->required()->check(existing);
  c_ser->add_option("-o,--output", ser.output, "Output JSONL (default stdout)");
  c_ser->add_option("--budget", ser.budget, "Graph text budget in characters");
  c_ser->add_option("--jobs", ser.jobs, "Worker threads")->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_ser->callback([&] { action = [&] { return SerializeCmd(ser, out, err); }; });

  GenPretrainArgs gp;
  auto* c_gp = app.add_subcommand("gen-pretrain", "Generate symbolic pretraining samples as JSONL");
  c_gp->add_option("-i,--input", gp.input, "Session JSONL")->required()->check(existing);
  c_gp->add_option("-o,--output", gp.output, "Output JSONL (default stdout)");
  c_gp->add_option("--task", gp.task, "link, node, contrastive or all")
      ->check(CLI::IsMember({"link", "node", "contrastive", "all"}))->capture_default_str();
  c_gp->add_option("--neg-ratio", gp.neg_ratio, "Link negatives per positive")
      ->capture_default_str();
  c_gp->add_option("--sample-rate", gp.sample_rate,
                   "Fraction of node and click targets kept")->capture_default_str();
  c_gp->add_option("--seed", gp.seed, "Base random seed")->capture_default_str();
  c_gp->add_option("--budget", gp.budget, "Graph text budget in characters");
  c_gp->add_option("--steps", gp.steps, "Graphs for every step (all) or the last one (last)")
      ->check(CLI::IsMember({"all", "last"}))->capture_default_str();
  c_gp->add_option("--jobs", gp.jobs, "Worker threads")->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_gp->callback([&] { action = [&] { return GenPretrain(gp, out, err); }; });

  RankArgs rk;
  auto* c_rk = app.add_subcommand("rank", "Rank candidates and write a TREC run file");
  c_rk->add_option("-i,--input", rk.input, "Session JSONL")->required()->check(existing);
  c_rk->add_option("--scorer", rk.scorer, "mock, bm25 or remote (overrides --config)")
      ->check(CLI::IsMember({"mock", "bm25", "remote"}));
  c_rk->add_option("--config", rk.config, "Scorer config JSON")->check(existing);
  c_rk->add_option("--endpoint", rk.endpoint, "Remote completions URL");
  c_rk->add_option("--budget", rk.budget, "Graph text budget in characters");
  c_rk->add_option("--tag", rk.tag, "Run tag")->capture_default_str();
  c_rk->add_option("--out", rk.out, "Run file (default stdout)");
  c_rk->add_option("--qrels-out", rk.qrels_out, "Also write click-label qrels here");
  c_rk->add_option("--steps", rk.steps, "Rank every step (all) or the last query (last)")
      ->check(CLI::IsMember({"all", "last"}))->capture_default_str();
  c_rk->add_option("--score-field", rk.score_field, "prob (prob_yes) or logit (yes_logit)")
      ->check(CLI::IsMember({"prob", "logit"}))->capture_default_str();
  c_rk->add_option("--on-error", rk.on_error, "fail-query or fail-candidate")
      ->check(CLI::IsMember({"fail-query", "fail-candidate"}))->capture_default_str();
  c_rk->add_option("--seed", rk.seed, "Mock scorer seed");
  c_rk->add_option("--jobs", rk.jobs, "Queries ranked in parallel")
      ->check(CLI::PositiveNumber)->capture_default_str();
  c_rk->callback([&] { action = [&] { return Rank(rk, out, err); }; });

  AuditArgs al;
  auto* c_al = app.add_subcommand("audit-loss", "Per-sample and aggregate loss values as JSONL");
  c_al->add_option("--samples", al.samples, "Pretraining sample JSONL")->check(existing);
  c_al->add_option("--scores", al.scores, "Scorer output JSONL, one line per sample")
      ->check(existing);
  c_al->add_option("--scorer", al.scorer, "Score samples live instead of --scores")
      ->check(CLI::IsMember({"mock", "bm25", "remote"}));
  c_al->add_option("--config", al.config, "Scorer config JSON")->check(existing);
  c_al->add_option("--run", al.run, "Run file for the listwise rank loss")->check(existing);
  c_al->add_option("--qrels", al.qrels, "Qrels giving the run's positives")->check(existing);
  c_al->add_option("--contrastive-form", al.contrastive_form,
                   "log-sigmoid (default) or sigmoid")
      ->check(CLI::IsMember({"log-sigmoid", "sigmoid"}))->capture_default_str();
  c_al->add_option("-o,--output", al.output, "Output JSONL (default stdout)");
  c_al->callback([&] { action = [&] { return AuditLoss(al, out, err); }; });

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "MAP, MRR and NDCG@k of a run against qrels");
  c_ev->add_option("--run", ev.run, "TREC run file")->required()->check(existing);
  c_ev->add_option("--qrels", ev.qrels, "TREC qrels file")->required()->check(existing);
  c_ev->add_option("--k", ev.k, "Comma-separated NDCG cutoffs")->capture_default_str();
  c_ev->add_flag("--per-query", ev.per_query, "Include per-query values");
  c_ev->add_option("--format", ev.format, "json or table")
      ->check(CLI::IsMember({"json", "table"}))->capture_default_str();
  c_ev->callback([&] { action = [&] { return EvaluateCmd(ev, out, err); }; });

  BucketsArgs bk;
  auto* c_bk = app.add_subcommand("buckets", "Split sessions into short/medium/long by length");
  c_bk->add_option("-i,--input", bk.input, "Session JSONL")->required()->check(existing);
  c_bk->add_option("--by", bk.by, "session (length = queries) or step (length = step)")
      ->check(CLI::IsMember({"session", "step"}))->capture_default_str();
  c_bk->callback([&] { action = [&] { return Buckets(bk, out, err); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    result = action ? action() : kExitValidation;
  } catch (const CliFailure& f) {
    result = f.code;
  } catch (const Error& e) {
    err << "sgr: " << e.what() << "\n";
    result = IsRuntimeError(e.code()) ? kExitRuntime : kExitValidation;
  } catch (const std::exception& e) {
    err << "sgr: " << e.what() << "\n";
    result = kExitRuntime;
  }
  return result;
}

}  // namespace sgr
