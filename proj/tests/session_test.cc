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

#include "sgr/session.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "sgr/error.h"
#include "testing/session_gen.h"

namespace sgr {
namespace {

constexpr char kMinimal[] =
    R"({"session_id":"s1","queries":[{"query_id":"q1","text":"a","timestamp":10,)"
    R"("candidates":[{"doc_id":"d1","text":"x","click":1}]}]})";

ErrorCode CodeOf(std::string_view line) {
  try {
    ParseSessionRecord(line);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for " << line;
  return ErrorCode::kIo;
}

std::string Replace(std::string s, const std::string& from, const std::string& to) {
  s.replace(s.find(from), from.size(), to);
  return s;
}

TEST(ParseSessionRecordTest, MinimalRecord) {
  const Session s = ParseSessionRecord(kMinimal);
  EXPECT_EQ(s.session_id, "s1");
  ASSERT_EQ(s.queries.size(), 1u);
  EXPECT_EQ(s.queries[0].timestamp, 10);
  ASSERT_EQ(s.queries[0].candidates.size(), 1u);
  EXPECT_EQ(s.queries[0].candidates[0].click, 1);
}

TEST(ParseSessionRecordTest, RejectsBadClick) {
  EXPECT_EQ(CodeOf(Replace(kMinimal, "\"click\":1", "\"click\":2")),
            ErrorCode::kBadClickValue);
  EXPECT_EQ(CodeOf(Replace(kMinimal, "\"click\":1", "\"click\":\"1\"")),
            ErrorCode::kBadClickValue);
  EXPECT_EQ(CodeOf(Replace(kMinimal, "\"click\":1", "\"click\":0.5")),
            ErrorCode::kBadClickValue);
}

TEST(ParseSessionRecordTest, RejectsUnorderedTimestamps) {
  const std::string line =
      R"({"session_id":"s","queries":[)"
      R"({"query_id":"q1","text":"a","timestamp":20,"candidates":[]},)"
      R"({"query_id":"q2","text":"b","timestamp":10,"candidates":[]}]})";
  EXPECT_EQ(CodeOf(line), ErrorCode::kUnorderedTimestamps);
}

TEST(ParseSessionRecordTest, EqualTimestampsAllowed) {
  const std::string line =
      R"({"session_id":"s","queries":[)"
      R"({"query_id":"q1","text":"a","timestamp":10,"candidates":[]},)"
      R"({"query_id":"q2","text":"b","timestamp":10,"candidates":[]}]})";
  const Session s = ParseSessionRecord(line);
  EXPECT_EQ(s.queries[1].query_id, "q2");
}

TEST(ParseSessionRecordTest, OtherErrors) {
  EXPECT_EQ(CodeOf(Replace(kMinimal, R"("session_id":"s1",)", "")),
            ErrorCode::kMissingField);
  EXPECT_EQ(CodeOf(Replace(kMinimal, R"("doc_id":"d1")", R"("doc_id":"")")),
            ErrorCode::kMissingField);
  EXPECT_EQ(CodeOf(R"({"session_id":"s1","queries":[]})"), ErrorCode::kEmptySession);
  EXPECT_EQ(CodeOf(Replace(kMinimal, R"("click":1}])",
                           R"("click":1},{"doc_id":"d1","text":"y","click":0}])")),
            ErrorCode::kDuplicateDocIdInQuery);
  EXPECT_EQ(CodeOf("{not json"), ErrorCode::kMalformedRecord);
  EXPECT_EQ(CodeOf("[1,2]"), ErrorCode::kMalformedRecord);
  EXPECT_EQ(CodeOf(Replace(kMinimal, "\"timestamp\":10", "\"timestamp\":\"10\"")),
            ErrorCode::kMalformedRecord);
}

TEST(ParseSessionLogTest, ErrorsDoNotAbortStream) {
  std::stringstream in;
  in << kMinimal << "\n"
     << Replace(kMinimal, "\"click\":1", "\"click\":2") << "\n"
     << "\n"
     << Replace(kMinimal, "\"s1\"", "\"s2\"") << "\r\n";
  const ParseResult r = ParseSessionLog(in);
  ASSERT_EQ(r.sessions.size(), 2u);
  EXPECT_EQ(r.sessions[1].session_id, "s2");
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].line, 2u);
  EXPECT_EQ(r.errors[0].code, ErrorCode::kBadClickValue);
  EXPECT_FALSE(r.errors[0].reason.empty());
}

TEST(SessionJsonTest, RoundTripsHostileText) {
  std::mt19937_64 rng(7);
  testing::GenOptions opt;
  opt.hostile_text = true;
  for (int i = 0; i < 300; ++i) {
    const Session s = testing::RandomSession(rng, "s" + std::to_string(i), opt);
    const std::string line = SerializeSessionRecord(s);
    ASSERT_EQ(line.find('\n'), std::string::npos);
    EXPECT_EQ(ParseSessionRecord(line), s) << line;
  }
}

TEST(MakeContextTest, FirstStepHasEmptyHistory) {
  const Session s = testing::ClickFixture({2, 1, 0});
  const SessionContext ctx = MakeContext(s, 1);
  EXPECT_TRUE(ctx.history.empty());
  EXPECT_EQ(ctx.current_query, s.queries[0]);
  EXPECT_EQ(ctx.step, 1);
}

TEST(MakeContextTest, StepOutOfRange) {
  const Session s = testing::ClickFixture({2, 0});
  EXPECT_THROW(MakeContext(s, 3), Error);
  EXPECT_THROW(MakeContext(s, 0), Error);
  try {
    MakeContext(s, 3);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStepOutOfRange);
  }
}

TEST(MakeContextTest, KeepsOnlyClickedDocuments) {
  const Session s = testing::ClickFixture({2, 0, 1});
  const SessionContext ctx = MakeContext(s, 2);
  ASSERT_EQ(ctx.history.size(), 1u);
  EXPECT_EQ(ctx.history[0].query, s.queries[0]);
  ASSERT_EQ(ctx.history[0].clicked.size(), 2u);
  EXPECT_EQ(ctx.history[0].clicked[0].doc_id, "doc1");
  EXPECT_EQ(ctx.history[0].clicked[1].doc_id, "doc2");

  const SessionContext third = MakeContext(s, 3);
  ASSERT_EQ(third.history.size(), 2u);
  EXPECT_TRUE(third.history[1].clicked.empty());
  EXPECT_EQ(third.current_query.query_id, "q3");
}

TEST(MakeContextTest, HistoryLengthIsStepMinusOne) {
  std::mt19937_64 rng(11);
  for (int n = 0; n < 100; ++n) {
    const Session s = testing::RandomSession(rng, "s");
    for (int i = 1; i <= static_cast<int>(s.queries.size()); ++i) {
      const SessionContext ctx = MakeContext(s, i);
      ASSERT_EQ(ctx.history.size(), static_cast<std::size_t>(i - 1));
      for (const auto& h : ctx.history) {
        for (const auto& d : h.clicked) EXPECT_EQ(d.click, 1);
      }
    }
  }
}

Session WithQueries(const std::string& id, std::vector<std::pair<std::string, int>> qs) {
  Session s;
  s.session_id = id;
  int t = 0;
  for (auto& [text, docs] : qs) {
    Query q{"q" + std::to_string(++t), text, t, {}};
    for (int d = 0; d < docs; ++d) {
      q.candidates.push_back({"d" + std::to_string(d), "w", d == 0 ? 1 : 0});
    }
    s.queries.push_back(q);
  }
  return s;
}

TEST(ComputeStatsTest, Averages) {
  const std::vector<Session> a = {WithQueries("a", {{"x", 1}, {"y", 1}}),
                                  WithQueries("b", {{"x", 1}, {"y", 1}, {"z", 1}})};
  EXPECT_DOUBLE_EQ(ComputeStats(a).avg_queries_per_session, 2.5);

  const std::vector<Session> b = {WithQueries("a", {{"a b", 5}, {"a b c d", 3}})};
  const CorpusStats st = ComputeStats(b);
  EXPECT_DOUBLE_EQ(st.avg_docs_per_query, 4.0);
  EXPECT_DOUBLE_EQ(st.avg_query_len_tokens, 3.0);
  EXPECT_DOUBLE_EQ(st.avg_clicks_per_query, 1.0);
  EXPECT_DOUBLE_EQ(st.avg_doc_len_tokens, 1.0);
  EXPECT_EQ(st.session_count, 1u);
  EXPECT_EQ(st.query_count, 2u);
}

TEST(ComputeStatsTest, EmptyCorpus) {
  try {
    ComputeStats({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCorpus);
  }
}

TEST(ComputeStatsTest, PermutationInvariant) {
  std::mt19937_64 rng(3);
  std::vector<Session> sessions;
  for (int i = 0; i < 40; ++i) {
    sessions.push_back(testing::RandomSession(rng, "s" + std::to_string(i)));
  }
  const nlohmann::json before = StatsToJson(ComputeStats(sessions));
  for (int k = 0; k < 5; ++k) {
    std::shuffle(sessions.begin(), sessions.end(), rng);
    const CorpusStats after = ComputeStats(sessions);
    EXPECT_NEAR(after.avg_doc_len_tokens, before["avg_doc_len_tokens"].get<double>(), 1e-12);
    EXPECT_NEAR(after.avg_query_len_tokens, before["avg_query_len_tokens"].get<double>(),
                1e-12);
    EXPECT_EQ(after.query_count, before["query_count"].get<std::size_t>());
  }
}

}  // namespace
}  // namespace sgr
