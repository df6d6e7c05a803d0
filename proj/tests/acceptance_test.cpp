// Acceptance suite: one criterion per check, one PASS/FAIL line each.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "biaslens/biasindex.hpp"
#include "biaslens/chunking.hpp"
#include "biaslens/classify.hpp"
#include "biaslens/ingest.hpp"
#include "biaslens/label.hpp"
#include "biaslens/ngram.hpp"
#include "biaslens/sentiment.hpp"
#include "fixture_server.hpp"
#include "testutil.hpp"

namespace fs = std::filesystem;
using namespace biaslens;

namespace {

struct CheckFailure {
  std::string message;
};

void expect(bool condition, const std::string& message) {
  if (!condition) throw CheckFailure{message};
}

using Clock = std::chrono::steady_clock;

int g_failures = 0;

void criterion(const std::string& name, double time_limit_seconds,
               const std::function<void()>& body) {
  const auto t0 = Clock::now();
  std::string failure;
  try {
    body();
  } catch (const CheckFailure& f) {
    failure = f.message;
  } catch (const std::exception& e) {
    failure = std::string("exception: ") + e.what();
  }
  const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
  if (failure.empty() && time_limit_seconds > 0 && elapsed > time_limit_seconds) {
    failure = "exceeded time limit (" + std::to_string(elapsed) + "s > " +
              std::to_string(time_limit_seconds) + "s)";
  }
  if (failure.empty()) {
    std::printf("PASS: %s (%.2fs)\n", name.c_str(), elapsed);
  } else {
    std::printf("FAIL: %s: %s\n", name.c_str(), failure.c_str());
    ++g_failures;
  }
  std::fflush(stdout);
}

// --- independent oracles ---------------------------------------------------

std::vector<std::pair<std::size_t, std::size_t>> chunk_oracle(std::size_t n, std::size_t w,
                                                              std::size_t s) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;  // (offset, end)
  if (n == 0) return spans;
  for (std::size_t k = 0;; ++k) {
    const std::size_t offset = k * s;
    const std::size_t end = std::min(offset + w, n);
    spans.emplace_back(offset, end);
    if (end == n) break;
  }
  return spans;
}

PoliticalLabel vote_oracle(const std::vector<PoliticalLabel>& labels) {
  std::map<PoliticalLabel, int> counts;
  for (PoliticalLabel l : labels) ++counts[l];
  int best = 0;
  for (const auto& [l, c] : counts) best = std::max(best, c);
  std::vector<PoliticalLabel> winners;
  for (const auto& [l, c] : counts)
    if (c == best) winners.push_back(l);
  return winners.size() == 1 ? winners[0] : PoliticalLabel::Centre;
}

// ---------------------------------------------------------------------------

void check_chunking_oracle() {
  std::mt19937 rng(20260809);
  std::uniform_int_distribution<std::size_t> n_dist(0, 5000);
  std::uniform_int_distribution<std::size_t> w_dist(1, 1024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = n_dist(rng);
    const std::size_t w = w_dist(rng);
    std::uniform_int_distribution<std::size_t> s_dist(1, w);
    const std::size_t s = s_dist(rng);
    const auto got = chunk(n, ChunkingConfig{w, s});
    const auto want = chunk_oracle(n, w, s);
    expect(got.size() == want.size(), "window count mismatch");
    for (std::size_t i = 0; i < got.size(); ++i) {
      expect(got[i].offset == want[i].first && got[i].end() == want[i].second,
             "window bounds mismatch");
    }
    // coverage: every token index in >= 1 window
    std::size_t covered_up_to = 0;
    for (const ChunkSpan& span : got) {
      expect(span.offset <= covered_up_to, "coverage gap before window");
      covered_up_to = std::max(covered_up_to, span.end());
    }
    expect(covered_up_to == n, "coverage does not reach n");
    // overlap of consecutive windows is w - s except possibly the final pair
    for (std::size_t i = 0; i + 2 < got.size(); ++i) {
      expect(got[i].end() - got[i + 1].offset == w - s, "interior overlap wrong");
    }
    if (got.size() >= 2) {
      const auto& prev = got[got.size() - 2];
      const auto& last = got[got.size() - 1];
      expect(last.offset < prev.end() || prev.end() == last.offset,
             "final windows disjoint beyond stride rule");
    }
  }
}

void check_vote_oracle() {
  // all label sequences of length 1..8 over three labels (3^8 at the top)
  for (std::size_t len = 1; len <= 8; ++len) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < len; ++i) total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
      std::vector<PoliticalLabel> labels;
      std::size_t c = code;
      for (std::size_t i = 0; i < len; ++i) {
        labels.push_back(kAllLabels[c % 3]);
        c /= 3;
      }
      expect(vote(labels) == vote_oracle(labels), "vote disagrees with counting oracle");
    }
  }
  // explicit Centre tie rule spot checks
  expect(vote({PoliticalLabel::Left, PoliticalLabel::Right}) == PoliticalLabel::Centre,
         "two-way tie must resolve to Centre");
  expect(vote({PoliticalLabel::Left, PoliticalLabel::Centre, PoliticalLabel::Right}) ==
             PoliticalLabel::Centre,
         "three-way tie must resolve to Centre");
}

void check_ngram_oracle() {
  std::mt19937 rng(7);
  StopwordConfig stop = StopwordConfig::defaults();
  Corpus corpus;
  std::uniform_int_distribution<std::size_t> words(1, 120);
  for (int i = 0; i < 100; ++i) {
    corpus.articles.push_back(testutil::make_article(
        "https://e.org/doc/" + std::to_string(i), testutil::random_words(rng, words(rng))));
  }
  for (std::size_t n : {std::size_t(2), std::size_t(3)}) {
    // per-document count = max(0, len - n + 1) on the filtered sequence
    std::map<std::string, std::size_t> counts;
    std::size_t total = 0;
    for (const Article& a : corpus.articles) {
      const TokenSequence filtered = filter_tokens(tokenize(a.content), stop);
      const auto grams = extract_ngrams(filtered, n);
      const std::size_t want =
          filtered.size() >= n ? filtered.size() - n + 1 : std::size_t(0);
      expect(grams.size() == want, "per-document n-gram count wrong");
      for (const std::string& g : grams) {
        ++counts[g];
        ++total;
      }
    }
    // brute-force count-and-sort
    std::vector<NgramRow> want_rows;
    for (const auto& [g, c] : counts)
      want_rows.push_back({g, c, double(c) / double(total) * 10000.0});
    std::sort(want_rows.begin(), want_rows.end(), [](const NgramRow& a, const NgramRow& b) {
      if (a.count != b.count) return a.count > b.count;
      return a.ngram < b.ngram;
    });
    if (want_rows.size() > 20) want_rows.resize(20);
    const auto got_rows = top_k(corpus, n, 20, stop);
    expect(got_rows.size() == want_rows.size(), "table length mismatch");
    for (std::size_t i = 0; i < got_rows.size(); ++i) {
      expect(got_rows[i].ngram == want_rows[i].ngram, "rank order mismatch");
      expect(got_rows[i].count == want_rows[i].count, "count mismatch");
      expect(std::abs(got_rows[i].per_10k - want_rows[i].per_10k) < 1e-9,
             "per_10k mismatch");
    }
  }
}

void check_score_identity() {
  std::mt19937 rng(99);
  std::uniform_int_distribution<std::size_t> len(1, 50);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = len(rng);
    std::vector<PoliticalLabel> labels;
    std::size_t left = 0, right = 0;
    for (std::size_t i = 0; i < n; ++i) {
      labels.push_back(testutil::random_label(rng));
      if (labels.back() == PoliticalLabel::Left) ++left;
      if (labels.back() == PoliticalLabel::Right) ++right;
    }
    const double p_right = double(right) / double(n);
    const double p_left = double(left) / double(n);
    expect(avg_score(labels) == p_right - p_left, "identity not exact");
  }
  // Table 4 "RU During-war" BERT row: L=0.320, R=0.440 -> 0.12
  PeriodSummary row;
  row.proportions[PoliticalLabel::Left] = 0.320;
  row.proportions[PoliticalLabel::Centre] = 0.240;
  row.proportions[PoliticalLabel::Right] = 0.440;
  expect(std::abs(rl_difference(row) - 0.12) <= 1e-12, "paper row difference != 0.12");
}

void check_paper_consistency() {
  struct Row {
    double centre, left, right;
  };
  // Row triples transcribed from the two bias-summary tables
  // (Guardian then BBC; IP/RU x During/Pre x BERT/DeepSeek/Gemini).
  const Row rows[] = {
      {0.212, 0.333, 0.455}, {0.200, 0.686, 0.114}, {0.622, 0.329, 0.049},
      {0.196, 0.484, 0.320}, {0.266, 0.585, 0.149}, {0.604, 0.293, 0.102},
      {0.240, 0.320, 0.440}, {0.429, 0.487, 0.084}, {0.870, 0.097, 0.033},
      {0.226, 0.371, 0.403}, {0.413, 0.488, 0.099}, {0.798, 0.156, 0.046},
      {0.422, 0.116, 0.462}, {0.345, 0.490, 0.165}, {0.839, 0.115, 0.045},
      {0.407, 0.192, 0.401}, {0.353, 0.407, 0.240}, {0.808, 0.108, 0.084},
      {0.420, 0.160, 0.420}, {0.537, 0.330, 0.132}, {0.893, 0.058, 0.049},
      {0.357, 0.193, 0.450}, {0.640, 0.222, 0.138}, {0.890, 0.069, 0.040},
  };
  int index = 0;
  for (const Row& row : rows) {
    const double sum = row.centre + row.left + row.right;
    expect(std::abs(sum - 1.0) <= 0.012,
           "row " + std::to_string(index) + " sums to " + std::to_string(sum));
    ++index;
  }
  // spot value from the BBC table: Gemini RU Pre-war sums to 0.999
  expect(std::abs((0.890 + 0.069 + 0.040) - 0.999) < 1e-12, "transcription changed");
}

void check_e2e_offline() {
  const std::string cli = BIASLENS_CLI_PATH;
  const std::string config = std::string(BIASLENS_DATA_DIR) + "/offline_config.json";
  testutil::TempDir a("acc_e2e_a"), b("acc_e2e_b");
  auto run = [&](const std::string& out) {
    const std::string cmd = cli + " --config " + config + " --out " + out +
                            " --offline --deterministic run-all >/dev/null 2>&1";
    const auto t0 = Clock::now();
    const int status = std::system(cmd.c_str());
    const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
    expect(WIFEXITED(status) && WEXITSTATUS(status) == 0, "run-all failed");
    expect(elapsed < 10.0, "run-all took " + std::to_string(elapsed) + "s");
  };
  run(a.path().string());
  run(b.path().string());

  // full output tree present: tables, series, charts, manifest
  for (const char* name :
       {"russia-ukraine_guardian_bert-sim_summary.csv",
        "russia-ukraine_guardian_bert-sim_weekly-index.csv",
        "russia-ukraine_guardian_bert-sim_monthly-diff.csv",
        "russia-ukraine_guardian_bert-sim_emotion.csv",
        "russia-ukraine_guardian_ngram_bigram.csv",
        "israel-hamas_bbc_gemini-sim_summary.csv", "israel-hamas_bbc_weekly-index.svg",
        "russia-ukraine_guardian_proportions.svg", "run.json"}) {
    expect(fs::exists(a.path() / name), std::string("missing output ") + name);
  }

  // two runs byte-identical over the output tree (cache ledgers are internal
  // state whose append order is scheduling-dependent)
  std::map<std::string, std::string> tree_a, tree_b;
  auto snapshot = [](const fs::path& dir, std::map<std::string, std::string>& out) {
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      const std::string name = fs::relative(entry.path(), dir).string();
      if (name == "cache.jsonl" || name == "sentiment_cache.jsonl") continue;
      std::ifstream in(entry.path(), std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      out[name] = ss.str();
    }
  };
  snapshot(a.path(), tree_a);
  snapshot(b.path(), tree_b);
  expect(tree_a.size() == tree_b.size(), "output trees differ in file count");
  expect(tree_a.size() >= 40, "output tree unexpectedly small");
  for (const auto& [name, content] : tree_a) {
    expect(tree_b.count(name) == 1, "second run missing " + name);
    expect(content == tree_b.at(name), "byte difference in " + name);
  }
}

void check_ingest_resilience() {
  using nlohmann::json;
  auto page_json = [](int page, int pages, int per_page) {
    json results = json::array();
    for (int i = 0; i < per_page; ++i) {
      const std::string id = std::to_string(page) + "-" + std::to_string(i);
      results.push_back(json{{"webUrl", "https://example.org/a" + id},
                             {"webTitle", "T" + id},
                             {"webPublicationDate", "2022-03-01T00:00:00Z"},
                             {"fields", {{"bodyText", "ukraine body " + id}}}});
    }
    return json{{"response", {{"pages", pages}, {"results", results}}}};
  };

  RatePolicy policy;
  policy.max_concurrent = 3;
  policy.min_interval_ms = 0;
  policy.max_retries = 3;
  policy.base_backoff_ms = 1;
  policy.max_backoff_ms = 4;
  const TagQuery query{{"world/ukraine"}, Date(2022, 3, 1), Date(2022, 3, 31)};
  const int pages = 8;

  auto fetch = [&](bool inject_failures, int* peak, RetryLog* log) {
    testutil::FixtureServer fx;
    std::atomic<int> page1_hits{0}, page2_hits{0};
    fx.server().Get("/search", [&](const httplib::Request& req, httplib::Response& res) {
      std::this_thread::sleep_for(std::chrono::milliseconds(3));
      const int page = std::stoi(req.get_param_value("page"));
      if (inject_failures) {
        if (page == 1 && page1_hits.fetch_add(1) < 2) {
          res.status = 429;  // two 429s
          return;
        }
        if (page == 2 && page2_hits.fetch_add(1) < 1) {
          res.status = 500;  // one 500
          return;
        }
      }
      res.set_content(page_json(page, pages, 2).dump(), "application/json");
    });
    fx.start();
    HttplibTransport transport;
    RateLimiter limiter(policy);
    auto records =
        fetch_by_tags(transport, fx.base_url() + "/search", query, limiter, "key", log);
    if (peak) *peak = fx.peak_concurrency();
    fx.stop();
    return records;
  };

  RetryLog log;
  int peak = 0;
  auto with_failures = fetch(true, &peak, &log);
  auto clean_run = fetch(false, nullptr, nullptr);
  expect(log.retries == 3, "expected exactly 3 logged retries, got " +
                               std::to_string(log.retries));
  expect(with_failures.size() == clean_run.size(), "record count differs");
  for (std::size_t i = 0; i < clean_run.size(); ++i) {
    expect(with_failures[i].url == clean_run[i].url, "record order differs");
    expect(with_failures[i].body == clean_run[i].body, "record body differs");
  }
  expect(peak <= policy.max_concurrent,
         "in-flight peak " + std::to_string(peak) + " exceeds max_concurrent");
  expect(peak >= 2, "fixture never exercised concurrency");
}

void check_partition_property() {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    Corpus corpus = testutil::random_corpus(rng, 30);
    StudyWindow window;
    auto [pre, during] = partition_by_period(corpus, window);
    expect(pre.articles.size() + during.articles.size() == corpus.articles.size(),
           "partition not exhaustive");
    for (const Article& a : pre.articles)
      expect(a.published_date < window.war_start_date, "pre-war article after boundary");
    for (const Article& a : during.articles)
      expect(a.published_date >= window.war_start_date, "during-war article before boundary");
  }
  // boundary day lands in during-war
  StudyWindow ru;
  ru.war_start_date = Date(2022, 2, 24);
  Corpus boundary;
  boundary.articles = {testutil::make_article("b", "x", Date(2022, 2, 24))};
  auto [pre_b, during_b] = partition_by_period(boundary, ru);
  expect(pre_b.articles.empty() && during_b.articles.size() == 1,
         "boundary day not in during-war");
  // the configured war starts bucket the named event months correctly
  expect(period_of(Date(2022, 2, 23), ru) == Period::PreWar, "2022-02-23 should be pre-war");
  expect(period_of(Date(2022, 2, 24), ru) == Period::DuringWar, "2022-02-24 should be during");
  expect(period_of(Date(2022, 3, 1), ru) == Period::DuringWar, "March 2022 should be during");
  StudyWindow ih;
  ih.war_start_date = Date(2023, 10, 7);
  expect(period_of(Date(2023, 10, 6), ih) == Period::PreWar, "2023-10-06 should be pre-war");
  expect(period_of(Date(2023, 10, 7), ih) == Period::DuringWar, "2023-10-07 should be during");
  expect(period_of(Date(2023, 11, 15), ih) == Period::DuringWar, "Nov 2023 should be during");
}

void check_sentiment_simplex() {
  std::mt19937 rng(17);
  std::map<Conflict, StudyWindow> windows{{Conflict::RussiaUkraine, StudyWindow{}}};
  for (int trial = 0; trial < 1000; ++trial) {
    std::uniform_int_distribution<std::size_t> count(1, 25);
    const std::size_t n = count(rng);
    Corpus corpus;
    std::vector<SentimentRecord> sentiments;
    std::vector<ClassificationRecord> leanings;
    std::uniform_real_distribution<double> u(0.001, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string url = "u" + std::to_string(i);
      corpus.articles.push_back(testutil::make_article(url, "x", testutil::random_date(rng)));
      EmotionDistribution d;
      double total = 0;
      for (double& p : d.probs) {
        p = u(rng);
        total += p;
      }
      for (double& p : d.probs) p /= total;
      sentiments.push_back({url, d, d.dominant()});
      ClassificationRecord r;
      r.url = url;
      r.model_id = "m";
      r.label = testutil::random_label(rng);
      r.run_labels = {r.label};
      leanings.push_back(r);
    }
    EmotionAggregate agg = aggregate(sentiments, leanings, corpus, windows,
                                     {GroupField::Period, GroupField::Leaning});
    for (const EmotionGroupRow& row : agg.rows) {
      double sum = 0;
      for (Emotion e : kAllEmotions) sum += row.mean[e];
      expect(std::abs(sum - 1.0) <= 1e-6, "group mean leaves the simplex");
    }
    // order invariance within 1e-12
    std::shuffle(sentiments.begin(), sentiments.end(), rng);
    EmotionAggregate again = aggregate(sentiments, leanings, corpus, windows,
                                       {GroupField::Period, GroupField::Leaning});
    expect(again.rows.size() == agg.rows.size(), "group set changed under permutation");
    for (std::size_t i = 0; i < agg.rows.size(); ++i) {
      for (Emotion e : kAllEmotions)
        expect(std::abs(again.rows[i].mean[e] - agg.rows[i].mean[e]) <= 1e-12,
               "order dependence above 1e-12");
    }
    // partition-then-merge (n-weighted) reproduces the global mean
    EmotionAggregate global = aggregate(sentiments, leanings, corpus, windows, {});
    EmotionDistribution merged;
    double total_n = 0;
    for (const EmotionGroupRow& row : agg.rows) {
      for (Emotion e : kAllEmotions) merged[e] += row.mean[e] * double(row.n);
      total_n += double(row.n);
    }
    for (Emotion e : kAllEmotions) {
      merged[e] /= total_n;
      expect(std::abs(merged[e] - global.rows[0].mean[e]) <= 1e-12,
             "partition-merge deviates above 1e-12");
    }
  }
}

void check_cache_idempotence() {
  std::mt19937 rng(23);
  testutil::TempDir dir("acc_cache");
  Corpus corpus = testutil::random_corpus(rng, 15);
  auto limiter = std::make_shared<RateLimiter>(RatePolicy{}, std::make_shared<ManualClock>());
  auto chunk_backend = std::make_shared<SimChunkBackend>("chunky", 1);
  auto completion_backend = std::make_shared<SimCompletionBackend>("prompty", 2);
  PoliticalModel chunk_model;
  chunk_model.id = "chunky";
  chunk_model.strategy = Strategy::ChunkVote;
  chunk_model.chunk_backend = chunk_backend;
  chunk_model.limiter = limiter;
  PoliticalModel prompt_model;
  prompt_model.id = "prompty";
  prompt_model.strategy = Strategy::Prompt;
  prompt_model.runs = 3;
  prompt_model.completion_backend = completion_backend;
  prompt_model.limiter = limiter;
  const std::vector<PoliticalModel> models = {chunk_model, prompt_model};

  const std::string ledger = dir.file("cache.jsonl");
  std::vector<ClassificationRecord> first_records;
  {
    ClassificationCache cache(ledger);
    ClassifyRunResult result = classify_corpus(corpus, models, cache, 4);
    expect(result.records.size() == corpus.size() * 2, "missing records");
    first_records = result.records;
  }
  const std::size_t chunk_calls = chunk_backend->calls();
  const std::size_t prompt_calls = completion_backend->calls();
  expect(chunk_calls > 0 && prompt_calls > 0, "first run made no backend calls");
  {
    ClassificationCache cache(ledger);
    ClassifyRunResult result = classify_corpus(corpus, models, cache, 4);
    expect(chunk_backend->calls() == chunk_calls, "chunk backend called on warm cache");
    expect(completion_backend->calls() == prompt_calls,
           "completion backend called on warm cache");
    expect(result.cache_hits == corpus.size() * 2, "expected all-cache run");
    expect(result.records.size() == first_records.size(), "record count changed");
    for (std::size_t i = 0; i < first_records.size(); ++i)
      expect(result.records[i] == first_records[i], "records differ on warm re-run");
  }
}

}  // namespace

int main() {
  std::printf("biaslens acceptance suite\n");
  criterion("chunking-oracle (1000 random n/w/s triples)", 5.0, check_chunking_oracle);
  criterion("vote-oracle (exhaustive 3^8 multisets, Centre tie rule)", 1.0, check_vote_oracle);
  criterion("ngram-oracle (100 random docs, n in {2,3})", 5.0, check_ngram_oracle);
  criterion("score-identity (avg_score == P_R - P_L; paper row 0.12)", 0, check_score_identity);
  criterion("paper-consistency (Tables 4-5 rows sum to 1 +/- 0.012)", 0,
            check_paper_consistency);
  criterion("e2e-offline (run-all on bundled corpus, byte-identical twice, <10s)", 0,
            check_e2e_offline);
  criterion("ingest-resilience (two 429s + one 500, bounded concurrency)", 0,
            check_ingest_resilience);
  criterion("partition-property (exhaustive split, boundary day, event months)", 0,
            check_partition_property);
  criterion("sentiment-simplex (1000 random record sets)", 0, check_sentiment_simplex);
  criterion("cache-idempotence (second classify run makes zero backend calls)", 0,
            check_cache_idempotence);
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
