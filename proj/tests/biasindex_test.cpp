#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "biaslens/biasindex.hpp"
#include "testutil.hpp"

using namespace biaslens;

namespace {

// Paper bias-summary tables, transcribed row triples (Centre, Left, Right)
// per (conflict-period metric, model). Used as rounding-consistency fixtures.
struct PaperRow {
  const char* outlet;
  const char* metric;
  const char* model;
  double centre, left, right;
};

const PaperRow kPaperSummaryRows[] = {
    {"Guardian", "IP During-war", "BERT", 0.212, 0.333, 0.455},
    {"Guardian", "IP During-war", "DeepSeek", 0.200, 0.686, 0.114},
    {"Guardian", "IP During-war", "Gemini", 0.622, 0.329, 0.049},
    {"Guardian", "IP Pre-war", "BERT", 0.196, 0.484, 0.320},
    {"Guardian", "IP Pre-war", "DeepSeek", 0.266, 0.585, 0.149},
    {"Guardian", "IP Pre-war", "Gemini", 0.604, 0.293, 0.102},
    {"Guardian", "RU During-war", "BERT", 0.240, 0.320, 0.440},
    {"Guardian", "RU During-war", "DeepSeek", 0.429, 0.487, 0.084},
    {"Guardian", "RU During-war", "Gemini", 0.870, 0.097, 0.033},
    {"Guardian", "RU Pre-war", "BERT", 0.226, 0.371, 0.403},
    {"Guardian", "RU Pre-war", "DeepSeek", 0.413, 0.488, 0.099},
    {"Guardian", "RU Pre-war", "Gemini", 0.798, 0.156, 0.046},
    {"BBC", "IP During-war", "BERT", 0.422, 0.116, 0.462},
    {"BBC", "IP During-war", "DeepSeek", 0.345, 0.490, 0.165},
    {"BBC", "IP During-war", "Gemini", 0.839, 0.115, 0.045},
    {"BBC", "IP Pre-war", "BERT", 0.407, 0.192, 0.401},
    {"BBC", "IP Pre-war", "DeepSeek", 0.353, 0.407, 0.240},
    {"BBC", "IP Pre-war", "Gemini", 0.808, 0.108, 0.084},
    {"BBC", "RU During-war", "BERT", 0.420, 0.160, 0.420},
    {"BBC", "RU During-war", "DeepSeek", 0.537, 0.330, 0.132},
    {"BBC", "RU During-war", "Gemini", 0.893, 0.058, 0.049},
    {"BBC", "RU Pre-war", "BERT", 0.357, 0.193, 0.450},
    {"BBC", "RU Pre-war", "DeepSeek", 0.640, 0.222, 0.138},
    {"BBC", "RU Pre-war", "Gemini", 0.890, 0.069, 0.040},
};

PeriodSummary summary_from(double left, double centre, double right, std::size_t n = 1000) {
  PeriodSummary s;
  s.model_id = "m";
  s.n_articles = n;
  s.proportions[PoliticalLabel::Left] = left;
  s.proportions[PoliticalLabel::Centre] = centre;
  s.proportions[PoliticalLabel::Right] = right;
  return s;
}

std::vector<PoliticalLabel> random_labels(std::mt19937& rng, std::size_t max_len = 40) {
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::vector<PoliticalLabel> labels;
  const std::size_t n = len(rng);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(testutil::random_label(rng));
  return labels;
}

}  // namespace

TEST_CASE("encode is the fixed mapping") {
  REQUIRE(encode(PoliticalLabel::Left) == -1);
  REQUIRE(encode(PoliticalLabel::Centre) == 0);
  REQUIRE(encode(PoliticalLabel::Right) == 1);
}

TEST_CASE("avg_score stated examples") {
  using enum PoliticalLabel;
  REQUIRE(avg_score({Left, Left, Centre, Right}) == -0.25);
  REQUIRE(avg_score({Centre, Centre, Centre}) == 0.0);
  REQUIRE_THROWS_AS(avg_score(std::vector<PoliticalLabel>{}), Error);
}

TEST_CASE("avg_score equals rl_difference exactly on random multisets") {
  std::mt19937 rng(101);
  for (int i = 0; i < 1000; ++i) {
    auto labels = random_labels(rng);
    std::size_t counts[3] = {0, 0, 0};
    for (PoliticalLabel l : labels) ++counts[int(l)];
    PeriodSummary s = summary_from(double(counts[0]) / double(labels.size()),
                                   double(counts[1]) / double(labels.size()),
                                   double(counts[2]) / double(labels.size()), labels.size());
    REQUIRE(avg_score(labels) == rl_difference(s));  // bit-exact
  }
}

TEST_CASE("paper identity: RU During-war BERT row gives 0.12") {
  PeriodSummary s = summary_from(0.320, 0.240, 0.440);
  REQUIRE(rl_difference(s) == Catch::Approx(0.12).margin(1e-12));
}

TEST_CASE("paper rl examples") {
  REQUIRE(rl_difference(summary_from(0.371, 0.226, 0.403)) == Catch::Approx(0.032).margin(1e-12));
  REQUIRE(rl_difference(summary_from(0.3, 0.4, 0.3)) == 0.0);
  REQUIRE(rl_difference(summary_from(1.0, 0.0, 0.0)) == -1.0);
}

TEST_CASE("paper summary rows sum to 1 within rounding tolerance 0.012") {
  for (const PaperRow& row : kPaperSummaryRows) {
    const double sum = row.centre + row.left + row.right;
    INFO(row.outlet << " " << row.metric << " " << row.model);
    REQUIRE(std::abs(sum - 1.0) <= 0.012);
  }
}

namespace {

struct Labeled {
  Corpus corpus;
  std::vector<ClassificationRecord> records;
};

Labeled labeled_corpus(std::mt19937& rng, std::size_t n, const std::string& model = "m") {
  Labeled out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string url = "https://e.org/" + std::to_string(i);
    out.corpus.articles.push_back(
        testutil::make_article(url, "body", testutil::random_date(rng)));
    ClassificationRecord r;
    r.url = url;
    r.model_id = model;
    r.label = testutil::random_label(rng);
    r.run_labels = {r.label};
    out.records.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("period_summary counts proportions per cell") {
  Corpus corpus;
  corpus.articles = {
      testutil::make_article("u1", "x", Date(2022, 3, 1)),
      testutil::make_article("u2", "x", Date(2022, 3, 2)),
      testutil::make_article("u3", "x", Date(2022, 3, 3)),
      testutil::make_article("u4", "x", Date(2022, 3, 4)),
  };
  std::vector<ClassificationRecord> records;
  const PoliticalLabel labels[] = {PoliticalLabel::Left, PoliticalLabel::Left,
                                   PoliticalLabel::Centre, PoliticalLabel::Right};
  for (int i = 0; i < 4; ++i) {
    ClassificationRecord r;
    r.url = "u" + std::to_string(i + 1);
    r.model_id = "m";
    r.label = labels[i];
    r.run_labels = {labels[i]};
    records.push_back(r);
  }
  std::map<Conflict, StudyWindow> windows{{Conflict::RussiaUkraine, StudyWindow{}}};
  auto summaries = period_summary(records, corpus, windows);
  REQUIRE(summaries.size() == 1);
  const PeriodSummary& s = summaries[0];
  REQUIRE(s.period == Period::DuringWar);
  REQUIRE(s.n_articles == 4);
  REQUIRE(s.proportion(PoliticalLabel::Left) == 0.5);
  REQUIRE(s.proportion(PoliticalLabel::Centre) == 0.25);
  REQUIRE(s.proportion(PoliticalLabel::Right) == 0.25);
  double sum = 0;
  for (PoliticalLabel l : kAllLabels) sum += s.proportion(l);
  REQUIRE(std::abs(sum - 1.0) < 1e-9);
}

TEST_CASE("period_summary: all-centre group and dangling record") {
  Corpus corpus;
  corpus.articles = {testutil::make_article("u1", "x", Date(2021, 1, 1))};
  std::vector<ClassificationRecord> records;
  ClassificationRecord r;
  r.url = "u1";
  r.model_id = "m";
  r.label = PoliticalLabel::Centre;
  r.run_labels = {r.label};
  records.push_back(r);
  std::map<Conflict, StudyWindow> windows{{Conflict::RussiaUkraine, StudyWindow{}}};
  auto summaries = period_summary(records, corpus, windows);
  REQUIRE(summaries.size() == 1);
  REQUIRE(summaries[0].period == Period::PreWar);
  REQUIRE(summaries[0].proportion(PoliticalLabel::Centre) == 1.0);

  records[0].url = "unknown";
  REQUIRE_THROWS_AS(period_summary(records, corpus, windows), Error);
}

TEST_CASE("proportions sum to 1 within 1e-9 on random data") {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    Labeled data = labeled_corpus(rng, 50);
    std::map<Conflict, StudyWindow> windows{{Conflict::RussiaUkraine, StudyWindow{}}};
    auto summaries = period_summary(data.records, data.corpus, windows);
    for (const PeriodSummary& s : summaries) {
      double sum = 0;
      for (PoliticalLabel l : kAllLabels) sum += s.proportion(l);
      REQUIRE(std::abs(sum - 1.0) < 1e-9);
      REQUIRE(s.n_articles >= 1);
    }
  }
}

TEST_CASE("grouped n-weighted recombination reproduces the global avg_score") {
  std::mt19937 rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    auto labels = random_labels(rng, 60);
    const double global = avg_score(labels);
    // split by arbitrary grouping
    std::vector<PoliticalLabel> a, b;
    for (PoliticalLabel l : labels) (rng() % 2 ? a : b).push_back(l);
    double recombined = 0;
    double total = double(labels.size());
    if (!a.empty()) recombined += avg_score(a) * double(a.size()) / total;
    if (!b.empty()) recombined += avg_score(b) * double(b.size()) / total;
    REQUIRE(std::abs(recombined - global) < 1e-12);
  }
}

TEST_CASE("excluding Centre rescales but never flips the sign") {
  std::mt19937 rng(47);
  for (int trial = 0; trial < 300; ++trial) {
    auto labels = random_labels(rng, 30);
    std::vector<PoliticalLabel> reduced;
    for (PoliticalLabel l : labels)
      if (l != PoliticalLabel::Centre) reduced.push_back(l);
    if (reduced.empty()) continue;
    const double full = avg_score(labels);
    const double wings_only = avg_score(reduced);
    if (full > 0) REQUIRE(wings_only > 0);
    if (full < 0) REQUIRE(wings_only < 0);
    if (full == 0.0) REQUIRE(wings_only == 0.0);
  }
}

TEST_CASE("time_series: weekly buckets date by their Monday") {
  Corpus corpus;
  // 2022-03-02 is a Wednesday; its week Monday is 2022-02-28
  corpus.articles = {testutil::make_article("u1", "x", Date(2022, 3, 2)),
                     testutil::make_article("u2", "x", Date(2022, 3, 3))};
  std::vector<ClassificationRecord> records;
  ClassificationRecord r;
  r.model_id = "m";
  r.url = "u1";
  r.label = PoliticalLabel::Left;
  r.run_labels = {r.label};
  records.push_back(r);
  r.url = "u2";
  r.label = PoliticalLabel::Centre;
  records.push_back(r);
  BiasTimeSeries series = time_series(records, corpus, Bucket::Weekly);
  REQUIRE(series.points.size() == 1);
  REQUIRE(series.points[0].period_start == Date(2022, 2, 28));
  REQUIRE(series.points[0].mean_score == -0.5);
  REQUIRE(series.points[0].n == 2);
}

TEST_CASE("time_series: empty weeks are omitted, points strictly increasing") {
  Corpus corpus;
  corpus.articles = {testutil::make_article("u1", "x", Date(2022, 1, 3)),
                     testutil::make_article("u2", "x", Date(2022, 1, 31))};  // 4 weeks later
  std::vector<ClassificationRecord> records;
  for (const Article& a : corpus.articles) {
    ClassificationRecord r;
    r.url = a.url;
    r.model_id = "m";
    r.label = PoliticalLabel::Right;
    r.run_labels = {r.label};
    records.push_back(r);
  }
  BiasTimeSeries series = time_series(records, corpus, Bucket::Weekly);
  REQUIRE(series.points.size() == 2);  // gap weeks absent
  REQUIRE(series.points[0].period_start < series.points[1].period_start);
  for (const TimePoint& p : series.points) {
    REQUIRE(p.mean_score >= -1.0);
    REQUIRE(p.mean_score <= 1.0);
  }
}

TEST_CASE("time_series: sign change at an event boundary in a constructed corpus") {
  Corpus corpus;
  std::vector<ClassificationRecord> records;
  const Date event(2022, 2, 24);
  // Right-leaning coverage before the event, Left-leaning after
  for (int i = 0; i < 21; ++i) {
    const Date d = event.plus_days(i - 21);  // strictly before
    const std::string url = "pre" + std::to_string(i);
    corpus.articles.push_back(testutil::make_article(url, "x", d));
    ClassificationRecord r;
    r.url = url;
    r.model_id = "m";
    r.label = PoliticalLabel::Right;
    r.run_labels = {r.label};
    records.push_back(r);
  }
  for (int i = 0; i < 21; ++i) {
    const Date d = event.plus_days(i);
    const std::string url = "post" + std::to_string(i);
    corpus.articles.push_back(testutil::make_article(url, "x", d));
    ClassificationRecord r;
    r.url = url;
    r.model_id = "m";
    r.label = PoliticalLabel::Left;
    r.run_labels = {r.label};
    records.push_back(r);
  }
  BiasTimeSeries series =
      time_series(records, corpus, Bucket::Weekly, {{event, "invasion"}});
  REQUIRE(series.events.size() == 1);
  bool saw_positive_before = false, saw_negative_after = false;
  for (const TimePoint& p : series.points) {
    if (p.period_start < event.week_monday() && p.mean_score > 0) saw_positive_before = true;
    if (p.period_start > event && p.mean_score < 0) saw_negative_after = true;
  }
  REQUIRE(saw_positive_before);
  REQUIRE(saw_negative_after);
}

TEST_CASE("events CSV round-trip and series CSV round-trip") {
  testutil::TempDir dir("series");
  {
    std::ofstream out(dir.file("events.csv"));
    out << "date,caption\n2022-02-24,\"Russia's invasion of Ukraine\"\n"
        << "2023-10-07,Hamas attack\n";
  }
  auto events = load_events(dir.file("events.csv"));
  REQUIRE(events.size() == 2);
  REQUIRE(events[0].date == Date(2022, 2, 24));
  REQUIRE(events[0].caption == "Russia's invasion of Ukraine");

  std::mt19937 rng(3);
  Labeled data = labeled_corpus(rng, 30);
  BiasTimeSeries series = time_series(data.records, data.corpus, Bucket::Weekly, events);
  const std::string path = dir.file("series.csv");
  write_series_csv(series, path);
  BiasTimeSeries loaded = read_series_csv(path);
  REQUIRE(loaded.points.size() == series.points.size());
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    REQUIRE(loaded.points[i].period_start == series.points[i].period_start);
    REQUIRE(loaded.points[i].mean_score == series.points[i].mean_score);  // exact round-trip
    REQUIRE(loaded.points[i].n == series.points[i].n);
  }
}

TEST_CASE("summary CSV has the metric,model,value layout and re-parses") {
  testutil::TempDir dir("sum");
  std::mt19937 rng(4);
  Labeled data = labeled_corpus(rng, 40, "BERT");
  std::map<Conflict, StudyWindow> windows{{Conflict::RussiaUkraine, StudyWindow{}}};
  auto summaries = period_summary(data.records, data.corpus, windows);
  const std::string path = dir.file("summary.csv");
  write_summary_csv(summaries, path);
  auto rows = read_summary_csv(path);
  REQUIRE(rows.size() == summaries.size() * 3);
  for (const auto& row : rows) {
    REQUIRE(row.model == "BERT");
    REQUIRE(row.metric.rfind("RU ", 0) == 0);
  }
  // values re-parse exactly
  for (const PeriodSummary& s : summaries) {
    for (PoliticalLabel l : kAllLabels) {
      const std::string metric = std::string(conflict_abbrev(s.conflict)) + " " +
                                 std::string(period_name(s.period)) + " " +
                                 std::string(label_name(l));
      bool found = false;
      for (const auto& row : rows)
        if (row.metric == metric) {
          REQUIRE(row.value == s.proportion(l));
          found = true;
        }
      REQUIRE(found);
    }
  }
}

TEST_CASE("war start configs bucket the named event months correctly") {
  StudyWindow ru;
  ru.war_start_date = Date(2022, 2, 24);
  REQUIRE(period_of(Date(2022, 2, 24), ru) == Period::DuringWar);
  REQUIRE(period_of(Date(2022, 2, 23), ru) == Period::PreWar);
  REQUIRE(period_of(Date(2022, 3, 15), ru) == Period::DuringWar);
  REQUIRE(period_of(Date(2022, 1, 31), ru) == Period::PreWar);

  StudyWindow ih;
  ih.war_start_date = Date(2023, 10, 7);
  REQUIRE(period_of(Date(2023, 10, 7), ih) == Period::DuringWar);
  REQUIRE(period_of(Date(2023, 10, 6), ih) == Period::PreWar);
  REQUIRE(period_of(Date(2023, 11, 1), ih) == Period::DuringWar);
  REQUIRE(period_of(Date(2023, 9, 30), ih) == Period::PreWar);
}
