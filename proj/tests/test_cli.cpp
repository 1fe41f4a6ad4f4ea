#include "doctest.h"

#include "dmind/analysis.hpp"
#include "dmind/cli.hpp"
#include "dmind/digest.hpp"
#include "dmind/dispatch.hpp"
#include "dmind/errors.hpp"
#include "dmind/probe_record.hpp"
#include "dmind/tmc.hpp"
#include "test_util.hpp"

using namespace dmind;

namespace {

int cli(std::vector<std::string> args, Backend* backend = nullptr) {
  std::vector<const char*> argv{"dmind"};
  for (const std::string& arg : args) argv.push_back(arg.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), backend);
}

// Two families: f* solved cheaply in every mode, s* solved only by Slow.
void write_scenario_questions(const std::filesystem::path& path, int per_family) {
  std::string lines;
  for (int i = 0; i < per_family; ++i) {
    nlohmann::json f{{"id", "f" + std::to_string(i)},
                     {"dataset", "scenario"},
                     {"question", "a sunrise question number " + std::to_string(i)},
                     {"task", "numeric"},
                     {"answer", "4"}};
    nlohmann::json s{{"id", "s" + std::to_string(i)},
                     {"dataset", "scenario"},
                     {"question", "a glacier puzzle number " + std::to_string(i)},
                     {"task", "numeric"},
                     {"answer", "9"}};
    lines += f.dump() + "\n" + s.dump() + "\n";
  }
  write_file(path, lines);
}

MockScript scenario_script(int per_family) {
  MockScript script;
  for (int i = 0; i < per_family; ++i) {
    const std::string f = "f" + std::to_string(i);
    const std::string s = "s" + std::to_string(i);
    script[{f, ThinkingMode::Fast}] = {"4", 1};
    script[{f, ThinkingMode::Normal}] = {"I think 4", 5};
    script[{f, ThinkingMode::Slow}] = {"Step by step... 4", 50};
    script[{s, ThinkingMode::Fast}] = {"7", 1};
    script[{s, ThinkingMode::Normal}] = {"maybe 8", 5};
    script[{s, ThinkingMode::Slow}] = {"careful analysis gives 9", 50};
  }
  return script;
}

}  // namespace

TEST_CASE("probe writes one record per (question, mode) with k runs each") {
  testutil::TempDir dir;
  const auto questions = dir.file("questions.jsonl");
  const auto log = dir.file("probe.jsonl");
  write_scenario_questions(questions, 1);  // 2 questions
  auto mock = make_mock_backend(scenario_script(1));

  CHECK(cli({"probe", questions.string(), "--out", log.string(), "--k", "2"},
            mock.get()) == kExitOk);

  auto records = load_probe_log(log);
  CHECK(records.size() == 6);  // 2 questions x 3 modes
  int runs = 0;
  for (const ProbeRecord& record : records) {
    runs += static_cast<int>(record.runs.size());
  }
  CHECK(runs == 12);  // x k=2
  CHECK(mock->call_count() == 12);
  CHECK(std::filesystem::exists(log.string() + ".manifest.json"));
}

TEST_CASE("probe rerun over an existing log makes zero new backend calls") {
  testutil::TempDir dir;
  const auto questions = dir.file("questions.jsonl");
  const auto log = dir.file("probe.jsonl");
  write_scenario_questions(questions, 1);
  auto mock = make_mock_backend(scenario_script(1));

  REQUIRE(cli({"probe", questions.string(), "--out", log.string(), "--k", "2"},
              mock.get()) == kExitOk);
  const int calls_after_first = mock->call_count();
  const std::string bytes_after_first = read_file(log);

  REQUIRE(cli({"probe", questions.string(), "--out", log.string(), "--k", "2"},
              mock.get()) == kExitOk);
  CHECK(mock->call_count() == calls_after_first);
  CHECK(read_file(log) == bytes_after_first);
}

TEST_CASE("probe aborts before any backend call on a malformed question line") {
  testutil::TempDir dir;
  const auto questions = dir.file("questions.jsonl");
  const auto log = dir.file("probe.jsonl");

  std::string lines;
  for (int i = 0; i < 6; ++i) {
    lines += nlohmann::json{{"id", "q" + std::to_string(i)},
                            {"dataset", "d"},
                            {"question", "text"},
                            {"task", "exact"},
                            {"answer", "x"}}
                 .dump() +
             "\n";
  }
  lines += "{broken json\n";
  write_file(questions, lines);

  auto mock = make_mock_backend(scenario_script(1));
  CHECK(cli({"probe", questions.string(), "--out", log.string()}, mock.get()) ==
        kExitParse);
  CHECK(mock->call_count() == 0);
  CHECK(!std::filesystem::exists(log));

  CHECK_THROWS_WITH_AS(load_questions(questions), doctest::Contains("line 7"),
                       ParseError);
}

TEST_CASE("exit codes distinguish config, parse, and contract failures") {
  testutil::TempDir dir;
  // Missing file -> config error.
  CHECK(cli({"build-tmc", "--log", dir.file("absent.jsonl").string(), "--out",
             dir.file("tmc.jsonl").string()}) == kExitConfig);
  // Unknown policy -> config error.
  const auto questions = dir.file("q.jsonl");
  write_scenario_questions(questions, 1);
  CHECK(cli({"eval", questions.string(), "--policy", "wat", "--out",
             dir.file("run.jsonl").string()}) == kExitConfig);
  // Corrupt model container -> contract error.
  const auto fake_model = dir.file("fake.dmr");
  write_file(fake_model, "XXXXnot a model");
  CHECK(cli({"eval", questions.string(), "--policy",
             "router:" + fake_model.string(), "--out",
             dir.file("run.jsonl").string()}) == kExitContract);
}

TEST_CASE("full scripted pipeline: probe, label, train, route, report") {
  testutil::TempDir dir;
  const int per_family = 3;
  const auto questions = dir.file("questions.jsonl");
  write_scenario_questions(questions, per_family);
  auto mock = make_mock_backend(scenario_script(per_family));

  const auto log = dir.file("probe.jsonl");
  REQUIRE(cli({"probe", questions.string(), "--out", log.string(), "--k", "2"},
              mock.get()) == kExitOk);

  const auto tmc = dir.file("tmc.jsonl");
  REQUIRE(cli({"build-tmc", "--log", log.string(), "--out", tmc.string()}) ==
          kExitOk);
  auto dataset = load_tmc_dataset(tmc);
  REQUIRE(dataset.size() == 2 * per_family);
  for (const TMCExample& example : dataset) {
    const ThinkingMode expected =
        example.question_id[0] == 'f' ? ThinkingMode::Fast : ThinkingMode::Slow;
    CHECK(example.label == expected);
  }

  const auto model = dir.file("router.dmr");
  REQUIRE(cli({"train", "--tmc", tmc.string(), "--out", model.string(),
               "--hash-dim", "4096", "--epochs", "40"}) == kExitOk);

  const auto routed_run = dir.file("routed.jsonl");
  const auto slow_run = dir.file("slow.jsonl");
  const auto fast_run = dir.file("fast.jsonl");
  REQUIRE(cli({"eval", questions.string(), "--policy",
               "router:" + model.string(), "--out", routed_run.string(), "--k",
               "2"},
              mock.get()) == kExitOk);
  REQUIRE(cli({"eval", questions.string(), "--policy", "fixed:slow", "--out",
               slow_run.string(), "--k", "2"},
              mock.get()) == kExitOk);
  REQUIRE(cli({"eval", questions.string(), "--policy", "fixed:fast", "--out",
               fast_run.string(), "--k", "2"},
              mock.get()) == kExitOk);

  const auto report_path = dir.file("report.json");
  REQUIRE(cli({"report", routed_run.string(), slow_run.string(),
               fast_run.string(), "--format", "json", "--out",
               report_path.string()}) == kExitOk);

  auto doc = nlohmann::json::parse(read_file(report_path));
  double router_acc = -1, router_tokens = -1;
  double slow_acc = -1, slow_tokens = -1;
  double fast_acc = -1;
  for (const auto& row : doc.at("rows")) {
    const std::string policy = row.at("policy");
    if (policy == "router") {
      router_acc = row.at("acc_percent");
      router_tokens = row.at("mean_tokens");
    } else if (policy == "fixed:slow") {
      slow_acc = row.at("acc_percent");
      slow_tokens = row.at("mean_tokens");
    } else if (policy == "fixed:fast") {
      fast_acc = row.at("acc_percent");
    }
  }
  // Routed policy matches Slow's perfect accuracy at strictly fewer tokens,
  // and strictly beats Fast's accuracy.
  CHECK(router_acc == doctest::Approx(100.0));
  CHECK(slow_acc == doctest::Approx(100.0));
  CHECK(router_tokens < slow_tokens);
  CHECK(fast_acc < router_acc);
}

TEST_CASE("report --from-aggregates reproduces stored TD arithmetic") {
  testutil::TempDir dir;
  const auto aggregates = dir.file("aggregates.json");
  write_file(aggregates, nlohmann::json::array(
                             {{{"label", "math/cot"},
                               {"acc_percent", 66.28},
                               {"mean_tokens", 425.74}},
                              {{"label", "csqa/fast-only"},
                               {"acc_percent", 62.64},
                               {"mean_tokens", 6.87}}})
                             .dump());
  const auto out = dir.file("report.json");
  REQUIRE(cli({"report", "--from-aggregates", aggregates.string(), "--format",
               "json", "--out", out.string()}) == kExitOk);
  auto doc = nlohmann::json::parse(read_file(out));
  REQUIRE(doc.at("rows").size() == 2);
  CHECK(std::fabs(doc.at("rows").at(0).at("td").get<double>() - 0.16) <= 0.005);
  CHECK(std::fabs(doc.at("rows").at(1).at("td").get<double>() - 9.12) <= 0.005);
}

TEST_CASE("pareto command emits a verdict with nonnegative combined gaps") {
  testutil::TempDir dir;
  const auto questions = dir.file("questions.jsonl");
  const auto log = dir.file("probe.jsonl");
  write_scenario_questions(questions, 2);
  auto mock = make_mock_backend(scenario_script(2));
  REQUIRE(cli({"probe", questions.string(), "--out", log.string(), "--k", "2"},
              mock.get()) == kExitOk);

  const auto out = dir.file("verdict.json");
  REQUIRE(cli({"pareto", "--log", log.string(), "--out", out.string()}) == kExitOk);
  auto doc = nlohmann::json::parse(read_file(out));
  for (const char* mode : {"fast", "normal", "slow"}) {
    CHECK(doc.at("modes").at(mode).at("combined_gap").get<double>() >= 0.0);
  }
}

TEST_CASE("a declarative config file feeds subcommand flags") {
  testutil::TempDir dir;
  const auto questions = dir.file("questions.jsonl");
  const auto log = dir.file("probe.jsonl");
  write_scenario_questions(questions, 1);
  auto mock = make_mock_backend(scenario_script(1));

  const auto config = dir.file("dmind.ini");
  write_file(config, "[probe]\nk=2\nmodes=\"fast,slow\"\n");
  REQUIRE(cli({"--config", config.string(), "probe", questions.string(), "--out",
               log.string()},
              mock.get()) == kExitOk);
  auto records = load_probe_log(log);
  CHECK(records.size() == 4);  // 2 questions x 2 configured modes
  for (const ProbeRecord& record : records) {
    CHECK(record.k == 2);
    CHECK(record.mode != ThinkingMode::Normal);
  }
}

TEST_CASE("pipeline outputs are byte-deterministic across reruns from one log") {
  testutil::TempDir dir;
  const auto questions = dir.file("questions.jsonl");
  const auto log = dir.file("probe.jsonl");
  write_scenario_questions(questions, 2);
  auto mock = make_mock_backend(scenario_script(2));
  REQUIRE(cli({"probe", questions.string(), "--out", log.string(), "--k", "3"},
              mock.get()) == kExitOk);

  const auto tmc_a = dir.file("a.jsonl");
  const auto tmc_b = dir.file("b.jsonl");
  REQUIRE(cli({"build-tmc", "--log", log.string(), "--out", tmc_a.string()}) == kExitOk);
  REQUIRE(cli({"build-tmc", "--log", log.string(), "--out", tmc_b.string()}) == kExitOk);
  CHECK(read_file(tmc_a) == read_file(tmc_b));
  CHECK(read_file(tmc_a.string() + ".report.json") ==
        read_file(tmc_b.string() + ".report.json"));
}
