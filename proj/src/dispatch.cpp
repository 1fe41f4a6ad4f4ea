#include "dmind/dispatch.hpp"

#include <atomic>
#include <thread>

#include "json.hpp"

#include "dmind/digest.hpp"
#include "dmind/errors.hpp"
#include "dmind/tmc.hpp"

namespace dmind {

using nlohmann::json;

Policy Policy::mind_router(std::shared_ptr<const RouterModel> model) {
  if (!model) throw InputError("mind_router policy requires a model");
  Policy policy(Kind::MindRouter);
  policy.model_ = std::move(model);
  return policy;
}

Policy Policy::fixed(ThinkingMode mode) {
  Policy policy(Kind::Fixed);
  policy.fixed_mode_ = mode;
  return policy;
}

Policy Policy::oracle(std::span<const ProbeRecord> log, const DensityParams& params) {
  Policy policy(Kind::Oracle);
  for (const ModeGroup& group : group_by_question(log)) {
    bool complete = true;
    for (const ProbeRecord& record : group.records) {
      complete = complete && record.complete;
    }
    if (!complete) continue;
    const std::array<const ProbeRecord*, 3> by_mode = {
        &group.records[0], &group.records[1], &group.records[2]};
    policy.oracle_assignments_[group.question_id] = densest_mode(by_mode, params);
  }
  return policy;
}

Policy Policy::cot() { return Policy(Kind::CoT); }

std::string Policy::describe() const {
  switch (kind_) {
    case Kind::MindRouter:
      return "router";
    case Kind::Fixed:
      return "fixed:" + std::string{to_string(fixed_mode_)};
    case Kind::Oracle:
      return "oracle";
    case Kind::CoT:
      return "cot";
  }
  return "unknown";
}

ThinkingMode route(const Policy& policy, const Question& question) {
  switch (policy.kind()) {
    case Policy::Kind::MindRouter:
      return predict(*policy.model_, question.text).mode;
    case Policy::Kind::Fixed:
      return policy.fixed_mode_;
    case Policy::Kind::Oracle: {
      auto it = policy.oracle_assignments_.find(question.id);
      if (it == policy.oracle_assignments_.end()) {
        throw ContractError("oracle routing: question \"" + question.id +
                            "\" is not covered by the probe log");
      }
      return it->second;
    }
    case Policy::Kind::CoT:
      return ThinkingMode::Normal;
  }
  return ThinkingMode::Normal;
}

PromptBundle bundle_for(const Policy& policy, ThinkingMode mode,
                        const Question& question, const TemplateSet& templates) {
  PromptBundle bundle = assemble_prompt(mode, question.text, templates);
  if (policy.kind() == Policy::Kind::CoT) {
    bundle.user_message += "\n";
    bundle.user_message += kCotSuffix;
  }
  return bundle;
}

int RoutedAnswer::correct_count() const {
  int correct = 0;
  for (const RunResult& run : runs) correct += run.correct ? 1 : 0;
  return correct;
}

long long RoutedAnswer::total_tokens() const {
  long long total = 0;
  for (const RunResult& run : runs) total += run.output_tokens;
  return total;
}

RoutedAnswer answer(const Question& question, const Policy& policy, int k,
                    Backend& backend, const TemplateSet& templates,
                    const ProbeOptions& options) {
  if (k < 1) throw InputError("answer requires k >= 1");

  RoutedAnswer result;
  result.question_id = question.id;
  result.dataset = question.dataset;
  result.chosen_mode = route(policy, question);
  if (policy.kind() == Policy::Kind::MindRouter) {
    result.router_probabilities = predict(*policy.model(), question.text).probabilities;
  }

  const PromptBundle bundle =
      bundle_for(policy, result.chosen_mode, question, templates);
  const RequestKey key{question.id};
  for (int run_index = 0; run_index < k; ++run_index) {
    RunResult run = run_once(backend, bundle, key, question, options.store_text);
    result.complete = result.complete && !run.failed;
    result.runs.push_back(std::move(run));
  }
  return result;
}

EvalRun run_eval(std::span<const Question> questions, const Policy& policy, int k,
                 Backend& backend, const TemplateSet& templates,
                 EvalManifest manifest, const EvalOptions& options) {
  EvalRun run;
  run.manifest = std::move(manifest);
  run.manifest.k = k;
  run.manifest.policy = policy.describe();
  run.answers.resize(questions.size());

  const int workers =
      std::max(1, std::min<int>(options.parallelism,
                                static_cast<int>(questions.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < questions.size(); ++i) {
      run.answers[i] = answer(questions[i], policy, k, backend, templates,
                              ProbeOptions{options.store_text});
    }
    return run;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next.fetch_add(1); i < questions.size();
             i = next.fetch_add(1)) {
          run.answers[i] = answer(questions[i], policy, k, backend, templates,
                                  ProbeOptions{options.store_text});
        }
      } catch (...) {
        failures[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  return run;
}

namespace {

json routed_answer_to_json(const RoutedAnswer& answer) {
  json runs = json::array();
  for (const RunResult& run : answer.runs) {
    json r{{"digest", run.digest},
           {"correct", run.correct},
           {"output_tokens", run.output_tokens},
           {"truncated", run.truncated},
           {"failed", run.failed}};
    if (run.text) r["text"] = *run.text;
    runs.push_back(std::move(r));
  }
  json doc{{"v", kEvalRunVersion},
           {"question_id", answer.question_id},
           {"dataset", answer.dataset},
           {"mode", to_string(answer.chosen_mode)},
           {"complete", answer.complete},
           {"runs", std::move(runs)}};
  if (answer.router_probabilities) {
    doc["router_probabilities"] =
        json::array({(*answer.router_probabilities)[0],
                     (*answer.router_probabilities)[1],
                     (*answer.router_probabilities)[2]});
  }
  return doc;
}

RoutedAnswer routed_answer_from_json(const json& doc, const std::string& where) {
  if (!doc.contains("v")) throw ParseError(where + ": missing version field");
  if (doc.at("v").get<int>() != kEvalRunVersion) {
    throw ContractError(where + ": eval run version " + doc.at("v").dump() +
                        " does not match expected " +
                        std::to_string(kEvalRunVersion));
  }
  RoutedAnswer answer;
  answer.question_id = doc.at("question_id").get<std::string>();
  answer.dataset = doc.value("dataset", std::string{});
  auto mode = mode_from_string(doc.at("mode").get<std::string>());
  if (!mode) {
    throw ParseError(where + ": unknown mode \"" +
                     doc.at("mode").get<std::string>() + "\"");
  }
  answer.chosen_mode = *mode;
  answer.complete = doc.value("complete", true);
  if (doc.contains("router_probabilities")) {
    const json& probs = doc.at("router_probabilities");
    answer.router_probabilities = {{probs.at(0).get<double>(),
                                    probs.at(1).get<double>(),
                                    probs.at(2).get<double>()}};
  }
  for (const json& r : doc.at("runs")) {
    RunResult run;
    run.digest = r.value("digest", std::string{});
    if (r.contains("text")) run.text = r.at("text").get<std::string>();
    run.correct = r.value("correct", false);
    run.output_tokens = r.value("output_tokens", 1);
    run.truncated = r.value("truncated", false);
    run.failed = r.value("failed", false);
    answer.runs.push_back(std::move(run));
  }
  return answer;
}

json manifest_to_json(const EvalManifest& manifest) {
  return json{{"v", manifest.version},
              {"policy", manifest.policy},
              {"k", manifest.k},
              {"alpha", manifest.alpha},
              {"seed", manifest.seed},
              {"backend_model_id", manifest.backend_model_id},
              {"questions_digest", manifest.questions_digest},
              {"created_unix_ms", manifest.created_unix_ms}};
}

EvalManifest manifest_from_json(const json& doc, const std::string& where) {
  if (!doc.contains("v")) throw ParseError(where + ": missing version field");
  if (doc.at("v").get<int>() != kEvalRunVersion) {
    throw ContractError(where + ": manifest version " + doc.at("v").dump() +
                        " does not match expected " +
                        std::to_string(kEvalRunVersion));
  }
  EvalManifest manifest;
  manifest.version = doc.at("v").get<int>();
  manifest.policy = doc.value("policy", std::string{});
  manifest.k = doc.value("k", 3);
  manifest.alpha = doc.value("alpha", 1.0);
  manifest.seed = doc.value("seed", std::uint64_t{0});
  manifest.backend_model_id = doc.value("backend_model_id", std::string{});
  manifest.questions_digest = doc.value("questions_digest", std::string{});
  manifest.created_unix_ms = doc.value("created_unix_ms", std::int64_t{0});
  return manifest;
}

}  // namespace

void write_eval_run(const std::filesystem::path& path, const EvalRun& run) {
  std::string lines;
  for (const RoutedAnswer& answer : run.answers) {
    lines += routed_answer_to_json(answer).dump();
    lines += '\n';
  }
  write_file(path, lines);
  write_file(path.string() + ".manifest.json",
             manifest_to_json(run.manifest).dump(2) + "\n");
}

EvalRun load_eval_run(const std::filesystem::path& path) {
  EvalRun run;
  const std::filesystem::path manifest_path{path.string() + ".manifest.json"};
  json manifest_doc;
  try {
    manifest_doc = json::parse(read_file(manifest_path));
  } catch (const json::exception& e) {
    throw ParseError(manifest_path.string() + ": " + e.what());
  }
  run.manifest = manifest_from_json(manifest_doc, manifest_path.string());

  const std::string raw = read_file(path);
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= raw.size()) {
    std::size_t eol = raw.find('\n', pos);
    std::string_view line = std::string_view{raw}.substr(
        pos, eol == std::string::npos ? std::string::npos : eol - pos);
    pos = eol == std::string::npos ? raw.size() + 1 : eol + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    const std::string where = path.string() + " line " + std::to_string(line_no);
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    run.answers.push_back(routed_answer_from_json(doc, where));
  }
  return run;
}

}  // namespace dmind
