#include "dmind/cli.hpp"

#include <atomic>
#include <chrono>
#include <iostream>
#include <set>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "dmind/analysis.hpp"
#include "dmind/digest.hpp"
#include "dmind/dispatch.hpp"
#include "dmind/errors.hpp"
#include "dmind/probe.hpp"
#include "dmind/router.hpp"
#include "dmind/service.hpp"
#include "dmind/tmc.hpp"

namespace dmind {

namespace {

using nlohmann::json;

std::int64_t now_unix_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

void write_manifest(const std::filesystem::path& out, const std::string& command,
                    json config, json inputs) {
  const json manifest{{"v", 1},
                      {"command", command},
                      {"created_unix_ms", now_unix_ms()},
                      {"config", std::move(config)},
                      {"inputs", std::move(inputs)}};
  write_file(out.string() + ".manifest.json", manifest.dump(2) + "\n");
}

struct BackendOpts {
  std::string spec = "http";  // http | mock:<script.json> | replay:<log.jsonl>
  std::string url;
  std::string model_id;
  std::string api_key_env = "DMIND_API_KEY";
  int timeout_ms = 30000;
  int max_retries = 2;
  int max_in_flight = 8;
};

void add_backend_flags(CLI::App* cmd, BackendOpts& opts) {
  cmd->add_option("--backend", opts.spec,
                  "Backend: http, mock:<script.json>, or replay:<log.jsonl>");
  cmd->add_option("--backend-url", opts.url, "Chat-completions endpoint URL");
  cmd->add_option("--model", opts.model_id, "Model identifier sent upstream");
  cmd->add_option("--api-key-env", opts.api_key_env,
                  "Environment variable holding the API key");
  cmd->add_option("--timeout-ms", opts.timeout_ms, "Request timeout");
  cmd->add_option("--max-retries", opts.max_retries, "Transport retries");
}

MockScript load_mock_script(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("mock script " + path.string() + ": " + e.what());
  }
  MockScript script;
  for (const json& entry : doc) {
    auto mode = mode_from_string(entry.at("mode").get<std::string>());
    if (!mode) {
      throw ConfigError("mock script " + path.string() + ": unknown mode \"" +
                        entry.at("mode").get<std::string>() + "\"");
    }
    script[{entry.at("question_id").get<std::string>(), *mode}] =
        MockReply{entry.at("text").get<std::string>(),
                  entry.value("output_tokens", 1)};
  }
  return script;
}

std::unique_ptr<Backend> make_backend(const BackendOpts& opts) {
  if (opts.spec == "http") {
    if (opts.url.empty()) {
      throw ConfigError("--backend-url is required for the http backend");
    }
    BackendConfig config;
    config.endpoint_url = opts.url;
    config.model_id = opts.model_id;
    config.api_key_env = opts.api_key_env;
    config.timeout_ms = opts.timeout_ms;
    config.max_retries = opts.max_retries;
    config.max_in_flight = opts.max_in_flight;
    return std::make_unique<HttpBackend>(config);
  }
  if (opts.spec.starts_with("mock:")) {
    return make_mock_backend(load_mock_script(opts.spec.substr(5)));
  }
  if (opts.spec.starts_with("replay:")) {
    return make_replay_backend(load_probe_log(opts.spec.substr(7)));
  }
  throw ConfigError("unknown backend \"" + opts.spec + "\"");
}

std::vector<ThinkingMode> parse_modes(const std::string& csv) {
  std::vector<ThinkingMode> modes;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    std::size_t comma = csv.find(',', pos);
    std::string name = csv.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    pos = comma == std::string::npos ? csv.size() + 1 : comma + 1;
    if (name.empty()) continue;
    auto mode = mode_from_string(name);
    if (!mode) throw ConfigError("unknown mode \"" + name + "\"");
    if (std::find(modes.begin(), modes.end(), *mode) == modes.end()) {
      modes.push_back(*mode);
    }
  }
  if (modes.empty()) throw ConfigError("no modes selected");
  return modes;
}

DensityParams::AccuracyScale parse_scale(const std::string& name) {
  if (name == "fraction") return DensityParams::AccuracyScale::Fraction;
  if (name == "percent") return DensityParams::AccuracyScale::Percent;
  throw ConfigError("accuracy scale must be fraction or percent");
}

// ---------------------------------------------------------------------------
// probe

struct ProbeArgs {
  std::string questions_file;
  std::string out;
  int k = 10;
  std::string modes_csv = "fast,normal,slow";
  std::string templates_file;
  BackendOpts backend;
  int parallelism = 4;
  bool no_store_text = false;
};

int cmd_probe(const ProbeArgs& args, Backend* backend_override) {
  const std::vector<Question> questions = load_questions(args.questions_file);
  const std::vector<ThinkingMode> modes = parse_modes(args.modes_csv);
  const TemplateSet templates =
      args.templates_file.empty()
          ? builtin_templates()
          : load_template_set(std::filesystem::path{args.templates_file});

  std::vector<ProbeRecord> existing;
  std::set<std::pair<std::string, ThinkingMode>> done;
  if (std::filesystem::exists(args.out)) {
    existing = load_probe_log(args.out);
    for (const ProbeRecord& record : existing) {
      if (record.complete && record.k == args.k) {
        done.insert({record.question_id, record.mode});
      }
    }
  }

  struct Task {
    const Question* question;
    ThinkingMode mode;
  };
  std::vector<Task> tasks;
  for (const Question& q : questions) {
    for (ThinkingMode mode : modes) {
      if (!done.contains({q.id, mode})) tasks.push_back({&q, mode});
    }
  }

  std::unique_ptr<Backend> owned;
  Backend* backend = backend_override;
  if (!backend && !tasks.empty()) {
    owned = make_backend(args.backend);
    backend = owned.get();
  }

  const ProbeOptions options{!args.no_store_text};
  std::vector<ProbeRecord> fresh(tasks.size());
  if (!tasks.empty()) {
    const int workers = std::max(
        1, std::min<int>(args.parallelism, static_cast<int>(tasks.size())));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next.fetch_add(1); i < tasks.size();
               i = next.fetch_add(1)) {
            const std::array<ThinkingMode, 1> one{tasks[i].mode};
            fresh[i] = probe_question(*tasks[i].question, one, args.k, *backend,
                                      templates, options)[0];
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
  }

  // Keep skipped records, replace re-probed ones, canonical sort.
  std::vector<ProbeRecord> merged;
  for (ProbeRecord& record : existing) {
    if (done.contains({record.question_id, record.mode})) {
      merged.push_back(std::move(record));
    }
  }
  for (ProbeRecord& record : fresh) merged.push_back(std::move(record));
  std::sort(merged.begin(), merged.end(),
            [](const ProbeRecord& a, const ProbeRecord& b) {
              return std::tie(a.question_id, a.mode) < std::tie(b.question_id, b.mode);
            });

  write_probe_log(args.out, merged);
  int incomplete = 0;
  for (const ProbeRecord& record : merged) incomplete += record.complete ? 0 : 1;
  write_manifest(args.out, "probe",
                 json{{"k", args.k},
                      {"modes", args.modes_csv},
                      {"backend", args.backend.spec},
                      {"model", args.backend.model_id},
                      {"parallelism", args.parallelism},
                      {"store_text", !args.no_store_text}},
                 json{{"questions", args.questions_file},
                      {"questions_digest", file_digest_hex(args.questions_file)}});
  std::cout << "probed " << tasks.size() << " (question, mode) pairs, skipped "
            << done.size() << ", wrote " << merged.size() << " records to "
            << args.out;
  if (incomplete > 0) std::cout << " (" << incomplete << " incomplete)";
  std::cout << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// build-tmc

struct BuildTmcArgs {
  std::string log;
  std::string out;
  double threshold = 0.8;
  int max_length = 4096;
  double alpha = 1.0;
  std::string scale = "fraction";
  int k = 10;
};

int cmd_build_tmc(const BuildTmcArgs& args) {
  TmcConfig config;
  config.competence_threshold = args.threshold;
  config.max_length = args.max_length;
  config.params.alpha = args.alpha;
  config.params.k = args.k;
  config.params.scale = parse_scale(args.scale);

  const std::vector<ProbeRecord> records = load_probe_log(args.log);
  auto [dataset, report] = build_tmc(records, config);
  write_tmc_dataset(args.out, dataset);
  write_file(args.out + ".report.json", build_report_to_json(report).dump(2) + "\n");
  write_manifest(args.out, "build-tmc",
                 json{{"threshold", args.threshold},
                      {"max_length", args.max_length},
                      {"alpha", args.alpha},
                      {"scale", args.scale}},
                 json{{"log", args.log}, {"log_digest", file_digest_hex(args.log)}});
  std::cout << "labeled " << report.labeled_count << " of " << report.input_count
            << " questions (fast " << report.label_histogram[0] << ", normal "
            << report.label_histogram[1] << ", slow " << report.label_histogram[2]
            << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string tmc;
  std::string out;
  TrainConfig tcfg;
  FeaturizerConfig fcfg;
};

int cmd_train(const TrainArgs& args) {
  const std::vector<TMCExample> dataset = load_tmc_dataset(args.tmc);
  const std::vector<LabeledText> examples = to_labeled_texts(dataset);
  RouterModel model =
      train(examples, args.tcfg, args.fcfg, file_digest_hex(args.tmc));
  save_router_model(model, args.out);
  write_manifest(args.out, "train",
                 json{{"epochs", args.tcfg.epochs},
                      {"batch_size", args.tcfg.batch_size},
                      {"learning_rate", args.tcfg.learning_rate},
                      {"l2_lambda", args.tcfg.l2_lambda},
                      {"seed", args.tcfg.seed},
                      {"shuffle", args.tcfg.shuffle},
                      {"ngram_min", args.fcfg.ngram_min},
                      {"ngram_max", args.fcfg.ngram_max},
                      {"hash_dimension", args.fcfg.hash_dimension},
                      {"lowercase", args.fcfg.lowercase}},
                 json{{"tmc", args.tmc}, {"tmc_digest", file_digest_hex(args.tmc)}});
  std::cout << "trained on " << examples.size() << " examples, final loss "
            << model.meta.final_loss << ", saved to " << args.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string questions_file;
  std::string policy_spec = "cot";
  std::string out;
  int k = 3;
  double alpha = 1.0;
  std::uint64_t seed = 1;
  std::string templates_file;
  BackendOpts backend;
  int parallelism = 4;
  bool no_store_text = false;
};

Policy parse_policy(const std::string& spec, double alpha) {
  if (spec == "cot") return Policy::cot();
  if (spec.starts_with("fixed:")) {
    auto mode = mode_from_string(spec.substr(6));
    if (!mode) throw ConfigError("unknown mode in policy \"" + spec + "\"");
    return Policy::fixed(*mode);
  }
  if (spec.starts_with("router:")) {
    auto model = std::make_shared<const RouterModel>(
        load_router_model(spec.substr(7)));
    return Policy::mind_router(std::move(model));
  }
  if (spec.starts_with("oracle:")) {
    DensityParams params;
    params.alpha = alpha;
    return Policy::oracle(load_probe_log(spec.substr(7)), params);
  }
  throw ConfigError("unknown policy \"" + spec +
                    "\" (expected cot, fixed:<mode>, router:<model>, oracle:<log>)");
}

int cmd_eval(const EvalArgs& args, Backend* backend_override) {
  const std::vector<Question> questions = load_questions(args.questions_file);
  const Policy policy = parse_policy(args.policy_spec, args.alpha);
  const TemplateSet templates =
      args.templates_file.empty()
          ? builtin_templates()
          : load_template_set(std::filesystem::path{args.templates_file});

  std::unique_ptr<Backend> owned;
  Backend* backend = backend_override;
  if (!backend) {
    owned = make_backend(args.backend);
    backend = owned.get();
  }

  EvalManifest manifest;
  manifest.alpha = args.alpha;
  manifest.seed = args.seed;
  manifest.backend_model_id = args.backend.model_id;
  manifest.questions_digest = file_digest_hex(args.questions_file);
  manifest.created_unix_ms = now_unix_ms();

  EvalRun run = run_eval(questions, policy, args.k, *backend, templates, manifest,
                         EvalOptions{args.parallelism, !args.no_store_text});
  write_eval_run(args.out, run);
  long long correct = 0;
  long long total = 0;
  for (const RoutedAnswer& answer : run.answers) {
    correct += answer.correct_count();
    total += static_cast<long long>(answer.runs.size());
  }
  std::cout << "evaluated " << questions.size() << " questions with policy "
            << run.manifest.policy << ": " << correct << "/" << total
            << " correct runs, wrote " << args.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
  std::vector<std::string> run_files;
  std::string from_aggregates;
  double alpha = 1.0;
  std::string format = "markdown";
  std::string out;
};

int cmd_report(const ReportArgs& args) {
  EvalReport result;
  if (!args.from_aggregates.empty()) {
    json doc;
    try {
      doc = json::parse(read_file(args.from_aggregates));
    } catch (const json::exception& e) {
      throw ParseError(args.from_aggregates + ": " + std::string{e.what()});
    }
    result.alpha = args.alpha;
    for (const json& entry : doc) {
      ReportRow row;
      row.dataset = entry.value("dataset", entry.value("label", std::string{}));
      row.policy = entry.value("policy", std::string{"aggregate"});
      row.acc_percent = entry.at("acc_percent").get<double>();
      row.mean_tokens = entry.at("mean_tokens").get<double>();
      row.td_report = td_from_aggregates(row.acc_percent, row.mean_tokens, args.alpha);
      result.rows.push_back(std::move(row));
    }
  } else {
    if (args.run_files.empty()) {
      throw ConfigError("report needs eval run files or --from-aggregates");
    }
    std::vector<EvalRun> runs;
    runs.reserve(args.run_files.size());
    for (const std::string& path : args.run_files) {
      runs.push_back(load_eval_run(path));
    }
    result = report(runs, args.alpha);
  }

  std::string rendered;
  if (args.format == "markdown") {
    rendered = report_markdown(result);
  } else if (args.format == "csv") {
    rendered = report_csv(result);
  } else if (args.format == "json") {
    rendered = report_json(result).dump(2) + "\n";
  } else {
    throw ConfigError("unknown format \"" + args.format + "\"");
  }

  if (args.out.empty()) {
    std::cout << rendered;
  } else {
    write_file(args.out, rendered);
    write_manifest(args.out, "report",
                   json{{"alpha", args.alpha}, {"format", args.format}},
                   json{{"runs", args.run_files},
                        {"from_aggregates", args.from_aggregates}});
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// pareto

struct ParetoArgs {
  std::string log;
  double alpha = 1.0;
  std::string scale = "fraction";
  std::string out;
};

int cmd_pareto(const ParetoArgs& args) {
  DensityParams params;
  params.alpha = args.alpha;
  params.scale = parse_scale(args.scale);
  const std::vector<ProbeRecord> records = load_probe_log(args.log);
  const ParetoVerdict verdict = pareto_check(records, params);
  const std::string rendered = verdict_json(verdict).dump(2) + "\n";
  if (args.out.empty()) {
    std::cout << rendered;
  } else {
    write_file(args.out, rendered);
    write_manifest(args.out, "pareto",
                   json{{"alpha", args.alpha}, {"scale", args.scale}},
                   json{{"log", args.log}, {"log_digest", file_digest_hex(args.log)}});
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// serve

struct ServeArgs {
  std::string config_file;
  std::string address;
  int port = -1;
  std::string model_file;
};

int cmd_serve(const ServeArgs& args) {
  ServiceConfig config = load_service_config(args.config_file);
  if (!args.address.empty()) config.listen_address = args.address;
  if (args.port >= 0) config.port = args.port;
  if (!args.model_file.empty()) config.router_model_path = args.model_file;

  Service service(std::move(config));
  if (!service.start()) {
    throw ConfigError("failed to bind service listener");
  }
  std::cout << "serving on port " << service.port() << " (model "
            << (service.ready() ? service.model_digest() : "not loaded") << ")\n";
  while (true) {
    std::this_thread::sleep_for(std::chrono::seconds(3600));
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, Backend* backend_override) {
  CLI::App app{
      "DynamicMind tri-mode thinking toolkit: probe, label, route, evaluate.\n"
      "Exit codes: 0 ok, 2 config, 3 parse, 4 transport, 5 contract, 6 input."};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI/TOML file");

  ProbeArgs probe_args;
  auto* probe_cmd = app.add_subcommand("probe", "Run k probes per mode per question");
  probe_cmd->add_option("questions", probe_args.questions_file, "Question JSONL file")
      ->required();
  probe_cmd->add_option("--out", probe_args.out, "Probe log output path")->required();
  probe_cmd->add_option("--k", probe_args.k, "Runs per (question, mode)");
  probe_cmd->add_option("--modes", probe_args.modes_csv, "Comma-separated modes");
  probe_cmd->add_option("--templates", probe_args.templates_file, "Template override file");
  probe_cmd->add_option("--parallelism", probe_args.parallelism, "Concurrent probes");
  probe_cmd->add_flag("--no-store-text", probe_args.no_store_text,
                      "Keep only digests of run text");
  add_backend_flags(probe_cmd, probe_args.backend);

  BuildTmcArgs build_args;
  auto* build_cmd = app.add_subcommand("build-tmc", "Filter and label a probe log");
  build_cmd->add_option("--log", build_args.log, "Probe log")->required();
  build_cmd->add_option("--out", build_args.out, "TMC dataset output path")->required();
  build_cmd->add_option("--threshold", build_args.threshold, "Competence threshold");
  build_cmd->add_option("--max-length", build_args.max_length,
                        "Question length cap in characters (0 disables)");
  build_cmd->add_option("--alpha", build_args.alpha, "Density trade-off exponent");
  build_cmd->add_option("--scale", build_args.scale, "Accuracy scale: fraction|percent");

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train the mind router");
  train_cmd->add_option("--tmc", train_args.tmc, "TMC dataset")->required();
  train_cmd->add_option("--out", train_args.out, "Model output path")->required();
  train_cmd->add_option("--epochs", train_args.tcfg.epochs, "Training epochs");
  train_cmd->add_option("--batch-size", train_args.tcfg.batch_size, "Mini-batch size");
  train_cmd->add_option("--lr", train_args.tcfg.learning_rate, "Learning rate");
  train_cmd->add_option("--l2", train_args.tcfg.l2_lambda, "L2 penalty");
  train_cmd->add_option("--seed", train_args.tcfg.seed, "Shuffle seed");
  train_cmd->add_flag_callback("--no-shuffle",
                               [&train_args] { train_args.tcfg.shuffle = false; },
                               "Keep dataset order");
  train_cmd->add_option("--ngram-min", train_args.fcfg.ngram_min, "Smallest n-gram");
  train_cmd->add_option("--ngram-max", train_args.fcfg.ngram_max, "Largest n-gram");
  train_cmd->add_option("--hash-dim", train_args.fcfg.hash_dimension,
                        "Feature hashing dimension (power of two)");
  train_cmd->add_flag_callback("--no-lowercase",
                               [&train_args] { train_args.fcfg.lowercase = false; },
                               "Skip lowercasing");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Answer questions under a policy");
  eval_cmd->add_option("questions", eval_args.questions_file, "Question JSONL file")
      ->required();
  eval_cmd->add_option("--policy", eval_args.policy_spec,
                       "cot | fixed:<mode> | router:<model> | oracle:<log>")
      ->required();
  eval_cmd->add_option("--out", eval_args.out, "Eval run output path")->required();
  eval_cmd->add_option("--k", eval_args.k, "Runs per question");
  eval_cmd->add_option("--alpha", eval_args.alpha, "Density trade-off exponent");
  eval_cmd->add_option("--seed", eval_args.seed, "Run seed recorded in the manifest");
  eval_cmd->add_option("--templates", eval_args.templates_file, "Template override file");
  eval_cmd->add_option("--parallelism", eval_args.parallelism, "Concurrent questions");
  eval_cmd->add_flag("--no-store-text", eval_args.no_store_text,
                     "Keep only digests of run text");
  add_backend_flags(eval_cmd, eval_args.backend);

  ReportArgs report_args;
  auto* report_cmd = app.add_subcommand("report", "Aggregate eval runs into ACC/#Token/TD");
  report_cmd->add_option("runs", report_args.run_files, "Eval run files");
  report_cmd->add_option("--from-aggregates", report_args.from_aggregates,
                         "JSON array of {label, acc_percent, mean_tokens}");
  report_cmd->add_option("--alpha", report_args.alpha, "Density trade-off exponent");
  report_cmd->add_option("--format", report_args.format, "markdown | csv | json");
  report_cmd->add_option("--out", report_args.out, "Write instead of printing");

  ParetoArgs pareto_args;
  auto* pareto_cmd = app.add_subcommand("pareto", "Oracle dominance check over a probe log");
  pareto_cmd->add_option("--log", pareto_args.log, "Probe log")->required();
  pareto_cmd->add_option("--alpha", pareto_args.alpha, "Density trade-off exponent");
  pareto_cmd->add_option("--scale", pareto_args.scale, "Accuracy scale: fraction|percent");
  pareto_cmd->add_option("--out", pareto_args.out, "Write instead of printing");

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "Run the routing gateway");
  serve_cmd->add_option("--service-config", serve_args.config_file,
                        "Service config JSON")
      ->required();
  serve_cmd->add_option("--address", serve_args.address, "Listen address override");
  serve_cmd->add_option("--port", serve_args.port, "Listen port override");
  serve_cmd->add_option("--model-file", serve_args.model_file,
                        "Router model path override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (probe_cmd->parsed()) return cmd_probe(probe_args, backend_override);
    if (build_cmd->parsed()) return cmd_build_tmc(build_args);
    if (train_cmd->parsed()) return cmd_train(train_args);
    if (eval_cmd->parsed()) return cmd_eval(eval_args, backend_override);
    if (report_cmd->parsed()) return cmd_report(report_args);
    if (pareto_cmd->parsed()) return cmd_pareto(pareto_args);
    if (serve_cmd->parsed()) return cmd_serve(serve_args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const TransportError& e) {
    std::cerr << "transport error: " << e.what() << "\n";
    return kExitTransport;
  } catch (const RequestError& e) {
    std::cerr << "request error: " << e.what() << "\n";
    return kExitTransport;
  } catch (const ContractError& e) {
    std::cerr << "contract error: " << e.what() << "\n";
    return kExitContract;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace dmind
