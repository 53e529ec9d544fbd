// Command-line entry point: ingest, train, gen, eval, augment, report.
// Exit codes: 0 success, 1 usage error, 2 data/config error, 3 runtime failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sensecf/sensecf.hpp"

namespace fs = std::filesystem;
using namespace sensecf;

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Transport:
    case ErrorCode::PredictionMismatch:
    case ErrorCode::NoOppositeClass:
    case ErrorCode::NoFlip:
    case ErrorCode::AlreadyDesired:
    case ErrorCode::BudgetExhausted:
    case ErrorCode::NotValidCf:
      return 3;
    default:
      return 2;
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path.string() + "'");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << content;
  if (!out) fail(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

void ensure_writable(const fs::path& path, bool force) {
  if (!force && fs::exists(path))
    fail(ErrorCode::OutputExists, "'" + path.string() + "' exists; pass --force to overwrite");
}

FeatureSchema schema_from(const std::string& schema_path) { return load_schema(read_file(schema_path)); }

struct IngestOpts {
  std::string data, schema;
};

int run_ingest(const IngestOpts& opt) {
  const auto schema = schema_from(opt.schema);
  const auto data = load_csv(opt.data, schema);
  int continuous = 0, categorical = 0;
  for (const auto& f : schema.predictors()) (f.is_continuous() ? continuous : categorical) += 1;
  std::cout << "rows: " << data.size() << " (" << schema.target().categories[0] << ": " << data.count_label(0)
            << ", " << schema.target().categories[1] << ": " << data.count_label(1) << ")\n";
  std::cout << "predictors: " << schema.predictor_count() << " (" << continuous << " continuous, " << categorical
            << " categorical)\n";
  std::cout << "target: " << schema.target().name << "\n";
  std::cout << "immutable: ";
  const auto immutables = schema.immutable_names();
  for (std::size_t i = 0; i < immutables.size(); ++i) std::cout << (i ? ", " : "") << immutables[i];
  std::cout << "\n";
  return 0;
}

struct TrainOpts {
  std::string data, schema, kind = "tree-ensemble", out;
  std::uint64_t seed = 0;
  bool force = false;
  Hyperparams hp;
};

int run_train(const TrainOpts& opt) {
  ensure_writable(opt.out, opt.force);
  const auto schema = schema_from(opt.schema);
  const auto data = load_csv(opt.data, schema);
  const auto model = train(model_kind_from_name(opt.kind), data, opt.hp, opt.seed);
  model.save(opt.out);
  std::cout << "trained " << model_kind_name(model.kind()) << " on " << data.size()
            << " rows; training accuracy " << model.train_accuracy() << "\n";
  std::cout << "saved to " << opt.out << "\n";
  return 0;
}

struct GenOpts {
  std::string method = "nice";
  std::string model, data, schema, out;
  std::string transport = "mock";
  std::string endpoint = "https://api.openai.com";
  std::string model_name = "gpt-4o-mini";
  double temperature = 0.0;
  std::uint64_t seed = 0;
  std::size_t limit = 0;  // 0 = all
  std::size_t budget = 2000;
  std::size_t grid = 10;
  std::size_t dice_k = 1;
  int shots = 3;
  int retries = 3;
  bool no_verify_flip = false;
  std::string immutable_policy = "repair";
  std::size_t parallel = 4;
  bool force = false;
  DiceWeights weights;
};

int run_gen(const GenOpts& opt) {
  ensure_writable(opt.out, opt.force);
  const auto schema = schema_from(opt.schema);
  const auto data = load_csv(opt.data, schema);
  if (data.empty()) fail(ErrorCode::EmptyDataset, "'" + opt.data + "' has no rows");
  const auto model = TrainedModel::load(opt.model);
  if (!(model.schema() == schema)) fail(ErrorCode::SchemaMismatch, "model and --schema disagree");
  const auto bounds = feature_bounds(data);

  std::vector<Instance> factuals = data.rows;
  if (opt.limit > 0 && factuals.size() > opt.limit) factuals.resize(opt.limit);

  CfBatch batch;
  if (opt.method == "llm-zero" || opt.method == "llm-few") {
    PromptSpec spec;
    spec.shots = opt.method == "llm-zero" ? 0 : opt.shots;
    GenConfig config;
    config.verify_flip = !opt.no_verify_flip;
    config.max_retries = opt.retries;
    config.temperature = opt.temperature;
    config.seed = opt.seed;
    config.parallelism = opt.parallel;
    if (opt.immutable_policy == "repair") {
      config.immutable_policy = ImmutablePolicy::RepairRevert;
    } else if (opt.immutable_policy == "reject") {
      config.immutable_policy = ImmutablePolicy::Reject;
    } else {
      fail(ErrorCode::Config, "immutable policy must be 'repair' or 'reject'");
    }
    std::unique_ptr<LlmTransport> transport;
    if (opt.transport == "mock") {
      transport = std::make_unique<MockTransport>(data, model, opt.seed);
    } else if (opt.transport == "live") {
      TransportConfig tc;
      tc.base_url = opt.endpoint;
      tc.model = opt.model_name;
      tc.temperature = opt.temperature;
      transport = std::make_unique<HttpTransport>(tc);
    } else {
      fail(ErrorCode::Config, "transport must be 'mock' or 'live'");
    }
    auto log_status = [&](std::size_t index, const CfPair* pair) {
      if (pair != nullptr) {
        std::cerr << "instance " << index << ": ok (attempts " << pair->attempts << ")\n";
      } else {
        std::cerr << "instance " << index << ": failed\n";
      }
    };
    batch = generate_llm_batch(factuals, model, *transport, schema, spec, config, &data, log_status);
  } else if (opt.method == "nice" || opt.method == "cfnow" || opt.method == "dice") {
    SearchBudget budget{opt.budget, opt.seed, opt.grid};
    for (std::size_t i = 0; i < factuals.size(); ++i) {
      try {
        if (opt.method == "nice") {
          batch.pairs.push_back(nice_cf(factuals[i], model, data, bounds));
        } else if (opt.method == "cfnow") {
          batch.pairs.push_back(cfnow_cf(factuals[i], model, data, bounds, budget));
        } else {
          SearchBudget row_budget = budget;
          row_budget.seed = mix64(budget.seed ^ mix64(i));
          auto pairs = dice_cfs(factuals[i], model, schema, bounds, opt.dice_k, opt.weights, row_budget);
          if (pairs.empty()) fail(ErrorCode::BudgetExhausted, "no flipping candidate found");
          for (auto& p : pairs) batch.pairs.push_back(std::move(p));
        }
        std::cerr << "instance " << i << ": ok\n";
      } catch (const Error& e) {
        ++batch.failures;
        std::cerr << "instance " << i << ": failed (" << e.what() << ")\n";
      }
    }
  } else {
    fail(ErrorCode::Config, "unknown method '" + opt.method + "'");
  }

  write_jsonl(batch, schema, opt.out);
  std::cout << "wrote " << batch.size() << " pairs (" << batch.failures << " failures) to " << opt.out << "\n";
  return 0;
}

struct EvalOpts {
  std::string cf, model, data, schema, out, diversity_out;
  bool force = false;
};

int run_eval(const EvalOpts& opt) {
  if (!opt.out.empty()) ensure_writable(opt.out, opt.force);
  if (!opt.diversity_out.empty()) ensure_writable(opt.diversity_out, opt.force);
  const auto schema = schema_from(opt.schema);
  const auto data = load_csv(opt.data, schema);
  const auto model = TrainedModel::load(opt.model);
  if (!(model.schema() == schema)) fail(ErrorCode::SchemaMismatch, "model and --schema disagree");
  const auto batch = read_jsonl(opt.cf, schema);
  if (batch.empty()) fail(ErrorCode::EmptyBatch, "'" + opt.cf + "' contains no pairs");
  const auto bounds = feature_bounds(data);
  const auto report = evaluate_batch(batch, model, schema, bounds);
  const std::string method = batch.pairs.front().method.empty() ? "unknown" : batch.pairs.front().method;
  if (!opt.out.empty()) write_file(opt.out, cf_report_csv(report, method));
  if (!opt.diversity_out.empty()) write_file(opt.diversity_out, diversity_csv(report));
  std::cout << cf_report_table(report, method);
  return 0;
}

struct AugmentOpts {
  std::string data, schema, out_dir = ".";
  std::vector<std::string> models{"tree-ensemble"};
  std::vector<std::string> methods{"none", "nice"};
  std::uint64_t seed = 42;
  double split_fraction = 0.2;
  std::string transport = "mock";
  std::string endpoint = "https://api.openai.com";
  std::string model_name = "gpt-4o-mini";
  int shots = 3;
  std::size_t budget = 2000;
  std::size_t grid = 10;
  std::size_t cap = 0;
  bool minority_only = false;
  bool force = false;
};

int run_augment(const AugmentOpts& opt) {
  const fs::path out_dir(opt.out_dir);
  fs::create_directories(out_dir);
  const fs::path csv_path = out_dir / "experiment.csv";
  const fs::path md_path = out_dir / "experiment.md";
  ensure_writable(csv_path, opt.force);
  ensure_writable(md_path, opt.force);

  const auto schema = schema_from(opt.schema);
  const auto dataset = load_csv(opt.data, schema);
  std::vector<ModelKind> kinds;
  for (const auto& name : opt.models) kinds.push_back(model_kind_from_name(name));
  std::vector<AugMethod> methods;
  for (const auto& name : opt.methods) methods.push_back(aug_method_from_name(name));

  ExperimentContext ctx;
  ctx.prompt.shots = opt.shots;
  ctx.gen.seed = opt.seed;
  ctx.budget.max_evals = opt.budget;
  ctx.budget.grid = opt.grid;
  ctx.minority_only = opt.minority_only;
  if (opt.cap > 0) ctx.cap = opt.cap;
  if (opt.transport == "live") {
    TransportConfig tc;
    tc.base_url = opt.endpoint;
    tc.model = opt.model_name;
    ctx.transport = std::make_shared<HttpTransport>(tc);
  } else if (opt.transport != "mock") {
    fail(ErrorCode::Config, "transport must be 'mock' or 'live'");
  }

  auto report = run_experiment(dataset, kinds, methods, opt.seed, opt.split_fraction, ctx);
  report.dataset_id = fs::path(opt.data).filename().string();
  write_file(csv_path, experiment_csv(report));
  write_file(md_path, experiment_markdown(report));
  std::cout << experiment_markdown(report);
  std::cout << "wrote " << csv_path.string() << " and " << md_path.string() << "\n";
  return 0;
}

struct ReportOpts {
  std::string in, out;
  bool force = false;
};

int run_report(const ReportOpts& opt) {
  const std::string markdown = csv_to_markdown(read_file(opt.in));
  if (opt.out.empty()) {
    std::cout << markdown;
  } else {
    ensure_writable(opt.out, opt.force);
    write_file(opt.out, markdown);
    std::cout << "wrote " << opt.out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"counterfactual generation, evaluation, and augmentation for mixed tabular data"};
  app.require_subcommand(1);
  app.set_config("--config");

  IngestOpts ingest_opts;
  auto* ingest = app.add_subcommand("ingest", "validate a dataset against a schema");
  ingest->add_option("--data", ingest_opts.data, "CSV file")->required();
  ingest->add_option("--schema", ingest_opts.schema, "schema config (JSON)")->required();

  TrainOpts train_opts;
  auto* train_cmd = app.add_subcommand("train", "fit a classifier and save it");
  train_cmd->add_option("--data", train_opts.data)->required();
  train_cmd->add_option("--schema", train_opts.schema)->required();
  train_cmd->add_option("--kind", train_opts.kind, "tree-ensemble|boosted-trees|linear|neural (rf|xgb|svc|nn)");
  train_cmd->add_option("--seed", train_opts.seed);
  train_cmd->add_option("--out", train_opts.out, "model file")->required();
  train_cmd->add_flag("--force", train_opts.force, "overwrite existing outputs");
  train_cmd->add_option("--trees", train_opts.hp.trees);
  train_cmd->add_option("--max-depth", train_opts.hp.max_depth);
  train_cmd->add_option("--rounds", train_opts.hp.rounds);
  train_cmd->add_option("--boost-depth", train_opts.hp.boost_depth);
  train_cmd->add_option("--learning-rate", train_opts.hp.learning_rate);
  train_cmd->add_option("--epochs", train_opts.hp.epochs);
  train_cmd->add_option("--hidden", train_opts.hp.hidden);
  train_cmd->add_option("--l2", train_opts.hp.l2);

  GenOpts gen_opts;
  auto* gen = app.add_subcommand("gen", "generate a counterfactual batch");
  gen->add_option("--method", gen_opts.method, "llm-zero|llm-few|nice|cfnow|dice")->required();
  gen->add_option("--model", gen_opts.model, "trained model file")->required();
  gen->add_option("--data", gen_opts.data, "reference CSV (factuals + bounds)")->required();
  gen->add_option("--schema", gen_opts.schema)->required();
  gen->add_option("--out", gen_opts.out, "output JSON-lines file")->required();
  gen->add_option("--transport", gen_opts.transport, "mock|live");
  gen->add_option("--endpoint", gen_opts.endpoint, "chat-completions base URL");
  gen->add_option("--model-name", gen_opts.model_name, "remote model identifier");
  gen->add_option("--temperature", gen_opts.temperature);
  gen->add_option("--shots", gen_opts.shots, "few-shot exemplar count");
  gen->add_option("--seed", gen_opts.seed);
  gen->add_option("--limit", gen_opts.limit, "only the first N instances");
  gen->add_option("--budget", gen_opts.budget, "max model evaluations per instance");
  gen->add_option("--grid", gen_opts.grid, "continuous candidate grid size");
  gen->add_option("--k", gen_opts.dice_k, "counterfactuals per instance (dice)");
  gen->add_option("--retries", gen_opts.retries, "re-prompts per instance");
  gen->add_flag("--no-verify-flip", gen_opts.no_verify_flip, "skip flip verification");
  gen->add_option("--immutable-policy", gen_opts.immutable_policy, "repair|reject");
  gen->add_option("--parallel", gen_opts.parallel, "concurrent transport calls");
  gen->add_flag("--force", gen_opts.force);

  EvalOpts eval_opts;
  auto* eval = app.add_subcommand("eval", "score a counterfactual batch");
  eval->add_option("--cf", eval_opts.cf, "JSON-lines batch")->required();
  eval->add_option("--model", eval_opts.model)->required();
  eval->add_option("--data", eval_opts.data, "reference CSV for bounds")->required();
  eval->add_option("--schema", eval_opts.schema)->required();
  eval->add_option("--out", eval_opts.out, "report CSV");
  eval->add_option("--diversity-out", eval_opts.diversity_out, "per-feature diversity CSV");
  eval->add_flag("--force", eval_opts.force);

  AugmentOpts augment_opts;
  auto* augment = app.add_subcommand("augment", "run the augmentation experiment grid");
  augment->add_option("--data", augment_opts.data)->required();
  augment->add_option("--schema", augment_opts.schema)->required();
  augment->add_option("--out-dir", augment_opts.out_dir);
  augment->add_option("--models", augment_opts.models, "model kinds")->delimiter(',');
  augment->add_option("--methods", augment_opts.methods, "augmentation sources")->delimiter(',');
  augment->add_option("--seed", augment_opts.seed);
  augment->add_option("--split", augment_opts.split_fraction, "test fraction");
  augment->add_option("--transport", augment_opts.transport, "mock|live");
  augment->add_option("--endpoint", augment_opts.endpoint);
  augment->add_option("--model-name", augment_opts.model_name);
  augment->add_option("--shots", augment_opts.shots);
  augment->add_option("--budget", augment_opts.budget);
  augment->add_option("--grid", augment_opts.grid);
  augment->add_option("--cap", augment_opts.cap, "max counterfactual rows added");
  augment->add_flag("--minority-only", augment_opts.minority_only, "factuals from the majority class only");
  augment->add_flag("--force", augment_opts.force);

  ReportOpts report_opts;
  auto* report = app.add_subcommand("report", "render a saved CSV report as markdown");
  report->add_option("--in", report_opts.in)->required();
  report->add_option("--out", report_opts.out, "omit to print to stdout");
  report->add_flag("--force", report_opts.force);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (ingest->parsed()) return run_ingest(ingest_opts);
    if (train_cmd->parsed()) return run_train(train_opts);
    if (gen->parsed()) return run_gen(gen_opts);
    if (eval->parsed()) return run_eval(eval_opts);
    if (augment->parsed()) return run_augment(augment_opts);
    if (report->parsed()) return run_report(report_opts);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
