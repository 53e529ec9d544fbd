// End-to-end acceptance checks. Each criterion prints one [PASS]/[FAIL]
// line; the binary exits non-zero if any gating criterion fails. Criterion 10
// needs a configured live endpoint and never gates.

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <sstream>

#include "oracles.hpp"
#include "sensecf/sensecf.hpp"

using namespace sensecf;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& name, const std::string& detail, bool gating = true) {
  std::cout << (pass ? "[PASS] " : (gating ? "[FAIL] " : "[WARN] ")) << "criterion " << id << ": " << name;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << "\n";
  if (!pass && gating) ++g_failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

FeatureSchema heart_schema() { return load_schema(read_file(std::string(SENSECF_DATA_DIR) + "/heart.schema.json")); }
Dataset heart_data() { return load_csv(std::string(SENSECF_DATA_DIR) + "/heart.csv", heart_schema()); }

// --- randomized fixtures -----------------------------------------------

struct RandomSetup {
  FeatureSchema schema;
  Bounds bounds;
};

RandomSetup random_schema_and_bounds(Rng& rng, std::size_t max_d = 8) {
  std::vector<FeatureSpec> specs;
  const std::size_t d = 1 + rng.below(max_d);
  Bounds bounds;
  bounds.entries.resize(d);
  const std::vector<std::string> alphabet = {"A", "B", "C", "D"};
  for (std::size_t i = 0; i < d; ++i) {
    const std::string name = "f" + std::to_string(i);
    const bool is_mutable = rng.uniform() < 0.8;
    if (rng.uniform() < 0.5) {
      specs.push_back(FeatureSpec{name, FeatureKind::Continuous, is_mutable, FeatureRole::Predictor, {}});
      const double lo = rng.uniform(-5.0, 0.0);
      const double hi = rng.uniform() < 0.1 ? lo : lo + rng.uniform(0.5, 5.0);
      bounds.entries[i] = {lo, hi, {}};
    } else {
      const std::size_t domain = 2 + rng.below(3);
      std::vector<std::string> categories(alphabet.begin(), alphabet.begin() + static_cast<long>(domain));
      specs.push_back(FeatureSpec{name, FeatureKind::Categorical, is_mutable, FeatureRole::Predictor, categories});
      std::vector<std::string> observed;
      for (const auto& token : categories)
        if (rng.uniform() < 0.7) observed.push_back(token);
      if (observed.empty()) observed.push_back(categories[rng.below(domain)]);
      bounds.entries[i] = {0.0, 0.0, observed};  // already sorted: subsequence of a sorted domain
    }
  }
  specs.push_back(FeatureSpec{"label", FeatureKind::Categorical, false, FeatureRole::Target, {"0", "1"}});
  return {FeatureSchema::from_features(std::move(specs)), std::move(bounds)};
}

Instance random_instance(Rng& rng, const FeatureSchema& schema, const Bounds& bounds) {
  Instance x;
  for (std::size_t i = 0; i < schema.predictor_count(); ++i) {
    const FeatureSpec& spec = schema.predictor(i);
    if (spec.is_continuous()) {
      x.values.emplace_back(rng.uniform(bounds.entries[i].lo - 1.0, bounds.entries[i].hi + 1.0));
    } else {
      x.values.emplace_back(spec.categories[rng.below(spec.categories.size())]);
    }
  }
  return x;
}

CfBatch random_batch(Rng& rng, const FeatureSchema& schema, const Bounds& bounds) {
  CfBatch batch;
  const std::size_t n = 1 + rng.below(20);
  for (std::size_t k = 0; k < n; ++k) {
    CfPair pair;
    pair.factual = random_instance(rng, schema, bounds);
    pair.counterfactual = random_instance(rng, schema, bounds);
    for (std::size_t i = 0; i < schema.predictor_count(); ++i)
      if (rng.uniform() < 0.3) pair.counterfactual.values[i] = pair.factual.values[i];
    pair.factual_pred = {static_cast<int>(rng.below(2)), rng.uniform()};
    pair.cf_pred = {static_cast<int>(rng.below(2)), rng.uniform()};
    pair.method = "synthetic";
    batch.pairs.push_back(std::move(pair));
  }
  batch.failures = rng.below(3);
  return batch;
}

// --- criteria ------------------------------------------------------------

void criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(20240601);
  double worst = 0.0;
  for (int b = 0; b < 200; ++b) {
    auto setup = random_schema_and_bounds(rng);
    const CfBatch batch = random_batch(rng, setup.schema, setup.bounds);
    double mean_dist = 0.0;
    for (const auto& pair : batch.pairs)
      mean_dist += distance(pair.factual, pair.counterfactual, setup.schema, setup.bounds);
    mean_dist /= static_cast<double>(batch.size());

    worst = std::max(worst, std::abs(validity(batch) - oracle::validity(batch)));
    worst = std::max(worst, std::abs(mean_dist - oracle::mean_distance(batch, setup.schema, setup.bounds)));
    worst = std::max(worst, std::abs(sparsity(batch, setup.schema, setup.bounds) -
                                     oracle::sparsity(batch, setup.schema, setup.bounds, kSparsityEpsilon)));
    worst = std::max(worst, std::abs(plausibility(batch, setup.schema, setup.bounds) -
                                     oracle::plausibility(batch, setup.schema, setup.bounds)));
  }
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << "max |delta| = " << worst << ", " << elapsed << " s";
  report(1, worst < 1e-12 && elapsed < 5.0, "metric oracle equivalence on 200 random batches", detail.str());
}

void criterion_2() {
  auto schema = FeatureSchema::from_features(
      {FeatureSpec{"a", FeatureKind::Continuous, true, FeatureRole::Predictor, {}},
       FeatureSpec{"b", FeatureKind::Continuous, true, FeatureRole::Predictor, {}},
       FeatureSpec{"c", FeatureKind::Continuous, true, FeatureRole::Predictor, {}},
       FeatureSpec{"d", FeatureKind::Continuous, true, FeatureRole::Predictor, {}},
       FeatureSpec{"e", FeatureKind::Continuous, true, FeatureRole::Predictor, {}},
       FeatureSpec{"label", FeatureKind::Categorical, false, FeatureRole::Target, {"0", "1"}}});
  Bounds bounds;
  bounds.entries.assign(5, Bounds::Entry{0.0, 10.0, {}});
  const Instance base{{Value{1.0}, Value{2.0}, Value{3.0}, Value{4.0}, Value{5.0}}};

  CfBatch fixture;
  CfPair two = {base, base, {0, 0.2}, {1, 0.8}, "fixture", 1};
  two.counterfactual.values[0] = 9.0;
  two.counterfactual.values[1] = 9.0;
  CfPair four = {base, base, {0, 0.2}, {1, 0.8}, "fixture", 1};
  for (int i = 0; i < 4; ++i) four.counterfactual.values[static_cast<std::size_t>(i)] = 9.0;
  fixture.pairs = {two, four};

  CfBatch identity;
  identity.pairs = {CfPair{base, base, {0, 0.2}, {0, 0.2}, "fixture", 1},
                    CfPair{base, base, {1, 0.9}, {1, 0.9}, "fixture", 1}};

  const double s_fixture = sparsity(fixture, schema, bounds);
  const double s_identity = sparsity(identity, schema, bounds);
  std::ostringstream detail;
  detail << "{2,4} -> " << s_fixture << ", identity -> " << s_identity;
  report(2, s_fixture == 3.0 && s_identity == 0.0, "sparsity spot check", detail.str());
}

void criterion_3() {
  const auto start = std::chrono::steady_clock::now();
  const auto data = heart_data();
  auto [train_split, test_split] = split(data, 0.2, 42, true);
  const auto model = train(ModelKind::TreeEnsemble, train_split, Hyperparams{}, 42);
  const auto bounds = feature_bounds(train_split);
  const SearchBudget budget;

  std::size_t nice_ok = 0, cfnow_ok = 0, nice_flips = 0, cfnow_flips = 0;
  for (const auto& row : train_split.rows) {
    try {
      const CfPair pair = nice_cf(row, model, train_split, bounds);
      ++nice_ok;
      nice_flips += pair.flipped() ? 1 : 0;
    } catch (const Error&) {
    }
    try {
      const CfPair pair = cfnow_cf(row, model, train_split, bounds, budget);
      ++cfnow_ok;
      cfnow_flips += pair.flipped() ? 1 : 0;
    } catch (const Error&) {
    }
  }
  const double n = static_cast<double>(train_split.size());
  const double nice_rate = static_cast<double>(nice_ok) / n;
  const double cfnow_rate = static_cast<double>(cfnow_ok) / n;
  const bool all_valid = nice_flips == nice_ok && cfnow_flips == cfnow_ok;
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << "nice " << nice_rate << ", cfnow " << cfnow_rate << ", validity " << (all_valid ? "1.0" : "<1.0") << ", "
         << elapsed << " s";
  report(3, nice_rate >= 0.9 && cfnow_rate >= 0.9 && all_valid && elapsed < 60.0,
         "baseline construction validity on the heart train split", detail.str());
}

void criterion_4() {
  Rng rng(777);
  int hits = 0;
  const int cases = 50;
  for (int c = 0; c < cases; ++c) {
    while (true) {
      auto setup = random_schema_and_bounds(rng, 3);
      // all-mutable variant keeps the exhaustive search honest
      std::vector<FeatureSpec> specs;
      for (const auto& f : setup.schema.predictors()) {
        FeatureSpec copy = f;
        copy.is_mutable = true;
        specs.push_back(copy);
      }
      specs.push_back(setup.schema.target());
      const auto schema = FeatureSchema::from_features(std::move(specs));

      Dataset train_set;
      train_set.schema = schema;
      for (int r = 0; r < 40; ++r) {
        Instance row;
        for (std::size_t i = 0; i < schema.predictor_count(); ++i) {
          const FeatureSpec& spec = schema.predictor(i);
          if (spec.is_continuous()) {
            row.values.emplace_back(rng.uniform(setup.bounds.entries[i].lo, setup.bounds.entries[i].hi + 1.0));
          } else {
            row.values.emplace_back(spec.categories[rng.below(spec.categories.size())]);
          }
        }
        train_set.rows.push_back(std::move(row));
        train_set.labels.push_back(static_cast<int>(rng.below(2)));
      }
      if (train_set.count_label(0) == 0 || train_set.count_label(1) == 0) continue;

      Hyperparams hp;
      hp.trees = 15;
      hp.max_depth = 4;
      const auto model = train(ModelKind::TreeEnsemble, train_set, hp, rng.next());
      const auto bounds = feature_bounds(train_set);
      const auto grid = candidate_grid(schema, train_set, bounds, 10);
      const Instance x = train_set.rows[rng.below(train_set.size())];
      const int desired = 1 - model.predict(x).label;
      const int optimal = oracle::minimal_flip_sparsity(x, model, grid, desired);
      if (optimal <= 0) continue;  // no grid-reachable flip (or trivial); next fixture

      SearchBudget budget;
      budget.max_evals = 100000;
      try {
        const CfPair pair = cfnow_cf(x, model, train_set, bounds, budget);
        const int got = static_cast<int>(changed_feature_count(x, pair.counterfactual, schema, bounds));
        if (got == optimal) ++hits;
      } catch (const Error&) {
        // counts as a miss
      }
      break;
    }
  }
  const double rate = static_cast<double>(hits) / cases;
  std::ostringstream detail;
  detail << "optimal sparsity in " << hits << "/" << cases << " cases (rate " << rate << ")";
  report(4, rate >= 0.95, "cfnow revert-phase sparsity vs exhaustive search", detail.str());
}

void criterion_5() {
  const auto data = heart_data();
  auto [train_split, test_split] = split(data, 0.2, 42, true);
  const auto model = train(ModelKind::TreeEnsemble, train_split, Hyperparams{}, 42);
  const auto bounds = feature_bounds(train_split);
  const auto& schema = train_split.schema;

  std::vector<Instance> factuals(train_split.rows.begin(), train_split.rows.begin() + 100);
  PromptSpec spec;
  spec.shots = 3;
  GenConfig config;
  config.seed = 7;

  auto run = [&]() {
    MockTransport transport(train_split, model, config.seed);
    return generate_llm_batch(factuals, model, transport, schema, spec, config, &train_split);
  };
  const CfBatch batch_a = run();
  const CfBatch batch_b = run();

  bool immutables_ok = true;
  for (const auto& pair : batch_a.pairs) {
    for (std::size_t i = 0; i < schema.predictor_count(); ++i) {
      if (schema.predictor(i).is_mutable) continue;
      if (schema.predictor(i).is_continuous()) {
        const double a = as_number(pair.factual.values[i]);
        const double b = as_number(pair.counterfactual.values[i]);
        if (std::memcmp(&a, &b, sizeof(double)) != 0) immutables_ok = false;
      } else if (as_token(pair.factual.values[i]) != as_token(pair.counterfactual.values[i])) {
        immutables_ok = false;
      }
    }
  }
  const double v = batch_a.empty() ? 0.0 : validity(batch_a);
  const double p = batch_a.empty() ? 0.0 : plausibility(batch_a, schema, bounds);
  const bool identical = batch_to_jsonl(batch_a, schema) == batch_to_jsonl(batch_b, schema);
  std::ostringstream detail;
  detail << batch_a.size() << " pairs, validity " << v << ", plausibility " << p << ", immutables "
         << (immutables_ok ? "intact" : "violated") << ", reruns " << (identical ? "byte-identical" : "diverge");
  report(5, !batch_a.empty() && v == 1.0 && p == 1.0 && immutables_ok && identical,
         "mock-transport end-to-end pipeline over 100 instances", detail.str());
}

void criterion_6() {
  const auto start = std::chrono::steady_clock::now();
  const auto data = heart_data();
  ExperimentContext ctx;
  const auto result = run_experiment(data, {ModelKind::TreeEnsemble}, {AugMethod::None, AugMethod::Nice, AugMethod::LlmFew},
                                     42, 0.2, ctx);
  double base = -1.0, nice_acc = -1.0, llm_acc = -1.0;
  for (const auto& cell : result.cells) {
    if (!cell.report) continue;
    if (cell.method == "none") base = cell.report->accuracy;
    if (cell.method == "nice") nice_acc = cell.report->accuracy;
    if (cell.method == "llm-few") llm_acc = cell.report->accuracy;
  }
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << "baseline " << base << ", nice " << nice_acc << ", llm-few " << llm_acc << ", " << elapsed << " s";
  report(6,
         base >= 0.80 && nice_acc >= base - 0.02 && llm_acc >= base - 0.02 && elapsed < 120.0,
         "desk-scale augmentation grid on heart data", detail.str());
}

void criterion_7() {
  const auto data = heart_data();
  double delta_sum = 0.0;
  std::ostringstream deltas;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto [pool, test_split] = split(data, 0.25, seed, true);
    Dataset imbalanced;
    imbalanced.schema = pool.schema;
    std::size_t majority = 0, minority = 0;
    for (std::size_t r = 0; r < pool.size(); ++r) {
      if (pool.labels[r] == 1 && majority < 120) {
        imbalanced.rows.push_back(pool.rows[r]);
        imbalanced.labels.push_back(1);
        ++majority;
      } else if (pool.labels[r] == 0 && minority < 30) {
        imbalanced.rows.push_back(pool.rows[r]);
        imbalanced.labels.push_back(0);
        ++minority;
      }
    }

    const auto reference = train(ModelKind::TreeEnsemble, imbalanced, Hyperparams{}, seed);
    const double base_acc = classification_report(reference, test_split).accuracy;

    std::vector<Instance> factuals;
    for (std::size_t r = 0; r < imbalanced.size(); ++r)
      if (imbalanced.labels[r] == 1) factuals.push_back(imbalanced.rows[r]);

    MockTransport transport(imbalanced, reference, seed);
    PromptSpec spec;
    spec.shots = 3;
    GenConfig config;
    config.seed = seed;
    const CfBatch batch = generate_llm_batch(factuals, reference, transport, imbalanced.schema, spec, config,
                                             &imbalanced);
    std::map<AugMethod, CfBatch> batches;
    batches[AugMethod::LlmFew] = batch;
    AugPolicy policy;
    policy.sources = {AugMethod::LlmFew};
    const auto augmented = build_augmented(imbalanced, batches, policy);
    const auto retrained = train(ModelKind::TreeEnsemble, augmented.data, Hyperparams{}, seed);
    const double aug_acc = classification_report(retrained, test_split).accuracy;
    delta_sum += aug_acc - base_acc;
    deltas << (seed > 1 ? ", " : "") << (aug_acc - base_acc);
  }
  const double mean_delta = delta_sum / 5.0;
  std::ostringstream detail;
  detail << "per-seed deltas [" << deltas.str() << "], mean " << mean_delta;
  report(7, mean_delta >= 0.0, "augmentation benefit under a 4:1 imbalance (150 training rows)", detail.str());
}

void criterion_8() {
  Rng data_rng(99);
  const std::size_t dims = 6, rows = 20, hidden = 8;
  std::vector<std::vector<double>> X(rows, std::vector<double>(dims));
  std::vector<int> y(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < dims; ++c) X[r][c] = data_rng.uniform();
    y[r] = static_cast<int>(data_rng.below(2));
  }

  double worst = 0.0;
  for (std::uint64_t init = 11; init <= 13; ++init) {
    Rng rng(init);
    const auto params = NeuralModel::init_params(dims, hidden, rng);
    const auto grad = NeuralModel::gradient(params, dims, hidden, X, y, 0.0);
    for (int probe = 0; probe < 10; ++probe) {
      const std::size_t coord = rng.below(params.size());
      const double h = 1e-5;
      auto plus = params, minus = params;
      plus[coord] += h;
      minus[coord] -= h;
      const double numeric =
          (NeuralModel::loss(plus, dims, hidden, X, y, 0.0) - NeuralModel::loss(minus, dims, hidden, X, y, 0.0)) /
          (2.0 * h);
      const double denom = std::max(1e-8, std::abs(grad[coord]) + std::abs(numeric));
      worst = std::max(worst, std::abs(grad[coord] - numeric) / denom);
    }
  }
  std::ostringstream detail;
  detail << "max relative error " << worst;
  report(8, worst < 1e-4, "neural loss gradient vs central finite differences", detail.str());
}

void criterion_9() {
  const std::vector<double> fixture_scores = {0.8, 0.6, 0.6, 0.2};
  const std::vector<int> fixture_labels = {1, 0, 1, 0};
  const double fixture = auc(fixture_scores, fixture_labels);

  Rng rng(31415);
  double worst = 0.0;
  for (int c = 0; c < 100; ++c) {
    const std::size_t n = 2 + rng.below(40);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    const bool quantize = rng.uniform() < 0.5;
    for (std::size_t i = 0; i < n; ++i) {
      double s = rng.uniform();
      if (quantize) s = std::round(s * 10.0) / 10.0;
      scores[i] = s;
      labels[i] = static_cast<int>(rng.below(2));
    }
    labels[0] = 0;
    labels[1] = 1;  // both classes present
    worst = std::max(worst, std::abs(auc(scores, labels) - oracle::auc(scores, labels)));
  }
  std::ostringstream detail;
  detail << "fixture " << fixture << ", max |delta| " << worst;
  report(9, fixture == 0.875 && worst < 1e-12, "rank AUC vs brute-force pairwise AUC", detail.str());
}

void criterion_10() {
  const char* endpoint = std::getenv("SENSECF_LIVE_ENDPOINT");
  const char* key = std::getenv("SENSECF_API_KEY");
  if (endpoint == nullptr || key == nullptr || *endpoint == '\0' || *key == '\0') {
    std::cout << "[SKIP] criterion 10: live-endpoint check (set SENSECF_LIVE_ENDPOINT and SENSECF_API_KEY; "
                 "non-gating, excluded from CI)\n";
    return;
  }
  try {
    const auto data = heart_data();
    auto [train_split, test_split] = split(data, 0.2, 42, true);
    const auto model = train(ModelKind::TreeEnsemble, train_split, Hyperparams{}, 42);
    const auto bounds = feature_bounds(train_split);

    TransportConfig tc;
    tc.base_url = endpoint;
    if (const char* name = std::getenv("SENSECF_LIVE_MODEL"); name != nullptr && *name != '\0') tc.model = name;
    HttpTransport transport(tc);

    std::vector<Instance> factuals(train_split.rows.begin(), train_split.rows.begin() + 50);
    PromptSpec spec;
    spec.shots = 3;
    GenConfig config;
    config.verify_flip = false;  // measure the raw generator, like the reported numbers
    const CfBatch batch = generate_llm_batch(factuals, model, transport, train_split.schema, spec, config,
                                             &train_split);
    if (batch.empty()) {
      report(10, false, "live 3-shot generation", "no pairs produced", false);
      return;
    }
    const double v = validity(batch);
    const double p = plausibility(batch, train_split.schema, bounds);
    std::ostringstream detail;
    detail << batch.size() << " pairs, validity " << v << ", plausibility " << p;
    report(10, v >= 0.85 && p >= 0.90, "live 3-shot generation over 50 instances", detail.str(), false);
  } catch (const std::exception& e) {
    report(10, false, "live 3-shot generation", e.what(), false);
  }
}

}  // namespace

int main() {
  struct Step {
    int id;
    void (*fn)();
  };
  const Step steps[] = {{1, criterion_1}, {2, criterion_2}, {3, criterion_3}, {4, criterion_4}, {5, criterion_5},
                        {6, criterion_6}, {7, criterion_7}, {8, criterion_8}, {9, criterion_9}, {10, criterion_10}};
  for (const auto& step : steps) {
    try {
      step.fn();
    } catch (const std::exception& e) {
      report(step.id, false, "unexpected exception", e.what());
    }
  }
  if (g_failures > 0) {
    std::cout << g_failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all gating criteria passed\n";
  return 0;
}
