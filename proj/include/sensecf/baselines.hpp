#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <vector>

#include "sensecf/cf_metrics.hpp"

namespace sensecf {

struct SearchBudget {
  std::size_t max_evals = 2000;
  std::uint64_t seed = 0;
  std::size_t grid = 10;  // continuous candidate grid size (training quantiles)
};

struct DiceWeights {
  double proximity = 1.0;  // distance term
  double sparsity = 0.5;
  double diversity = 0.5;
};

namespace detail {

inline double score_toward(const TrainedModel& model, const Instance& x, int desired) {
  const double s = model.score(x);
  return desired == 1 ? s : 1.0 - s;
}

inline bool reaches(const TrainedModel& model, const Instance& x, int desired) {
  return model.predict(x).label == desired;
}

}  // namespace detail

/// Candidate values for single-feature moves: training quantiles for
/// continuous features (actual observed values, so moves stay plausible),
/// observed tokens for categoricals. Immutable features get no candidates.
inline std::vector<std::vector<Value>> candidate_grid(const FeatureSchema& schema, const Dataset& train,
                                                      const Bounds& bounds, std::size_t grid) {
  std::vector<std::vector<Value>> out(schema.predictor_count());
  for (std::size_t i = 0; i < schema.predictor_count(); ++i) {
    const FeatureSpec& spec = schema.predictor(i);
    if (!spec.is_mutable) continue;
    if (spec.is_continuous()) {
      std::vector<double> values;
      values.reserve(train.size());
      for (const auto& row : train.rows) values.push_back(as_number(row.values[i]));
      std::sort(values.begin(), values.end());
      std::set<double> chosen;
      for (std::size_t q = 0; q < grid; ++q) {
        const double level = (static_cast<double>(q) + 0.5) / static_cast<double>(grid);
        const std::size_t idx =
            static_cast<std::size_t>(std::lround(level * static_cast<double>(values.size() - 1)));
        chosen.insert(values[idx]);
      }
      for (double v : chosen) out[i].emplace_back(v);
    } else {
      for (const auto& token : bounds.entries[i].tokens) out[i].emplace_back(token);
    }
  }
  return out;
}

/// The closest training instance (by the mixed-feature distance) whose model
/// prediction is the opposite of x's; ties resolve to the lowest row index.
inline std::pair<std::size_t, Instance> nearest_unlike_neighbor(const Instance& x, const TrainedModel& model,
                                                                const Dataset& train, const Bounds& bounds) {
  const int factual_label = model.predict(x).label;
  std::optional<std::size_t> best;
  double best_distance = 0.0;
  for (std::size_t r = 0; r < train.size(); ++r) {
    if (model.predict(train.rows[r]).label == factual_label) continue;
    const double d = distance(x, train.rows[r], train.schema, bounds);
    if (!best || d < best_distance) {
      best = r;
      best_distance = d;
    }
  }
  if (!best) fail(ErrorCode::NoOppositeClass, "no training instance is predicted as the opposite class");
  return {*best, train.rows[*best]};
}

inline std::pair<std::size_t, Instance> nearest_unlike_neighbor(const Instance& x, const TrainedModel& model,
                                                                const Dataset& train) {
  return nearest_unlike_neighbor(x, model, train, feature_bounds(train));
}

/// All unlike neighbors ordered by (distance, row index).
inline std::vector<std::size_t> unlike_neighbors_ranked(const Instance& x, const TrainedModel& model,
                                                        const Dataset& train, const Bounds& bounds) {
  const int factual_label = model.predict(x).label;
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t r = 0; r < train.size(); ++r) {
    if (model.predict(train.rows[r]).label == factual_label) continue;
    ranked.emplace_back(distance(x, train.rows[r], train.schema, bounds), r);
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<std::size_t> out;
  out.reserve(ranked.size());
  for (const auto& [d, r] : ranked) out.push_back(r);
  return out;
}

namespace detail {

inline int resolve_desired(const TrainedModel& model, const Instance& x, std::optional<int> desired,
                           Prediction& factual_pred) {
  factual_pred = model.predict(x);
  const int target = desired.value_or(1 - factual_pred.label);
  if (target == factual_pred.label)
    fail(ErrorCode::AlreadyDesired, "factual is already predicted as the desired class");
  return target;
}

}  // namespace detail

/// Instance-grounded greedy search: copy one mutable feature value from the
/// nearest unlike neighbor per step, picking the copy that moves the score
/// furthest toward the desired class, until the prediction flips. Because
/// immutable features are never copied, a donor's full mutable profile may
/// fail to flip; in that case the next-nearest unlike neighbor is tried.
inline CfPair nice_cf(const Instance& x, const TrainedModel& model, const Dataset& train, const Bounds& bounds,
                      std::optional<int> desired = std::nullopt) {
  Prediction factual_pred;
  const int target = detail::resolve_desired(model, x, desired, factual_pred);
  const FeatureSchema& schema = train.schema;
  const auto donors = unlike_neighbors_ranked(x, model, train, bounds);
  if (donors.empty()) fail(ErrorCode::NoOppositeClass, "no training instance is predicted as the opposite class");

  std::optional<Instance> donor;
  for (std::size_t rank : donors) {
    Instance full_copy = x;
    for (std::size_t i = 0; i < schema.predictor_count(); ++i)
      if (schema.predictor(i).is_mutable) full_copy.values[i] = train.rows[rank].values[i];
    if (detail::reaches(model, full_copy, target)) {
      donor = train.rows[rank];
      break;
    }
  }
  if (!donor) fail(ErrorCode::NoFlip, "no unlike neighbor's mutable profile flips the prediction");
  const Instance& nun = *donor;

  Instance current = x;
  std::vector<std::size_t> remaining;
  for (std::size_t i = 0; i < schema.predictor_count(); ++i)
    if (schema.predictor(i).is_mutable && !(current.values[i] == nun.values[i])) remaining.push_back(i);

  while (!remaining.empty()) {
    double best_score = -1.0;
    std::size_t best_pos = 0;
    for (std::size_t k = 0; k < remaining.size(); ++k) {
      Instance candidate = current;
      candidate.values[remaining[k]] = nun.values[remaining[k]];
      const double s = detail::score_toward(model, candidate, target);
      if (s > best_score) {
        best_score = s;
        best_pos = k;
      }
    }
    current.values[remaining[best_pos]] = nun.values[remaining[best_pos]];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_pos));
    const Prediction pred = model.predict(current);
    if (pred.label == target) {
      CfPair pair;
      pair.factual = x;
      pair.counterfactual = std::move(current);
      pair.factual_pred = factual_pred;
      pair.cf_pred = pred;
      pair.method = "nice";
      return pair;
    }
  }
  fail(ErrorCode::NoFlip, "copying every mutable neighbor value did not flip the prediction");
}

/// Greedy find-then-revert search: phase 1 applies the single-feature change
/// with the greatest score improvement until the prediction flips or the
/// evaluation budget runs out; phase 2 undoes changes in ascending-benefit
/// order whenever the flip survives, minimizing sparsity and then distance.
inline CfPair cfnow_cf(const Instance& x, const TrainedModel& model, const Dataset& train, const Bounds& bounds,
                       const SearchBudget& budget, std::optional<int> desired = std::nullopt) {
  if (budget.max_evals == 0) fail(ErrorCode::Config, "search budget must be positive");
  Prediction factual_pred;
  const int target = detail::resolve_desired(model, x, desired, factual_pred);
  const FeatureSchema& schema = train.schema;
  const auto grid = candidate_grid(schema, train, bounds, budget.grid);

  Instance current = x;
  std::size_t evals = 0;
  double current_score = detail::score_toward(model, current, target);
  std::vector<std::pair<std::size_t, double>> change_benefit;  // feature -> last gain
  bool flipped = false;

  while (!flipped) {
    double best_score = current_score;
    std::optional<std::pair<std::size_t, Value>> best_move;
    bool exhausted = false;
    for (std::size_t i = 0; i < grid.size() && !exhausted; ++i) {
      for (const Value& v : grid[i]) {
        if (v == current.values[i]) continue;
        if (evals >= budget.max_evals) {
          exhausted = true;
          break;
        }
        Instance candidate = current;
        candidate.values[i] = v;
        ++evals;
        const double s = detail::score_toward(model, candidate, target);
        if (s > best_score + 1e-15) {
          best_score = s;
          best_move = {i, v};
        }
      }
    }
    if (!best_move) {
      fail(ErrorCode::BudgetExhausted,
           exhausted ? "evaluation budget exhausted before a flip" : "no single-feature change improves the score");
    }
    const double gain = best_score - current_score;
    current.values[best_move->first] = best_move->second;
    current_score = best_score;
    auto it = std::find_if(change_benefit.begin(), change_benefit.end(),
                           [&](const auto& cb) { return cb.first == best_move->first; });
    if (it == change_benefit.end()) {
      change_benefit.emplace_back(best_move->first, gain);
    } else {
      it->second = gain;
    }
    flipped = detail::reaches(model, current, target);
    if (!flipped && evals >= budget.max_evals)
      fail(ErrorCode::BudgetExhausted, "evaluation budget exhausted before a flip");
  }

  // Revert phase: drop changes the flip does not need, cheapest first.
  std::sort(change_benefit.begin(), change_benefit.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  for (const auto& [feature, benefit] : change_benefit) {
    if (current.values[feature] == x.values[feature]) continue;
    Instance candidate = current;
    candidate.values[feature] = x.values[feature];
    if (detail::reaches(model, candidate, target)) current = std::move(candidate);
  }

  // Sparsity pass: when the kept change set is still wider than one feature,
  // prefer any single-feature move that flips on its own.
  std::size_t kept = 0;
  for (std::size_t i = 0; i < schema.predictor_count(); ++i)
    kept += current.values[i] == x.values[i] ? 0 : 1;
  if (kept > 1) {
    double best_single = -1.0;
    std::optional<Instance> single;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (const Value& v : grid[i]) {
        if (v == x.values[i]) continue;
        Instance candidate = x;
        candidate.values[i] = v;
        const double s = detail::score_toward(model, candidate, target);
        const bool flips = target == 1 ? s >= model.threshold() : s > 1.0 - model.threshold();
        if (flips && s > best_single) {
          best_single = s;
          single = std::move(candidate);
        }
      }
    }
    if (single) current = std::move(*single);
  }

  CfPair pair;
  pair.factual = x;
  pair.counterfactual = std::move(current);
  pair.factual_pred = factual_pred;
  pair.cf_pred = model.predict(pair.counterfactual);
  pair.method = "cfnow";
  return pair;
}

/// Population-based randomized search balancing proximity, sparsity, and
/// diversity among the elite set; returns up to k distinct flipping
/// counterfactuals. Deterministic given the budget seed.
inline std::vector<CfPair> dice_cfs(const Instance& x, const TrainedModel& model, const FeatureSchema& schema,
                                    const Bounds& bounds, std::size_t k, const DiceWeights& weights,
                                    const SearchBudget& budget, std::optional<int> desired = std::nullopt) {
  if (k == 0) fail(ErrorCode::Config, "k must be at least 1");
  Prediction factual_pred;
  const int target = detail::resolve_desired(model, x, desired, factual_pred);
  Rng rng(budget.seed);

  std::vector<std::size_t> mutable_features;
  for (std::size_t i = 0; i < schema.predictor_count(); ++i)
    if (schema.predictor(i).is_mutable) mutable_features.push_back(i);
  if (mutable_features.empty()) return {};

  auto mutate_feature = [&](Instance& cand, std::size_t i) {
    const FeatureSpec& spec = schema.predictor(i);
    if (spec.is_continuous()) {
      cand.values[i] = rng.uniform(bounds.entries[i].lo, bounds.entries[i].hi);
    } else {
      const auto& tokens = bounds.entries[i].tokens;
      cand.values[i] = tokens[rng.below(tokens.size())];
    }
  };

  const std::size_t population_size = 20;
  const double mutation_rate = 0.3;
  const double d = static_cast<double>(schema.predictor_count());

  struct Member {
    Instance instance;
    double score_toward = 0.0;
    bool flipped = false;
  };

  std::vector<Member> elite;  // flipped candidates, deduplicated
  auto elite_diversity = [&](const Instance& cand) {
    if (elite.empty()) return 0.0;
    double total = 0.0;
    for (const auto& e : elite) total += distance(cand, e.instance, schema, bounds);
    return total / static_cast<double>(elite.size());
  };
  auto loss_of = [&](const Member& m) {
    const double hinge = std::max(0.0, 0.5 - m.score_toward);
    return hinge + weights.proximity * distance(x, m.instance, schema, bounds) +
           weights.sparsity * static_cast<double>(changed_feature_count(x, m.instance, schema, bounds)) / d -
           weights.diversity * elite_diversity(m.instance);
  };

  std::size_t evals = 0;
  auto evaluate = [&](Instance instance) {
    Member m;
    m.instance = std::move(instance);
    const Prediction pred = model.predict(m.instance);
    ++evals;
    m.score_toward = target == 1 ? pred.score : 1.0 - pred.score;
    m.flipped = pred.label == target;
    return m;
  };
  const std::size_t elite_cap = std::max<std::size_t>(4 * k, 20);
  auto proximity_loss = [&](const Instance& cand) {
    return weights.proximity * distance(x, cand, schema, bounds) +
           weights.sparsity * static_cast<double>(changed_feature_count(x, cand, schema, bounds)) / d;
  };
  auto consider_elite = [&](const Member& m) {
    if (!m.flipped) return;
    for (const auto& e : elite)
      if (e.instance == m.instance) return;
    elite.push_back(m);
    if (elite.size() > elite_cap) {
      std::stable_sort(elite.begin(), elite.end(), [&](const Member& a, const Member& b) {
        return proximity_loss(a.instance) < proximity_loss(b.instance);
      });
      elite.resize(elite_cap);
    }
  };

  std::vector<Member> population;
  population.reserve(population_size);
  for (std::size_t p = 0; p < population_size && evals < budget.max_evals; ++p) {
    Instance seeded = x;
    mutate_feature(seeded, mutable_features[rng.below(mutable_features.size())]);
    population.push_back(evaluate(std::move(seeded)));
    consider_elite(population.back());
  }

  while (evals < budget.max_evals && !population.empty()) {
    std::vector<Member> next;
    next.reserve(population_size);
    for (std::size_t p = 0; p < population_size && evals < budget.max_evals; ++p) {
      const Member* parent = &population[rng.below(population.size())];
      for (int round = 0; round < 2; ++round) {
        const Member* rival = &population[rng.below(population.size())];
        if (loss_of(*rival) < loss_of(*parent)) parent = rival;
      }
      Instance child = parent->instance;
      bool mutated = false;
      for (std::size_t i : mutable_features) {
        if (rng.uniform() < mutation_rate) {
          mutate_feature(child, i);
          mutated = true;
        }
      }
      if (!mutated) mutate_feature(child, mutable_features[rng.below(mutable_features.size())]);
      next.push_back(evaluate(std::move(child)));
      consider_elite(next.back());
    }
    if (next.empty()) break;
    population = std::move(next);
  }

  std::stable_sort(elite.begin(), elite.end(), [&](const Member& a, const Member& b) {
    return proximity_loss(a.instance) < proximity_loss(b.instance);
  });
  if (elite.size() > k) elite.resize(k);

  std::vector<CfPair> out;
  for (const auto& e : elite) {
    CfPair pair;
    pair.factual = x;
    pair.counterfactual = e.instance;
    pair.factual_pred = factual_pred;
    pair.cf_pred = model.predict(pair.counterfactual);
    pair.method = "dice";
    out.push_back(std::move(pair));
  }
  return out;
}

}  // namespace sensecf
