#include "strategist/search.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace strategist {

json SearchConfig::to_json() const {
  return {{"budget", budget},         {"c_puct", c_puct},
          {"alpha", alpha},           {"max_depth", max_depth},
          {"seed", seed},             {"mh_burn_in", mh.burn_in},
          {"mh_thin", mh.thin},       {"stratified_chance", stratified_chance},
          {"rollout_log", rollout_log}};
}

SearchConfig SearchConfig::from_json(const json& j) {
  SearchConfig c;
  c.budget = j.value("budget", c.budget);
  c.c_puct = j.value("c_puct", c.c_puct);
  c.alpha = j.value("alpha", c.alpha);
  c.max_depth = j.value("max_depth", c.max_depth);
  c.seed = j.value("seed", c.seed);
  c.mh.burn_in = j.value("mh_burn_in", c.mh.burn_in);
  c.mh.thin = j.value("mh_thin", c.mh.thin);
  c.stratified_chance = j.value("stratified_chance", c.stratified_chance);
  c.rollout_log = j.value("rollout_log", c.rollout_log);
  if (c.budget < 0) throw StrategistError("search budget must be non-negative");
  if (c.alpha < 0.0) throw StrategistError("alpha must be non-negative");
  return c;
}

double blended_q(int visits, double q_emp, double q_hat, double alpha) {
  if (visits == 0) return q_hat;
  return (visits * q_emp + alpha * q_hat) / (visits + alpha);
}

double puct_score(const std::vector<PuctTerm>& terms, double c_puct) {
  double score = 0.0;
  for (const auto& t : terms) {
    score += t.belief * (t.q + c_puct * t.prior * std::sqrt(t.parent_visits) / (1.0 + t.visits));
  }
  return score;
}

int NodeStats::total_visits() const {
  int total = 0;
  for (int v : visits) total += v;
  return total;
}

double NodeStats::q_emp(std::size_t i, int player) const {
  return visits[i] > 0 ? value_sums[i][player] / visits[i] : 0.0;
}

Searcher::Searcher(HeuristicHandle heuristic, SearchConfig config, OpponentModels models)
    : heuristic_(std::move(heuristic)), config_(std::move(config)), models_(std::move(models)) {
  if (config_.budget < 0) throw StrategistError("search budget must be non-negative");
  if (config_.alpha < 0.0) throw StrategistError("alpha must be non-negative");
}

const NodeStats* Searcher::node(const std::string& key) const {
  auto it = nodes_.find(key);
  return it == nodes_.end() ? nullptr : &it->second;
}

std::vector<const NodeStats*> Searcher::infoset(const std::string& key) const {
  std::vector<const NodeStats*> out;
  if (auto it = infosets_.find(key); it != infosets_.end()) {
    out.assign(it->second.begin(), it->second.end());
  }
  return out;
}

const std::vector<double>& Searcher::leaf_value(const State& state) {
  const std::string key = state.state_key();
  auto it = value_cache_.find(key);
  if (it != value_cache_.end()) return it->second;
  return value_cache_.emplace(key, heuristic_.value(state)).first->second;
}

NodeStats& Searcher::expand(const State& state) {
  const std::string key = state.state_key();
  NodeStats node;
  node.state_key = key;
  node.actor = state.current_actor();
  node.infoset_key = state.infoset_key(node.actor);
  node.actions = state.legal_actions();
  const std::size_t n = node.actions.size();
  const int players = state.num_players();
  node.visits.assign(n, 0);
  node.value_sums.assign(n, std::vector<double>(players, 0.0));
  node.q_hat.reserve(n);
  for (ActionId a : node.actions) {
    const auto next = state.child(a);
    node.q_hat.push_back(leaf_value(*next));
  }
  auto [it, inserted] = nodes_.emplace(key, std::move(node));
  infosets_[it->second.infoset_key].push_back(&it->second);
  return it->second;
}

std::size_t Searcher::select(const NodeStats& node) const {
  const int actor = node.actor.seat();
  const auto& members = infosets_.at(node.infoset_key);
  double total = 0.0;
  for (const NodeStats* s : members) total += s->total_visits();
  const std::size_t n = node.actions.size();
  const double prior = 1.0 / static_cast<double>(n);
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  std::vector<PuctTerm> terms;
  for (std::size_t i = 0; i < n; ++i) {
    terms.clear();
    for (const NodeStats* s : members) {
      if (s->actions.size() != n) continue;
      const double parent = s->total_visits();
      PuctTerm t;
      t.belief = total > 0.0 ? parent / total : 1.0 / static_cast<double>(members.size());
      t.visits = s->visits[i];
      t.q = blended_q(t.visits, s->q_emp(i, actor), s->q_hat[i][actor], config_.alpha);
      t.prior = prior;
      t.parent_visits = parent;
      terms.push_back(t);
    }
    const double score = puct_score(terms, config_.c_puct);
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

std::optional<ActionDistribution> Searcher::modelled_policy(const State& state) const {
  const int actor = state.current_actor().seat();
  if (auto it = models_.root_stage.find(actor); it != models_.root_stage.end() && state.stage_key() == root_stage_) {
    // Keep only legal entries and renormalise.
    std::vector<ActionProb> entries;
    double mass = 0.0;
    for (const auto& e : it->second.entries()) {
      if (state.is_legal(e.action) && e.prob > 0.0) {
        entries.push_back(e);
        mass += e.prob;
      }
    }
    if (mass > 0.0) {
      for (auto& e : entries) e.prob /= mass;
      double rest = 0.0;
      for (std::size_t i = 0; i + 1 < entries.size(); ++i) rest += entries[i].prob;
      entries.back().prob = std::max(0.0, 1.0 - rest);
      return ActionDistribution(std::move(entries));
    }
  }
  if (auto it = models_.fixed.find(actor); it != models_.fixed.end()) return it->second(state);
  return std::nullopt;
}

ActionId Searcher::choose_outcome(const State& state, const ActionDistribution& dist, Rng& rng) {
  if (!config_.stratified_chance) return dist.sample(rng);
  auto& counts = outcome_counts_[state.state_key()];
  const auto& entries = dist.entries();
  if (counts.size() != entries.size()) counts.assign(entries.size(), 0);
  double total = 0.0;
  for (int c : counts) total += c;
  std::size_t best = 0;
  double best_deficit = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].prob <= 0.0) continue;
    const double deficit = entries[i].prob * (total + 1.0) - counts[i];
    if (deficit > best_deficit + 1e-12) {
      best_deficit = deficit;
      best = i;
    }
  }
  ++counts[best];
  return entries[best].action;
}

void Searcher::simulate(const State& root, Rng& rng, std::ostream* log, int index) {
  std::vector<std::pair<NodeStats*, std::size_t>> path;
  std::vector<double> leaf;
  SharedState s = root.clone();
  int depth = 0;
  bool at_root = true;
  while (true) {
    if (s->is_terminal()) {
      leaf = s->returns();
      break;
    }
    if (depth >= config_.max_depth) {
      leaf = leaf_value(*s);
      break;
    }
    const PlayerId actor = s->current_actor();
    if (actor.is_environment()) {
      s = s->child(choose_outcome(*s, s->chance_outcomes(), rng));
      continue;
    }
    if (!at_root) {
      if (auto model = modelled_policy(*s)) {
        s = s->child(choose_outcome(*s, *model, rng));
        continue;
      }
    }
    auto it = nodes_.find(s->state_key());
    if (!at_root && it == nodes_.end()) {
      const auto legal = s->legal_actions();
      if (legal.size() == 1) {
        s = s->child(legal.front());
        continue;
      }
    }
    if (at_root) {
      // The root is always expanded and descended through, so every rollout
      // credits one root edge with a value from below it.
      at_root = false;
      NodeStats& node = it == nodes_.end() ? expand(*s) : it->second;
      const std::size_t i = select(node);
      path.emplace_back(&node, i);
      s = s->child(node.actions[i]);
      ++depth;
      continue;
    }
    if (it == nodes_.end()) {
      NodeStats& node = expand(*s);
      const std::size_t i = select(node);
      path.emplace_back(&node, i);
      leaf = node.q_hat[i];
      break;
    }
    NodeStats& node = it->second;
    if (node.actions.size() == 1 && !path.empty()) {
      s = s->child(node.actions.front());
      continue;
    }
    const std::size_t i = select(node);
    path.emplace_back(&node, i);
    s = s->child(node.actions[i]);
    ++depth;
  }
  for (auto& [node, i] : path) {
    ++node->visits[i];
    for (std::size_t p = 0; p < leaf.size(); ++p) node->value_sums[i][p] += leaf[p];
  }
  if (log) {
    json steps = json::array();
    for (auto& [node, i] : path) steps.push_back({{"state", node->state_key}, {"action", node->actions[i]}});
    (*log) << json{{"rollout", index}, {"path", steps}, {"leaf", leaf}}.dump() << '\n';
  }
}

SearchResult Searcher::run(const State& state) {
  if (state.is_terminal()) throw StrategistError("search from a terminal state");
  const PlayerId searcher = state.current_actor();
  if (searcher.is_environment()) throw StrategistError("search from a chance node");
  if (state.game() != heuristic_.spec().game) {
    throw EngineMismatchError("heuristic and state are from different games");
  }
  Rng rng(config_.seed);
  root_stage_ = state.stage_key();
  SearchResult result;

  if (config_.budget == 0) {
    const auto view = determinize(state, searcher, rng);
    result.chosen_action = greedy_action(heuristic_, *view);
    for (ActionId a : view->legal_actions()) {
      result.action_values.push_back({a, 0, heuristic_.value(*view->child(a))[searcher.seat()]});
    }
    result.root_value_estimate = ValueEstimate::from_values(heuristic_.value(*view));
    return result;
  }

  BeliefSampler sampler(state, searcher, config_.mh);
  if (models_.beliefs) sampler.set_beliefs(*models_.beliefs);
  std::unique_ptr<std::ofstream> log;
  if (!config_.rollout_log.empty()) {
    log = std::make_unique<std::ofstream>(config_.rollout_log, std::ios::app);
    if (!*log) throw StrategistError("cannot open rollout log '" + config_.rollout_log + "'");
  }
  for (int i = 0; i < config_.budget; ++i) {
    const auto root = sampler.sample_one(rng);
    simulate(*root, rng, log.get(), i);
  }
  result.rollouts = config_.budget;

  const auto members = infoset(state.infoset_key(searcher));
  const auto actions = state.legal_actions();
  const int players = state.num_players();
  std::vector<double> root_sum(players, 0.0);
  double root_visits = 0.0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    ActionStats st;
    st.action = actions[i];
    double sum = 0.0, q_hat = 0.0;
    int counted = 0;
    for (const NodeStats* n : members) {
      if (n->actions.size() != actions.size()) continue;
      st.visits += n->visits[i];
      sum += n->value_sums[i][searcher.seat()];
      q_hat += n->q_hat[i][searcher.seat()];
      ++counted;
      for (int p = 0; p < players; ++p) root_sum[p] += n->value_sums[i][p];
      root_visits += n->visits[i];
    }
    st.value = st.visits > 0 ? sum / st.visits : (counted ? q_hat / counted : 0.0);
    result.action_values.push_back(st);
  }
  std::vector<double> estimate(players, 0.0);
  if (root_visits > 0) {
    for (int p = 0; p < players; ++p) estimate[p] = root_sum[p] / root_visits;
  }
  result.root_value_estimate = ValueEstimate::from_values(estimate);
  const ActionStats* best = &result.action_values.front();
  for (const auto& st : result.action_values) {
    if (st.visits > best->visits) best = &st;
  }
  result.chosen_action = best->action;
  return result;
}

SearchResult run_search(const State& state, const HeuristicHandle& heuristic, const SearchConfig& config,
                        const OpponentModels& models) {
  Searcher searcher(heuristic, config, models);
  return searcher.run(state);
}

ActionId SearchPolicy::act(const State& state, Rng& rng) {
  const auto legal = state.legal_actions();
  if (legal.size() == 1) return legal.front();
  SearchConfig config = config_;
  config.seed = mix_seed(config_.seed, rng());
  return run_search(state, heuristic_, config).chosen_action;
}

}  // namespace strategist
