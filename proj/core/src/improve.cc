#include "strategist/improve.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>

namespace strategist {

namespace {

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

json optional_json(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

std::optional<std::string> optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

// Index drawn from softmax(scores / temperature); temperature ≤ 0 is argmax
// with ties to the lowest index.
std::size_t sample_softmax(const std::vector<double>& scores, double temperature, Rng& rng) {
  const auto best = static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
  if (temperature <= 0.0 || scores.size() == 1) return best;
  std::vector<double> weights;
  weights.reserve(scores.size());
  for (double s : scores) weights.push_back(std::exp((s - scores[best]) / temperature));
  double total = 0.0;
  for (double w : weights) total += w;
  double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return best;
}

}  // namespace

std::string to_string(StrategyKind kind) {
  return kind == StrategyKind::kValueHeuristic ? "value_heuristic" : "dialogue_guide";
}

StrategyKind strategy_kind_from_string(const std::string& name) {
  if (name == "value_heuristic") return StrategyKind::kValueHeuristic;
  if (name == "dialogue_guide") return StrategyKind::kDialogueGuide;
  throw StrategistError("unknown strategy kind '" + name + "'");
}

std::string KeyState::digest() const { return hex64(llm::fnv1a64(state.dump())); }

json KeyState::to_json() const {
  return {{"state_text", state_text},
          {"state", state},
          {"heuristic_output", json::parse(heuristic_output.dump())},
          {"intermediates", json::parse(intermediates.dump())},
          {"heuristic_value", heuristic_value},
          {"search_estimate", search_estimate},
          {"actual", actual},
          {"focal_player", focal_player},
          {"discrepancy", discrepancy},
          {"position", position}};
}

KeyState KeyState::from_json(const json& j) {
  KeyState k;
  k.state_text = j.value("state_text", std::string());
  k.state = j.value("state", json());
  k.heuristic_output = ordered_json::parse(j.value("heuristic_output", json::array()).dump());
  k.intermediates = ordered_json::parse(j.value("intermediates", json::object()).dump());
  k.heuristic_value = j.value("heuristic_value", std::vector<double>{});
  k.search_estimate = j.value("search_estimate", std::vector<double>{});
  k.actual = j.value("actual", std::vector<double>{});
  k.focal_player = j.value("focal_player", 0);
  k.discrepancy = j.value("discrepancy", 0.0);
  k.position = j.value("position", 0);
  return k;
}

std::vector<KeyState> select_key_states(std::vector<KeyState> candidates, int k) {
  std::stable_sort(candidates.begin(), candidates.end(), [](const KeyState& a, const KeyState& b) {
    if (a.discrepancy != b.discrepancy) return a.discrepancy > b.discrepancy;
    return a.position < b.position;
  });
  if (k >= 0 && candidates.size() > static_cast<std::size_t>(k)) candidates.resize(static_cast<std::size_t>(k));
  return candidates;
}

json StrategyNode::to_json() const {
  json j{{"id", id},
         {"kind", strategist::to_string(kind)},
         {"score", score ? json(*score) : json(nullptr)},
         {"parent", optional_json(parent)},
         {"idea", optional_json(idea)},
         {"generation", generation},
         {"failure", optional_json(failure)}};
  if (heuristic) j["heuristic"] = heuristic->to_json();
  if (guide) j["guide"] = guide->to_json();
  j["feedback"] = json::array();
  for (const auto& k : feedback) j["feedback"].push_back(k.to_json());
  return j;
}

StrategyNode StrategyNode::from_json(const json& j) {
  StrategyNode n;
  n.id = j.value("id", std::string());
  n.kind = strategy_kind_from_string(j.value("kind", std::string("value_heuristic")));
  if (j.contains("score") && !j.at("score").is_null()) n.score = j.at("score").get<double>();
  n.parent = optional_string(j, "parent");
  n.idea = optional_string(j, "idea");
  n.generation = j.value("generation", 0);
  n.failure = optional_string(j, "failure");
  if (j.contains("heuristic")) n.heuristic = HeuristicSpec::from_json(j.at("heuristic"));
  if (j.contains("guide")) n.guide = DialogueGuide::from_json(j.at("guide"));
  for (const auto& k : j.value("feedback", json::array())) n.feedback.push_back(KeyState::from_json(k));
  return n;
}

std::string StrategyTree::add(StrategyNode node) {
  node.id = "s" + std::to_string(nodes_.size());
  if (node.parent && !contains(*node.parent)) throw StrategistError("parent '" + *node.parent + "' not in the tree");
  if (node.heuristic) {
    node.heuristic->id = node.id;
    node.heuristic->parent_id = node.parent;
    node.heuristic->idea_id = node.idea;
  }
  index_[node.id] = nodes_.size();
  nodes_.push_back(std::move(node));
  return nodes_.back().id;
}

StrategyNode& StrategyTree::at(const std::string& id) {
  auto it = index_.find(id);
  if (it == index_.end()) throw StrategistError("no strategy '" + id + "'");
  return nodes_[it->second];
}

const StrategyNode& StrategyTree::at(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw StrategistError("no strategy '" + id + "'");
  return nodes_[it->second];
}

std::vector<const StrategyNode*> StrategyTree::ranked() const {
  std::vector<const StrategyNode*> out;
  for (const auto& n : nodes_) {
    if (n.usable() && n.score) out.push_back(&n);
  }
  std::stable_sort(out.begin(), out.end(), [](const StrategyNode* a, const StrategyNode* b) { return *a->score > *b->score; });
  return out;
}

std::vector<std::string> StrategyTree::lineage(const std::string& id) const {
  std::vector<std::string> out;
  std::optional<std::string> cur = id;
  while (cur) {
    out.push_back(*cur);
    cur = at(*cur).parent;
    if (out.size() > nodes_.size()) throw StrategistError("strategy lineage has a cycle");
  }
  std::reverse(out.begin(), out.end());
  return out;
}

json StrategyTree::to_json() const {
  json j = json::array();
  for (const auto& n : nodes_) j.push_back(n.to_json());
  return {{"nodes", j}};
}

StrategyTree StrategyTree::from_json(const json& j) {
  StrategyTree t;
  for (const auto& n : j.at("nodes")) {
    StrategyNode node = StrategyNode::from_json(n);
    const std::string expected = "s" + std::to_string(t.nodes_.size());
    if (node.id != expected) throw StrategistError("strategy ids must run s0, s1, ... in order");
    t.add(std::move(node));
  }
  return t;
}

const StrategyNode& select_strategy(const StrategyTree& tree, double temperature, Rng& rng) {
  auto ranked = tree.ranked();
  if (ranked.empty()) throw StrategistError("no evaluated strategy to select");
  if (ranked.size() > 2) ranked.resize(2);
  std::vector<double> z;
  for (const auto* n : ranked) z.push_back(*n->score);
  return *ranked[sample_softmax(z, temperature, rng)];
}

json Idea::to_json() const {
  return {{"id", id},           {"text", text},
          {"score", score},     {"tries", tries},
          {"origin_strategy", origin_strategy}, {"origin_key_state", origin_key_state},
          {"improvements", improvements}};
}

Idea Idea::from_json(const json& j) {
  Idea i;
  i.id = j.at("id").get<std::string>();
  i.text = j.at("text").get<std::string>();
  i.score = j.value("score", 0.0);
  i.tries = j.value("tries", 0);
  i.origin_strategy = j.value("origin_strategy", std::string());
  i.origin_key_state = j.value("origin_key_state", std::string());
  i.improvements = j.value("improvements", std::vector<double>{});
  return i;
}

double ucb_score(double mean, double c, long total_tries, long tries) {
  if (tries <= 0) return std::numeric_limits<double>::infinity();
  const double log_total = total_tries > 1 ? std::log(static_cast<double>(total_tries)) : 0.0;
  return mean + c * std::sqrt(log_total / static_cast<double>(tries));
}

std::string IdeaQueue::add(std::string text, std::string origin_strategy, std::string origin_key_state) {
  Idea idea;
  idea.id = "i" + std::to_string(ideas_.size());
  idea.text = std::move(text);
  idea.origin_strategy = std::move(origin_strategy);
  idea.origin_key_state = std::move(origin_key_state);
  ideas_.push_back(std::move(idea));
  return ideas_.back().id;
}

const Idea& IdeaQueue::at(const std::string& id) const {
  for (const auto& i : ideas_) {
    if (i.id == id) return i;
  }
  throw StrategistError("no idea '" + id + "'");
}

long IdeaQueue::total_tries() const {
  long n = 0;
  for (const auto& i : ideas_) n += i.tries;
  return n;
}

const Idea& IdeaQueue::select(double c, double temperature, Rng& rng, const std::map<std::string, int>& pending) const {
  if (ideas_.empty()) throw EmptyQueueError("idea queue is empty");
  std::vector<long> tries;
  long total = 0;
  for (const auto& i : ideas_) {
    auto it = pending.find(i.id);
    tries.push_back(i.tries + (it == pending.end() ? 0 : it->second));
    total += tries.back();
  }
  for (std::size_t i = 0; i < ideas_.size(); ++i) {
    if (tries[i] == 0) return ideas_[i];
  }
  std::vector<double> scores;
  for (std::size_t i = 0; i < ideas_.size(); ++i) scores.push_back(ucb_score(ideas_[i].score, c, total, tries[i]));
  return ideas_[sample_softmax(scores, temperature, rng)];
}

void IdeaQueue::update(const std::string& id, double improvement) {
  for (auto& i : ideas_) {
    if (i.id != id) continue;
    const double n = i.tries;
    i.score = n / (n + 1.0) * i.score + 1.0 / (n + 1.0) * improvement;
    ++i.tries;
    i.improvements.push_back(improvement);
    return;
  }
  throw StrategistError("no idea '" + id + "'");
}

json IdeaQueue::to_json() const {
  json j = json::array();
  for (const auto& i : ideas_) j.push_back(i.to_json());
  return {{"ideas", j}};
}

IdeaQueue IdeaQueue::from_json(const json& j) {
  IdeaQueue q;
  for (const auto& i : j.at("ideas")) q.ideas_.push_back(Idea::from_json(i));
  return q;
}

void EvolutionConfig::validate() const {
  if (num_ideas < 1 || strategies_per_step < 1 || evolutions < 1 || feedback_examples < 1) {
    throw StrategistError("evolution counts must be at least 1");
  }
  if (ucb_c < 0.0 || strategy_temperature < 0.0 || idea_temperature < 0.0) {
    throw StrategistError("ucb_c and temperatures must be non-negative");
  }
}

json EvolutionConfig::to_json() const {
  return {{"num_ideas", num_ideas},
          {"strategies_per_step", strategies_per_step},
          {"evolutions", evolutions},
          {"feedback_examples", feedback_examples},
          {"ucb_c", ucb_c},
          {"strategy_temperature", strategy_temperature},
          {"idea_temperature", idea_temperature},
          {"seed", seed},
          {"output_dir", output_dir}};
}

EvolutionConfig EvolutionConfig::from_json(const json& j) {
  EvolutionConfig c;
  c.num_ideas = j.value("num_ideas", c.num_ideas);
  c.strategies_per_step = j.value("strategies_per_step", c.strategies_per_step);
  c.evolutions = j.value("evolutions", c.evolutions);
  c.feedback_examples = j.value("feedback_examples", c.feedback_examples);
  c.ucb_c = j.value("ucb_c", c.ucb_c);
  c.strategy_temperature = j.value("strategy_temperature", c.strategy_temperature);
  c.idea_temperature = j.value("idea_temperature", c.idea_temperature);
  c.seed = j.value("seed", c.seed);
  c.output_dir = j.value("output_dir", c.output_dir);
  c.validate();
  return c;
}

std::string StrategyDomain::render_feedback(const std::vector<KeyState>& states) const {
  std::string out;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& k = states[i];
    FeedbackExample e;
    e.index = static_cast<int>(i) + 1;
    e.state_text = k.state_text;
    e.values = k.heuristic_output;
    e.intermediates = k.intermediates;
    e.search_estimate = k.search_estimate;
    e.actual = k.actual;
    if (i) out += "\n";
    out += render_feedback_example(e);
  }
  return out;
}

void EvolutionContext::warn(const std::string& message) {
  warnings.push_back(message);
  if (log) *log << "warning: " << message << "\n";
}

void EvolutionContext::note(const std::string& message) const {
  if (log) *log << message << "\n";
}

const std::vector<KeyState>& ensure_feedback(StrategyTree& tree, const std::string& id, EvolutionContext& ctx) {
  StrategyNode& node = tree.at(id);
  if (node.feedback.empty() && node.usable()) {
    try {
      const std::uint64_t seed = mix_seed(ctx.config.seed, llm::fnv1a64(id));
      node.feedback = ctx.domain.collect_feedback(node, ctx.config.feedback_examples, seed);
    } catch (const EvaluationError& e) {
      ctx.warn("feedback for " + id + " failed: " + e.what());
    }
  }
  return node.feedback;
}

int generate_ideas(StrategyTree& tree, IdeaQueue& queue, EvolutionContext& ctx) {
  const std::string id = select_strategy(tree, ctx.config.strategy_temperature, ctx.rng).id;
  const auto& feedback = ensure_feedback(tree, id, ctx);
  const StrategyNode& node = tree.at(id);
  const std::string reflection =
      ctx.gateway.complete(ctx.domain.reflection_request(node, ctx.domain.render_feedback(feedback)));
  llm::ChatRequest request = ctx.domain.idea_request(node, reflection, ctx.config.num_ideas);
  std::vector<std::string> ideas;
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      ideas = parse_ideas(ctx.gateway.complete(request));
      break;
    } catch (const ParseError& e) {
      if (attempt == 1) {
        ctx.warn("idea generation for " + id + " gave no parseable ideas: " + e.what());
        return 0;
      }
      request.temperature = 0.0;
    }
  }
  if (ideas.size() > static_cast<std::size_t>(ctx.config.num_ideas)) ideas.resize(ctx.config.num_ideas);
  const std::string origin = feedback.empty() ? std::string() : feedback.front().digest();
  for (auto& idea : ideas) queue.add(std::move(idea), id, origin);
  ctx.note("ideas: " + std::to_string(ideas.size()) + " from " + id);
  return static_cast<int>(ideas.size());
}

std::map<std::string, double> evaluate_batch(StrategyTree& tree, const std::vector<std::string>& batch,
                                             EvolutionContext& ctx, std::uint64_t seed) {
  std::vector<const StrategyNode*> usable;
  for (const auto& id : batch) {
    if (tree.at(id).usable()) usable.push_back(&tree.at(id));
  }
  std::map<std::string, double> w;
  if (!usable.empty()) w = ctx.domain.evaluate(usable, seed);
  for (const auto& id : batch) {
    auto& node = tree.at(id);
    if (!node.usable()) w[id] = 0.0;
    if (!w.count(id)) throw StrategistError("evaluation returned no score for " + id);
    if (!node.score) node.score = w[id];
  }
  return w;
}

std::string implement_child(StrategyTree& tree, const std::string& parent, const llm::ChatRequest& request,
                            const std::optional<std::string>& idea, int generation, EvolutionContext& ctx) {
  StrategyNode child;
  child.kind = tree.at(parent).kind;
  child.parent = parent;
  child.idea = idea;
  child.generation = generation;
  try {
    ctx.domain.apply_reply(child, ctx.gateway.complete(request));
  } catch (const ParseError& e) {
    child.failure = std::string("unparseable reply: ") + e.what();
  } catch (const llm::LlmError& e) {
    child.failure = std::string("generation failed: ") + e.what();
  }
  if (child.failure) {
    child.heuristic.reset();
    child.guide.reset();
  }
  const std::string id = tree.add(std::move(child));
  if (const auto& f = tree.at(id).failure) ctx.warn(id + ": " + *f);
  return id;
}

std::vector<std::string> implement_strategies(StrategyTree& tree, IdeaQueue& queue, int generation,
                                              EvolutionContext& ctx) {
  if (queue.empty()) throw EmptyQueueError("idea queue is empty; generate ideas first");
  std::map<std::string, int> pending;
  std::vector<std::pair<std::string, std::string>> made;  // (child, idea)
  for (int i = 0; i < ctx.config.strategies_per_step; ++i) {
    const std::string parent = select_strategy(tree, ctx.config.strategy_temperature, ctx.rng).id;
    const Idea& idea = queue.select(ctx.config.ucb_c, ctx.config.idea_temperature, ctx.rng, pending);
    ++pending[idea.id];
    const auto request = ctx.domain.implementation_request(tree.at(parent), idea.text);
    made.emplace_back(implement_child(tree, parent, request, idea.id, generation, ctx), idea.id);
  }
  std::vector<std::string> batch;
  for (const auto& [child, idea] : made) batch.push_back(child);
  for (const auto& [child, idea] : made) {
    const std::string& parent = *tree.at(child).parent;
    if (std::find(batch.begin(), batch.end(), parent) == batch.end()) batch.push_back(parent);
  }
  const auto w = evaluate_batch(tree, batch, ctx, mix_seed(ctx.config.seed, 7919 + generation));
  std::vector<std::string> children;
  for (const auto& [child, idea] : made) {
    queue.update(idea, w.at(child) - w.at(*tree.at(child).parent));
    children.push_back(child);
  }
  return children;
}

std::string to_string(ImproverKind kind) {
  switch (kind) {
    case ImproverKind::kStrategist: return "strategist";
    case ImproverKind::kLineSearch: return "line";
    case ImproverKind::kGreedySearch: return "greedy";
    case ImproverKind::kBestFirst: return "bfs";
    case ImproverKind::kBestFirstWithThought: return "bfs-thought";
  }
  return "strategist";
}

ImproverKind improver_kind_from_string(const std::string& name) {
  for (auto k : {ImproverKind::kStrategist, ImproverKind::kLineSearch, ImproverKind::kGreedySearch,
                 ImproverKind::kBestFirst, ImproverKind::kBestFirstWithThought}) {
    if (to_string(k) == name) return k;
  }
  throw StrategistError("unknown improver '" + name + "'");
}

namespace {

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw StrategistError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace

EvolutionResult run_evolution(const std::vector<StrategyNode>& seeds, StrategyDomain& domain, llm::Gateway& gateway,
                              const EvolutionConfig& config, ImproverKind kind, int bfs_k, std::ostream* log) {
  config.validate();
  if (seeds.empty()) throw StrategistError("evolution needs at least one seed strategy");
  if (bfs_k < 1) throw StrategistError("best-first k must be at least 1");
  Rng rng(config.seed);
  EvolutionContext ctx{domain, gateway, config, rng, log, {}};
  EvolutionResult result;
  std::vector<std::string> seed_ids;
  for (auto seed : seeds) {
    seed.parent.reset();
    seed.idea.reset();
    seed.score.reset();
    seed.failure.reset();
    seed.generation = 0;
    seed_ids.push_back(result.tree.add(std::move(seed)));
  }
  evaluate_batch(result.tree, seed_ids, ctx, mix_seed(config.seed, 7919));
  if (!config.output_dir.empty()) std::filesystem::create_directories(config.output_dir);

  for (int e = 1; e <= config.evolutions; ++e) {
    if (kind == ImproverKind::kStrategist) {
      generate_ideas(result.tree, result.queue, ctx);
      if (result.queue.empty()) {
        ctx.warn("evolution " + std::to_string(e) + ": no ideas available, step skipped");
      } else {
        implement_strategies(result.tree, result.queue, e, ctx);
      }
    } else {
      improve_step(kind, bfs_k, result.tree, e, ctx);
    }
    ctx.note("evolution " + std::to_string(e) + ": " + std::to_string(result.tree.size()) + " strategies");
    if (!config.output_dir.empty()) {
      write_json(std::filesystem::path(config.output_dir) / ("evolution_" + std::to_string(e) + ".json"),
                 {{"evolution", e}, {"tree", result.tree.to_json()}, {"queue", result.queue.to_json()}});
    }
  }

  for (const auto* n : result.tree.ranked()) result.best.push_back(n->id);
  json best = json::array();
  for (const auto& id : result.best) best.push_back({{"id", id}, {"score", *result.tree.at(id).score}});
  result.report = {{"improver", to_string(kind)},
                   {"bfs_k", bfs_k},
                   {"config", config.to_json()},
                   {"strategies", result.tree.size()},
                   {"ideas", result.queue.size()},
                   {"best", best},
                   {"llm_requests", gateway.requests_made()},
                   {"llm_tokens", gateway.tokens_used()},
                   {"warnings", ctx.warnings}};
  return result;
}

std::string summarize(const EvolutionResult& result) {
  std::string out = "improver: " + result.report.value("improver", std::string("?")) + "\n";
  out += "strategies: " + std::to_string(result.tree.size()) + ", ideas: " + std::to_string(result.queue.size()) + "\n";
  out += "best strategies:\n";
  const std::size_t shown = std::min<std::size_t>(result.best.size(), 5);
  for (std::size_t i = 0; i < shown; ++i) {
    const auto& n = result.tree.at(result.best[i]);
    char score[32];
    std::snprintf(score, sizeof score, "%.4f", *n.score);
    out += "  " + n.id + "  z=" + score + "  lineage=";
    const auto line = result.tree.lineage(n.id);
    for (std::size_t j = 0; j < line.size(); ++j) out += (j ? ">" : "") + line[j];
    out += "\n";
  }
  for (const auto& i : result.queue.ideas()) {
    char score[32];
    std::snprintf(score, sizeof score, "%.4f", i.score);
    out += "idea " + i.id + " z=" + score + " n=" + std::to_string(i.tries) + ": " + i.text.substr(0, 80) + "\n";
  }
  return out;
}

}  // namespace strategist
