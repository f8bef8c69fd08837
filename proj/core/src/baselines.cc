#include <algorithm>

#include "strategist/improve.h"

namespace strategist {

namespace {

constexpr const char* kFeedbackRevision =
    "Revise the function so that its values track the look-ahead search estimates in these examples:\n\n";

std::string usable_latest(const StrategyTree& tree) {
  for (auto it = tree.nodes().rbegin(); it != tree.nodes().rend(); ++it) {
    if (it->usable()) return it->id;
  }
  throw StrategistError("no usable strategy to revise");
}

std::string best_of_last_generation(const StrategyTree& tree) {
  int last = -1;
  for (const auto& n : tree.nodes()) {
    if (n.usable() && n.score) last = std::max(last, n.generation);
  }
  if (last < 0) throw StrategistError("no evaluated strategy to revise");
  const StrategyNode* best = nullptr;
  for (const auto& n : tree.nodes()) {
    if (!n.usable() || !n.score || n.generation != last) continue;
    if (!best || *n.score > *best->score) best = &n;
  }
  return best->id;
}

std::string revise(StrategyTree& tree, const std::string& parent, bool thought, int generation,
                   EvolutionContext& ctx) {
  const auto& feedback = ensure_feedback(tree, parent, ctx);
  const StrategyNode& node = tree.at(parent);
  const std::string feedback_text = ctx.domain.render_feedback(feedback);
  std::string ideas = kFeedbackRevision + feedback_text;
  if (thought) {
    try {
      const std::string reflection = ctx.gateway.complete(ctx.domain.reflection_request(node, feedback_text));
      const std::string proposals =
          ctx.gateway.complete(ctx.domain.idea_request(node, reflection, ctx.config.num_ideas));
      ideas = reflection + "\n\n" + proposals;
    } catch (const llm::LlmError& e) {
      ctx.warn("reflection for " + parent + " failed, revising from feedback: " + e.what());
    }
  }
  return implement_child(tree, parent, ctx.domain.implementation_request(node, ideas), std::nullopt, generation, ctx);
}

}  // namespace

std::vector<std::string> improve_step(ImproverKind kind, int k, StrategyTree& tree, int generation,
                                      EvolutionContext& ctx) {
  if (kind == ImproverKind::kStrategist) throw StrategistError("the Strategist step runs through run_evolution");
  if (k < 1) throw StrategistError("best-first k must be at least 1");
  const int n = ctx.config.strategies_per_step;
  std::vector<std::string> children;
  switch (kind) {
    case ImproverKind::kLineSearch:
      for (int i = 0; i < n; ++i) children.push_back(revise(tree, usable_latest(tree), false, generation, ctx));
      break;
    case ImproverKind::kGreedySearch: {
      const std::string parent = best_of_last_generation(tree);
      for (int i = 0; i < n; ++i) children.push_back(revise(tree, parent, false, generation, ctx));
      break;
    }
    case ImproverKind::kBestFirst:
    case ImproverKind::kBestFirstWithThought: {
      std::vector<std::string> parents;
      for (const auto* node : tree.ranked()) {
        if (static_cast<int>(parents.size()) == k) break;
        parents.push_back(node->id);
      }
      if (parents.empty()) throw StrategistError("no evaluated strategy to revise");
      const bool thought = kind == ImproverKind::kBestFirstWithThought;
      for (int i = 0; i < n; ++i) {
        children.push_back(revise(tree, parents[static_cast<std::size_t>(i) % parents.size()], thought, generation, ctx));
      }
      break;
    }
    case ImproverKind::kStrategist:
      break;
  }
  std::vector<std::string> batch = children;
  for (const auto& child : children) {
    const std::string& parent = *tree.at(child).parent;
    if (std::find(batch.begin(), batch.end(), parent) == batch.end()) batch.push_back(parent);
  }
  evaluate_batch(tree, batch, ctx, mix_seed(ctx.config.seed, 7919 + generation));
  return children;
}

}  // namespace strategist
