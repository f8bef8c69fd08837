#include <cmath>

#include "registry_internal.h"

namespace strategist {

BuiltinRegistry::BuiltinRegistry() {
  detail::register_builtin_heuristics(*this);
  detail::register_rl_heuristics(*this);
}

BuiltinRegistry& BuiltinRegistry::instance() {
  static BuiltinRegistry registry;
  return registry;
}

void BuiltinRegistry::add(BuiltinInfo info, Factory factory) {
  const std::string name = info.name;
  entries_[name] = {std::move(info), std::move(factory)};
}

bool BuiltinRegistry::contains(const std::string& name) const {
  return entries_.count(name.substr(0, name.find(':'))) > 0;
}

const BuiltinInfo& BuiltinRegistry::info(const std::string& name) const {
  auto it = entries_.find(name.substr(0, name.find(':')));
  if (it == entries_.end()) throw StrategistError("unknown builtin heuristic '" + name + "'");
  return it->second.first;
}

std::shared_ptr<const Evaluator> BuiltinRegistry::create(const std::string& name_and_argument) const {
  const auto colon = name_and_argument.find(':');
  const std::string name = name_and_argument.substr(0, colon);
  const std::string argument = colon == std::string::npos ? std::string() : name_and_argument.substr(colon + 1);
  auto it = entries_.find(name);
  if (it == entries_.end()) throw StrategistError("unknown builtin heuristic '" + name + "'");
  return it->second.second(argument);
}

std::vector<std::string> BuiltinRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, entry] : entries_) out.push_back(name);
  return out;
}

namespace detail {

ordered_json number(double x) {
  if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 1e15) {
    return ordered_json(static_cast<std::int64_t>(x));
  }
  return ordered_json(x);
}

}  // namespace detail

}  // namespace strategist
