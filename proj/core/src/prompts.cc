#include "strategist/prompts.h"

#include <charconv>
#include <cmath>
#include <regex>
#include <sstream>

namespace strategist {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

// Leading list markers and emphasis a model may wrap a line in.
std::string strip_bullet(const std::string& line) {
  static const std::regex bullet(R"(^\s*(?:[-*•]|\d+[.)])\s+)");
  std::string s = std::regex_replace(line, bullet, "", std::regex_constants::format_first_only);
  s = std::regex_replace(s, std::regex(R"(\*\*)"), "");
  return trim(s);
}

}  // namespace

std::vector<std::string> parse_ideas(const std::string& text) {
  static const std::regex marker(R"(^Idea\s*(\d+)\s*:\s*(.*)$)", std::regex::icase);
  static const std::regex other(R"(^(Thoughts?|Idea\s*\d+)\s*:)", std::regex::icase);
  std::vector<std::string> ideas;
  bool in_idea = false;
  for (const auto& raw : lines_of(text)) {
    const std::string line = strip_bullet(raw);
    std::smatch m;
    if (std::regex_match(line, m, marker)) {
      ideas.push_back(trim(m[2].str()));
      in_idea = true;
    } else if (line.empty() || std::regex_search(line, other)) {
      in_idea = false;
    } else if (in_idea) {
      ideas.back() += (ideas.back().empty() ? "" : " ") + line;
    }
  }
  ideas.erase(std::remove_if(ideas.begin(), ideas.end(), [](const std::string& s) { return s.empty(); }),
              ideas.end());
  if (ideas.empty()) throw ParseError("no 'Idea n:' entries found", text);
  return ideas;
}

HeuristicSpec parse_heuristic(const std::string& text, GameKind game) {
  static const std::regex builtin(R"(#\s*builtin\s*:\s*([A-Za-z0-9_]+(?::[^\s]+)?))");
  std::smatch m;
  if (std::regex_search(text, m, builtin)) return HeuristicSpec::builtin(m[1].str(), game);
  static const std::regex fence(R"(```[A-Za-z0-9_+-]*[ \t]*\n([\s\S]*?)```)");
  for (auto it = std::sregex_iterator(text.begin(), text.end(), fence); it != std::sregex_iterator(); ++it) {
    const std::string body = (*it)[1].str();
    if (body.find("def ") != std::string::npos) return HeuristicSpec::external(trim(body) + "\n", game);
  }
  const auto def = text.find("def evaluate_state");
  if (def != std::string::npos) {
    std::string body = text.substr(def);
    if (auto f = body.find("```"); f != std::string::npos) body.resize(f);
    return HeuristicSpec::external(trim(body) + "\n", game);
  }
  throw ParseError("no function definition found", text);
}

const std::vector<std::string>& delta_labels() {
  static const std::vector<std::string> labels{"decreased significantly", "decreased slightly", "stayed the same",
                                                "increased slightly", "increased significantly"};
  return labels;
}

std::map<int, AnalysisEntry> parse_analysis(const std::string& text) {
  // The last brace-delimited block that holds at least one entry.
  static const std::regex entry(R"((\d+)\s*:\s*\(\s*([+-]?\d+)\s*,\s*(['"])([^'"]*)\3\s*\))");
  std::size_t close = text.rfind('}');
  while (close != std::string::npos) {
    const std::size_t open = text.rfind('{', close);
    if (open == std::string::npos) break;
    const std::string block = text.substr(open + 1, close - open - 1);
    std::map<int, AnalysisEntry> out;
    std::size_t matched = 0;
    for (auto it = std::sregex_iterator(block.begin(), block.end(), entry); it != std::sregex_iterator(); ++it) {
      const int player = std::stoi((*it)[1].str());
      const int delta = std::stoi((*it)[2].str());
      const std::string label = (*it)[4].str();
      if (delta < -2 || delta > 2) throw ParseError("delta " + std::to_string(delta) + " outside -2..2", text);
      const auto& labels = delta_labels();
      if (std::find(labels.begin(), labels.end(), label) == labels.end()) {
        throw ParseError("unknown answer label '" + label + "'", text);
      }
      if (out.count(player)) throw ParseError("player " + std::to_string(player) + " listed twice", text);
      out[player] = {delta, label};
      matched += static_cast<std::size_t>(it->length());
    }
    if (!out.empty()) {
      // Everything between entries must be separators.
      std::string rest = std::regex_replace(block, entry, "");
      rest.erase(std::remove_if(rest.begin(), rest.end(), [](char c) { return c == ',' || std::isspace(static_cast<unsigned char>(c)); }),
                 rest.end());
      if (!rest.empty()) throw ParseError("malformed analysis dictionary", text);
      return out;
    }
    close = open == 0 ? std::string::npos : text.rfind('}', open - 1);
  }
  throw ParseError("no analysis dictionary found", text);
}

std::string DialogueGuide::to_text() const {
  std::string out = title + "\n";
  for (std::size_t i = 0; i < questions.size(); ++i) out += std::to_string(i + 1) + ". " + questions[i] + "\n";
  return out;
}

std::string DialogueGuide::worksheet_text() const {
  std::string out = title + "\n";
  for (std::size_t i = 0; i < questions.size(); ++i) out += "\nQ" + std::to_string(i + 1) + ": " + questions[i] + "\n";
  return out;
}

std::vector<std::string> DialogueGuide::lint() const {
  std::vector<std::string> findings;
  if (questions.size() > 6) findings.push_back("guide has " + std::to_string(questions.size()) + " questions (more than six)");
  if (title.empty()) findings.push_back("guide has no title");
  return findings;
}

json DialogueGuide::to_json() const { return {{"title", title}, {"questions", questions}}; }

DialogueGuide DialogueGuide::from_json(const json& j) {
  DialogueGuide g;
  g.title = j.value("title", std::string());
  g.questions = j.at("questions").get<std::vector<std::string>>();
  if (g.questions.empty()) throw StrategistError("a dialogue guide needs at least one question");
  return g;
}

DialogueGuide parse_guide(const std::string& text) {
  static const std::regex marker(R"(^\s*(?:[-*•]|\d+[.)]|Q\d+\s*:)\s*(.*)$)");
  static const std::regex q_prefix(R"(^Q\d+\s*:\s*)");
  DialogueGuide guide;
  std::vector<std::string> unmarked;
  for (const auto& raw : lines_of(text)) {
    std::string line = trim(raw);
    if (line.empty() || line.rfind("```", 0) == 0) continue;
    std::smatch m;
    if (std::regex_match(line, m, marker)) {
      std::string q = std::regex_replace(trim(m[1].str()), q_prefix, "");
      if (q.rfind("Questions to fill out", 0) == 0 && guide.title.empty()) {
        guide.title = q;
      } else if (!q.empty()) {
        guide.questions.push_back(q);
      }
    } else if (guide.title.empty() && guide.questions.empty()) {
      guide.title = line;
    } else {
      unmarked.push_back(line);
    }
  }
  if (guide.questions.empty()) guide.questions = unmarked;
  if (guide.questions.empty()) throw ParseError("no guide questions found", text);
  return guide;
}

std::string py_float(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return std::signbit(x) ? "-0.0" : "0.0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific);
  std::string sci(buf, res.ptr);
  // sci: [-]d[.ddd]e[+-]xx
  const auto e = sci.find('e');
  const int exponent = std::stoi(sci.substr(e + 1));
  std::string mantissa = sci.substr(0, e);
  const bool negative = mantissa[0] == '-';
  if (negative) mantissa.erase(0, 1);
  std::string digits;
  for (char c : mantissa) {
    if (c != '.') digits += c;
  }
  std::string out;
  if (exponent >= -4 && exponent < 16) {
    if (exponent >= 0) {
      if (static_cast<int>(digits.size()) <= exponent + 1) {
        out = digits + std::string(exponent + 1 - digits.size(), '0') + ".0";
      } else {
        out = digits.substr(0, exponent + 1) + "." + digits.substr(exponent + 1);
      }
    } else {
      out = "0." + std::string(-exponent - 1, '0') + digits;
    }
  } else {
    out = digits.substr(0, 1);
    if (digits.size() > 1) out += "." + digits.substr(1);
    char ebuf[16];
    std::snprintf(ebuf, sizeof ebuf, "e%c%02d", exponent < 0 ? '-' : '+', std::abs(exponent));
    out += ebuf;
  }
  return negative ? "-" + out : out;
}

std::string py_repr(const ordered_json& v) {
  if (v.is_boolean()) return v.get<bool>() ? "True" : "False";
  if (v.is_number_integer()) return v.dump();
  if (v.is_number_float()) return py_float(v.get<double>());
  if (v.is_null()) return "None";
  if (v.is_string()) {
    const std::string text = v.get<std::string>();
    const char quote = text.find('\'') != std::string::npos && text.find('"') == std::string::npos ? '"' : '\'';
    std::string s(1, quote);
    for (char c : text) {
      if (c == '\n') {
        s += "\\n";
      } else if (c == '\t') {
        s += "\\t";
      } else if (c == '\r') {
        s += "\\r";
      } else {
        if (c == '\\' || c == quote) s += '\\';
        s += c;
      }
    }
    return s + quote;
  }
  if (v.is_array()) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + py_repr(v[i]);
    return s + "]";
  }
  std::string s = "{";
  bool first = true;
  for (auto it = v.begin(); it != v.end(); ++it) {
    s += (first ? "" : ", ") + py_repr(ordered_json(it.key())) + ": " + py_repr(it.value());
    first = false;
  }
  return s + "}";
}

std::string py_player_dict(const ordered_json& values) {
  std::string s = "{";
  for (std::size_t i = 0; i < values.size(); ++i) s += (i ? ", " : "") + std::to_string(i) + ": " + py_repr(values[i]);
  return s + "}";
}

std::string py_player_dict(const std::vector<double>& values) {
  ordered_json j = ordered_json::array();
  for (double v : values) j.push_back(v);
  return py_player_dict(j);
}

namespace {

std::string py_tuple(const std::vector<int>& xs) {
  std::string s = "(";
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + std::to_string(xs[i]);
  if (xs.size() == 1) s += ",";
  return s + ")";
}

std::string py_set(std::vector<int> xs) {
  if (xs.empty()) return "set()";
  std::sort(xs.begin(), xs.end());
  std::string s = "{";
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + std::to_string(xs[i]);
  return s + "}";
}

}  // namespace

std::string render_gops_state(const gops::GopsState& state) {
  const auto view = gops::heuristic_view(state);
  auto ints = [&](const char* key) { return view.at(key).get<std::vector<int>>(); };
  std::string s = "The current state of the game is as follows:\n\n";
  s += "- The score cards that have been revealed are: " + py_tuple(ints("score_cards")) + "\n\n";
  s += "- The cards that player 0 has played are: " + py_tuple(ints("player_0_played_cards")) + "\n\n";
  s += "- The cards that player 1 has played are: " + py_tuple(ints("player_1_played_cards")) + "\n\n";
  s += "- Player 0's score so far is: " + py_repr(view.at("player_0_score")) + "\n\n";
  s += "- Player 1's score so far is: " + py_repr(view.at("player_1_score")) + "\n\n";
  s += "- The score cards left in the deck are: " + py_set(ints("score_deck")) + "\n\n";
  s += "- The cards left in player 0's hand are: " + py_set(ints("player_0_hand")) + "\n\n";
  s += "- The cards left in player 1's hand are: " + py_set(ints("player_1_hand")) + "\n";
  return s;
}

std::string render_avalon_state(const avalon::AvalonState& state) {
  std::string s = "The current state of the game is as follows:\n\n";
  s += "- The number of players in the game is: " + std::to_string(state.num_players()) + "\n";
  s += "- The roles of the players are: ";
  for (int p = 0; p < state.num_players(); ++p) {
    s += (p ? ", " : "") + std::string("Player ") + std::to_string(p) + " " + avalon::to_string(state.role_of(p));
  }
  s += "\n";
  s += "- The current phase of the game is: " + avalon::to_string(state.phase()) + "\n";
  s += "- This is the quest number " + std::to_string(state.quest_index()) + "\n";
  std::string results = "(";
  for (std::size_t i = 0; i < state.quest_results().size(); ++i) {
    results += (i ? ", " : "") + std::string(state.quest_results()[i] ? "True" : "False");
  }
  if (state.quest_results().size() == 1) results += ",";
  results += ")";
  s += "- The previous results for the quest were " + results + " (True for Success, False for Fail)\n";
  s += "- The number of rejected teams in a row is: " + std::to_string(state.rejection_streak()) + "\n";
  s += "- The current leader is player " + std::to_string(state.leader()) + "\n";
  if (state.phase() == avalon::Phase::kVoting || state.phase() == avalon::Phase::kQuest) {
    const auto members = avalon::team_members(state.proposed_team());
    std::string team = "[";
    for (std::size_t i = 0; i < members.size(); ++i) team += (i ? ", " : "") + std::to_string(members[i]);
    s += "- The proposed team is: " + team + "]\n";
  }
  return s;
}

std::string render_state(const State& state) {
  if (state.game() == GameKind::kGops) return render_gops_state(static_cast<const gops::GopsState&>(state));
  return render_avalon_state(static_cast<const avalon::AvalonState&>(state));
}

std::string render_feedback_example(const FeedbackExample& e) {
  std::string s = "Example " + std::to_string(e.index) + ":\n\n";
  s += "The state you were trying to estimate a value for is:\n\n";
  s += e.state_text + "\n";
  s += "The function you generated returned the following values:\n\n";
  s += py_player_dict(e.values) + "\n\n";
  s += "for the expected end of game scores of the players.\n\n";
  s += "Some intermediate values that you used to calculate the scores were:\n\n";
  s += py_repr(e.intermediates.is_null() ? ordered_json::object() : e.intermediates) + "\n\n";
  s += "The estimated end of game scores of the players using lookahead search with your function was:\n\n";
  s += py_player_dict(e.search_estimate) + "\n\n";
  s += "The actual scores of the players at the end of the game in the simulation were:\n\n";
  s += py_player_dict(e.actual) + "\n";
  return s;
}

std::string render_discussion_history(const avalon::AvalonState& state) {
  std::string s = "Here is a summary of previous rounds of discussion so far:\n";
  if (state.discussion_log().empty()) return s + "\nThere has been no discussion yet.\n";
  for (const auto& speech : state.discussion_log()) {
    s += "\n- Player " + std::to_string(speech.player) + ": \"" + speech.text + "\"\n";
  }
  return s;
}

std::string player_set_text(int num_players) {
  std::string s = "{";
  for (int p = 0; p < num_players; ++p) s += (p ? ", " : "") + std::to_string(p);
  return s + "}";
}

}  // namespace strategist
