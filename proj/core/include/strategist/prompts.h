#pragma once

// Parsers for model replies and renderers for the text fed back to models.

#include <map>
#include <string>
#include <vector>

#include "strategist/avalon.h"
#include "strategist/gops.h"
#include "strategist/heuristics.h"

namespace strategist {

class ParseError : public StrategistError {
 public:
  ParseError(const std::string& what, std::string raw) : StrategistError(what), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

// "Idea n:" entries in order, markers stripped. Throws ParseError when none.
std::vector<std::string> parse_ideas(const std::string& text);

// A "#builtin: name" directive yields a builtin spec; otherwise the first code
// block containing a function definition, or the text from the first
// "def evaluate_state" onwards.
HeuristicSpec parse_heuristic(const std::string& text, GameKind game);

struct AnalysisEntry {
  int delta = 0;
  std::string label;
};

// The five answer categories, indexed by delta + 2.
const std::vector<std::string>& delta_labels();

// Trailing dictionary of the form {0: (0, 'stayed the same'), ...}.
std::map<int, AnalysisEntry> parse_analysis(const std::string& text);

struct DialogueGuide {
  std::string title;
  std::vector<std::string> questions;

  std::string to_text() const;
  // Worksheet form: "Q1: ..." lines.
  std::string worksheet_text() const;
  // Advisory findings, e.g. more than six questions.
  std::vector<std::string> lint() const;
  json to_json() const;
  static DialogueGuide from_json(const json& j);
};

// Title line plus numbered, bulleted or "Qn:" questions.
DialogueGuide parse_guide(const std::string& text);

// Python literal rendering.
std::string py_float(double x);
std::string py_repr(const ordered_json& value);
// {0: a, 1: b}
std::string py_player_dict(const ordered_json& values);
std::string py_player_dict(const std::vector<double>& values);

// "The current state of the game is as follows:" block for a GOPS state.
std::string render_gops_state(const gops::GopsState& state);
// Full-information description of an Avalon state for heuristic feedback.
std::string render_avalon_state(const avalon::AvalonState& state);
std::string render_state(const State& state);

struct FeedbackExample {
  int index = 0;
  std::string state_text;
  ordered_json values;         // raw heuristic output
  ordered_json intermediates;  // as returned
  std::vector<double> search_estimate;
  std::vector<double> actual;
};

std::string render_feedback_example(const FeedbackExample& example);

// "Here is a summary of previous rounds of discussion so far:" block.
std::string render_discussion_history(const avalon::AvalonState& state);
// "{0, 1, 2, 3, 4}"
std::string player_set_text(int num_players);

}  // namespace strategist
