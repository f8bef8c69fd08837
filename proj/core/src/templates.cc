#include <algorithm>

#include "strategist/llm.h"

namespace strategist::llm {

namespace {

struct Entry {
  const char* id;
  const char* text;
};

// Prompt texts; {{name}} marks a slot.
const Entry kTemplates[] = {
    {"gops_rules", R"tpl(The game you want to write a function for is GOPS (game of pure strategy), also known as Goofspiel. The game has two players, and is played with a deck of score cards. Each player is dealt the same hand of cards at the beginning. The goal of the game is to get a score higher than your opponent. At the beginning of each round, a score card is randomly drawn without replacement from the score deck. Then each player plays a card simultaneously from their hand. The player who plays the higher card wins the round and gets the score card. They add the score of the score card to their total score. If the two cards played are the same, the person who wins the next round will get both score cards. The game continues until all score cards have been played. The player with the highest total score wins the game.
)tpl"},
    {"avalon_rules", R"tpl(The game you are interested in is called The Resistance: Avalon. The Resistance: Avalon is the game of hidden identities and social deduction. There are two teams in the game: Good and Evil. Each player has a hidden identity (role) and side.

There are five Quests in the game and five turns, one for each quest. Good players aim to help three Quests succeed, while Evil players aim to fail three Quests. Different quests require different numbers of players to participate.

At the beginning of the game, each player is assigned a role secretly and randomly. Private information is then revealed to each player. A random player is selected as the leader for the first round.

Each round, after a round of discussion, the leader will select a team of players to participate in the Quest. Then, all players will vote on whether to approve or reject the team publicly. If the team is approved (a strict majority vote to approve), the Quest will be carried out. If the team is not approved, the next player becomes the leader and the next round will start. If four teams are rejected in a row, the fifth team will automatically be approved.

If the team is approved, each team member chooses to pass or fail the Quest anonymously. Usually, if there is at least one failed vote, the Quest fails. Otherwise, the Quest succeeds. In either case, we move on to the next turn and the next quest.

Below are the roles in the game:

Servant of Arthur (Servant): A Good player who does not know who is on the Evil side. The Servant's job is to make sure that the three Quests succeed.

Minion of Mordred (Minion): An Evil player who knows who is on the Evil side. Minion's job is to fail three Quests without being identified by the Good players.

Merlin: A Good player who knows who is on the Evil side. Merlin's job is to make sure that the three Quests succeed without revealing themself to Evil.

Assassin: An Evil player who knows who is on the Evil side. Assassin's job is to assassinate Merlin if the Evil players can identify who Merlin is. If the Assassin successfully assassinates Merlin, the Evil players win the game immediately, even if three quests succeed.

Hence, Evil players usually know who is on the Evil side, but Good players usually do not know who is on the Evil side.

Players may make any claims during the game, at any point in the game. Discussion, deception, accusation, persuasion, and logical deduction are all equally important in order for Good to prevail or Evil to rule the day. Hence, players should rarely reveal their true identity to other players. Players will, can, and should lie to achieve their goals.
)tpl"},
    {"value_system", R"tpl(You are a function engineer trying to write a function that can evaluate the value of a state in a game. This is known as a value heuristic, and will be used in look-ahead search algorithms to evaluate the value of unexplored states. Your goal is to develop a heuristic that is as accurate as possible without being too expensive to compute. Hence, you are not allowed to runs simulations in the function.
)tpl"},
    {"gops_signature", R"tpl(The function (written in python) should be named `evaluate state' and take in a tuple called `state' of the game state as input.
Specifically, the input tuple will be of length 9, and it should return 2 elements.
The first element should be a tuple with 2 floats: the first element being the score you expect player 0 will get at the end of the game, and the second element being the score you expect player 1 will get at the end of the game.
The second element should be a dictionary of any important intermediate values that you used to calculate the scores.
For example, if you think player 0 will win 12 total points by the end of the game and player 1 will win 8 total points, the function should return (12, 8).

Make sure your output only includes the code of the function itself in plain text such that it is executable using exec() in python. Any helper functions should be defined within the scope of the function `evaluate state'.
Include comments in your code so that it is readable, but everything should be implemented.

The signature of the function should be as follows:

def evaluate_state(state) -> tuple[tuple[float, float], dict]:
    score_cards = state[0] # a python list of the score cards (integers) that have been played, in the order they were played
    player_0_played_cards = state[1] # a python list of the cards (integers) player 0 has played, in the order they were played.
    player_1_played_cards = state[2] # a python list of the cards (integers) player 1 has played, in the order they were played.
    is_turn = state[3] # bool, true if it is you and your opponent's turn to play, false if it is time to draw a new score card
    player_0_score = state[4] # float or integer, player 0's score so far
    player_1_score = state[5] #  float or integer, player 1's score so far
    score_deck = state[6] # a python set of the score cards (integers) left in the deck, either same length as player_0_hand and player_1_hand or one less since the score card appears before the players play. May be empty
    player_0_hand = state[7] # a python set of the cards (integers) left in player 0's hand. May be empty
    player_1_hand = state[8] # a python set of the cards (integers) left in player 1's hand. May be empty
    # explanation of what we do next
    ...
    <intermediate_value1> = value1
    # explanation of what we do next
    ...
    <intermediate_value2> = value2
    # explanation of what we do next
    ...
    player_scores = (player_0_expected_score, player_1_expected_score)
    intermediate_values = {'<intermediate_value1>': intermediate_value1, '<intermediate_value2>': intermediate_value2, ...}
    return player_scores, intermediate_values # make sure the return is exactly in this format
Where you can use your own names for the intermediate values and the values themselves.
Please start with "def evaluate state(state):"
)tpl"},
    {"value_feedback_reflection", R"tpl({{system_prompt}}
{{game_rules}}
Previously you generated the following function to evaluate the value of a state in the game.
{{previous_guide}}
Below is some feedback on how the function you generated performed when we tested it. Note that simulations involve high variance and the actual scores may not match the expected scores exactly. Hence, you should focus on trying to get the scores produced by your function to match those predicted by look-ahead search as closely as possible.

{{feedback_examples}}
Based on the feedback given and the function you generated previously, what are some conclusions you can draw from the feedback? Make sure to cite the specific examples in the feedback to justify your analysis.
)tpl"},
    {"value_idea_generation", R"tpl({{system_prompt}}
{{game_rules}}
{{previous_guide}}
{{feedback_reflections}}

Based on the function, feedback, and conclusions you drew, what are {{num_ideas}} improvements that you can make to the function that you think will have the most impact? Be as specific and concrete as possible, and write them out in the following format:

- Thoughts: <your thoughts here>

- Idea 1: <your idea here>

- Idea 2: <your idea here>

...

Here's an example of what this might look like for 3 improvement ideas:

- Thoughts: I should consider the number of cards left in the deck when evaluating the value of a state.

- Idea 1: I should add a term to the value function that penalizes states where there are fewer cards left in the deck.

- Idea 2: I should add a term to the value function that rewards states where the player has more cards in their hand than the opponent.

- Idea 3: I should add a term to the value function that rewards states where the player has more cards in their hand than the opponent and there are fewer cards left in the deck.
)tpl"},
    {"value_implementation", R"tpl({{system_prompt}}
{{game_rules}}
Previously you generated the following function to evaluate the value of a state in the game:
{{previous_guide}}
Here is a possible way to improve this function:
{{improvement_ideas}}
)tpl"},
    {"guide_system", R"tpl(You are a coach trying to write a section of a strategy guide on how to play a game well.

The specific section of the strategy guide you are writing right now is on how to play the {{role}} role effectively during the discussion phase so that they can win the game. Recall that players often use the discussion phase to (1) gather information about other players, (2) try to convince other players of their innocence or guilt, and (3) try to persuade other players of a particular course of action.
The game you are interested in is called The Resistance: Avalon. The Resistance: Avalon is the game of hidden identities and social deduction. There are two teams in the game: Good and Evil. Each player has a hidden identity (role) and side.
)tpl"},
    {"guide_signature", R"tpl(Your guide should be in the form of a worksheet that the student can use to build their speech. You should order the worksheet questions in a way that makes logical sense, and you should have no more than six questions. Your questions should instruct the reader to write parts of their speech.

The title of your section should be "Questions to fill out before speaking as the {{role}} role". Below is an example of how your worksheet should look like:

1. Questions to fill out before speaking as the {{role}} role

2. Q1: Which player seems the most suspicious of you and why?

3. Q2: For the player that seems the most suspicious of you, produce a statement addressing their suspicious.

4. Q3: Which player is the quest leader?

5. Q4: Produce a statement addressing the quest leader to convince them to support your intended course of action/ desired team.

6. Q5: Which player is the most supportive of you?

7. Q6: Produce a statement addressing the supportive player to convince them to support your intended course of action/ desired team.
)tpl"},
    {"guide_feedback_reflection", R"tpl({{system_prompt}}
{{game_rules}}
You previously generated the following section of the strategy guide:
{{previous_guide}}
Below is some feedback on how your guide performed when a student used it to play the game:

{{feedback_examples}}
Based on the feedback given and the guide section you generated previously, what are some conclusions you can draw from the feedback? Make sure to cite the specific examples in the feedback to justify your analysis.
)tpl"},
    {"guide_idea_generation", R"tpl({{system_prompt}}
{{game_rules}}
You previously generated the following section of the strategy guide:
{{previous_guide}}
Here is a possible way to improve your guide:
{{feedback_reflections}}

Based on the worksheet, feedback, and conclusions you drew, what are {{num_ideas}} improvements that you can make to the worksheet that you think will have the most impact?
Be as specific and concrete as possible, including what questions to add, edit, or remove, and write them out in the following format:

- Thoughts: <your thoughts here>

- Idea 1: <your idea here>

- Idea 2: <your idea here>

- ...

Here's an example of what this might look like for 3 improvement ideas:

- Thoughts: I should tell the reader to address each player individually in the guide.

- Idea 1: Add a question asking the reader who they think is most suspicious of them and produce a statement addressing their suspicions.

- Idea 2: Add a question asking the reader to consider which other player is most supportive of them and produce a statement addressing their support.

- Idea 3: Add a question asking the reader produce a statement addressed
)tpl"},
    {"guide_implementation", R"tpl({{system_prompt}}
{{game_rules}}
You previously generated the following section of the strategy guide:
{{previous_guide}}
Here is a possible way to improve your guide:
{{improvement_idea}}
Implement this improvement into the guide section as best as you can, but do not change the original guide too much. Make sure to stay within the scope of the guide section, which we reiterate below:
{{guide_signature}}
)tpl"},
    {"worksheet_fill", R"tpl({{system_prompt}}

{{game_rules}}

{{discussion_history}}

{{state_description}}

Given the discussion history, current state, and your intended action, answer the above worksheet to the best of your ability. The answers should be based on the information you have and your own reasoning.

{{guide}}
)tpl"},
    {"speech_generation", R"tpl({{system_prompt}}

{{worksheet}}

Assemble your responses to the questionaire you just answered into a speech that would help you achieve your intent. Note that dialogue will be seen by all players in the game, so you should not reveal your identity.

Your speech:
)tpl"},
    {"analysis_merlin", R"tpl({{system_prompt}}

{{game_rules}}

{{discussion_history}}

{{state_description}}

Based on the discussions this round, for each player in players {{players}}, do you think the probability of the player being Merlin (2) increased significantly (1) increased slightly (0) stayed the same (-1) decreased slightly or (-2) decreased significantly and why? Begin with your reasoning and end with a dictionary of player to your multiple choice answer, i.e. {0: (2, 'increased significantly'), ..., 4: (0, 'stayed the same')}. Make sure you include quotes around the dictionary values that are strings.

Here's an example:

Thought:
Player 2 seems to suspect the Evil players (Player 3 and Player 4) without any evidence and is trying to steer the conversation towards them. This aligns with the behavior of Merlin, who knows the identity of the Evil players and is trying to subtly guide the Good players towards the correct decisions. This increases the probability of Player 2 being Merlin. On the other hand, Player 4's speech seems generally clueless and lacks any strategic insight, which decreases the probability of Player 4 being Merlin.

Dictionary:
{0: (0, 'stayed the same'), 1: (0, 'stayed the same'), 2: (2, 'increased significantly'), 3: (-2, 'decreased significantly'), 4: (0, 'stayed the same')}
)tpl"},
    {"analysis_evil", R"tpl({{system_prompt}}

{{game_rules}}

{{discussion_history}}

{{state_description}}

Based on the discussions this round, for each player in players {{players}}, do you think the probability of the player being Evil (2) increased significantly (1) increased slightly (0) stayed the same (-1) decreased slightly or (-2) decreased significantly and why? Begin with your reasoning and end with a dictionary of player to your multiple choice answer, i.e. {0: (2, 'increased significantly'), ..., 4: (0, 'stayed the same')}. Make sure you include quotes around the dictionary values that are strings.

Here's an example:

Thought:
Player 4's speech seems overly enthusiastic and focused on unity and cooperation, which could be a tactic to divert attention from their true identity as an Evil player. This raises suspicion and increases the probability of Player 4 being Evil. On the other hand, Player 3's response as a Servant of Arthur is more focused on the success of the Quests and unity, which aligns with the goals of Good and decreases the probability of Player 3 being Evil.

Dictionary:
{0: (0, 'stayed the same'), 1: (0, 'stayed the same'), 2: (2, 'increased significantly'), 3: (-2, 'decreased significantly'), 4: (0, 'stayed the same')}
)tpl"},
};

}  // namespace

PromptTemplate::PromptTemplate(std::string id, std::string text) : id_(std::move(id)), text_(std::move(text)) {
  std::size_t pos = 0;
  while ((pos = text_.find("{{", pos)) != std::string::npos) {
    const auto end = text_.find("}}", pos + 2);
    if (end == std::string::npos) break;
    std::string name = text_.substr(pos + 2, end - pos - 2);
    if (std::find(slots_.begin(), slots_.end(), name) == slots_.end()) slots_.push_back(name);
    pos = end + 2;
  }
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& values) const {
  for (const auto& [name, value] : values) {
    if (std::find(slots_.begin(), slots_.end(), name) == slots_.end()) {
      throw TemplateError("template '" + id_ + "' has no slot '" + name + "'");
    }
  }
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto open = text_.find("{{", pos);
    const auto close = open == std::string::npos ? std::string::npos : text_.find("}}", open + 2);
    if (close == std::string::npos) {
      out.append(text_, pos, std::string::npos);
      return out;
    }
    out.append(text_, pos, open - pos);
    const std::string name = text_.substr(open + 2, close - open - 2);
    auto it = values.find(name);
    if (it == values.end()) throw TemplateError("template '" + id_ + "' is missing slot '" + name + "'");
    out += it->second;
    pos = close + 2;
  }
}

const PromptTemplate& prompt_template(const std::string& id) {
  static const std::vector<PromptTemplate> all = [] {
    std::vector<PromptTemplate> v;
    for (const auto& e : kTemplates) v.emplace_back(e.id, e.text);
    return v;
  }();
  for (const auto& t : all) {
    if (t.id() == id) return t;
  }
  throw TemplateError("unknown template '" + id + "'");
}

std::vector<std::string> template_ids() {
  std::vector<std::string> ids;
  for (const auto& e : kTemplates) ids.emplace_back(e.id);
  return ids;
}

ChatRequest render(const std::string& template_id, const std::map<std::string, std::string>& values) {
  const auto& t = prompt_template(template_id);
  ChatRequest request;
  request.template_id = template_id;
  if (auto it = values.find("system_prompt"); it != values.end()) {
    request.messages.push_back({"system", it->second});
  }
  request.messages.push_back({"user", t.render(values)});
  return request;
}

}  // namespace strategist::llm
