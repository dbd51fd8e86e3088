#ifndef TROLLEY_GAME_HPP
#define TROLLEY_GAME_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "trolley/formula.hpp"
#include "trolley/rational.hpp"

namespace trolley {

// Total assignment of one action to every agent of a game.
struct ActionProfile {
  std::map<std::string, std::string> choice;  // agent -> action
  bool operator==(const ActionProfile& o) const { return choice == o.choice; }
  bool operator<(const ActionProfile& o) const { return choice < o.choice; }
};

// Assignment of actions to the agents of one coalition only.
class Strategy {
 public:
  Strategy(Coalition coalition, std::map<std::string, std::string> choice);
  const Coalition& coalition() const { return coalition_; }
  const std::map<std::string, std::string>& choice() const { return choice_; }

 private:
  Coalition coalition_;
  std::map<std::string, std::string> choice_;
};

// True iff the profile picks the strategy's action for every coalition agent.
bool agrees(const Strategy& t, const ActionProfile& d);

struct Transition {
  std::string from;
  ActionProfile profile;
  std::string to;
  bool operator==(const Transition& o) const {
    return from == o.from && profile == o.profile && to == o.to;
  }
  bool operator<(const Transition& o) const {
    return std::tie(from, profile, to) < std::tie(o.from, o.profile, o.to);
  }
};

// Raw game description as read from a file or built by a generator.
struct GameData {
  std::vector<std::string> states;
  std::vector<std::string> agents;
  std::map<std::string, std::vector<std::string>> actions;  // per agent
  Rational default_cost = 0;
  // (state, agent, action) -> cost; pairs not listed cost default_cost.
  std::map<std::tuple<std::string, std::string, std::string>, Rational>
      cost_entries;
  std::vector<Transition> mechanism;
  std::map<std::string, std::set<std::string>> valuation;  // prop -> states
};

// Empty iff the data satisfies every structural invariant.
std::vector<std::string> validate(const GameData& data);

// Validated, indexed game. Immutable once constructed.
class Game {
 public:
  // Throws ValidationError listing the violations when validate() is
  // nonempty. Canonicalizes: sorts everything, drops cost entries equal to
  // the default and empty valuation rows, dedups transitions.
  static Game from_data(GameData data);

  const std::vector<std::string>& states() const { return data_.states; }
  const std::vector<std::string>& agents() const { return data_.agents; }
  const std::vector<std::string>& actions(const std::string& agent) const {
    return data_.actions.at(agent);
  }
  std::set<std::string> agent_set() const {
    return {data_.agents.begin(), data_.agents.end()};
  }
  const GameData& data() const { return data_; }

  std::optional<int> state_index(const std::string& name) const;
  int agent_index(const std::string& name) const;  // -1 when unknown

  const Rational& cost(int state, int agent, int action) const {
    return cost_table_[(state * num_agents_ + agent) * max_actions_ + action];
  }
  int action_count(int agent) const { return action_counts_[agent]; }
  const std::string& action_name(int agent, int action) const;
  int action_index(int agent, const std::string& action) const;  // -1 unknown

  // Successor states of (state, profile); empty vector = game terminates.
  const std::vector<int>& successors(int state,
                                     const std::vector<int>& profile) const;

  // States where the propositional variable holds; empty when unknown.
  const std::vector<bool>& prop_states(const std::string& prop) const;

  bool operator==(const Game& o) const;

 private:
  Game() = default;
  void build_index();
  std::uint64_t profile_code(const std::vector<int>& profile) const;

  GameData data_;
  int num_agents_ = 0;
  int max_actions_ = 0;
  std::vector<int> action_counts_;
  std::vector<Rational> cost_table_;
  std::vector<std::map<std::string, int>> action_index_;
  std::map<std::string, int> state_index_;
  std::unordered_map<std::uint64_t, std::vector<int>> transition_index_;
  std::map<std::string, std::vector<bool>> prop_index_;
  std::vector<bool> empty_prop_;
  std::vector<int> no_successors_;
};

// JSON game file format (see README). Throws ParseError on malformed JSON
// and ValidationError on semantic problems.
Game parse_game(const std::string& json_text);
std::string serialize(const Game& g);

}  // namespace trolley

#endif  // TROLLEY_GAME_HPP
