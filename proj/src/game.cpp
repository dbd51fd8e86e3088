#include "trolley/game.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"
#include "trolley/errors.hpp"

namespace trolley {

using nlohmann::json;

Strategy::Strategy(Coalition coalition,
                   std::map<std::string, std::string> choice)
    : coalition_(std::move(coalition)), choice_(std::move(choice)) {
  std::set<std::string> domain;
  for (const auto& [a, act] : choice_) domain.insert(a);
  if (domain != coalition_.agents())
    throw ValidationError("strategy domain differs from its coalition");
}

bool agrees(const Strategy& t, const ActionProfile& d) {
  for (const auto& [agent, action] : t.choice()) {
    auto it = d.choice.find(agent);
    if (it == d.choice.end() || it->second != action) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Validation

std::vector<std::string> validate(const GameData& g) {
  std::vector<std::string> out;
  auto dup_check = [&out](const std::vector<std::string>& names,
                          const char* what) {
    std::set<std::string> seen;
    for (const auto& n : names)
      if (!seen.insert(n).second)
        out.push_back(std::string("duplicate ") + what + " name '" + n + "'");
  };
  if (g.states.empty()) out.push_back("game has no states");
  if (g.agents.empty()) out.push_back("game has no agents");
  dup_check(g.states, "state");
  dup_check(g.agents, "agent");

  const std::set<std::string> states(g.states.begin(), g.states.end());
  const std::set<std::string> agents(g.agents.begin(), g.agents.end());

  for (const auto& a : g.agents) {
    auto it = g.actions.find(a);
    if (it == g.actions.end() || it->second.empty()) {
      out.push_back("agent '" + a + "' has no actions");
      continue;
    }
    dup_check(it->second, "action");
  }
  for (const auto& [a, acts] : g.actions)
    if (!agents.count(a))
      out.push_back("actions listed for unknown agent '" + a + "'");

  auto known_action = [&](const std::string& agent,
                          const std::string& action) {
    auto it = g.actions.find(agent);
    return it != g.actions.end() &&
           std::find(it->second.begin(), it->second.end(), action) !=
               it->second.end();
  };

  for (const auto& [key, cost] : g.cost_entries) {
    const auto& [st, ag, act] = key;
    if (!states.count(st))
      out.push_back("cost entry references unknown state '" + st + "'");
    if (!agents.count(ag))
      out.push_back("cost entry references unknown agent '" + ag + "'");
    else if (!known_action(ag, act))
      out.push_back("cost entry references unknown action '" + act +
                    "' of agent '" + ag + "'");
  }

  for (const auto& t : g.mechanism) {
    if (!states.count(t.from))
      out.push_back("transition from unknown state '" + t.from + "'");
    if (!states.count(t.to))
      out.push_back("transition to unknown state '" + t.to + "'");
    std::set<std::string> domain;
    for (const auto& [ag, act] : t.profile.choice) {
      domain.insert(ag);
      if (!agents.count(ag))
        out.push_back("transition profile references unknown agent '" + ag +
                      "'");
      else if (!known_action(ag, act))
        out.push_back("transition profile assigns unknown action '" + act +
                      "' to agent '" + ag + "'");
    }
    if (domain != agents)
      out.push_back("transition profile is not total on the agent set");
  }

  for (const auto& [prop, sts] : g.valuation)
    for (const auto& st : sts)
      if (!states.count(st))
        out.push_back("valuation of '" + prop +
                      "' references unknown state '" + st + "'");
  return out;
}

// ---------------------------------------------------------------------------
// Game

Game Game::from_data(GameData data) {
  const auto violations = validate(data);
  if (!violations.empty()) {
    std::string msg = "invalid game:";
    for (const auto& v : violations) msg += "\n  - " + v;
    throw ValidationError(msg);
  }
  std::sort(data.states.begin(), data.states.end());
  std::sort(data.agents.begin(), data.agents.end());
  for (auto& [agent, acts] : data.actions)
    std::sort(acts.begin(), acts.end());
  std::sort(data.mechanism.begin(), data.mechanism.end());
  data.mechanism.erase(
      std::unique(data.mechanism.begin(), data.mechanism.end()),
      data.mechanism.end());
  for (auto it = data.cost_entries.begin(); it != data.cost_entries.end();)
    it = it->second == data.default_cost ? data.cost_entries.erase(it)
                                         : std::next(it);
  for (auto it = data.valuation.begin(); it != data.valuation.end();)
    it = it->second.empty() ? data.valuation.erase(it) : std::next(it);

  Game g;
  g.data_ = std::move(data);
  g.build_index();
  return g;
}

void Game::build_index() {
  const auto& d = data_;
  num_agents_ = static_cast<int>(d.agents.size());
  for (size_t i = 0; i < d.states.size(); ++i)
    state_index_[d.states[i]] = static_cast<int>(i);

  action_counts_.resize(num_agents_);
  action_index_.resize(num_agents_);
  max_actions_ = 0;
  std::uint64_t radix_product = 1;
  for (int a = 0; a < num_agents_; ++a) {
    const auto& acts = d.actions.at(d.agents[a]);
    action_counts_[a] = static_cast<int>(acts.size());
    max_actions_ = std::max<int>(max_actions_, action_counts_[a]);
    for (size_t i = 0; i < acts.size(); ++i)
      action_index_[a][acts[i]] = static_cast<int>(i);
    if (radix_product > (std::uint64_t(1) << 62) / acts.size())
      throw CapError("profile space too large to index");
    radix_product *= acts.size();
  }
  if (radix_product * d.states.size() > (std::uint64_t(1) << 62))
    throw CapError("profile space too large to index");

  cost_table_.assign(size_t(d.states.size()) * num_agents_ * max_actions_,
                     d.default_cost);
  for (const auto& [key, cost] : d.cost_entries) {
    const auto& [st, ag, act] = key;
    const int s = state_index_.at(st);
    const int a = agent_index(ag);
    const int x = action_index_[a].at(act);
    cost_table_[(size_t(s) * num_agents_ + a) * max_actions_ + x] = cost;
  }

  for (const auto& t : d.mechanism) {
    std::vector<int> profile(num_agents_);
    for (int a = 0; a < num_agents_; ++a)
      profile[a] = action_index_[a].at(t.profile.choice.at(d.agents[a]));
    const std::uint64_t key =
        profile_code(profile) * d.states.size() + state_index_.at(t.from);
    auto& succ = transition_index_[key];
    const int to = state_index_.at(t.to);
    if (std::find(succ.begin(), succ.end(), to) == succ.end())
      succ.push_back(to);
  }
  for (auto& [key, succ] : transition_index_)
    std::sort(succ.begin(), succ.end());

  for (const auto& [prop, sts] : d.valuation) {
    auto& bits = prop_index_[prop];
    bits.assign(d.states.size(), false);
    for (const auto& st : sts) bits[state_index_.at(st)] = true;
  }
  empty_prop_.assign(d.states.size(), false);
}

std::uint64_t Game::profile_code(const std::vector<int>& profile) const {
  std::uint64_t code = 0;
  for (int a = num_agents_ - 1; a >= 0; --a)
    code = code * action_counts_[a] + profile[a];
  return code;
}

std::optional<int> Game::state_index(const std::string& name) const {
  auto it = state_index_.find(name);
  if (it == state_index_.end()) return std::nullopt;
  return it->second;
}

int Game::agent_index(const std::string& name) const {
  auto it = std::lower_bound(data_.agents.begin(), data_.agents.end(), name);
  if (it == data_.agents.end() || *it != name) return -1;
  return static_cast<int>(it - data_.agents.begin());
}

const std::string& Game::action_name(int agent, int action) const {
  return data_.actions.at(data_.agents[agent])[action];
}

int Game::action_index(int agent, const std::string& action) const {
  auto it = action_index_[agent].find(action);
  return it == action_index_[agent].end() ? -1 : it->second;
}

const std::vector<int>& Game::successors(
    int state, const std::vector<int>& profile) const {
  const std::uint64_t key =
      profile_code(profile) * data_.states.size() + state;
  auto it = transition_index_.find(key);
  return it == transition_index_.end() ? no_successors_ : it->second;
}

const std::vector<bool>& Game::prop_states(const std::string& prop) const {
  auto it = prop_index_.find(prop);
  return it == prop_index_.end() ? empty_prop_ : it->second;
}

bool Game::operator==(const Game& o) const {
  const GameData& a = data_;
  const GameData& b = o.data_;
  return a.states == b.states && a.agents == b.agents &&
         a.actions == b.actions && a.default_cost == b.default_cost &&
         a.cost_entries == b.cost_entries && a.mechanism == b.mechanism &&
         a.valuation == b.valuation;
}

// ---------------------------------------------------------------------------
// JSON file format

namespace {

Rational rational_from_json(const json& v, const char* where) {
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_string()) {
    try {
      return Rational::parse(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ValidationError(std::string(e.what()) + " in " + where);
    }
  }
  throw ValidationError(std::string("expected rational string in ") + where);
}

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw ParseError(std::string("game file missing key '") + key + "'");
  return j.at(key);
}

std::vector<std::string> string_array(const json& j, const char* where) {
  if (!j.is_array())
    throw ParseError(std::string("expected array for ") + where);
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string())
      throw ParseError(std::string("expected string in ") + where);
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

Game parse_game(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("game file is not valid JSON: ") + e.what());
  }
  GameData g;
  g.agents = string_array(require(j, "agents"), "agents");
  g.states = string_array(require(j, "states"), "states");

  const json& actions = require(j, "actions");
  if (!actions.is_object()) throw ParseError("'actions' must be an object");
  for (const auto& [agent, arr] : actions.items())
    g.actions[agent] = string_array(arr, "actions");

  const json& costs = require(j, "costs");
  g.default_cost = rational_from_json(require(costs, "default"), "costs");
  if (costs.contains("entries")) {
    if (!costs.at("entries").is_array())
      throw ParseError("'costs.entries' must be an array");
    for (const auto& e : costs.at("entries")) {
      const std::string agent = require(e, "agent").get<std::string>();
      const std::string action = require(e, "action").get<std::string>();
      const Rational cost = rational_from_json(require(e, "cost"), "costs");
      // An entry without a state applies to every state.
      std::vector<std::string> targets =
          e.contains("state")
              ? std::vector<std::string>{e.at("state").get<std::string>()}
              : g.states;
      for (const auto& st : targets) {
        auto [it, inserted] =
            g.cost_entries.emplace(std::make_tuple(st, agent, action), cost);
        if (!inserted && it->second != cost)
          throw ValidationError("conflicting cost entries for (" + st + ", " +
                                agent + ", " + action + ")");
      }
    }
  }

  const json& mech = require(j, "mechanism");
  if (!mech.is_array()) throw ParseError("'mechanism' must be an array");
  for (const auto& e : mech) {
    Transition t;
    t.from = require(e, "from").get<std::string>();
    t.to = require(e, "to").get<std::string>();
    const json& profile = require(e, "profile");
    if (!profile.is_object())
      throw ParseError("transition 'profile' must be an object");
    for (const auto& [agent, action] : profile.items())
      t.profile.choice[agent] = action.get<std::string>();
    g.mechanism.push_back(std::move(t));
  }

  const json& val = require(j, "valuation");
  if (!val.is_object()) throw ParseError("'valuation' must be an object");
  for (const auto& [prop, arr] : val.items()) {
    auto sts = string_array(arr, "valuation");
    g.valuation[prop] = {sts.begin(), sts.end()};
  }

  return Game::from_data(std::move(g));
}

std::string serialize(const Game& g) {
  const GameData& d = g.data();
  json j;
  j["agents"] = d.agents;
  j["states"] = d.states;
  json actions = json::object();
  for (const auto& [agent, acts] : d.actions) actions[agent] = acts;
  j["actions"] = actions;

  json entries = json::array();
  for (const auto& [key, cost] : d.cost_entries) {
    const auto& [st, ag, act] = key;
    entries.push_back({{"state", st},
                       {"agent", ag},
                       {"action", act},
                       {"cost", cost.str()}});
  }
  j["costs"] = {{"default", d.default_cost.str()}, {"entries", entries}};

  json mech = json::array();
  for (const auto& t : d.mechanism) {
    json profile = json::object();
    for (const auto& [agent, action] : t.profile.choice)
      profile[agent] = action;
    mech.push_back({{"from", t.from}, {"profile", profile}, {"to", t.to}});
  }
  j["mechanism"] = mech;

  json val = json::object();
  for (const auto& [prop, sts] : d.valuation)
    val[prop] = std::vector<std::string>(sts.begin(), sts.end());
  j["valuation"] = val;

  return j.dump(2) + "\n";
}

}  // namespace trolley
