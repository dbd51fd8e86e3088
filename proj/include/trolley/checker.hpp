#ifndef TROLLEY_CHECKER_HPP
#define TROLLEY_CHECKER_HPP

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "trolley/formula.hpp"
#include "trolley/game.hpp"

namespace trolley {

struct CheckOptions {
  bool memo = true;
  // Profiles enumerated per top-level query before CapError.
  std::uint64_t profile_budget = 100'000'000;
  // Largest explorer pool (subset scan is exponential in it).
  int pool_cap = 12;
};

// Explorer output: every minimal subset of the pool that is a strict
// dilemma for the coalition at the queried state.
struct DilemmaReport {
  Coalition coalition;
  SacrificeMap sacrifice;
  FormulaSet pool;
  std::vector<FormulaSet> minimal_sets;
};

// Sacrifice bounds as a total map on the game's agents. Throws
// ValidationError when an agent is uncovered and there is no wildcard.
std::map<std::string, Rational> resolve_sacrifice(const SacrificeMap& s,
                                                  const Game& g);

// True iff every agent's action cost at the state is within its bound.
bool admissible(const Game& g, const std::string& state,
                const ActionProfile& d,
                const std::map<std::string, Rational>& bounds);

// Evaluation engine over one immutable game. Not thread-safe; create one
// context per thread. Results are independent of the memo setting.
class CheckContext {
 public:
  explicit CheckContext(const Game& g, CheckOptions opts = {});

  const Game& game() const { return g_; }

  bool satisfies(const std::string& state, const FormulaPtr& f);
  bool satisfies(int state, const FormulaPtr& f);
  bool valid_in_game(const FormulaPtr& f);

  bool forces(const std::string& state, const Strategy& t,
              const SacrificeMap& s, const FormulaPtr& f);
  bool holds_weak(const std::string& state, const Coalition& c,
                  const FormulaSet& members, const SacrificeMap& s);
  bool holds_strict(const std::string& state, const Coalition& c,
                    const FormulaSet& members, const SacrificeMap& s);
  // Follows the defining conditions 4(a)/4(b) verbatim: per proper subset,
  // an existential scan over strategies with per-member witness profiles.
  // Kept as an independent second route; must agree with holds_strict.
  bool holds_strict_literal(const std::string& state, const Coalition& c,
                            const FormulaSet& members, const SacrificeMap& s);

  DilemmaReport minimal_dilemma_sets(const std::string& state,
                                     const Coalition& c,
                                     const SacrificeMap& s,
                                     const FormulaSet& pool);

  std::uint64_t profiles_enumerated() const { return profiles_; }

 private:
  struct DilemmaQuery {
    std::vector<int> coalition;        // agent indices, ascending
    std::vector<int> free_agents;      // complement, ascending
    std::vector<Rational> bounds;      // per agent index
    const FormulaSet* members;
  };

  DilemmaQuery make_query(const Coalition& c, const FormulaSet& members,
                          const SacrificeMap& s) const;
  int require_state(const std::string& name) const;
  void validate_formula(const FormulaPtr& f) const;

  bool eval(int state, const FormulaPtr& f);
  bool eval_weak(int state, const DilemmaQuery& q);
  bool eval_strict(int state, const DilemmaQuery& q);
  bool eval_strict_literal(int state, const DilemmaQuery& q);
  // Per coalition strategy (odometer order), the set of members it forces.
  std::vector<std::uint32_t> force_masks(int state, const DilemmaQuery& q);
  bool forces_member(int state, const DilemmaQuery& q,
                     const std::vector<int>& strat, const FormulaPtr& f);
  bool count_profile();

  const Game& g_;
  CheckOptions opts_;
  std::uint64_t profiles_ = 0;
  // (state, formula key) -> verdict, dilemma nodes only.
  std::vector<std::unordered_map<std::string, bool>> memo_;
};

// One-shot conveniences over a scratch context.
bool satisfies(const Game& g, const std::string& state, const FormulaPtr& f);
bool valid_in_game(const Game& g, const FormulaPtr& f);
bool forces(const Game& g, const std::string& state, const Strategy& t,
            const SacrificeMap& s, const FormulaPtr& f);
bool holds_weak(const Game& g, const std::string& state, const Coalition& c,
                const FormulaSet& members, const SacrificeMap& s);
bool holds_strict(const Game& g, const std::string& state, const Coalition& c,
                  const FormulaSet& members, const SacrificeMap& s);
bool holds_strict_literal(const Game& g, const std::string& state,
                          const Coalition& c, const FormulaSet& members,
                          const SacrificeMap& s);

}  // namespace trolley

#endif  // TROLLEY_CHECKER_HPP
