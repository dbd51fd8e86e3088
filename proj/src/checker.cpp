#include "trolley/checker.hpp"

#include <algorithm>

#include "trolley/errors.hpp"

namespace trolley {

namespace {

// Odometer over per-slot value lists. fn returns false to stop early;
// for_each_choice returns false iff it was stopped.
template <typename Fn>
bool for_each_choice(const std::vector<std::vector<int>>& slots, Fn&& fn) {
  std::vector<int> pos(slots.size(), 0);
  std::vector<int> current(slots.size());
  while (true) {
    for (size_t i = 0; i < slots.size(); ++i) current[i] = slots[i][pos[i]];
    if (!fn(current)) return false;
    size_t i = 0;
    for (; i < slots.size(); ++i) {
      if (++pos[i] < static_cast<int>(slots[i].size())) break;
      pos[i] = 0;
    }
    if (i == slots.size()) return true;
  }
}

std::vector<std::vector<int>> all_actions_slots(const Game& g,
                                                const std::vector<int>& agents) {
  std::vector<std::vector<int>> slots;
  slots.reserve(agents.size());
  for (int a : agents) {
    std::vector<int> v(g.action_count(a));
    for (int i = 0; i < g.action_count(a); ++i) v[i] = i;
    slots.push_back(std::move(v));
  }
  return slots;
}

}  // namespace

std::map<std::string, Rational> resolve_sacrifice(const SacrificeMap& s,
                                                  const Game& g) {
  return s.resolve(g.agent_set());
}

bool admissible(const Game& g, const std::string& state,
                const ActionProfile& d,
                const std::map<std::string, Rational>& bounds) {
  const auto st = g.state_index(state);
  if (!st) throw ValidationError("unknown state '" + state + "'");
  for (const auto& agent : g.agents()) {
    auto cit = d.choice.find(agent);
    if (cit == d.choice.end())
      throw ValidationError("profile has no action for agent '" + agent + "'");
    const int a = g.agent_index(agent);
    const int act = g.action_index(a, cit->second);
    if (act < 0)
      throw ValidationError("unknown action '" + cit->second +
                            "' for agent '" + agent + "'");
    auto bit = bounds.find(agent);
    if (bit == bounds.end())
      throw ValidationError("no sacrifice bound for agent '" + agent + "'");
    if (bit->second < g.cost(*st, a, act)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// CheckContext

CheckContext::CheckContext(const Game& g, CheckOptions opts)
    : g_(g), opts_(opts) {
  memo_.resize(g.states().size());
}

int CheckContext::require_state(const std::string& name) const {
  const auto st = g_.state_index(name);
  if (!st) throw ValidationError("unknown state '" + name + "'");
  return *st;
}

void CheckContext::validate_formula(const FormulaPtr& f) const {
  switch (f->kind()) {
    case FKind::Prop:
    case FKind::Top:
    case FKind::Bottom:
      return;
    case FKind::Neg:
      validate_formula(f->left());
      return;
    case FKind::Implies:
    case FKind::And:
    case FKind::Or:
      validate_formula(f->left());
      validate_formula(f->right());
      return;
    case FKind::StrictDilemma:
    case FKind::WeakDilemma:
      for (const auto& a : f->coalition().agents())
        if (g_.agent_index(a) < 0)
          throw ValidationError("formula references agent '" + a +
                                "' not in the game");
      resolve_sacrifice(f->sacrifice(), g_);
      for (const auto& m : f->members().members()) validate_formula(m);
      return;
  }
}

CheckContext::DilemmaQuery CheckContext::make_query(
    const Coalition& c, const FormulaSet& members,
    const SacrificeMap& s) const {
  DilemmaQuery q;
  for (const auto& a : c.agents()) {
    const int idx = g_.agent_index(a);
    if (idx < 0)
      throw ValidationError("coalition agent '" + a + "' not in the game");
    q.coalition.push_back(idx);
  }
  std::sort(q.coalition.begin(), q.coalition.end());
  for (int a = 0; a < static_cast<int>(g_.agents().size()); ++a)
    if (!std::binary_search(q.coalition.begin(), q.coalition.end(), a))
      q.free_agents.push_back(a);
  const auto resolved = resolve_sacrifice(s, g_);
  q.bounds.reserve(g_.agents().size());
  for (const auto& a : g_.agents()) q.bounds.push_back(resolved.at(a));
  q.members = &members;
  return q;
}

bool CheckContext::count_profile() {
  if (++profiles_ > opts_.profile_budget)
    throw CapError("profile enumeration budget exceeded");
  return true;
}

bool CheckContext::forces_member(int state, const DilemmaQuery& q,
                                 const std::vector<int>& strat,
                                 const FormulaPtr& f) {
  // A coalition agent over budget leaves no admissible agreeing profile,
  // so the strategy forces everything vacuously.
  for (size_t i = 0; i < q.coalition.size(); ++i)
    if (q.bounds[q.coalition[i]] < g_.cost(state, q.coalition[i], strat[i]))
      return true;

  std::vector<std::vector<int>> slots;
  slots.reserve(q.free_agents.size());
  for (int a : q.free_agents) {
    std::vector<int> adm;
    for (int x = 0; x < g_.action_count(a); ++x)
      if (!(q.bounds[a] < g_.cost(state, a, x))) adm.push_back(x);
    if (adm.empty()) return true;  // vacuous
    slots.push_back(std::move(adm));
  }

  std::vector<int> profile(g_.agents().size());
  for (size_t i = 0; i < q.coalition.size(); ++i)
    profile[q.coalition[i]] = strat[i];

  return for_each_choice(slots, [&](const std::vector<int>& free_choice) {
    count_profile();
    for (size_t i = 0; i < q.free_agents.size(); ++i)
      profile[q.free_agents[i]] = free_choice[i];
    for (int u : g_.successors(state, profile))
      if (!eval(u, f)) return false;
    return true;
  });
}

bool CheckContext::eval_weak(int state, const DilemmaQuery& q) {
  const auto slots = all_actions_slots(g_, q.coalition);
  return for_each_choice(slots, [&](const std::vector<int>& strat) {
    for (const auto& m : q.members->members())
      if (forces_member(state, q, strat, m)) return true;
    return false;  // this strategy forces no member
  });
}

std::vector<std::uint32_t> CheckContext::force_masks(int state,
                                                     const DilemmaQuery& q) {
  const size_t n = q.members->size();
  if (n > 30) throw CapError("dilemma member set too large");
  std::vector<std::uint32_t> masks;
  const auto slots = all_actions_slots(g_, q.coalition);
  for_each_choice(slots, [&](const std::vector<int>& strat) {
    std::uint32_t mask = 0;
    for (size_t i = 0; i < n; ++i)
      if (forces_member(state, q, strat, q.members->members()[i]))
        mask |= std::uint32_t(1) << i;
    masks.push_back(mask);
    return true;
  });
  return masks;
}

// Subset characterization: a strict dilemma is a weak dilemma none of whose
// maximal proper subsets is weak (weakness is monotone in the member set,
// so checking the maximal ones covers all of them).
bool CheckContext::eval_strict(int state, const DilemmaQuery& q) {
  const auto masks = force_masks(state, q);
  for (const auto m : masks)
    if (m == 0) return false;  // 4(a) fails
  const size_t n = q.members->size();
  const std::uint32_t full = (std::uint32_t(1) << n) - 1;
  for (size_t x = 0; x < n; ++x) {
    const std::uint32_t without = full & ~(std::uint32_t(1) << x);
    bool witness = false;
    for (const auto m : masks)
      if ((m & without) == 0) {
        witness = true;
        break;
      }
    if (!witness) return false;  // members \ {x} is still a weak dilemma
  }
  return true;
}

bool CheckContext::eval_strict_literal(int state, const DilemmaQuery& q) {
  const size_t n = q.members->size();
  if (n > 20) throw CapError("dilemma member set too large for literal scan");
  std::vector<int> all_agents(g_.agents().size());
  for (size_t i = 0; i < all_agents.size(); ++i)
    all_agents[i] = static_cast<int>(i);
  const auto profile_slots = all_actions_slots(g_, all_agents);
  const auto strat_slots = all_actions_slots(g_, q.coalition);

  auto agrees_with = [&](const std::vector<int>& strat,
                         const std::vector<int>& profile) {
    for (size_t i = 0; i < q.coalition.size(); ++i)
      if (profile[q.coalition[i]] != strat[i]) return false;
    return true;
  };
  auto profile_admissible = [&](const std::vector<int>& profile) {
    for (size_t a = 0; a < profile.size(); ++a)
      if (q.bounds[a] < g_.cost(state, static_cast<int>(a), profile[a]))
        return false;
    return true;
  };

  // 4(a): every strategy forces some specific member.
  const bool part_a =
      for_each_choice(strat_slots, [&](const std::vector<int>& strat) {
        for (const auto& m : q.members->members()) {
          const bool forced =
              for_each_choice(profile_slots, [&](const std::vector<int>& d) {
                count_profile();
                if (!agrees_with(strat, d) || !profile_admissible(d))
                  return true;
                for (int u : g_.successors(state, d))
                  if (!eval(u, m)) return false;
                return true;
              });
          if (forced) return true;
        }
        return false;
      });
  if (!part_a) return false;

  // 4(b): every nonempty proper subset has a strategy all of whose members
  // can be avoided by some admissible agreeing profile and successor.
  const std::uint32_t full = (std::uint32_t(1) << n) - 1;
  for (std::uint32_t sub = 1; sub < full; ++sub) {
    const bool has_strategy =
        !for_each_choice(strat_slots, [&](const std::vector<int>& strat) {
          for (size_t i = 0; i < n; ++i) {
            if (!(sub & (std::uint32_t(1) << i))) continue;
            const auto& m = q.members->members()[i];
            const bool witnessed =
                !for_each_choice(profile_slots,
                                 [&](const std::vector<int>& d) {
                                   count_profile();
                                   if (!agrees_with(strat, d) ||
                                       !profile_admissible(d))
                                     return true;
                                   for (int u : g_.successors(state, d))
                                     if (!eval(u, m)) return false;  // found
                                   return true;
                                 });
            if (!witnessed) return true;  // next strategy
          }
          return false;  // this strategy avoids every member of sub
        });
    if (!has_strategy) return false;
  }
  return true;
}

bool CheckContext::eval(int state, const FormulaPtr& f) {
  switch (f->kind()) {
    case FKind::Prop:
      return g_.prop_states(f->prop_name())[state];
    case FKind::Top:
      return true;
    case FKind::Bottom:
      return false;
    case FKind::Neg:
      return !eval(state, f->left());
    case FKind::Implies:
      return !eval(state, f->left()) || eval(state, f->right());
    case FKind::And:
      return eval(state, f->left()) && eval(state, f->right());
    case FKind::Or:
      return eval(state, f->left()) || eval(state, f->right());
    case FKind::StrictDilemma:
    case FKind::WeakDilemma: {
      if (opts_.memo) {
        auto it = memo_[state].find(f->key());
        if (it != memo_[state].end()) return it->second;
      }
      const auto q = make_query(f->coalition(), f->members(), f->sacrifice());
      const bool r = f->kind() == FKind::StrictDilemma ? eval_strict(state, q)
                                                       : eval_weak(state, q);
      if (opts_.memo) memo_[state].emplace(f->key(), r);
      return r;
    }
  }
  return false;  // unreachable
}

bool CheckContext::satisfies(const std::string& state, const FormulaPtr& f) {
  return satisfies(require_state(state), f);
}

bool CheckContext::satisfies(int state, const FormulaPtr& f) {
  validate_formula(f);
  return eval(state, f);
}

bool CheckContext::valid_in_game(const FormulaPtr& f) {
  validate_formula(f);
  for (size_t w = 0; w < g_.states().size(); ++w)
    if (!eval(static_cast<int>(w), f)) return false;
  return true;
}

bool CheckContext::forces(const std::string& state, const Strategy& t,
                          const SacrificeMap& s, const FormulaPtr& f) {
  validate_formula(f);
  FormulaSet singleton = FormulaSet::of({f});
  const auto q = make_query(t.coalition(), singleton, s);
  std::vector<int> strat;
  for (int a : q.coalition) {
    const auto& name = g_.agents()[a];
    const int act = g_.action_index(a, t.choice().at(name));
    if (act < 0)
      throw ValidationError("strategy assigns unknown action to '" + name +
                            "'");
    strat.push_back(act);
  }
  return forces_member(require_state(state), q, strat, f);
}

bool CheckContext::holds_weak(const std::string& state, const Coalition& c,
                              const FormulaSet& members,
                              const SacrificeMap& s) {
  for (const auto& m : members.members()) validate_formula(m);
  return eval_weak(require_state(state), make_query(c, members, s));
}

bool CheckContext::holds_strict(const std::string& state, const Coalition& c,
                                const FormulaSet& members,
                                const SacrificeMap& s) {
  for (const auto& m : members.members()) validate_formula(m);
  return eval_strict(require_state(state), make_query(c, members, s));
}

bool CheckContext::holds_strict_literal(const std::string& state,
                                        const Coalition& c,
                                        const FormulaSet& members,
                                        const SacrificeMap& s) {
  for (const auto& m : members.members()) validate_formula(m);
  return eval_strict_literal(require_state(state), make_query(c, members, s));
}

DilemmaReport CheckContext::minimal_dilemma_sets(const std::string& state,
                                                 const Coalition& c,
                                                 const SacrificeMap& s,
                                                 const FormulaSet& pool) {
  if (pool.size() > static_cast<size_t>(opts_.pool_cap))
    throw CapError("pool of " + std::to_string(pool.size()) +
                   " formulas exceeds cap " + std::to_string(opts_.pool_cap));
  for (const auto& m : pool.members()) validate_formula(m);
  const int st = require_state(state);
  const auto q = make_query(c, pool, s);
  const auto masks = force_masks(st, q);

  const size_t n = pool.size();
  auto hitting = [&](std::uint32_t set) {
    for (const auto m : masks)
      if ((m & set) == 0) return false;
    return true;
  };

  DilemmaReport report{c, s, pool, {}};
  for (std::uint32_t set = 1; set < (std::uint32_t(1) << n); ++set) {
    if (!hitting(set)) continue;
    bool minimal = true;
    for (size_t x = 0; x < n && minimal; ++x)
      if ((set & (std::uint32_t(1) << x)) &&
          hitting(set & ~(std::uint32_t(1) << x)))
        minimal = false;
    if (!minimal) continue;
    std::vector<FormulaPtr> ms;
    for (size_t i = 0; i < n; ++i)
      if (set & (std::uint32_t(1) << i)) ms.push_back(pool.members()[i]);
    report.minimal_sets.push_back(FormulaSet::of(std::move(ms)));
  }
  std::sort(report.minimal_sets.begin(), report.minimal_sets.end());
  return report;
}

// ---------------------------------------------------------------------------
// One-shot wrappers

bool satisfies(const Game& g, const std::string& state, const FormulaPtr& f) {
  return CheckContext(g).satisfies(state, f);
}

bool valid_in_game(const Game& g, const FormulaPtr& f) {
  return CheckContext(g).valid_in_game(f);
}

bool forces(const Game& g, const std::string& state, const Strategy& t,
            const SacrificeMap& s, const FormulaPtr& f) {
  return CheckContext(g).forces(state, t, s, f);
}

bool holds_weak(const Game& g, const std::string& state, const Coalition& c,
                const FormulaSet& members, const SacrificeMap& s) {
  return CheckContext(g).holds_weak(state, c, members, s);
}

bool holds_strict(const Game& g, const std::string& state, const Coalition& c,
                  const FormulaSet& members, const SacrificeMap& s) {
  return CheckContext(g).holds_strict(state, c, members, s);
}

bool holds_strict_literal(const Game& g, const std::string& state,
                          const Coalition& c, const FormulaSet& members,
                          const SacrificeMap& s) {
  return CheckContext(g).holds_strict_literal(state, c, members, s);
}

}  // namespace trolley
