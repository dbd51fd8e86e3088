#ifndef TROLLEY_FORMULA_HPP
#define TROLLEY_FORMULA_HPP

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "trolley/rational.hpp"

namespace trolley {

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// How many members a weak dilemma may have before normalization refuses
// to expand it into its subset disjunction (2^5 - 1 = 31 disjuncts).
inline constexpr int kWeakExpansionCap = 5;

// Propositional atom reserved for the core encodings of true/false.
inline constexpr const char* kReservedAtom = "_p0";

// Nonempty set of agent names.
class Coalition {
 public:
  explicit Coalition(std::set<std::string> agents);
  const std::set<std::string>& agents() const { return agents_; }
  bool contains(const std::string& a) const { return agents_.count(a) > 0; }
  bool subset_of(const Coalition& o) const;
  bool operator==(const Coalition& o) const { return agents_ == o.agents_; }
  std::string str() const;  // "a, b, c"

 private:
  std::set<std::string> agents_;
};

// Per-agent sacrifice bounds, optionally with a wildcard for agents not
// listed. Resolution against a concrete agent set yields a total map.
class SacrificeMap {
 public:
  SacrificeMap() = default;
  SacrificeMap(std::map<std::string, Rational> bounds,
               std::optional<Rational> wildcard)
      : bounds_(std::move(bounds)), wildcard_(wildcard) {}

  const std::map<std::string, Rational>& bounds() const { return bounds_; }
  const std::optional<Rational>& wildcard() const { return wildcard_; }

  // Total map on `agents`; throws ValidationError if some agent has no
  // explicit entry and there is no wildcard. Entries for agents outside
  // the set are ignored.
  std::map<std::string, Rational> resolve(
      const std::set<std::string>& agents) const;

  // Rewritten with explicit entries for exactly `agents`, no wildcard.
  SacrificeMap resolved(const std::set<std::string>& agents) const;

  bool operator==(const SacrificeMap& o) const {
    return bounds_ == o.bounds_ && wildcard_ == o.wildcard_;
  }
  std::string str() const;  // "a:2, b:1/2" or "*:0", wildcard last

 private:
  std::map<std::string, Rational> bounds_;
  std::optional<Rational> wildcard_;
};

// Finite formula set with deterministic iteration. Members are deduplicated
// by the canonical print of their normal form, so two members that denote
// the same core formula collapse to one; the surface form of the kept
// representative is preserved for display.
class FormulaSet {
 public:
  static FormulaSet of(std::vector<FormulaPtr> members);

  const std::vector<FormulaPtr>& members() const { return members_; }
  const std::vector<std::string>& keys() const { return keys_; }
  size_t size() const { return members_.size(); }

  bool contains(const FormulaPtr& f) const;
  bool operator==(const FormulaSet& o) const { return keys_ == o.keys_; }
  bool operator!=(const FormulaSet& o) const { return !(*this == o); }
  bool subset_of(const FormulaSet& o) const;
  bool proper_subset_of(const FormulaSet& o) const {
    return subset_of(o) && size() < o.size();
  }
  // Total order (lexicographic on key sequences), for report sorting.
  bool operator<(const FormulaSet& o) const { return keys_ < o.keys_; }

 private:
  FormulaSet() = default;
  std::vector<FormulaPtr> members_;  // sorted by key
  std::vector<std::string> keys_;
};

enum class FKind {
  Prop,
  Top,
  Bottom,
  Neg,
  Implies,
  And,
  Or,
  StrictDilemma,
  WeakDilemma,
};

// Immutable formula node. The canonical key (print of the bounded normal
// form) is computed at construction; key equality is formula equality.
class Formula {
 public:
  static FormulaPtr prop(const std::string& name);
  static FormulaPtr top();
  static FormulaPtr bottom();
  static FormulaPtr neg(FormulaPtr f);
  static FormulaPtr implies(FormulaPtr l, FormulaPtr r);
  static FormulaPtr conj(FormulaPtr l, FormulaPtr r);
  static FormulaPtr disj(FormulaPtr l, FormulaPtr r);
  static FormulaPtr strict_dilemma(Coalition c, FormulaSet members,
                                   SacrificeMap s);
  static FormulaPtr weak_dilemma(Coalition c, FormulaSet members,
                                 SacrificeMap s);

  FKind kind() const { return kind_; }
  bool is_dilemma() const {
    return kind_ == FKind::StrictDilemma || kind_ == FKind::WeakDilemma;
  }
  const std::string& prop_name() const { return name_; }
  const FormulaPtr& left() const { return left_; }    // Neg child here too
  const FormulaPtr& right() const { return right_; }
  const Coalition& coalition() const { return *coalition_; }
  const FormulaSet& members() const { return *members_; }
  const SacrificeMap& sacrifice() const { return *sacrifice_; }

  const std::string& key() const { return key_; }

 private:
  Formula() = default;
  static FormulaPtr finish(std::shared_ptr<Formula> f);

  FKind kind_ = FKind::Prop;
  std::string name_;
  FormulaPtr left_, right_;
  std::optional<Coalition> coalition_;
  std::optional<FormulaSet> members_;
  std::optional<SacrificeMap> sacrifice_;
  std::string key_;
};

inline bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  return a->key() == b->key();
}
inline int compare(const FormulaPtr& a, const FormulaPtr& b) {
  return a->key().compare(b->key());
}

// Concrete syntax. parse_formula throws ParseError with position info;
// format_formula is deterministic and prints sets in canonical order.
FormulaPtr parse_formula(const std::string& text);
std::string format_formula(const FormulaPtr& f);

// Rewrites to the core grammar (Prop, Neg, Implies, StrictDilemma). Weak
// dilemmas become the right-nested disjunction of strict dilemmas over all
// nonempty member subsets in canonical order; throws CapError when a weak
// dilemma has more than `cap` members.
FormulaPtr normalize(const FormulaPtr& f, int cap = kWeakExpansionCap);

// {x AND y | x in X, y in Y}, deduplicated.
FormulaSet tensor(const FormulaSet& x, const FormulaSet& y);

// Every sacrifice map in f rewritten to explicit entries over `agents`
// (see SacrificeMap::resolved). Used by the proof kernel so that formula
// equality is insensitive to wildcard spelling.
FormulaPtr resolve_sacrifices(const FormulaPtr& f,
                              const std::set<std::string>& agents);

}  // namespace trolley

#endif  // TROLLEY_FORMULA_HPP
