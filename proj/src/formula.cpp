#include "trolley/formula.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <tuple>

#include "trolley/errors.hpp"

namespace trolley {

// ---------------------------------------------------------------------------
// Coalition / SacrificeMap

Coalition::Coalition(std::set<std::string> agents)
    : agents_(std::move(agents)) {
  if (agents_.empty()) throw ValidationError("coalition must be nonempty");
}

bool Coalition::subset_of(const Coalition& o) const {
  return std::includes(o.agents_.begin(), o.agents_.end(), agents_.begin(),
                       agents_.end());
}

std::string Coalition::str() const {
  std::string out;
  for (const auto& a : agents_) {
    if (!out.empty()) out += ", ";
    out += a;
  }
  return out;
}

std::map<std::string, Rational> SacrificeMap::resolve(
    const std::set<std::string>& agents) const {
  std::map<std::string, Rational> out;
  for (const auto& a : agents) {
    auto it = bounds_.find(a);
    if (it != bounds_.end()) {
      out.emplace(a, it->second);
    } else if (wildcard_) {
      out.emplace(a, *wildcard_);
    } else {
      throw ValidationError("sacrifice map has no bound for agent '" + a +
                            "' and no wildcard");
    }
  }
  return out;
}

SacrificeMap SacrificeMap::resolved(
    const std::set<std::string>& agents) const {
  return SacrificeMap(resolve(agents), std::nullopt);
}

std::string SacrificeMap::str() const {
  std::string out;
  for (const auto& [agent, r] : bounds_) {
    if (!out.empty()) out += ", ";
    out += agent + ":" + r.str();
  }
  if (wildcard_) {
    if (!out.empty()) out += ", ";
    out += "*:" + wildcard_->str();
  }
  return out;
}

// ---------------------------------------------------------------------------
// FormulaSet

FormulaSet FormulaSet::of(std::vector<FormulaPtr> members) {
  if (members.empty()) throw ValidationError("formula set must be nonempty");
  std::vector<std::tuple<std::string, std::string, FormulaPtr>> rows;
  rows.reserve(members.size());
  for (auto& m : members)
    rows.emplace_back(m->key(), format_formula(m), std::move(m));
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) {
              return std::tie(std::get<0>(a), std::get<1>(a)) <
                     std::tie(std::get<0>(b), std::get<1>(b));
            });
  FormulaSet out;
  for (auto& [key, fmt, ptr] : rows) {
    if (!out.keys_.empty() && out.keys_.back() == key) continue;
    out.keys_.push_back(key);
    out.members_.push_back(std::move(ptr));
  }
  return out;
}

bool FormulaSet::contains(const FormulaPtr& f) const {
  return std::binary_search(keys_.begin(), keys_.end(), f->key());
}

bool FormulaSet::subset_of(const FormulaSet& o) const {
  return std::includes(o.keys_.begin(), o.keys_.end(), keys_.begin(),
                       keys_.end());
}

// ---------------------------------------------------------------------------
// Formula construction and keys

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ", ";
    out += p;
  }
  return out;
}

std::string strict_key(const Coalition& c, const std::vector<std::string>& mk,
                       const SacrificeMap& s) {
  return "[" + c.str() + " : " + join(mk) + " @ " + s.str() + "]";
}

// Right-nested disjunction of strict-dilemma keys over all nonempty member
// subsets, in ascending bitmask order (bit i = i-th member in key order).
std::string weak_expansion_key(const Coalition& c,
                               const std::vector<std::string>& mk,
                               const SacrificeMap& s) {
  const size_t n = mk.size();
  std::vector<std::string> disjuncts;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::string> sub;
    for (size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) sub.push_back(mk[i]);
    disjuncts.push_back(strict_key(c, sub, s));
  }
  std::string acc = disjuncts.back();
  for (size_t i = disjuncts.size() - 1; i-- > 0;)
    acc = "(!" + disjuncts[i] + " -> " + acc + ")";
  return acc;
}

const std::string kTopKey =
    "(" + std::string(kReservedAtom) + " -> " + kReservedAtom + ")";

}  // namespace

FormulaPtr Formula::finish(std::shared_ptr<Formula> f) {
  switch (f->kind_) {
    case FKind::Prop:
      f->key_ = f->name_;
      break;
    case FKind::Top:
      f->key_ = kTopKey;
      break;
    case FKind::Bottom:
      f->key_ = "!" + kTopKey;
      break;
    case FKind::Neg:
      f->key_ = "!" + f->left_->key();
      break;
    case FKind::Implies:
      f->key_ = "(" + f->left_->key() + " -> " + f->right_->key() + ")";
      break;
    case FKind::And:
      f->key_ = "!(" + f->left_->key() + " -> !" + f->right_->key() + ")";
      break;
    case FKind::Or:
      f->key_ = "(!" + f->left_->key() + " -> " + f->right_->key() + ")";
      break;
    case FKind::StrictDilemma:
      f->key_ = strict_key(*f->coalition_, f->members_->keys(),
                           *f->sacrifice_);
      break;
    case FKind::WeakDilemma:
      if (f->members_->size() <= size_t(kWeakExpansionCap)) {
        f->key_ = weak_expansion_key(*f->coalition_, f->members_->keys(),
                                     *f->sacrifice_);
      } else {
        // Too large to expand; keyed by the abbreviation itself.
        f->key_ = "[" + strict_key(*f->coalition_, f->members_->keys(),
                                   *f->sacrifice_) +
                  "]";
      }
      break;
  }
  return f;
}

FormulaPtr Formula::prop(const std::string& name) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = FKind::Prop;
  f->name_ = name;
  return finish(std::move(f));
}

FormulaPtr Formula::top() {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = FKind::Top;
  return finish(std::move(f));
}

FormulaPtr Formula::bottom() {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = FKind::Bottom;
  return finish(std::move(f));
}

FormulaPtr Formula::neg(FormulaPtr c) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = FKind::Neg;
  f->left_ = std::move(c);
  return finish(std::move(f));
}

FormulaPtr Formula::implies(FormulaPtr l, FormulaPtr r) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = FKind::Implies;
  f->left_ = std::move(l);
  f->right_ = std::move(r);
  return finish(std::move(f));
}

FormulaPtr Formula::conj(FormulaPtr l, FormulaPtr r) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = FKind::And;
  f->left_ = std::move(l);
  f->right_ = std::move(r);
  return finish(std::move(f));
}

FormulaPtr Formula::disj(FormulaPtr l, FormulaPtr r) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = FKind::Or;
  f->left_ = std::move(l);
  f->right_ = std::move(r);
  return finish(std::move(f));
}

FormulaPtr Formula::strict_dilemma(Coalition c, FormulaSet members,
                                   SacrificeMap s) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = FKind::StrictDilemma;
  f->coalition_ = std::move(c);
  f->members_ = std::move(members);
  f->sacrifice_ = std::move(s);
  return finish(std::move(f));
}

FormulaPtr Formula::weak_dilemma(Coalition c, FormulaSet members,
                                 SacrificeMap s) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = FKind::WeakDilemma;
  f->coalition_ = std::move(c);
  f->members_ = std::move(members);
  f->sacrifice_ = std::move(s);
  return finish(std::move(f));
}

// ---------------------------------------------------------------------------
// Printer

std::string format_formula(const FormulaPtr& f) {
  switch (f->kind()) {
    case FKind::Prop:
      return f->prop_name();
    case FKind::Top:
      return "true";
    case FKind::Bottom:
      return "false";
    case FKind::Neg:
      return "!" + format_formula(f->left());
    case FKind::Implies:
      return "(" + format_formula(f->left()) + " -> " +
             format_formula(f->right()) + ")";
    case FKind::And:
      return "(" + format_formula(f->left()) + " & " +
             format_formula(f->right()) + ")";
    case FKind::Or:
      return "(" + format_formula(f->left()) + " | " +
             format_formula(f->right()) + ")";
    case FKind::StrictDilemma:
    case FKind::WeakDilemma: {
      std::vector<std::string> mk;
      for (const auto& m : f->members().members())
        mk.push_back(format_formula(m));
      const std::string body = f->coalition().str() + " : " + join(mk) +
                               " @ " + f->sacrifice().str();
      return f->kind() == FKind::StrictDilemma ? "[" + body + "]"
                                               : "[[" + body + "]]";
    }
  }
  return {};  // unreachable
}

// ---------------------------------------------------------------------------
// Normalization

FormulaPtr normalize(const FormulaPtr& f, int cap) {
  switch (f->kind()) {
    case FKind::Prop:
      return f;
    case FKind::Top:
      return Formula::implies(Formula::prop(kReservedAtom),
                              Formula::prop(kReservedAtom));
    case FKind::Bottom:
      return Formula::neg(normalize(Formula::top(), cap));
    case FKind::Neg:
      return Formula::neg(normalize(f->left(), cap));
    case FKind::Implies:
      return Formula::implies(normalize(f->left(), cap),
                              normalize(f->right(), cap));
    case FKind::And:
      return Formula::neg(Formula::implies(
          normalize(f->left(), cap),
          Formula::neg(normalize(f->right(), cap))));
    case FKind::Or:
      return Formula::implies(Formula::neg(normalize(f->left(), cap)),
                              normalize(f->right(), cap));
    case FKind::StrictDilemma: {
      std::vector<FormulaPtr> ms;
      for (const auto& m : f->members().members())
        ms.push_back(normalize(m, cap));
      return Formula::strict_dilemma(f->coalition(), FormulaSet::of(ms),
                                     f->sacrifice());
    }
    case FKind::WeakDilemma: {
      if (f->members().size() > size_t(cap))
        throw CapError("weak dilemma with " +
                       std::to_string(f->members().size()) +
                       " members exceeds expansion cap " +
                       std::to_string(cap));
      std::vector<FormulaPtr> ms;
      for (const auto& m : f->members().members())
        ms.push_back(normalize(m, cap));
      const auto set = FormulaSet::of(ms);
      const auto& sorted = set.members();
      const size_t n = sorted.size();
      std::vector<FormulaPtr> disjuncts;
      for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<FormulaPtr> sub;
        for (size_t i = 0; i < n; ++i)
          if (mask & (1u << i)) sub.push_back(sorted[i]);
        disjuncts.push_back(Formula::strict_dilemma(
            f->coalition(), FormulaSet::of(sub), f->sacrifice()));
      }
      FormulaPtr acc = disjuncts.back();
      for (size_t i = disjuncts.size() - 1; i-- > 0;)
        acc = Formula::implies(Formula::neg(disjuncts[i]), acc);
      return acc;
    }
  }
  return f;  // unreachable
}

FormulaSet tensor(const FormulaSet& x, const FormulaSet& y) {
  std::vector<FormulaPtr> out;
  out.reserve(x.size() * y.size());
  for (const auto& a : x.members())
    for (const auto& b : y.members()) out.push_back(Formula::conj(a, b));
  return FormulaSet::of(out);
}

FormulaPtr resolve_sacrifices(const FormulaPtr& f,
                              const std::set<std::string>& agents) {
  switch (f->kind()) {
    case FKind::Prop:
    case FKind::Top:
    case FKind::Bottom:
      return f;
    case FKind::Neg:
      return Formula::neg(resolve_sacrifices(f->left(), agents));
    case FKind::Implies:
      return Formula::implies(resolve_sacrifices(f->left(), agents),
                              resolve_sacrifices(f->right(), agents));
    case FKind::And:
      return Formula::conj(resolve_sacrifices(f->left(), agents),
                           resolve_sacrifices(f->right(), agents));
    case FKind::Or:
      return Formula::disj(resolve_sacrifices(f->left(), agents),
                           resolve_sacrifices(f->right(), agents));
    case FKind::StrictDilemma:
    case FKind::WeakDilemma: {
      for (const auto& a : f->coalition().agents())
        if (!agents.count(a))
          throw ValidationError("coalition agent '" + a +
                                "' is not in the declared agent set");
      std::vector<FormulaPtr> ms;
      for (const auto& m : f->members().members())
        ms.push_back(resolve_sacrifices(m, agents));
      auto set = FormulaSet::of(ms);
      auto s = f->sacrifice().resolved(agents);
      return f->kind() == FKind::StrictDilemma
                 ? Formula::strict_dilemma(f->coalition(), std::move(set),
                                           std::move(s))
                 : Formula::weak_dilemma(f->coalition(), std::move(set),
                                         std::move(s));
    }
  }
  return f;  // unreachable
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok {
  Ident,
  True,
  False,
  Rat,
  Arrow,
  Bar,
  Amp,
  Bang,
  LParen,
  RParen,
  LBrack,
  RBrack,
  Colon,
  Comma,
  At,
  Star,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return cur_; }

  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() &&
           isspace(static_cast<unsigned char>(src_[pos_])))
      bump();
    cur_.line = line_;
    cur_.col = col_;
    cur_.text.clear();
    if (pos_ >= src_.size()) {
      cur_.kind = Tok::End;
      return;
    }
    const char c = src_[pos_];
    if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_')) {
        cur_.text += src_[pos_];
        bump();
      }
      cur_.kind = cur_.text == "true"    ? Tok::True
                  : cur_.text == "false" ? Tok::False
                                         : Tok::Ident;
      return;
    }
    if (isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && pos_ + 1 < src_.size() &&
         isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      lex_rational();
      return;
    }
    switch (c) {
      case '-':
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
          bump();
          bump();
          cur_.kind = Tok::Arrow;
          return;
        }
        throw ParseError("unexpected '-'", line_, col_);
      case '|': cur_.kind = Tok::Bar; break;
      case '&': cur_.kind = Tok::Amp; break;
      case '!': cur_.kind = Tok::Bang; break;
      case '(': cur_.kind = Tok::LParen; break;
      case ')': cur_.kind = Tok::RParen; break;
      case '[': cur_.kind = Tok::LBrack; break;
      case ']': cur_.kind = Tok::RBrack; break;
      case ':': cur_.kind = Tok::Colon; break;
      case ',': cur_.kind = Tok::Comma; break;
      case '@': cur_.kind = Tok::At; break;
      case '*': cur_.kind = Tok::Star; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'",
                         line_, col_);
    }
    bump();
  }

  void lex_rational() {
    cur_.kind = Tok::Rat;
    if (src_[pos_] == '-') {
      cur_.text += '-';
      bump();
    }
    while (pos_ < src_.size() &&
           isdigit(static_cast<unsigned char>(src_[pos_]))) {
      cur_.text += src_[pos_];
      bump();
    }
    if (pos_ + 1 < src_.size() && src_[pos_] == '/' &&
        isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
      cur_.text += '/';
      bump();
      while (pos_ < src_.size() &&
             isdigit(static_cast<unsigned char>(src_[pos_]))) {
        cur_.text += src_[pos_];
        bump();
      }
    }
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token cur_{Tok::End, "", 1, 1};
};

class Parser {
 public:
  explicit Parser(const std::string& src) : lx_(src) {}

  FormulaPtr parse() {
    auto f = formula();
    expect(Tok::End, "end of input");
    return f;
  }

 private:
  FormulaPtr formula() { return impl(); }

  FormulaPtr impl() {
    auto l = disjunction();
    if (lx_.peek().kind == Tok::Arrow) {
      lx_.take();
      return Formula::implies(std::move(l), impl());  // right-associative
    }
    return l;
  }

  FormulaPtr disjunction() {
    auto l = conjunction();
    while (lx_.peek().kind == Tok::Bar) {
      lx_.take();
      l = Formula::disj(std::move(l), conjunction());
    }
    return l;
  }

  FormulaPtr conjunction() {
    auto l = unary();
    while (lx_.peek().kind == Tok::Amp) {
      lx_.take();
      l = Formula::conj(std::move(l), unary());
    }
    return l;
  }

  FormulaPtr unary() {
    if (lx_.peek().kind == Tok::Bang) {
      lx_.take();
      return Formula::neg(unary());
    }
    return atom();
  }

  FormulaPtr atom() {
    const Token t = lx_.peek();
    switch (t.kind) {
      case Tok::Ident:
        lx_.take();
        return Formula::prop(t.text);
      case Tok::True:
        lx_.take();
        return Formula::top();
      case Tok::False:
        lx_.take();
        return Formula::bottom();
      case Tok::LParen: {
        lx_.take();
        auto f = formula();
        expect(Tok::RParen, "')'");
        return f;
      }
      case Tok::LBrack:
        return dilemma();
      default:
        throw ParseError("expected formula, got '" + describe(t) + "'",
                         t.line, t.col);
    }
  }

  FormulaPtr dilemma() {
    expect(Tok::LBrack, "'['");
    bool weak = false;
    if (lx_.peek().kind == Tok::LBrack) {
      lx_.take();
      weak = true;
    }
    std::set<std::string> agents;
    agents.insert(expect(Tok::Ident, "agent name").text);
    while (lx_.peek().kind == Tok::Comma) {
      lx_.take();
      agents.insert(expect(Tok::Ident, "agent name").text);
    }
    expect(Tok::Colon, "':'");
    std::vector<FormulaPtr> members;
    members.push_back(formula());
    while (lx_.peek().kind == Tok::Comma) {
      lx_.take();
      members.push_back(formula());
    }
    expect(Tok::At, "'@'");
    std::map<std::string, Rational> bounds;
    std::optional<Rational> wildcard;
    sac_entry(bounds, wildcard);
    while (lx_.peek().kind == Tok::Comma) {
      lx_.take();
      sac_entry(bounds, wildcard);
    }
    expect(Tok::RBrack, "']'");
    if (weak) expect(Tok::RBrack, "']]'");
    auto c = Coalition(std::move(agents));
    auto set = FormulaSet::of(std::move(members));
    auto s = SacrificeMap(std::move(bounds), wildcard);
    return weak ? Formula::weak_dilemma(std::move(c), std::move(set),
                                        std::move(s))
                : Formula::strict_dilemma(std::move(c), std::move(set),
                                          std::move(s));
  }

  void sac_entry(std::map<std::string, Rational>& bounds,
                 std::optional<Rational>& wildcard) {
    const Token t = lx_.peek();
    std::string agent;
    bool star = false;
    if (t.kind == Tok::Star) {
      lx_.take();
      star = true;
    } else {
      agent = expect(Tok::Ident, "agent name or '*'").text;
    }
    expect(Tok::Colon, "':'");
    const Token rt = expect(Tok::Rat, "rational");
    Rational r;
    try {
      r = Rational::parse(rt.text);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), rt.line, rt.col);
    }
    if (star) {
      if (wildcard)
        throw ParseError("duplicate wildcard sacrifice entry", t.line, t.col);
      wildcard = r;
    } else {
      if (!bounds.emplace(agent, r).second)
        throw ParseError("duplicate sacrifice entry for '" + agent + "'",
                         t.line, t.col);
    }
  }

  Token expect(Tok kind, const std::string& what) {
    const Token t = lx_.peek();
    if (t.kind != kind)
      throw ParseError("expected " + what + ", got '" + describe(t) + "'",
                       t.line, t.col);
    return lx_.take();
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::End: return "end of input";
      case Tok::Arrow: return "->";
      case Tok::Ident:
      case Tok::Rat: return t.text;
      case Tok::True: return "true";
      case Tok::False: return "false";
      case Tok::Bar: return "|";
      case Tok::Amp: return "&";
      case Tok::Bang: return "!";
      case Tok::LParen: return "(";
      case Tok::RParen: return ")";
      case Tok::LBrack: return "[";
      case Tok::RBrack: return "]";
      case Tok::Colon: return ":";
      case Tok::Comma: return ",";
      case Tok::At: return "@";
      case Tok::Star: return "*";
    }
    return "?";
  }

  Lexer lx_;
};

}  // namespace

FormulaPtr parse_formula(const std::string& text) {
  return Parser(text).parse();
}

}  // namespace trolley
