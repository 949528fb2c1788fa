#include "del/pdl.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

namespace del {

// ------------------------------------------------------------------ PDL ASTs

namespace {

using SNode = detail::PdlNode;
using PNode = detail::PdlProgramNode;

std::shared_ptr<const SNode> make_s(SNode n) { return std::make_shared<const SNode>(std::move(n)); }
std::shared_ptr<const PNode> make_p(PNode n) { return std::make_shared<const PNode>(std::move(n)); }

}  // namespace

PdlSentence::PdlSentence() : node_(make_s(SNode{})) {}
PdlSentence PdlSentence::top() { return PdlSentence(); }
PdlSentence PdlSentence::bottom() { return PdlSentence(make_s(SNode{PdlKind::False, {}, {}, {}, {}, 1})); }
PdlSentence PdlSentence::atom(std::string name) {
  return PdlSentence(make_s(SNode{PdlKind::Atom, std::move(name), {}, {}, {}, 1}));
}
PdlSentence PdlSentence::neg(PdlSentence s) {
  std::size_t n = s.size() + 1;
  return PdlSentence(make_s(SNode{PdlKind::Not, {}, std::move(s.node_), {}, {}, n}));
}
PdlSentence PdlSentence::conj(PdlSentence a, PdlSentence b) {
  std::size_t n = a.size() + b.size() + 1;
  return PdlSentence(make_s(SNode{PdlKind::And, {}, std::move(a.node_), std::move(b.node_), {}, n}));
}
PdlSentence PdlSentence::disj(PdlSentence a, PdlSentence b) {
  std::size_t n = a.size() + b.size() + 1;
  return PdlSentence(make_s(SNode{PdlKind::Or, {}, std::move(a.node_), std::move(b.node_), {}, n}));
}
PdlSentence PdlSentence::box(PdlProgram p, PdlSentence s) {
  std::size_t n = p.size() + s.size() + 1;
  return PdlSentence(make_s(SNode{PdlKind::Box, {}, std::move(s.node_), {}, std::move(p.node_), n}));
}
PdlSentence PdlSentence::diamond(PdlProgram p, PdlSentence s) {
  std::size_t n = p.size() + s.size() + 1;
  return PdlSentence(make_s(SNode{PdlKind::Diamond, {}, std::move(s.node_), {}, std::move(p.node_), n}));
}
PdlSentence PdlSentence::conj_all(const std::vector<PdlSentence>& xs) {
  if (xs.empty()) return top();
  PdlSentence out = xs.back();
  for (auto it = xs.rbegin() + 1; it != xs.rend(); ++it) out = conj(*it, out);
  return out;
}
PdlSentence PdlSentence::disj_all(const std::vector<PdlSentence>& xs) {
  if (xs.empty()) return bottom();
  PdlSentence out = xs.back();
  for (auto it = xs.rbegin() + 1; it != xs.rend(); ++it) out = disj(*it, out);
  return out;
}

PdlKind PdlSentence::kind() const { return node_->kind; }
const std::string& PdlSentence::name() const { return node_->name; }
PdlSentence PdlSentence::lhs() const { return PdlSentence(node_->a); }
PdlSentence PdlSentence::rhs() const { return PdlSentence(node_->b); }
PdlProgram PdlSentence::program() const { return PdlProgram(node_->prog); }
std::size_t PdlSentence::size() const { return node_->size; }

PdlProgram PdlProgram::agent(std::string name) {
  return PdlProgram(make_p(PNode{PdlProgramKind::Agent, std::move(name), {}, {}, {}, 1}));
}
PdlProgram PdlProgram::test(PdlSentence s) {
  std::size_t n = s.size() + 1;
  return PdlProgram(make_p(PNode{PdlProgramKind::Test, {}, std::move(s.node_), {}, {}, n}));
}
PdlProgram PdlProgram::seq(PdlProgram a, PdlProgram b) {
  std::size_t n = a.size() + b.size() + 1;
  return PdlProgram(make_p(PNode{PdlProgramKind::Seq, {}, {}, std::move(a.node_), std::move(b.node_), n}));
}
PdlProgram PdlProgram::choice(PdlProgram a, PdlProgram b) {
  std::size_t n = a.size() + b.size() + 1;
  return PdlProgram(make_p(PNode{PdlProgramKind::Choice, {}, {}, std::move(a.node_), std::move(b.node_), n}));
}
PdlProgram PdlProgram::star(PdlProgram a) {
  std::size_t n = a.size() + 1;
  return PdlProgram(make_p(PNode{PdlProgramKind::Star, {}, {}, std::move(a.node_), {}, n}));
}

PdlProgramKind PdlProgram::kind() const { return node_->kind; }
const std::string& PdlProgram::name() const { return node_->name; }
PdlSentence PdlProgram::sentence() const { return PdlSentence(node_->test); }
PdlProgram PdlProgram::lhs() const { return PdlProgram(node_->a); }
PdlProgram PdlProgram::rhs() const { return PdlProgram(node_->b); }
std::size_t PdlProgram::size() const { return node_->size; }

std::string render(const PdlSentence& s) {
  switch (s.kind()) {
    case PdlKind::True: return "true";
    case PdlKind::False: return "false";
    case PdlKind::Atom: return s.name();
    case PdlKind::Not: return "~" + render(s.sub());
    case PdlKind::And: return "(" + render(s.lhs()) + " & " + render(s.rhs()) + ")";
    case PdlKind::Or: return "(" + render(s.lhs()) + " | " + render(s.rhs()) + ")";
    case PdlKind::Box: return "[" + render(s.program()) + "] " + render(s.sub());
    case PdlKind::Diamond: return "<" + render(s.program()) + "> " + render(s.sub());
  }
  return "";
}

std::string render(const PdlProgram& p) {
  switch (p.kind()) {
    case PdlProgramKind::Agent: return p.name();
    case PdlProgramKind::Test: {
      auto t = p.sentence();
      auto k = t.kind();
      bool bare = k == PdlKind::True || k == PdlKind::False || k == PdlKind::Atom || k == PdlKind::And ||
                  k == PdlKind::Or;
      return bare ? "?" + render(t) : "?(" + render(t) + ")";
    }
    case PdlProgramKind::Seq: return "(" + render(p.lhs()) + " ; " + render(p.rhs()) + ")";
    case PdlProgramKind::Choice: return "(" + render(p.lhs()) + " + " + render(p.rhs()) + ")";
    case PdlProgramKind::Star: {
      auto b = p.body();
      auto inner = render(b);
      return b.kind() == PdlProgramKind::Test ? "(" + inner + ")*" : inner + "*";
    }
  }
  return "";
}

// ---------------------------------------------------------------- evaluation

namespace {

class PdlEvaluator {
 public:
  explicit PdlEvaluator(const StateModel& s) : s_(s), n_(s.size()) {}

  StateSet eval(const PdlSentence& phi) {
    StateSet out(n_);
    switch (phi.kind()) {
      case PdlKind::True: out.set(); break;
      case PdlKind::False: break;
      case PdlKind::Atom: {
        auto it = s_.valuation().find(phi.name());
        if (it != s_.valuation().end()) out = it->second;
        break;
      }
      case PdlKind::Not: out = ~eval(phi.sub()); break;
      case PdlKind::And: out = eval(phi.lhs()) & eval(phi.rhs()); break;
      case PdlKind::Or: out = eval(phi.lhs()) | eval(phi.rhs()); break;
      case PdlKind::Box:
      case PdlKind::Diamond: {
        const auto& rel = relation(phi.program());
        StateSet t = eval(phi.sub());
        for (std::size_t x = 0; x < n_; ++x) {
          out[x] = phi.kind() == PdlKind::Box ? !rel[x].intersects(~t) : rel[x].intersects(t);
        }
        break;
      }
    }
    return out;
  }

  const std::vector<StateSet>& relation(const PdlProgram& p) {
    const void* key = p.node_id();
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<StateSet> rel(n_, StateSet(n_));
    switch (p.kind()) {
      case PdlProgramKind::Agent: {
        auto a = s_.find_agent(p.name());
        if (!a) throw Error("unknown agent " + p.name());
        for (std::size_t x = 0; x < n_; ++x) {
          for (int y : s_.successors(*a, static_cast<int>(x))) rel[x].set(y);
        }
        break;
      }
      case PdlProgramKind::Test: {
        StateSet t = eval(p.sentence());
        for (std::size_t x = 0; x < n_; ++x) rel[x][x] = t[x];
        break;
      }
      case PdlProgramKind::Seq: {
        const auto a = relation(p.lhs());
        const auto& b = relation(p.rhs());
        for (std::size_t x = 0; x < n_; ++x) {
          for (auto y = a[x].find_first(); y != StateSet::npos; y = a[x].find_next(y)) rel[x] |= b[y];
        }
        break;
      }
      case PdlProgramKind::Choice: {
        const auto a = relation(p.lhs());
        const auto& b = relation(p.rhs());
        for (std::size_t x = 0; x < n_; ++x) rel[x] = a[x] | b[x];
        break;
      }
      case PdlProgramKind::Star: {
        const auto a = relation(p.body());
        for (std::size_t x = 0; x < n_; ++x) {
          rel[x].set(x);
          std::deque<std::size_t> work{x};
          while (!work.empty()) {
            std::size_t y = work.front();
            work.pop_front();
            for (auto z = a[y].find_first(); z != StateSet::npos; z = a[y].find_next(z)) {
              if (!rel[x][z]) {
                rel[x].set(z);
                work.push_back(z);
              }
            }
          }
        }
        break;
      }
    }
    return memo_.emplace(key, std::move(rel)).first->second;
  }

 private:
  const StateModel& s_;
  std::size_t n_;
  std::unordered_map<const void*, std::vector<StateSet>> memo_;
};

}  // namespace

StateSet pdl_eval(const StateModel& s, const PdlSentence& phi) { return PdlEvaluator(s).eval(phi); }

std::vector<StateSet> pdl_relation(const StateModel& s, const PdlProgram& p) {
  return PdlEvaluator(s).relation(p);
}

// ------------------------------------------------------ automata and regexes

ActionAutomaton action_automaton(const SimpleAction& a, const std::vector<std::string>& agents,
                                 OmegaArrowOracle& omega) {
  ActionAutomaton aut;
  aut.states = omega.reachable(a, agents);
  aut.agents = agents;
  std::unordered_map<Program, int, ProgramHash> pos;
  for (int i = 0; i < static_cast<int>(aut.states.size()); ++i) pos.emplace(aut.states[i], i);
  for (int i = 0; i < static_cast<int>(aut.states.size()); ++i) {
    for (int g = 0; g < static_cast<int>(agents.size()); ++g) {
      for (const auto& y : omega.successors(SimpleAction(aut.states[i]), agents[g])) {
        aut.edges.push_back({i, g, pos.at(y)});
      }
    }
  }
  return aut;
}

namespace {

using RNode = detail::RegexNode;

}  // namespace

Regex Regex::empty() { return Regex(std::make_shared<const RNode>(RNode{Kind::Empty, {}, {}, {}})); }
Regex Regex::epsilon() { return Regex(std::make_shared<const RNode>(RNode{Kind::Epsilon, {}, {}, {}})); }
Regex Regex::letter(Symbol s) { return Regex(std::make_shared<const RNode>(RNode{Kind::Letter, s, {}, {}})); }

Regex Regex::concat(const Regex& a, const Regex& b) {
  if (a.kind() == Kind::Empty || b.kind() == Kind::Empty) return empty();
  if (a.kind() == Kind::Epsilon) return b;
  if (b.kind() == Kind::Epsilon) return a;
  return Regex(std::make_shared<const RNode>(RNode{Kind::Concat, {}, a.node_, b.node_}));
}

Regex Regex::alt(const Regex& a, const Regex& b) {
  if (a.kind() == Kind::Empty) return b;
  if (b.kind() == Kind::Empty) return a;
  if (a == b) return a;
  return Regex(std::make_shared<const RNode>(RNode{Kind::Union, {}, a.node_, b.node_}));
}

Regex Regex::star(const Regex& a) {
  if (a.kind() == Kind::Empty || a.kind() == Kind::Epsilon) return epsilon();
  if (a.kind() == Kind::Star) return a;
  return Regex(std::make_shared<const RNode>(RNode{Kind::Star, {}, a.node_, {}}));
}

Regex::Kind Regex::kind() const { return node_->kind; }
Symbol Regex::symbol() const { return node_->symbol; }
Regex Regex::lhs() const { return Regex(node_->a); }
Regex Regex::rhs() const { return Regex(node_->b); }

bool operator==(const Regex& a, const Regex& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Regex::Kind::Empty:
    case Regex::Kind::Epsilon: return true;
    case Regex::Kind::Letter: return a.symbol() == b.symbol();
    case Regex::Kind::Star: return a.body() == b.body();
    default: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

std::string render(const Regex& r, const std::function<std::string(Symbol)>& name) {
  switch (r.kind()) {
    case Regex::Kind::Empty: return "0";
    case Regex::Kind::Epsilon: return "e";
    case Regex::Kind::Letter: return name(r.symbol());
    case Regex::Kind::Concat: return render(r.lhs(), name) + " " + render(r.rhs(), name);
    case Regex::Kind::Union: return "(" + render(r.lhs(), name) + " + " + render(r.rhs(), name) + ")";
    case Regex::Kind::Star: {
      auto b = r.body();
      auto inner = render(b, name);
      return b.kind() == Regex::Kind::Letter || b.kind() == Regex::Kind::Union ? inner + "*" : "(" + inner + ")*";
    }
  }
  return "";
}

std::string render(const Regex& r, const ActionAutomaton& aut) {
  return render(r, [&](Symbol s) {
    return s.kind == Symbol::Agent ? aut.agents[s.index] : "{" + render(aut.states[s.index]) + "}";
  });
}

Regex nfa_to_regex(const ActionAutomaton& aut, const std::set<int>& accept) {
  const int n = static_cast<int>(aut.states.size());
  const int start = n, final = n + 1;
  std::vector<std::vector<Regex>> r(n + 2, std::vector<Regex>(n + 2, Regex::empty()));
  r[start][aut.initial] = Regex::letter({Symbol::Action, aut.initial});
  for (const auto& e : aut.edges) {
    auto step = Regex::concat(Regex::letter({Symbol::Agent, e.agent}), Regex::letter({Symbol::Action, e.to}));
    r[e.from][e.to] = Regex::alt(r[e.from][e.to], step);
  }
  for (int k : accept) r[k][final] = Regex::alt(r[k][final], Regex::epsilon());
  std::vector<int> left;
  for (int i = 0; i < n + 2; ++i) left.push_back(i);
  for (int k = n - 1; k >= 0; --k) {
    left.erase(std::find(left.begin(), left.end(), k));
    auto loop = Regex::star(r[k][k]);
    for (int i : left) {
      if (i == final || r[i][k].kind() == Regex::Kind::Empty) continue;
      for (int j : left) {
        if (j == start || r[k][j].kind() == Regex::Kind::Empty) continue;
        r[i][j] = Regex::alt(r[i][j], Regex::concat(r[i][k], Regex::concat(loop, r[k][j])));
      }
    }
  }
  return r[start][final];
}

std::set<Word> regex_language(const Regex& r, std::size_t max_len) {
  std::set<Word> out;
  switch (r.kind()) {
    case Regex::Kind::Empty: break;
    case Regex::Kind::Epsilon: out.insert(Word{}); break;
    case Regex::Kind::Letter:
      if (max_len >= 1) out.insert({r.symbol()});
      break;
    case Regex::Kind::Union: {
      out = regex_language(r.lhs(), max_len);
      auto b = regex_language(r.rhs(), max_len);
      out.insert(b.begin(), b.end());
      break;
    }
    case Regex::Kind::Concat: {
      auto a = regex_language(r.lhs(), max_len);
      auto b = regex_language(r.rhs(), max_len);
      for (const auto& u : a) {
        for (const auto& v : b) {
          if (u.size() + v.size() > max_len) continue;
          Word w = u;
          w.insert(w.end(), v.begin(), v.end());
          out.insert(std::move(w));
        }
      }
      break;
    }
    case Regex::Kind::Star: {
      auto a = regex_language(r.body(), max_len);
      out.insert(Word{});
      std::vector<Word> frontier{{}};
      while (!frontier.empty()) {
        std::vector<Word> next;
        for (const auto& u : frontier) {
          for (const auto& v : a) {
            if (v.empty() || u.size() + v.size() > max_len) continue;
            Word w = u;
            w.insert(w.end(), v.begin(), v.end());
            if (out.insert(w).second) next.push_back(std::move(w));
          }
        }
        frontier = std::move(next);
      }
      break;
    }
  }
  return out;
}

std::set<Word> path_language(const ActionAutomaton& aut, const std::set<int>& accept, std::size_t max_len) {
  std::set<Word> out;
  if (max_len == 0) return out;
  std::deque<std::pair<int, Word>> work{{aut.initial, Word{{Symbol::Action, aut.initial}}}};
  while (!work.empty()) {
    auto [x, w] = work.front();
    work.pop_front();
    if (accept.count(x)) out.insert(w);
    if (w.size() + 2 > max_len) continue;
    for (const auto& e : aut.edges) {
      if (e.from != x) continue;
      Word v = w;
      v.push_back({Symbol::Agent, e.agent});
      v.push_back({Symbol::Action, e.to});
      work.emplace_back(e.to, std::move(v));
    }
  }
  return out;
}

namespace {

struct Nfa {
  std::vector<std::vector<int>> eps;
  std::vector<std::vector<std::pair<Symbol, int>>> sym;
  int add() {
    eps.emplace_back();
    sym.emplace_back();
    return static_cast<int>(eps.size()) - 1;
  }
};

// Thompson construction; returns (start, accept).
std::pair<int, int> thompson(Nfa& m, const Regex& r) {
  int s = m.add(), f = m.add();
  switch (r.kind()) {
    case Regex::Kind::Empty: break;
    case Regex::Kind::Epsilon: m.eps[s].push_back(f); break;
    case Regex::Kind::Letter: m.sym[s].emplace_back(r.symbol(), f); break;
    case Regex::Kind::Concat: {
      auto [as, af] = thompson(m, r.lhs());
      auto [bs, bf] = thompson(m, r.rhs());
      m.eps[s].push_back(as);
      m.eps[af].push_back(bs);
      m.eps[bf].push_back(f);
      break;
    }
    case Regex::Kind::Union: {
      auto [as, af] = thompson(m, r.lhs());
      auto [bs, bf] = thompson(m, r.rhs());
      m.eps[s].push_back(as);
      m.eps[s].push_back(bs);
      m.eps[af].push_back(f);
      m.eps[bf].push_back(f);
      break;
    }
    case Regex::Kind::Star: {
      auto [as, af] = thompson(m, r.body());
      m.eps[s].push_back(as);
      m.eps[s].push_back(f);
      m.eps[af].push_back(as);
      m.eps[af].push_back(f);
      break;
    }
  }
  return {s, f};
}

std::vector<int> eps_closure(const Nfa& m, std::vector<int> xs) {
  std::vector<char> in(m.eps.size(), 0);
  for (int x : xs) in[x] = 1;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (int y : m.eps[xs[i]]) {
      if (!in[y]) in[y] = 1, xs.push_back(y);
    }
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

std::vector<int> step(const Nfa& m, const std::vector<int>& xs, Symbol a) {
  std::vector<int> out;
  for (int x : xs) {
    for (const auto& [b, y] : m.sym[x]) {
      if (b == a) out.push_back(y);
    }
  }
  return eps_closure(m, out);
}

void alphabet(const Regex& r, std::set<Symbol>& out) {
  switch (r.kind()) {
    case Regex::Kind::Letter: out.insert(r.symbol()); break;
    case Regex::Kind::Concat:
    case Regex::Kind::Union:
      alphabet(r.lhs(), out);
      alphabet(r.rhs(), out);
      break;
    case Regex::Kind::Star: alphabet(r.body(), out); break;
    default: break;
  }
}

}  // namespace

bool regex_equivalent(const Regex& a, const Regex& b) {
  Nfa m;
  auto [as, af] = thompson(m, a);
  auto [bs, bf] = thompson(m, b);
  std::set<Symbol> sigma;
  alphabet(a, sigma);
  alphabet(b, sigma);
  using Pair = std::pair<std::vector<int>, std::vector<int>>;
  std::set<Pair> seen;
  std::deque<Pair> work;
  Pair init{eps_closure(m, {as}), eps_closure(m, {bs})};
  seen.insert(init);
  work.push_back(init);
  while (!work.empty()) {
    auto [x, y] = work.front();
    work.pop_front();
    bool ax = std::binary_search(x.begin(), x.end(), af);
    bool by = std::binary_search(y.begin(), y.end(), bf);
    if (ax != by) return false;
    for (Symbol s : sigma) {
      Pair next{step(m, x, s), step(m, y, s)};
      if (seen.insert(next).second) work.push_back(std::move(next));
    }
  }
  return true;
}

PdlProgram regex_program(const Regex& r, const std::vector<std::string>& agents,
                         const std::function<PdlSentence(int)>& action_test) {
  switch (r.kind()) {
    case Regex::Kind::Empty: return PdlProgram::test(PdlSentence::bottom());
    case Regex::Kind::Epsilon: return PdlProgram::test(PdlSentence::top());
    case Regex::Kind::Letter:
      return r.symbol().kind == Symbol::Agent ? PdlProgram::agent(agents.at(r.symbol().index))
                                              : PdlProgram::test(action_test(r.symbol().index));
    case Regex::Kind::Concat:
      return PdlProgram::seq(regex_program(r.lhs(), agents, action_test), regex_program(r.rhs(), agents, action_test));
    case Regex::Kind::Union:
      return PdlProgram::choice(regex_program(r.lhs(), agents, action_test),
                                regex_program(r.rhs(), agents, action_test));
    case Regex::Kind::Star: return PdlProgram::star(regex_program(r.body(), agents, action_test));
  }
  throw Error("unreachable regex kind");
}

// ----------------------------------------------------------------- translate

PdlSentence PdlTranslator::translate(const Sentence& phi) {
  if (contains_star(phi)) throw Error("translation takes iteration-free sentences");
  check_well_formed(phi, rw_.signature());
  return tr(rw_.normalize(phi));
}

PdlSentence PdlTranslator::tr(const Sentence& x) {
  auto it = memo_.find(x);
  if (it != memo_.end()) return it->second;
  PdlSentence out;
  switch (x.kind()) {
    case SentenceKind::True: out = PdlSentence::top(); break;
    case SentenceKind::False: out = PdlSentence::bottom(); break;
    case SentenceKind::Atom: out = PdlSentence::atom(x.name()); break;
    case SentenceKind::Not: out = PdlSentence::neg(tr(x.sub())); break;
    case SentenceKind::And: out = PdlSentence::conj(tr(x.lhs()), tr(x.rhs())); break;
    case SentenceKind::Box: out = PdlSentence::box(PdlProgram::agent(x.name()), tr(x.sub())); break;
    case SentenceKind::CBox: {
      const auto& bs = x.agents();
      PdlProgram any = PdlProgram::agent(bs[0]);
      for (std::size_t i = 1; i < bs.size(); ++i) any = PdlProgram::choice(any, PdlProgram::agent(bs[i]));
      out = PdlSentence::box(PdlProgram::star(any), tr(x.sub()));
      break;
    }
    case SentenceKind::DynBox: {
      const Sentence& cb = x.sub();
      auto aut = action_automaton(SimpleAction(x.program()), cb.agents(), rw_.oracle());
      std::vector<PdlSentence> pre(aut.states.size());
      for (std::size_t i = 0; i < aut.states.size(); ++i) pre[i] = tr(rw_.normalize(Sentence::pre(aut.states[i])));
      std::vector<PdlSentence> ends;
      for (int j = 0; j < static_cast<int>(aut.states.size()); ++j) {
        auto pi = regex_program(nfa_to_regex(aut, {j}), aut.agents, [&](int i) { return pre[i]; });
        auto last = tr(rw_.normalize(Sentence::dyn_box(aut.states[j], cb.sub())));
        ends.push_back(PdlSentence::diamond(pi, PdlSentence::neg(last)));
      }
      out = PdlSentence::neg(PdlSentence::disj_all(ends));
      break;
    }
    default: throw Error("translation expects a normal form, got " + render(x));
  }
  memo_.emplace(x, out);
  return out;
}

PdlSentence translate(const Sentence& phi, const Signature& sig) { return PdlTranslator(sig).translate(phi); }

}  // namespace del
