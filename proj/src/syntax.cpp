#include "del/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <unordered_set>

#include <json.hpp>

namespace del {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t hash_str(const std::string& s) { return std::hash<std::string>{}(s); }

}  // namespace

namespace detail {

Sentence SentenceNode::make(SentenceNode n) {
  std::size_t h = mix(0x51ed270b, static_cast<std::size_t>(n.kind));
  h = mix(h, hash_str(n.name));
  for (const auto& a : n.agents) h = mix(h, hash_str(a));
  if (n.a.node_) { h = mix(h, n.a.hash()); n.size += n.a.size(); }
  if (n.b.node_) { h = mix(h, n.b.hash()); n.size += n.b.size(); }
  if (n.prog.node_) { h = mix(h, n.prog.hash()); n.size += n.prog.size(); }
  n.hash = h;
  return Sentence(std::make_shared<const SentenceNode>(std::move(n)));
}

Program ProgramNode::make(ProgramNode n) {
  std::size_t h = mix(0x2545f491, static_cast<std::size_t>(n.kind));
  h = mix(h, static_cast<std::size_t>(n.index + 1));
  h = mix(h, hash_str(n.type_name));
  for (const auto& s : n.args) { h = mix(h, s.hash()); n.size += s.size(); }
  if (n.a.node_) { h = mix(h, n.a.hash()); n.size += n.a.size(); }
  if (n.b.node_) { h = mix(h, n.b.hash()); n.size += n.b.size(); }
  n.hash = h;
  return Program(std::make_shared<const ProgramNode>(std::move(n)));
}

}  // namespace detail

using detail::ProgramNode;
using detail::SentenceNode;

namespace {

Sentence leaf(SentenceKind k, std::string name = {}) {
  SentenceNode n;
  n.kind = k;
  n.name = std::move(name);
  return SentenceNode::make(std::move(n));
}

Sentence unary(SentenceKind k, Sentence s, std::string name = {}) {
  SentenceNode n;
  n.kind = k;
  n.name = std::move(name);
  n.a = std::move(s);
  return SentenceNode::make(std::move(n));
}

Sentence binary(SentenceKind k, Sentence a, Sentence b) {
  SentenceNode n;
  n.kind = k;
  n.a = std::move(a);
  n.b = std::move(b);
  return SentenceNode::make(std::move(n));
}

Sentence group(SentenceKind k, std::vector<std::string> agents, Sentence s) {
  std::sort(agents.begin(), agents.end());
  agents.erase(std::unique(agents.begin(), agents.end()), agents.end());
  if (agents.empty()) throw Error("empty agent set in common-knowledge operator");
  SentenceNode n;
  n.kind = k;
  n.agents = std::move(agents);
  n.a = std::move(s);
  return SentenceNode::make(std::move(n));
}

Sentence dynamic(SentenceKind k, Program p, Sentence s) {
  SentenceNode n;
  n.kind = k;
  n.prog = std::move(p);
  n.a = std::move(s);
  return SentenceNode::make(std::move(n));
}

}  // namespace

Sentence::Sentence() : Sentence(top()) {}

Sentence Sentence::top() {
  static const Sentence t = leaf(SentenceKind::True);
  return t;
}
Sentence Sentence::bottom() {
  static const Sentence f = leaf(SentenceKind::False);
  return f;
}
Sentence Sentence::atom(std::string name) { return leaf(SentenceKind::Atom, std::move(name)); }
Sentence Sentence::neg(Sentence s) { return unary(SentenceKind::Not, std::move(s)); }
Sentence Sentence::conj(Sentence a, Sentence b) { return binary(SentenceKind::And, std::move(a), std::move(b)); }
Sentence Sentence::disj(Sentence a, Sentence b) { return binary(SentenceKind::Or, std::move(a), std::move(b)); }
Sentence Sentence::implies(Sentence a, Sentence b) {
  return binary(SentenceKind::Implies, std::move(a), std::move(b));
}
Sentence Sentence::iff(const Sentence& a, const Sentence& b) { return conj(implies(a, b), implies(b, a)); }
Sentence Sentence::box(std::string agent, Sentence s) { return unary(SentenceKind::Box, std::move(s), std::move(agent)); }
Sentence Sentence::diamond(std::string agent, Sentence s) {
  return unary(SentenceKind::Diamond, std::move(s), std::move(agent));
}
Sentence Sentence::cbox(std::vector<std::string> agents, Sentence s) {
  return group(SentenceKind::CBox, std::move(agents), std::move(s));
}
Sentence Sentence::cdiamond(std::vector<std::string> agents, Sentence s) {
  return group(SentenceKind::CDiamond, std::move(agents), std::move(s));
}
Sentence Sentence::dyn_box(Program p, Sentence s) { return dynamic(SentenceKind::DynBox, std::move(p), std::move(s)); }
Sentence Sentence::dyn_diamond(Program p, Sentence s) {
  return dynamic(SentenceKind::DynDiamond, std::move(p), std::move(s));
}
Sentence Sentence::pre(Program p) { return dynamic(SentenceKind::Pre, std::move(p), Sentence(NullTag{})); }

Sentence Sentence::conj_all(const std::vector<Sentence>& xs) {
  if (xs.empty()) return top();
  Sentence acc = xs.back();
  for (std::size_t i = xs.size() - 1; i-- > 0;) acc = conj(xs[i], acc);
  return acc;
}

Sentence Sentence::disj_all(const std::vector<Sentence>& xs) {
  if (xs.empty()) return bottom();
  Sentence acc = xs.back();
  for (std::size_t i = xs.size() - 1; i-- > 0;) acc = disj(xs[i], acc);
  return acc;
}

bool operator==(const Sentence& x, const Sentence& y) {
  if (x.node_ == y.node_) return true;
  if (!x.node_ || !y.node_) return false;
  const auto& a = *x.node_;
  const auto& b = *y.node_;
  return a.hash == b.hash && a.kind == b.kind && a.size == b.size && a.name == b.name &&
         a.agents == b.agents && a.a == b.a && a.b == b.b && a.prog == b.prog;
}

Program::Program() : Program(skip()) {}

namespace {
ProgramNode node_of(ProgramKind k) {
  ProgramNode n;
  n.kind = k;
  return n;
}
}  // namespace

Program Program::skip() {
  static const Program s = ProgramNode::make(node_of(ProgramKind::Skip));
  return s;
}
Program Program::crash() {
  static const Program c = ProgramNode::make(node_of(ProgramKind::Crash));
  return c;
}
Program Program::basic(int index, std::string type_name, std::vector<Sentence> args) {
  ProgramNode n;
  n.kind = ProgramKind::Basic;
  n.index = index;
  n.type_name = std::move(type_name);
  n.args = std::move(args);
  return ProgramNode::make(std::move(n));
}
Program Program::seq(Program a, Program b) {
  ProgramNode n;
  n.kind = ProgramKind::Seq;
  n.a = std::move(a);
  n.b = std::move(b);
  return ProgramNode::make(std::move(n));
}
Program Program::choice(Program a, Program b) {
  ProgramNode n;
  n.kind = ProgramKind::Union;
  n.a = std::move(a);
  n.b = std::move(b);
  return ProgramNode::make(std::move(n));
}
Program Program::star(Program a) {
  ProgramNode n;
  n.kind = ProgramKind::Star;
  n.a = std::move(a);
  return ProgramNode::make(std::move(n));
}

bool operator==(const Program& x, const Program& y) {
  if (x.node_ == y.node_) return true;
  if (!x.node_ || !y.node_) return false;
  const auto& a = *x.node_;
  const auto& b = *y.node_;
  return a.hash == b.hash && a.kind == b.kind && a.size == b.size && a.index == b.index &&
         a.type_name == b.type_name && a.args == b.args && a.a == b.a && a.b == b.b;
}

// ---------------------------------------------------------------- signature

Signature::Signature(std::string name, std::vector<std::string> agents, std::vector<std::string> types,
                     std::map<std::string, std::set<std::pair<int, int>>> arrows)
    : name_(std::move(name)), agents_(std::move(agents)), types_(std::move(types)), arrows_(std::move(arrows)) {
  if (types_.empty()) throw Error("signature must declare at least one action type");
  std::set<std::string> seen;
  for (const auto& t : types_) {
    if (!seen.insert(t).second) throw Error("repeated action type '" + t + "'");
  }
  std::set<std::string> ag(agents_.begin(), agents_.end());
  if (ag.size() != agents_.size()) throw Error("repeated agent");
  for (const auto& [a, pairs] : arrows_) {
    if (!ag.count(a)) throw Error("arrow for undeclared agent '" + a + "'");
    for (auto [i, j] : pairs) {
      if (i < 0 || j < 0 || i >= n() || j >= n()) throw Error("dangling arrow endpoint");
    }
  }
  for (const auto& a : agents_) {
    auto& table = succ_[a];
    table.assign(types_.size(), {});
    for (auto [i, j] : arrows_[a]) table[i].push_back(j);
  }
}

bool Signature::has_agent(std::string_view a) const {
  return std::find(agents_.begin(), agents_.end(), a) != agents_.end();
}

std::optional<int> Signature::type_index(std::string_view t) const {
  auto it = std::find(types_.begin(), types_.end(), t);
  if (it == types_.end()) return std::nullopt;
  return static_cast<int>(it - types_.begin());
}

const std::vector<int>& Signature::successors(int i, const std::string& agent) const {
  auto it = succ_.find(agent);
  if (it == succ_.end()) throw Error("unknown agent '" + agent + "'");
  return it->second.at(i);
}

const std::set<std::pair<int, int>>& Signature::arrows(const std::string& agent) const {
  static const std::set<std::pair<int, int>> none;
  auto it = arrows_.find(agent);
  return it == arrows_.end() ? none : it->second;
}

Signature parse_signature(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("signature JSON: ") + e.what());
  }
  auto need = [&](const char* key) -> const nlohmann::json& {
    if (!j.is_object() || !j.contains(key)) throw Error(std::string("signature JSON: missing '") + key + "'");
    return j.at(key);
  };
  try {
    std::string name = need("name").get<std::string>();
    auto agents = need("agents").get<std::vector<std::string>>();
    auto types = need("types").get<std::vector<std::string>>();
    if (types.empty()) throw Error("signature must declare at least one action type");
    std::map<std::string, std::set<std::pair<int, int>>> arrows;
    const auto& arr = need("arrows");
    if (!arr.is_object()) throw Error("signature JSON: 'arrows' must be an object");
    auto index = [&](const std::string& t) {
      auto it = std::find(types.begin(), types.end(), t);
      if (it == types.end()) throw Error("dangling arrow endpoint '" + t + "'");
      return static_cast<int>(it - types.begin());
    };
    for (const auto& [agent, pairs] : arr.items()) {
      auto& set = arrows[agent];
      for (const auto& pr : pairs) {
        if (!pr.is_array() || pr.size() != 2) throw Error("signature JSON: arrow must be a pair");
        set.emplace(index(pr[0].get<std::string>()), index(pr[1].get<std::string>()));
      }
    }
    return Signature(std::move(name), std::move(agents), std::move(types), std::move(arrows));
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("signature JSON: ") + e.what());
  }
}

std::string signature_to_json(const Signature& sig) {
  nlohmann::ordered_json j;
  j["name"] = sig.name();
  j["agents"] = sig.agents();
  j["types"] = sig.types();
  nlohmann::ordered_json arr = nlohmann::ordered_json::object();
  for (const auto& a : sig.agents()) {
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (auto [i, k] : sig.arrows(a)) list.push_back({sig.types()[i], sig.types()[k]});
    arr[a] = list;
  }
  j["arrows"] = arr;
  return j.dump(2) + "\n";
}

Signature pub_signature(std::vector<std::string> agents) {
  std::map<std::string, std::set<std::pair<int, int>>> arrows;
  for (const auto& a : agents) arrows[a] = {{0, 0}};
  return Signature("Pub", std::move(agents), {"Pub"}, std::move(arrows));
}

Signature pri_signature() {
  // Pri ->A Pri, Pri ->B skp, skp ->A skp, skp ->B skp
  return Signature("Pri", {"A", "B"}, {"Pri", "skp"},
                   {{"A", {{0, 0}, {1, 1}}}, {"B", {{0, 1}, {1, 1}}}});
}

// ---------------------------------------------------------------- lexer/parser

namespace {

enum class Tok { Ident, LParen, RParen, LBrack, RBrack, Lt, Gt, LBrace, RBrace, Comma, Tilde, Amp, Bar, Arrow,
                 Semi, Plus, Star, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), i});
      i = j;
      continue;
    }
    Tok k;
    switch (c) {
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '[': k = Tok::LBrack; break;
      case ']': k = Tok::RBrack; break;
      case '<': k = Tok::Lt; break;
      case '>': k = Tok::Gt; break;
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      case ',': k = Tok::Comma; break;
      case '~': k = Tok::Tilde; break;
      case '&': k = Tok::Amp; break;
      case '|': k = Tok::Bar; break;
      case ';': k = Tok::Semi; break;
      case '+': k = Tok::Plus; break;
      case '*': k = Tok::Star; break;
      case '-':
        if (i + 1 < s.size() && s[i + 1] == '>') {
          out.push_back({Tok::Arrow, "->", i});
          i += 2;
          continue;
        }
        [[fallthrough]];
      default:
        throw SyntaxError(std::string("unexpected character '") + c + "'", i);
    }
    out.push_back({k, std::string(1, c), i});
    ++i;
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

bool has_modal_prefix(const std::string& w) {
  return w.size() >= 2 && w[1] == '_' && (w[0] == 'K' || w[0] == 'M' || w[0] == 'C' || w[0] == 'E');
}

class Parser {
 public:
  Parser(std::string_view text, const Signature& sig, ParseOptions opt)
      : toks_(lex(text)), sig_(sig), opt_(opt) {}

  Sentence sentence_eof() {
    Sentence s = formula();
    expect(Tok::End, "end of input");
    return s;
  }
  Program program_eof() {
    Program p = program();
    expect(Tok::End, "end of input");
    return p;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++i_;
    return true;
  }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) throw SyntaxError(std::string("expected ") + what, peek().pos);
    return toks_[i_++];
  }

  Sentence formula() {
    Sentence lhs = disjunction();
    if (accept(Tok::Arrow)) return Sentence::implies(lhs, formula());
    return lhs;
  }
  Sentence disjunction() {
    Sentence acc = conjunction();
    while (accept(Tok::Bar)) acc = Sentence::disj(acc, conjunction());
    return acc;
  }
  Sentence conjunction() {
    Sentence acc = unary_s();
    while (accept(Tok::Amp)) acc = Sentence::conj(acc, unary_s());
    return acc;
  }

  std::string agent(const std::string& name, std::size_t pos) {
    if (!sig_.has_agent(name)) throw SyntaxError("unknown agent '" + name + "'", pos);
    return name;
  }

  std::vector<std::string> agent_set(const Token& t) {
    std::vector<std::string> out;
    if (t.text.size() > 2) {
      out.push_back(agent(t.text.substr(2), t.pos));
      return out;
    }
    expect(Tok::LBrace, "'{'");
    if (peek().kind == Tok::RBrace) throw SyntaxError("empty agent set", peek().pos);
    do {
      const Token& a = expect(Tok::Ident, "agent name");
      out.push_back(agent(a.text, a.pos));
    } while (accept(Tok::Comma));
    expect(Tok::RBrace, "'}'");
    return out;
  }

  Sentence unary_s() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Tilde:
        ++i_;
        return Sentence::neg(unary_s());
      case Tok::LBrack: {
        ++i_;
        Program p = program();
        expect(Tok::RBrack, "']'");
        return Sentence::dyn_box(p, unary_s());
      }
      case Tok::Lt: {
        ++i_;
        Program p = program();
        expect(Tok::Gt, "'>'");
        return Sentence::dyn_diamond(p, unary_s());
      }
      case Tok::LParen: {
        ++i_;
        Sentence s = formula();
        expect(Tok::RParen, "')'");
        return s;
      }
      case Tok::Ident:
        break;
      default:
        throw SyntaxError("expected a sentence", t.pos);
    }
    ++i_;
    const std::string& w = t.text;
    if (w == "true") return Sentence::top();
    if (w == "false") return Sentence::bottom();
    if (w == "skip" || w == "crash") throw SyntaxError("program keyword in sentence position", t.pos);
    if (has_modal_prefix(w)) {
      char m = w[0];
      if (m == 'K' || m == 'M') {
        if (w.size() == 2) throw SyntaxError("missing agent", t.pos);
        std::string a = agent(w.substr(2), t.pos);
        Sentence s = unary_s();
        return m == 'K' ? Sentence::box(a, s) : Sentence::diamond(a, s);
      }
      auto ags = agent_set(t);
      Sentence s = unary_s();
      return m == 'C' ? Sentence::cbox(ags, s) : Sentence::cdiamond(ags, s);
    }
    if (w == "Pre" && peek().kind == Tok::LParen) {
      if (!opt_.allow_pre) throw SyntaxError("Pre(...) is not part of the input language", t.pos);
      ++i_;
      Program p = program();
      expect(Tok::RParen, "')'");
      return Sentence::pre(p);
    }
    if (peek().kind == Tok::LParen) throw SyntaxError("action '" + w + "' in sentence position", t.pos);
    return Sentence::atom(w);
  }

  Program program() {
    Program acc = seq_p();
    while (accept(Tok::Plus)) acc = Program::choice(acc, seq_p());
    return acc;
  }
  Program seq_p() {
    Program acc = star_p();
    while (accept(Tok::Semi)) acc = Program::seq(acc, star_p());
    return acc;
  }
  Program star_p() {
    Program acc = primary_p();
    while (accept(Tok::Star)) acc = Program::star(acc);
    return acc;
  }
  Program primary_p() {
    const Token& t = peek();
    if (accept(Tok::LParen)) {
      Program p = program();
      expect(Tok::RParen, "')'");
      return p;
    }
    if (t.kind != Tok::Ident) throw SyntaxError("expected a program", t.pos);
    ++i_;
    if (t.text == "skip") return Program::skip();
    if (t.text == "crash") return Program::crash();
    auto idx = sig_.type_index(t.text);
    if (!idx) throw SyntaxError("unknown action type '" + t.text + "'", t.pos);
    expect(Tok::LParen, "'(' after action type");
    std::vector<Sentence> args;
    do {
      args.push_back(formula());
    } while (accept(Tok::Comma));
    expect(Tok::RParen, "')'");
    if (static_cast<int>(args.size()) != sig_.n()) {
      throw SyntaxError("action '" + t.text + "' expects " + std::to_string(sig_.n()) + " arguments, got " +
                            std::to_string(args.size()),
                        t.pos);
    }
    return Program::basic(*idx, t.text, std::move(args));
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  const Signature& sig_;
  ParseOptions opt_;
};

}  // namespace

Sentence parse_sentence(std::string_view text, const Signature& sig, ParseOptions opt) {
  return Parser(text, sig, opt).sentence_eof();
}

Program parse_program(std::string_view text, const Signature& sig, ParseOptions opt) {
  return Parser(text, sig, opt).program_eof();
}

// ---------------------------------------------------------------- printer

namespace {

// Binding levels: 0 ->, 1 |, 2 &, 3 prefix operators, 4 leaves. A context of
// -1 marks a delimited position that never needs parentheses.
int level(const Sentence& s) {
  switch (s.kind()) {
    case SentenceKind::Implies: return 0;
    case SentenceKind::Or: return 1;
    case SentenceKind::And: return 2;
    case SentenceKind::True:
    case SentenceKind::False:
    case SentenceKind::Atom:
    case SentenceKind::Pre: return 4;
    default: return 3;
  }
}

int level(const Program& p) {
  switch (p.kind()) {
    case ProgramKind::Union: return 0;
    case ProgramKind::Seq: return 1;
    case ProgramKind::Star: return 2;
    default: return 3;
  }
}

std::string join_agents(const std::vector<std::string>& ags) {
  std::string out;
  for (std::size_t i = 0; i < ags.size(); ++i) {
    if (i) out += ',';
    out += ags[i];
  }
  return out;
}

struct Printer {
  bool full;
  std::string out;

  void s(const Sentence& x, int ctx) {
    bool paren = full ? (ctx >= 0 && level(x) < 4) : level(x) < ctx;
    if (paren) out += '(';
    body(x);
    if (paren) out += ')';
  }

  void body(const Sentence& x) {
    switch (x.kind()) {
      case SentenceKind::True: out += "true"; break;
      case SentenceKind::False: out += "false"; break;
      case SentenceKind::Atom: out += x.name(); break;
      case SentenceKind::Not: out += '~'; s(x.sub(), 3); break;
      case SentenceKind::And: s(x.lhs(), 2); out += " & "; s(x.rhs(), 3); break;
      case SentenceKind::Or: s(x.lhs(), 1); out += " | "; s(x.rhs(), 2); break;
      case SentenceKind::Implies: s(x.lhs(), 1); out += " -> "; s(x.rhs(), 0); break;
      case SentenceKind::Box: out += "K_" + x.name() + ' '; s(x.sub(), 3); break;
      case SentenceKind::Diamond: out += "M_" + x.name() + ' '; s(x.sub(), 3); break;
      case SentenceKind::CBox: out += "C_{" + join_agents(x.agents()) + "} "; s(x.sub(), 3); break;
      case SentenceKind::CDiamond: out += "E_{" + join_agents(x.agents()) + "} "; s(x.sub(), 3); break;
      case SentenceKind::DynBox: out += '['; p(x.program(), -1); out += "] "; s(x.sub(), 3); break;
      case SentenceKind::DynDiamond: out += '<'; p(x.program(), -1); out += "> "; s(x.sub(), 3); break;
      case SentenceKind::Pre: out += "Pre("; p(x.program(), -1); out += ')'; break;
    }
  }

  void p(const Program& x, int ctx) {
    bool paren = full ? (ctx >= 0 && level(x) < 3) : level(x) < ctx;
    if (paren) out += '(';
    switch (x.kind()) {
      case ProgramKind::Skip: out += "skip"; break;
      case ProgramKind::Crash: out += "crash"; break;
      case ProgramKind::Basic:
        out += x.type_name();
        out += '(';
        for (std::size_t i = 0; i < x.args().size(); ++i) {
          if (i) out += ", ";
          s(x.args()[i], -1);
        }
        out += ')';
        break;
      case ProgramKind::Seq: p(x.lhs(), 1); out += " ; "; p(x.rhs(), 2); break;
      case ProgramKind::Union: p(x.lhs(), 0); out += " + "; p(x.rhs(), 1); break;
      case ProgramKind::Star: p(x.body(), 3); out += '*'; break;
    }
    if (paren) out += ')';
  }
};

}  // namespace

std::string render(const Sentence& s, RenderOptions opt) {
  Printer pr{opt.full_parens, {}};
  pr.s(s, -1);
  return pr.out;
}

std::string render(const Program& p, RenderOptions opt) {
  Printer pr{opt.full_parens, {}};
  pr.p(p, -1);
  return pr.out;
}

bool render_less(const Sentence& a, const Sentence& b) {
  if (a == b) return false;
  return render(a) < render(b);
}

// ---------------------------------------------------------------- simple actions

bool SimpleAction::is_simple(const Program& p) {
  switch (p.kind()) {
    case ProgramKind::Skip:
    case ProgramKind::Crash:
    case ProgramKind::Basic: return true;
    case ProgramKind::Seq: return is_simple(p.lhs()) && is_simple(p.rhs());
    default: return false;
  }
}

SimpleAction::SimpleAction(Program p) : p_(std::move(p)) {
  if (!is_simple(p_)) throw Error("not a simple action: " + render(p_));
}

int SimpleAction::length() const {
  std::function<int(const Program&)> go = [&](const Program& p) -> int {
    if (p.kind() == ProgramKind::Basic) return 1;
    if (p.kind() == ProgramKind::Seq) return go(p.lhs()) + go(p.rhs());
    return 0;
  };
  return go(p_);
}

// ---------------------------------------------------------------- queries

namespace {

template <class F>
void visit(const Sentence& s, F&& f);

template <class F>
void visit(const Program& p, F&& f) {
  for (const auto& a : p.args()) visit(a, f);
  if (p.kind() == ProgramKind::Seq || p.kind() == ProgramKind::Union) {
    visit(p.lhs(), f);
    visit(p.rhs(), f);
  } else if (p.kind() == ProgramKind::Star) {
    visit(p.body(), f);
  }
}

bool has_program(SentenceKind k) {
  return k == SentenceKind::DynBox || k == SentenceKind::DynDiamond || k == SentenceKind::Pre;
}

bool has_lhs(SentenceKind k) {
  return k != SentenceKind::True && k != SentenceKind::False && k != SentenceKind::Atom && k != SentenceKind::Pre;
}

bool has_rhs(SentenceKind k) {
  return k == SentenceKind::And || k == SentenceKind::Or || k == SentenceKind::Implies;
}

template <class F>
void visit(const Sentence& s, F&& f) {
  f(s);
  if (has_program(s.kind())) visit(s.program(), f);
  if (has_lhs(s.kind())) visit(s.lhs(), f);
  if (has_rhs(s.kind())) visit(s.rhs(), f);
}

}  // namespace

bool contains_star(const Program& p) {
  switch (p.kind()) {
    case ProgramKind::Star: return true;
    case ProgramKind::Seq:
    case ProgramKind::Union: return contains_star(p.lhs()) || contains_star(p.rhs());
    case ProgramKind::Basic:
      return std::any_of(p.args().begin(), p.args().end(), [](const Sentence& a) { return contains_star(a); });
    default: return false;
  }
}

bool contains_star(const Sentence& s) {
  bool found = false;
  visit(s, [&](const Sentence& x) {
    if (has_program(x.kind()) && contains_star(x.program())) found = true;
  });
  return found;
}

bool contains_pre(const Sentence& s) {
  bool found = false;
  visit(s, [&](const Sentence& x) { found = found || x.kind() == SentenceKind::Pre; });
  return found;
}

namespace {

int depth_of(const Sentence& s, bool epistemic);

int depth_of(const Program& p, bool epistemic) {
  int d = 0;
  for (const auto& a : p.args()) d = std::max(d, depth_of(a, epistemic));
  if (p.kind() == ProgramKind::Seq || p.kind() == ProgramKind::Union) {
    d = std::max({d, depth_of(p.lhs(), epistemic), depth_of(p.rhs(), epistemic)});
  } else if (p.kind() == ProgramKind::Star) {
    d = std::max(d, depth_of(p.body(), epistemic));
  }
  return d;
}

int depth_of(const Sentence& s, bool epistemic) {
  auto k = s.kind();
  int d = 0;
  if (has_lhs(k)) d = depth_of(s.lhs(), epistemic);
  if (has_rhs(k)) d = std::max(d, depth_of(s.rhs(), epistemic));
  if (has_program(k)) d = std::max(d, depth_of(s.program(), epistemic));
  bool counts = epistemic ? (k == SentenceKind::Box || k == SentenceKind::Diamond || k == SentenceKind::CBox ||
                             k == SentenceKind::CDiamond)
                          : (k == SentenceKind::DynBox || k == SentenceKind::DynDiamond);
  return d + (counts ? 1 : 0);
}

}  // namespace

int modal_depth(const Sentence& s) { return depth_of(s, true); }
int dynamic_depth(const Sentence& s) { return depth_of(s, false); }

std::set<std::string> atoms_of(const Sentence& s) {
  std::set<std::string> out;
  visit(s, [&](const Sentence& x) {
    if (x.kind() == SentenceKind::Atom) out.insert(x.name());
  });
  return out;
}

std::vector<Sentence> subsentences(const Sentence& s) {
  std::vector<Sentence> out;
  std::unordered_set<Sentence, SentenceHash> seen;
  visit(s, [&](const Sentence& x) {
    if (seen.insert(x).second) out.push_back(x);
  });
  return out;
}

void check_well_formed(const Sentence& s, const Signature& sig) {
  visit(s, [&](const Sentence& x) {
    switch (x.kind()) {
      case SentenceKind::Box:
      case SentenceKind::Diamond:
        if (!sig.has_agent(x.name())) throw Error("unknown agent '" + x.name() + "'");
        break;
      case SentenceKind::CBox:
      case SentenceKind::CDiamond:
        if (x.agents().empty()) throw Error("empty agent set");
        for (const auto& a : x.agents()) {
          if (!sig.has_agent(a)) throw Error("unknown agent '" + a + "'");
        }
        break;
      default: break;
    }
    if (!has_program(x.kind())) return;
    std::function<void(const Program&)> check = [&](const Program& p) {
      switch (p.kind()) {
        case ProgramKind::Basic: {
          auto idx = sig.type_index(p.type_name());
          if (!idx || *idx != p.type_index()) throw Error("unknown action type '" + p.type_name() + "'");
          if (static_cast<int>(p.args().size()) != sig.n()) throw Error("wrong arity for '" + p.type_name() + "'");
          break;
        }
        case ProgramKind::Seq:
        case ProgramKind::Union: check(p.lhs()); check(p.rhs()); break;
        case ProgramKind::Star: check(p.body()); break;
        default: break;
      }
    };
    check(x.program());
  });
}

// ---------------------------------------------------------------- desugaring

namespace {

Sentence box_over(const Program& p, const Sentence& body);
Sentence diamond_over(const Program& p, const Sentence& body);

Program desugar_basic(const Program& p) {
  std::vector<Sentence> args;
  args.reserve(p.args().size());
  for (const auto& a : p.args()) args.push_back(desugar(a));
  return Program::basic(p.type_index(), p.type_name(), std::move(args));
}

Sentence box_over(const Program& p, const Sentence& body) {
  switch (p.kind()) {
    case ProgramKind::Skip: return body;
    case ProgramKind::Crash: return Sentence::top();
    case ProgramKind::Union: return Sentence::conj(box_over(p.lhs(), body), box_over(p.rhs(), body));
    case ProgramKind::Seq: return box_over(p.lhs(), box_over(p.rhs(), body));
    case ProgramKind::Basic: return Sentence::dyn_box(desugar_basic(p), body);
    case ProgramKind::Star: break;
  }
  throw Error("desugar: iteration is outside the star-free fragment");
}

Sentence diamond_over(const Program& p, const Sentence& body) {
  switch (p.kind()) {
    case ProgramKind::Skip: return body;
    case ProgramKind::Crash: return Sentence::bottom();
    case ProgramKind::Union: return Sentence::disj(diamond_over(p.lhs(), body), diamond_over(p.rhs(), body));
    case ProgramKind::Seq: return diamond_over(p.lhs(), diamond_over(p.rhs(), body));
    case ProgramKind::Basic: return Sentence::dyn_diamond(desugar_basic(p), body);
    case ProgramKind::Star: break;
  }
  throw Error("desugar: iteration is outside the star-free fragment");
}

// Pre of a program, as a sentence free of skip, crash, choice and composition.
Sentence pre_over(const Program& p) {
  switch (p.kind()) {
    case ProgramKind::Skip: return Sentence::top();
    case ProgramKind::Crash: return Sentence::bottom();
    case ProgramKind::Union: return Sentence::disj(pre_over(p.lhs()), pre_over(p.rhs()));
    case ProgramKind::Seq: return diamond_over(p.lhs(), pre_over(p.rhs()));
    case ProgramKind::Basic: return Sentence::pre(desugar_basic(p));
    case ProgramKind::Star: break;
  }
  throw Error("desugar: iteration is outside the star-free fragment");
}

}  // namespace

Sentence desugar(const Sentence& s) {
  switch (s.kind()) {
    case SentenceKind::True:
    case SentenceKind::False:
    case SentenceKind::Atom: return s;
    case SentenceKind::Not: return Sentence::neg(desugar(s.sub()));
    case SentenceKind::And: return Sentence::conj(desugar(s.lhs()), desugar(s.rhs()));
    case SentenceKind::Or: return Sentence::disj(desugar(s.lhs()), desugar(s.rhs()));
    case SentenceKind::Implies: return Sentence::implies(desugar(s.lhs()), desugar(s.rhs()));
    case SentenceKind::Box: return Sentence::box(s.name(), desugar(s.sub()));
    case SentenceKind::Diamond: return Sentence::diamond(s.name(), desugar(s.sub()));
    case SentenceKind::CBox: return Sentence::cbox(s.agents(), desugar(s.sub()));
    case SentenceKind::CDiamond: return Sentence::cdiamond(s.agents(), desugar(s.sub()));
    case SentenceKind::DynBox: return box_over(s.program(), desugar(s.sub()));
    case SentenceKind::DynDiamond: return diamond_over(s.program(), desugar(s.sub()));
    case SentenceKind::Pre: return pre_over(s.program());
  }
  return s;
}

}  // namespace del
