#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "del/canon.hpp"
#include "del/kripke.hpp"
#include "del/rewrite.hpp"
#include "del/syntax.hpp"

namespace del {

// ------------------------------------------------------------------ PDL ASTs

enum class PdlKind : std::uint8_t { True, False, Atom, Not, And, Or, Box, Diamond };
enum class PdlProgramKind : std::uint8_t { Agent, Test, Seq, Choice, Star };

namespace detail {
struct PdlNode;
struct PdlProgramNode;
}  // namespace detail

class PdlProgram;

class PdlSentence {
 public:
  PdlSentence();  // true

  static PdlSentence top();
  static PdlSentence bottom();
  static PdlSentence atom(std::string name);
  static PdlSentence neg(PdlSentence s);
  static PdlSentence conj(PdlSentence a, PdlSentence b);
  static PdlSentence disj(PdlSentence a, PdlSentence b);
  static PdlSentence box(PdlProgram p, PdlSentence s);
  static PdlSentence diamond(PdlProgram p, PdlSentence s);
  static PdlSentence conj_all(const std::vector<PdlSentence>& xs);  // empty: true
  static PdlSentence disj_all(const std::vector<PdlSentence>& xs);  // empty: false

  PdlKind kind() const;
  const std::string& name() const;
  PdlSentence lhs() const;
  PdlSentence rhs() const;
  PdlSentence sub() const { return lhs(); }
  PdlProgram program() const;
  std::size_t size() const;

 private:
  explicit PdlSentence(std::shared_ptr<const detail::PdlNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::PdlNode> node_;
  friend class PdlProgram;
};

class PdlProgram {
 public:
  static PdlProgram agent(std::string name);
  static PdlProgram test(PdlSentence s);
  static PdlProgram seq(PdlProgram a, PdlProgram b);
  static PdlProgram choice(PdlProgram a, PdlProgram b);
  static PdlProgram star(PdlProgram a);

  PdlProgramKind kind() const;
  const std::string& name() const;
  PdlSentence sentence() const;  // of a test
  PdlProgram lhs() const;
  PdlProgram rhs() const;
  PdlProgram body() const { return lhs(); }
  std::size_t size() const;
  // Address of the shared node; equal for copies of one subtree.
  const void* node_id() const { return node_.get(); }

 private:
  explicit PdlProgram(std::shared_ptr<const detail::PdlProgramNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::PdlProgramNode> node_;
  friend class PdlSentence;
};

// Concrete syntax: programs A, ?phi, (a ; b), (a + b), a*; sentences true,
// false, p, ~phi, (phi & psi), (phi | psi), [a] phi, <a> phi.
std::string render(const PdlSentence& s);
std::string render(const PdlProgram& p);

// Standard relational semantics; star is the reflexive-transitive closure.
// Error for an agent the model does not have.
StateSet pdl_eval(const StateModel& s, const PdlSentence& phi);
// Row x holds the successors of x.
std::vector<StateSet> pdl_relation(const StateModel& s, const PdlProgram& p);

// ------------------------------------------------------ automata and regexes

// Letters of the path language: agents and the automaton's actions.
struct Symbol {
  enum Kind : std::uint8_t { Agent, Action } kind = Agent;
  int index = 0;
  friend auto operator<=>(const Symbol&, const Symbol&) = default;
};
using Word = std::vector<Symbol>;

// C-labelled fragment of the canonical action model reachable from the
// initial action. A path alpha_0 A_1 alpha_1 ... A_k alpha_k is spelled as
// that word, so every word starts with the initial action.
struct ActionAutomaton {
  struct Edge {
    int from, agent, to;
  };
  std::vector<Program> states;       // canonical order; initial first
  std::vector<std::string> agents;   // the alphabet C
  std::vector<Edge> edges;
  int initial = 0;
};

ActionAutomaton action_automaton(const SimpleAction& a, const std::vector<std::string>& agents, OmegaArrowOracle& omega);

namespace detail {
struct RegexNode;
}

class Regex {
 public:
  enum class Kind : std::uint8_t { Empty, Epsilon, Letter, Concat, Union, Star };

  // The constructors fold the unit and zero laws, so Empty only appears alone.
  static Regex empty();
  static Regex epsilon();
  static Regex letter(Symbol s);
  static Regex concat(const Regex& a, const Regex& b);
  static Regex alt(const Regex& a, const Regex& b);
  static Regex star(const Regex& a);

  Kind kind() const;
  Symbol symbol() const;
  Regex lhs() const;
  Regex rhs() const;
  Regex body() const { return lhs(); }
  friend bool operator==(const Regex& a, const Regex& b);

 private:
  explicit Regex(std::shared_ptr<const detail::RegexNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::RegexNode> node_;
};

std::string render(const Regex& r, const std::function<std::string(Symbol)>& name);
std::string render(const Regex& r, const ActionAutomaton& aut);

// State elimination in reverse canonical order; the language is exactly the
// automaton's paths from the initial action that end in accept.
Regex nfa_to_regex(const ActionAutomaton& aut, const std::set<int>& accept);

// Bounded enumerations used as oracles.
std::set<Word> regex_language(const Regex& r, std::size_t max_len);
std::set<Word> path_language(const ActionAutomaton& aut, const std::set<int>& accept, std::size_t max_len);
// Exact equivalence by subset construction over both Thompson automata.
bool regex_equivalent(const Regex& a, const Regex& b);

// Agent letters become agent programs, action letters become tests.
PdlProgram regex_program(const Regex& r, const std::vector<std::string>& agents,
                         const std::function<PdlSentence(int)>& action_test);

// ----------------------------------------------------------------- translate

// Translation of iteration-free sentences through their normal forms:
// booleans and K_ homomorphically, C_B psi as [(b1 + ...)*] psi', and
// [a] C_C psi as ~ \/_{b in X} <pi_b> ~ nf([b]psi)' where pi_b spells the
// paths from a to b with ?Pre'(.) at every visited action.
class PdlTranslator {
 public:
  explicit PdlTranslator(Signature sig) : rw_(std::move(sig)) {}
  PdlSentence translate(const Sentence& phi);
  Rewriter& rewriter() { return rw_; }

 private:
  PdlSentence tr(const Sentence& nf);
  Rewriter rw_;
  std::unordered_map<Sentence, PdlSentence, SentenceHash> memo_;
};

PdlSentence translate(const Sentence& phi, const Signature& sig);

// ------------------------------------------------------------------- detail

namespace detail {

struct PdlNode {
  PdlKind kind = PdlKind::True;
  std::string name;
  std::shared_ptr<const PdlNode> a, b;
  std::shared_ptr<const PdlProgramNode> prog;
  std::size_t size = 1;
};

struct PdlProgramNode {
  PdlProgramKind kind = PdlProgramKind::Agent;
  std::string name;
  std::shared_ptr<const PdlNode> test;
  std::shared_ptr<const PdlProgramNode> a, b;
  std::size_t size = 1;
};

struct RegexNode {
  Regex::Kind kind = Regex::Kind::Empty;
  Symbol symbol;
  std::shared_ptr<const RegexNode> a, b;
};

}  // namespace detail

}  // namespace del
