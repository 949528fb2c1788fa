#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace del {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t pos)
      : Error(what + " at offset " + std::to_string(pos)), pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

// Raised when a configured size or step bound would be exceeded.
class GuardError : public Error {
 public:
  using Error::Error;
};

enum class SentenceKind : std::uint8_t {
  True, False, Atom, Not, And, Or, Implies,
  Box, Diamond, CBox, CDiamond, DynBox, DynDiamond, Pre
};

enum class ProgramKind : std::uint8_t { Skip, Crash, Basic, Seq, Union, Star };

namespace detail {
struct SentenceNode;
struct ProgramNode;
}  // namespace detail

class Program;

class Sentence {
 public:
  Sentence();  // true

  static Sentence top();
  static Sentence bottom();
  static Sentence atom(std::string name);
  static Sentence neg(Sentence s);
  static Sentence conj(Sentence a, Sentence b);
  static Sentence disj(Sentence a, Sentence b);
  static Sentence implies(Sentence a, Sentence b);
  static Sentence iff(const Sentence& a, const Sentence& b);
  static Sentence box(std::string agent, Sentence s);
  static Sentence diamond(std::string agent, Sentence s);
  // Agent sets are stored sorted and deduplicated; empty sets are rejected.
  static Sentence cbox(std::vector<std::string> agents, Sentence s);
  static Sentence cdiamond(std::vector<std::string> agents, Sentence s);
  static Sentence dyn_box(Program p, Sentence s);
  static Sentence dyn_diamond(Program p, Sentence s);
  static Sentence pre(Program p);
  // Right-nested conjunction; empty list gives true.
  static Sentence conj_all(const std::vector<Sentence>& xs);
  static Sentence disj_all(const std::vector<Sentence>& xs);

  SentenceKind kind() const;
  const std::string& name() const;  // atom name or agent
  const std::vector<std::string>& agents() const;
  const Sentence& lhs() const;  // also the only child of unary nodes
  const Sentence& rhs() const;
  const Sentence& sub() const { return lhs(); }
  const Program& program() const;

  std::size_t hash() const;
  std::size_t size() const;  // node count, actions included
  const void* identity() const { return node_.get(); }

  friend bool operator==(const Sentence& a, const Sentence& b);
  friend bool operator!=(const Sentence& a, const Sentence& b) { return !(a == b); }

 private:
  struct NullTag {};
  explicit Sentence(NullTag) {}
  explicit Sentence(std::shared_ptr<const detail::SentenceNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::SentenceNode> node_;
  friend struct detail::SentenceNode;
  friend struct detail::ProgramNode;
};

class Program {
 public:
  Program();  // skip

  static Program skip();
  static Program crash();
  // index is 0-based into the signature's type enumeration.
  static Program basic(int index, std::string type_name, std::vector<Sentence> args);
  static Program seq(Program a, Program b);
  static Program choice(Program a, Program b);
  static Program star(Program a);

  ProgramKind kind() const;
  int type_index() const;
  const std::string& type_name() const;
  const std::vector<Sentence>& args() const;
  const Program& lhs() const;
  const Program& rhs() const;
  const Program& body() const { return lhs(); }

  std::size_t hash() const;
  std::size_t size() const;
  const void* identity() const { return node_.get(); }

  friend bool operator==(const Program& a, const Program& b);
  friend bool operator!=(const Program& a, const Program& b) { return !(a == b); }

 private:
  struct NullTag {};
  explicit Program(NullTag) {}
  explicit Program(std::shared_ptr<const detail::ProgramNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::ProgramNode> node_;
  friend struct detail::SentenceNode;
  friend struct detail::ProgramNode;
};

struct SentenceHash {
  std::size_t operator()(const Sentence& s) const { return s.hash(); }
};
struct ProgramHash {
  std::size_t operator()(const Program& p) const { return p.hash(); }
};

class Signature {
 public:
  Signature(std::string name, std::vector<std::string> agents, std::vector<std::string> types,
            std::map<std::string, std::set<std::pair<int, int>>> arrows);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& agents() const { return agents_; }
  const std::vector<std::string>& types() const { return types_; }
  int n() const { return static_cast<int>(types_.size()); }
  bool has_agent(std::string_view a) const;
  std::optional<int> type_index(std::string_view t) const;
  // Targets j with type i ->_agent j, ascending.
  const std::vector<int>& successors(int i, const std::string& agent) const;
  const std::set<std::pair<int, int>>& arrows(const std::string& agent) const;

 private:
  std::string name_;
  std::vector<std::string> agents_;
  std::vector<std::string> types_;
  std::map<std::string, std::set<std::pair<int, int>>> arrows_;
  std::map<std::string, std::vector<std::vector<int>>> succ_;
};

Signature parse_signature(std::string_view json_text);
std::string signature_to_json(const Signature& sig);

// The two example signatures: public announcement of one sentence, and a
// private announcement to A with B seeing only the skip type.
Signature pub_signature(std::vector<std::string> agents = {"A", "B"});
Signature pri_signature();

struct ParseOptions {
  bool allow_pre = false;  // admit Pre(...) terms
};

Sentence parse_sentence(std::string_view text, const Signature& sig, ParseOptions opt = {});
Program parse_program(std::string_view text, const Signature& sig, ParseOptions opt = {});

struct RenderOptions {
  bool full_parens = false;
};

std::string render(const Sentence& s, RenderOptions opt = {});
std::string render(const Program& p, RenderOptions opt = {});

// Strict weak order by canonical rendering.
bool render_less(const Sentence& a, const Sentence& b);

// A union- and star-free program. Skip and crash may occur as leaves so that
// monoid laws such as a;skip can be stated.
class SimpleAction {
 public:
  explicit SimpleAction(Program p);  // throws Error if p is not simple
  static bool is_simple(const Program& p);
  const Program& program() const { return p_; }
  int length() const;  // number of basic leaves
  friend bool operator==(const SimpleAction& a, const SimpleAction& b) { return a.p_ == b.p_; }

 private:
  Program p_;
};

bool contains_star(const Sentence& s);
bool contains_star(const Program& p);
bool contains_pre(const Sentence& s);
int modal_depth(const Sentence& s);
int dynamic_depth(const Sentence& s);
std::set<std::string> atoms_of(const Sentence& s);

// Every subsentence, including those inside action arguments.
std::vector<Sentence> subsentences(const Sentence& s);

// Removes skip, crash, choice and composition from under dynamic modalities.
Sentence desugar(const Sentence& s);

// Rejects references to undeclared agents or types and wrong arities.
void check_well_formed(const Sentence& s, const Signature& sig);

namespace detail {

struct SentenceNode {
  SentenceKind kind = SentenceKind::True;
  std::string name;
  std::vector<std::string> agents;
  Sentence a{Sentence::NullTag{}};
  Sentence b{Sentence::NullTag{}};
  Program prog{Program::NullTag{}};
  std::size_t hash = 0;
  std::size_t size = 1;

  static Sentence make(SentenceNode n);
  static const SentenceNode& of(const Sentence& s) { return *s.node_; }
};

struct ProgramNode {
  ProgramKind kind = ProgramKind::Skip;
  int index = -1;
  std::string type_name;
  std::vector<Sentence> args;
  Program a{Program::NullTag{}};
  Program b{Program::NullTag{}};
  std::size_t hash = 0;
  std::size_t size = 1;

  static Program make(ProgramNode n);
  static const ProgramNode& of(const Program& p) { return *p.node_; }
};

}  // namespace detail

inline SentenceKind Sentence::kind() const { return node_->kind; }
inline const std::string& Sentence::name() const { return node_->name; }
inline const std::vector<std::string>& Sentence::agents() const { return node_->agents; }
inline const Sentence& Sentence::lhs() const { return node_->a; }
inline const Sentence& Sentence::rhs() const { return node_->b; }
inline std::size_t Sentence::hash() const { return node_->hash; }
inline std::size_t Sentence::size() const { return node_->size; }
inline const Program& Sentence::program() const { return node_->prog; }

inline ProgramKind Program::kind() const { return node_->kind; }
inline int Program::type_index() const { return node_->index; }
inline const std::string& Program::type_name() const { return node_->type_name; }
inline const std::vector<Sentence>& Program::args() const { return node_->args; }
inline std::size_t Program::hash() const { return node_->hash; }
inline std::size_t Program::size() const { return node_->size; }
inline const Program& Program::lhs() const { return node_->a; }
inline const Program& Program::rhs() const { return node_->b; }

}  // namespace del

template <>
struct std::hash<del::Sentence> {
  std::size_t operator()(const del::Sentence& s) const { return s.hash(); }
};
template <>
struct std::hash<del::Program> {
  std::size_t operator()(const del::Program& p) const { return p.hash(); }
};
