#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "del/kripke.hpp"
#include "del/rewrite.hpp"
#include "del/syntax.hpp"

namespace del {

struct DecideOptions {
  // Closure members other than negations; each takes one bit of a mask, and
  // ~psi is read as the complement of psi's bit.
  std::size_t max_closure = 64;
  std::size_t max_atoms = std::size_t{1} << 20;
  // Quotient the witness and greedily drop states and edges while it still
  // satisfies the input. Every candidate is model-checked.
  bool shrink_witness = true;
};

// Bits a mask must have set and bits it must have clear.
struct Requirement {
  std::uint64_t set = 0;
  std::uint64_t clear = 0;
  bool met_by(std::uint64_t mask) const { return (set & ~mask) == 0 && (clear & mask) == 0; }
  friend auto operator<=>(const Requirement&, const Requirement&) = default;
};

// Closure members are indexed in rendering order. Only atomic and K_ members
// are chosen freely, the rest follow from booleans and the two unfolding
// biconditionals
//   C_C psi     <-> psi & /\_{A in C} K_A C_C psi
//   [a] C_C psi <-> nf([a]psi) & /\_{A in C, a ->A b} (nf(Pre a) -> K_A [b] C_C psi).
class FiltrationGraph {
 public:
  const std::vector<Sentence>& closure() const { return delta_; }
  const std::vector<std::string>& agents() const { return agents_; }
  // One mask per atom, over the bits of the non-negation members.
  const std::vector<std::uint64_t>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool alive(int u) const { return alive_[u]; }
  void kill(int u) { alive_[u] = false; }
  std::size_t alive_count() const;

  // Index of a closure member, or -1.
  int index_of(const Sentence& s) const;
  bool holds(std::uint64_t mask, int member) const { return ((mask >> bit_[member]) & 1U) != flip_[member]; }
  bool contains(int u, int member) const { return holds(atoms_[u], member); }
  // What K_A members of atom u demand of an A-successor.
  const Requirement& required(int agent, int u) const { return req_[agent][u]; }
  // [U] ->_A [V] iff psi in V whenever K_A psi in U.
  bool edge(int agent, int u, int v) const { return req_[agent][u].met_by(atoms_[v]); }
  int agent_index(const std::string& a) const;

 private:
  friend FiltrationGraph build_filtration(const Sentence&, Rewriter&, const DecideOptions&);
  std::vector<Sentence> delta_;
  std::vector<int> bit_;     // member -> mask bit
  std::vector<bool> flip_;   // member is the complement of its bit
  std::vector<std::string> agents_;
  std::vector<std::uint64_t> atoms_;
  std::vector<std::vector<Requirement>> req_;
  std::vector<bool> alive_;
};

// Delta = f(nf) and every coherent atom over it, all alive. GuardError past
// the size guards; Error if nf is not a normal form.
FiltrationGraph build_filtration(const Sentence& nf, Rewriter& rw, const DecideOptions& opt = {});

struct GoodPath {
  std::vector<int> atoms;          // V_0 .. V_k
  std::vector<Program> actions;    // a_0 .. a_k
  std::vector<std::string> agents;  // label of step i -> i+1
};

// Shortest good path among live atoms from atom for <alpha> E_C ~psi: every
// V_i holds nf(Pre a_i) and V_k lacks nf([a_k]psi). Error if those
// sentences are not closure members.
std::optional<GoodPath> good_path_search(const FiltrationGraph& g, int atom, const SimpleAction& alpha,
                                         const std::vector<std::string>& agents, const Sentence& psi, Rewriter& rw);

// Removes atoms with an unwitnessed ~K_A member and atoms with an unfulfilled
// ~C_ or ~[a]C_ member until nothing changes. Returns the rounds taken.
int eliminate(FiltrationGraph& g, Rewriter& rw);

struct Witness {
  StateModel model;
  int state = 0;
};

struct Verdict {
  bool sat = false;
  std::optional<Witness> witness;  // present iff sat
  Sentence nf;
  std::size_t closure_size = 0;
  std::size_t atoms = 0;
  std::size_t survivors = 0;
  int rounds = 0;
};

class Decider {
 public:
  explicit Decider(Signature sig, DecideOptions opt = {});

  const Signature& signature() const { return rw_.signature(); }
  Rewriter& rewriter() { return rw_; }

  // Iteration-free input only. A SAT verdict's witness is model-checked
  // against the input and its normal form before returning; failure throws.
  Verdict satisfiable(const Sentence& phi);
  bool valid(const Sentence& phi);
  // A pointed model of ~phi, or nothing when phi is valid.
  std::optional<Witness> countermodel(const Sentence& phi);

 private:
  Rewriter rw_;
  DecideOptions opt_;
};

Verdict satisfiable(const Sentence& phi, const Signature& sig, const DecideOptions& opt = {});
bool valid(const Sentence& phi, const Signature& sig, const DecideOptions& opt = {});

}  // namespace del
