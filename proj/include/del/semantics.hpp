#pragma once

#include <optional>
#include <string>
#include <vector>

#include "del/canon.hpp"
#include "del/kripke.hpp"
#include "del/syntax.hpp"

namespace del {

// exact is false when some iteration [p*] was cut off by the fuel bound
// before the iterated updates repeated; states then holds the intersection
// over the unfoldings that were computed.
struct Evaluation {
  StateSet states;
  bool exact = true;
};

Evaluation eval_sentence(const StateModel& s, const Sentence& phi, const Signature& sig, int fuel = 64);
// Truth set, or GuardError when an iteration did not converge within fuel.
StateSet truth_set(const StateModel& s, const Sentence& phi, const Signature& sig, int fuel = 64);
bool holds_at(const StateModel& s, int state, const Sentence& phi, const Signature& sig, int fuel = 64);

// Induced update of an iteration-free program (iteration inside action
// arguments is allowed).
UpdateResult eval_program(const StateModel& s, const Program& p, const Signature& sig, int fuel = 64);

struct StarPath {
  std::vector<int> states;       // s_0 .. s_k
  std::vector<Program> actions;  // a_0 .. a_k
  std::vector<std::string> agents;  // label of step i -> i+1
};

// Witness for s in <a> E_C phi: matched paths with s_i in Pre(a_i) for
// i < k and s_k in <a_k> phi.
std::optional<StarPath> diamond_star_paths(const StateModel& s, int state, const SimpleAction& a,
                                           const std::vector<std::string>& agents, const Sentence& phi,
                                           const Signature& sig);

}  // namespace del
