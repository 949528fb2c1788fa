#pragma once

#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "del/kripke.hpp"
#include "del/syntax.hpp"

namespace del {

// Pre(skip) = true, Pre(crash) = false, Pre(s_i(args)) = args_i,
// Pre(a;b) = <a> Pre(b).
Sentence pre_of(const SimpleAction& a);

// Arrows of the canonical action model over one signature, materialized on
// demand. Successor lists are sorted by rendering.
class OmegaArrowOracle {
 public:
  explicit OmegaArrowOracle(Signature sig) : sig_(std::move(sig)) {}

  const Signature& signature() const { return sig_; }
  std::vector<Program> successors(const SimpleAction& a, const std::string& agent);
  // Closure under the arrows of the given agents, starting with a; BFS order.
  std::vector<Program> reachable(const SimpleAction& a, const std::vector<std::string>& agents);

 private:
  std::vector<Program> compute(const Program& a, const std::string& agent);

  Signature sig_;
  std::mutex mu_;
  std::unordered_map<std::string, std::vector<Program>> memo_;
};

std::vector<Program> successors(const SimpleAction& a, const std::string& agent, const Signature& sig);
std::vector<Program> reachable(const SimpleAction& a, const std::vector<std::string>& agents, const Signature& sig);

// The fragment of the canonical action model reachable from a under every
// agent, with a as the one designated action and Pre as preconditions.
ProgramModel omega_program_model(const SimpleAction& a, const Signature& sig);

}  // namespace del
