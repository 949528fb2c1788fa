#include "del/canon.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

namespace del {

Sentence pre_of(const SimpleAction& a) {
  const Program& p = a.program();
  switch (p.kind()) {
    case ProgramKind::Skip: return Sentence::top();
    case ProgramKind::Crash: return Sentence::bottom();
    case ProgramKind::Basic: return p.args().at(p.type_index());
    case ProgramKind::Seq: return Sentence::dyn_diamond(p.lhs(), pre_of(SimpleAction(p.rhs())));
    default: break;
  }
  throw Error("Pre of a non-simple action");
}

std::vector<Program> OmegaArrowOracle::compute(const Program& a, const std::string& agent) {
  std::vector<Program> out;
  switch (a.kind()) {
    case ProgramKind::Skip: out.push_back(a); break;
    case ProgramKind::Crash: break;
    case ProgramKind::Basic:
      for (int j : sig_.successors(a.type_index(), agent)) out.push_back(Program::basic(j, sig_.types()[j], a.args()));
      break;
    case ProgramKind::Seq: {
      auto left = successors(SimpleAction(a.lhs()), agent);
      auto right = successors(SimpleAction(a.rhs()), agent);
      for (const auto& l : left) {
        for (const auto& r : right) out.push_back(Program::seq(l, r));
      }
      break;
    }
    default: throw Error("Omega arrows of a non-simple action");
  }
  std::vector<std::pair<std::string, Program>> keyed;
  for (auto& p : out) keyed.emplace_back(render(p), std::move(p));
  std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  keyed.erase(std::unique(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first == y.first; }),
              keyed.end());
  out.clear();
  for (auto& [k, p] : keyed) out.push_back(std::move(p));
  return out;
}

std::vector<Program> OmegaArrowOracle::successors(const SimpleAction& a, const std::string& agent) {
  if (!sig_.has_agent(agent)) throw Error("unknown agent '" + agent + "'");
  std::string key = agent + "\x1f" + render(a.program());
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  auto out = compute(a.program(), agent);
  std::lock_guard<std::mutex> lock(mu_);
  memo_.emplace(std::move(key), out);
  return out;
}

std::vector<Program> OmegaArrowOracle::reachable(const SimpleAction& a, const std::vector<std::string>& agents) {
  std::vector<Program> out{a.program()};
  std::unordered_set<Program, ProgramHash> seen{a.program()};
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (const auto& g : agents) {
      for (auto& b : successors(SimpleAction(out[i]), g)) {
        if (seen.insert(b).second) out.push_back(b);
      }
    }
  }
  return out;
}

std::vector<Program> successors(const SimpleAction& a, const std::string& agent, const Signature& sig) {
  return OmegaArrowOracle(sig).successors(a, agent);
}

std::vector<Program> reachable(const SimpleAction& a, const std::vector<std::string>& agents, const Signature& sig) {
  return OmegaArrowOracle(sig).reachable(a, agents);
}

ProgramModel omega_program_model(const SimpleAction& a, const Signature& sig) {
  OmegaArrowOracle oracle(sig);
  auto xs = oracle.reachable(a, sig.agents());
  ProgramModel m(sig.agents(), "Omega");
  for (const auto& x : xs) m.add_action(render(x), pre_of(SimpleAction(x)));
  for (int g = 0; g < static_cast<int>(sig.agents().size()); ++g) {
    for (int i = 0; i < static_cast<int>(xs.size()); ++i) {
      for (const auto& y : oracle.successors(SimpleAction(xs[i]), sig.agents()[g])) {
        m.add_edge(g, i, *m.find(render(y)));
      }
    }
  }
  m.designate(0);
  return m;
}

}  // namespace del
