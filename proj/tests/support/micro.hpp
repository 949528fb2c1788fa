#pragma once

#include <string>
#include <vector>

#include "del/kripke.hpp"
#include "del/semantics.hpp"
#include "del/syntax.hpp"
#include "support/gen.hpp"

namespace deltest {

// Shared micro-corpus: one agent A, one atom p, public announcements, modal
// depth at most 2 and exactly one dynamic modality.
inline del::Signature micro_signature() { return del::pub_signature({"A"}); }

namespace detail {

inline del::Sentence micro_rec(Rng& r, const del::Signature& sig, int size, int modal, bool& dyn) {
  using del::Sentence;
  if (size <= 0 || coin(r, 0.2)) {
    switch (pick(r, 5)) {
      case 0: return Sentence::top();
      case 1: return Sentence::bottom();
      default: return Sentence::atom("p");
    }
  }
  auto sub = [&](int m) { return micro_rec(r, sig, size - 1, m, dyn); };
  for (;;) {
    int k = pick(r, 12);
    if (k >= 4 && k <= 7 && modal == 0) continue;
    if (k >= 8 && (!dyn || coin(r, 0.4))) continue;
    switch (k) {
      case 0: return Sentence::neg(sub(modal));
      case 1: return Sentence::conj(sub(modal), sub(modal));
      case 2: return Sentence::disj(sub(modal), sub(modal));
      case 3: return Sentence::implies(sub(modal), sub(modal));
      case 4: return Sentence::box("A", sub(modal - 1));
      case 5: return Sentence::diamond("A", sub(modal - 1));
      case 6: return Sentence::cbox({"A"}, sub(modal - 1));
      case 7: return Sentence::cdiamond({"A"}, sub(modal - 1));
      default: {
        dyn = false;
        bool none = false;
        auto arg = micro_rec(r, sig, size - 1, modal, none);
        auto body = sub(modal);
        auto pub = del::Program::basic(0, "Pub", {arg});
        return coin(r) ? Sentence::dyn_box(pub, body) : Sentence::dyn_diamond(pub, body);
      }
    }
  }
}

}  // namespace detail

inline del::Sentence micro_sentence(Rng& r, const del::Signature& sig) {
  for (;;) {
    bool dyn = true;
    auto s = detail::micro_rec(r, sig, 5, 2, dyn);
    if (!dyn) return s;
  }
}

// Every model over the agents and atoms with 1..max_states states.
inline std::vector<del::StateModel> all_small_models(const std::vector<std::string>& agents,
                                                     const std::vector<std::string>& atoms, int max_states) {
  std::vector<del::StateModel> out;
  for (int n = 1; n <= max_states; ++n) {
    const int edge_bits = static_cast<int>(agents.size()) * n * n;
    const int val_bits = static_cast<int>(atoms.size()) * n;
    for (long e = 0; e < (1L << edge_bits); ++e) {
      for (long v = 0; v < (1L << val_bits); ++v) {
        del::StateModel m(agents);
        for (int i = 0; i < n; ++i) m.add_state("s" + std::to_string(i));
        for (int b = 0; b < edge_bits; ++b) {
          if ((e >> b) & 1L) m.add_edge(b / (n * n), (b / n) % n, b % n);
        }
        for (int b = 0; b < val_bits; ++b) {
          const auto& p = atoms[b / n];
          m.declare_atom(p);
          if ((v >> b) & 1L) m.set_atom(p, b % n);
        }
        out.push_back(std::move(m));
      }
    }
  }
  return out;
}

inline bool satisfiable_in(const std::vector<del::StateModel>& models, const del::Sentence& phi,
                           const del::Signature& sig) {
  for (const auto& m : models) {
    if (del::truth_set(m, phi, sig).any()) return true;
  }
  return false;
}

}  // namespace deltest
