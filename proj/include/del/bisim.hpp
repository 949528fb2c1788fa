#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "del/kripke.hpp"

namespace del {

using Relation = std::vector<std::pair<int, int>>;

// Coarsest bisimulation partition of one model. Block ids are numbered by
// the smallest member state, so the output is deterministic.
std::vector<int> bisimulation_classes(const StateModel& s);

// Greatest bisimulation between two models with the same agent list, sorted.
Relation largest_bisimulation(const StateModel& s, const StateModel& t);
bool bisimilar(const StateModel& s, int x, const StateModel& t, int y);
bool bisimilar(const StateModel& s, const std::string& x, const StateModel& t, const std::string& y);

struct Quotient {
  StateModel model;
  std::vector<int> projection;  // state -> class
};
Quotient quotient(const StateModel& s);

bool is_bisimulation(const StateModel& s, const StateModel& t, const Relation& r);
bool is_total_bisimulation(const StateModel& s, const StateModel& t, const Relation& r);

// Two models with the same agents, states of t renamed with a prime.
StateModel disjoint_union(const StateModel& s, const StateModel& t);

// Graph isomorphism respecting agents, valuation and optional per-state colors.
bool isomorphic(const StateModel& a, const StateModel& b, const std::vector<std::string>& color_a = {},
                const std::vector<std::string>& color_b = {});
// Invariant under isomorphism; equal for isomorphic inputs.
std::size_t invariant_hash(const StateModel& a, const std::vector<std::string>& color = {});

// Decides whether two preconditions denote the same proposition.
using PreconditionEquivalence = std::function<bool(const Precondition&, const Precondition&)>;

// Greatest relation between actions that matches preconditions (per the
// callback) and satisfies zig and zag over the action arrows.
Relation largest_program_bisimulation(const ProgramModel& p, const ProgramModel& q, const PreconditionEquivalence& eq);
// Every designated action on either side is related to a designated one on the other.
bool program_models_bisimilar(const ProgramModel& p, const ProgramModel& q, const PreconditionEquivalence& eq);

// (u.relation)^-1 ; r ; v.relation, as a relation between the two targets.
Relation connect_updates(const UpdateResult& u, const Relation& r, const UpdateResult& v);

}  // namespace del
