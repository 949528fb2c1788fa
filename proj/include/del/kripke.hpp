#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "del/syntax.hpp"

namespace del {

using StateSet = boost::dynamic_bitset<>;

std::vector<int> members(const StateSet& s);

class StateModel {
 public:
  StateModel() = default;
  explicit StateModel(std::vector<std::string> agents);

  int add_state(std::string id);
  void add_edge(int agent, int from, int to);
  void add_edge(const std::string& agent, int from, int to) { add_edge(agent_index(agent), from, to); }
  void set_atom(const std::string& atom, int state, bool value = true);
  // Declares an atom with an empty extension.
  void declare_atom(const std::string& atom);

  std::size_t size() const { return ids_.size(); }
  const std::string& id(int s) const { return ids_[s]; }
  const std::vector<std::string>& ids() const { return ids_; }
  std::optional<int> find(std::string_view id) const;
  int index_of(std::string_view id) const;

  const std::vector<std::string>& agents() const { return agents_; }
  std::optional<int> find_agent(std::string_view a) const;
  int agent_index(std::string_view a) const;

  // Sorted, duplicate free.
  const std::vector<int>& successors(int agent, int s) const { return succ_[agent][s]; }
  bool has_edge(int agent, int s, int t) const;
  std::size_t edge_count() const;

  bool holds(const std::string& atom, int s) const;
  StateSet truth(const std::string& atom) const;
  const std::map<std::string, StateSet>& valuation() const { return val_; }

  StateSet all() const { return StateSet(size()).set(); }
  StateSet none() const { return StateSet(size()); }

 private:
  std::vector<std::string> agents_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::vector<std::vector<int>>> succ_;  // agent, state
  std::map<std::string, StateSet> val_;
};

// Submodel on the states in keep, in their original order.
StateModel restrict_model(const StateModel& s, const StateSet& keep, std::vector<int>* old_index = nullptr);

class ProgramModel;

// A program-model precondition: a sentence, or <(P,{a})> inner for a
// program model P with action a, which is how compositions store them.
class Precondition {
 public:
  Precondition(Sentence s);  // NOLINT(google-explicit-constructor)
  static Precondition diamond(std::shared_ptr<const ProgramModel> model, int action, Precondition inner);

  bool is_sentence() const { return model_ == nullptr; }
  const Sentence& sentence() const { return sentence_; }
  const ProgramModel& model() const { return *model_; }
  int action() const { return action_; }
  const Precondition& inner() const { return *inner_; }
  std::string render() const;

 private:
  Precondition() = default;
  Sentence sentence_;
  std::shared_ptr<const ProgramModel> model_;
  int action_ = -1;
  std::shared_ptr<const Precondition> inner_;
};

class ProgramModel {
 public:
  ProgramModel() = default;
  explicit ProgramModel(std::vector<std::string> agents, std::string name = "P");

  int add_action(std::string id, Precondition pre);
  void add_edge(int agent, int from, int to);
  void add_edge(const std::string& agent, int from, int to) { add_edge(agent_index(agent), from, to); }
  void designate(int action);

  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }
  std::size_t size() const { return ids_.size(); }
  const std::string& id(int a) const { return ids_[a]; }
  std::optional<int> find(std::string_view id) const;
  const Precondition& pre(int a) const { return pre_[a]; }
  const std::vector<std::string>& agents() const { return agents_; }
  int agent_index(std::string_view a) const;
  const std::vector<int>& successors(int agent, int a) const { return succ_[agent][a]; }
  bool is_designated(int a) const { return designated_[a]; }
  std::vector<int> designated() const;

 private:
  std::string name_ = "P";
  std::vector<std::string> agents_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, int> index_;
  std::vector<Precondition> pre_;
  std::vector<std::vector<std::vector<int>>> succ_;
  std::vector<bool> designated_;
};

struct Pairing {
  int source;
  std::string action;
};

struct UpdateResult {
  StateModel target;
  std::vector<std::pair<int, int>> relation;  // (source, target), sorted
  std::vector<Pairing> pairing;               // indexed by target state
};

// Inverse of the relation is a partial function; throws Error otherwise.
void check_standard(const UpdateResult& u, std::size_t source_size);

using SentenceEval = std::function<StateSet(const StateModel&, const Sentence&)>;

StateSet eval_precondition(const StateModel& s, const Precondition& pre, const SentenceEval& eval);

UpdateResult update_product(const StateModel& s, const ProgramModel& a, const SentenceEval& eval);

ProgramModel skip_model(std::vector<std::string> agents);
ProgramModel crash_model(std::vector<std::string> agents);
ProgramModel compose_program_models(const ProgramModel& p, const ProgramModel& q);
ProgramModel union_program_models(const std::vector<ProgramModel>& ms, std::vector<std::string> agents);
ProgramModel signature_program(const Signature& sig, int index, const std::vector<Sentence>& args);
// P;...;P with k factors; k = 0 gives skip.
ProgramModel power(const ProgramModel& p, int k);

UpdateResult identity_update(const StateModel& s);
UpdateResult empty_update(const StateModel& s);
// First u, then v (v's source is u's target).
UpdateResult sequence_updates(const UpdateResult& u, const UpdateResult& v);
UpdateResult union_updates(const std::vector<UpdateResult>& us, const StateModel& source);

StateModel model_from_json(std::string_view text, const Signature& sig);
std::string model_to_json(const StateModel& s);
ProgramModel program_model_from_json(std::string_view text, const Signature& sig);
std::string program_model_to_json(const ProgramModel& p);

}  // namespace del
