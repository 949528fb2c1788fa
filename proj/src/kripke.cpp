#include "del/kripke.hpp"

#include <algorithm>

#include <json.hpp>

namespace del {

std::vector<int> members(const StateSet& s) {
  std::vector<int> out;
  for (auto i = s.find_first(); i != StateSet::npos; i = s.find_next(i)) out.push_back(static_cast<int>(i));
  return out;
}

namespace {

void insert_sorted(std::vector<int>& v, int x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) v.insert(it, x);
}

}  // namespace

// ---------------------------------------------------------------- StateModel

StateModel::StateModel(std::vector<std::string> agents) : agents_(std::move(agents)), succ_(agents_.size()) {}

int StateModel::add_state(std::string id) {
  if (index_.count(id)) throw Error("duplicate state id '" + id + "'");
  int s = static_cast<int>(ids_.size());
  index_.emplace(id, s);
  ids_.push_back(std::move(id));
  for (auto& per_agent : succ_) per_agent.emplace_back();
  for (auto& [atom, set] : val_) set.push_back(false);
  return s;
}

void StateModel::add_edge(int agent, int from, int to) {
  if (from < 0 || to < 0 || from >= static_cast<int>(size()) || to >= static_cast<int>(size())) {
    throw Error("edge endpoint out of range");
  }
  insert_sorted(succ_.at(agent)[from], to);
}

void StateModel::declare_atom(const std::string& atom) {
  auto it = val_.find(atom);
  if (it == val_.end()) val_.emplace(atom, StateSet(size()));
}

void StateModel::set_atom(const std::string& atom, int state, bool value) {
  declare_atom(atom);
  val_[atom][state] = value;
}

std::optional<int> StateModel::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int StateModel::index_of(std::string_view id) const {
  auto s = find(id);
  if (!s) throw Error("unknown state '" + std::string(id) + "'");
  return *s;
}

std::optional<int> StateModel::find_agent(std::string_view a) const {
  auto it = std::find(agents_.begin(), agents_.end(), a);
  if (it == agents_.end()) return std::nullopt;
  return static_cast<int>(it - agents_.begin());
}

int StateModel::agent_index(std::string_view a) const {
  auto i = find_agent(a);
  if (!i) throw Error("unknown agent '" + std::string(a) + "'");
  return *i;
}

bool StateModel::has_edge(int agent, int s, int t) const {
  const auto& v = succ_[agent][s];
  return std::binary_search(v.begin(), v.end(), t);
}

std::size_t StateModel::edge_count() const {
  std::size_t n = 0;
  for (const auto& per_agent : succ_) {
    for (const auto& v : per_agent) n += v.size();
  }
  return n;
}

bool StateModel::holds(const std::string& atom, int s) const {
  auto it = val_.find(atom);
  return it != val_.end() && it->second[s];
}

StateSet StateModel::truth(const std::string& atom) const {
  auto it = val_.find(atom);
  return it == val_.end() ? none() : it->second;
}

StateModel restrict_model(const StateModel& s, const StateSet& keep, std::vector<int>* old_index) {
  StateModel out(s.agents());
  std::vector<int> fresh(s.size(), -1);
  std::vector<int> back;
  for (int x : members(keep)) {
    fresh[x] = out.add_state(s.id(x));
    back.push_back(x);
  }
  for (int a = 0; a < static_cast<int>(s.agents().size()); ++a) {
    for (int x : back) {
      for (int y : s.successors(a, x)) {
        if (fresh[y] >= 0) out.add_edge(a, fresh[x], fresh[y]);
      }
    }
  }
  for (const auto& [atom, set] : s.valuation()) {
    out.declare_atom(atom);
    for (int x : back) {
      if (set[x]) out.set_atom(atom, fresh[x]);
    }
  }
  if (old_index) *old_index = std::move(back);
  return out;
}

// ---------------------------------------------------------------- preconditions

Precondition::Precondition(Sentence s) : sentence_(std::move(s)) {}

Precondition Precondition::diamond(std::shared_ptr<const ProgramModel> model, int action, Precondition inner) {
  Precondition p;
  p.model_ = std::move(model);
  p.action_ = action;
  p.inner_ = std::make_shared<const Precondition>(std::move(inner));
  return p;
}

std::string Precondition::render() const {
  if (is_sentence()) return del::render(sentence_);
  return "<(" + model_->name() + ",{" + model_->id(action_) + "})> " + inner_->render();
}

// ---------------------------------------------------------------- ProgramModel

ProgramModel::ProgramModel(std::vector<std::string> agents, std::string name)
    : name_(std::move(name)), agents_(std::move(agents)), succ_(agents_.size()) {}

int ProgramModel::add_action(std::string id, Precondition pre) {
  if (index_.count(id)) throw Error("duplicate action id '" + id + "'");
  int a = static_cast<int>(ids_.size());
  index_.emplace(id, a);
  ids_.push_back(std::move(id));
  pre_.push_back(std::move(pre));
  designated_.push_back(false);
  for (auto& per_agent : succ_) per_agent.emplace_back();
  return a;
}

void ProgramModel::add_edge(int agent, int from, int to) {
  if (from < 0 || to < 0 || from >= static_cast<int>(size()) || to >= static_cast<int>(size())) {
    throw Error("action edge endpoint out of range");
  }
  insert_sorted(succ_.at(agent)[from], to);
}

void ProgramModel::designate(int action) { designated_.at(action) = true; }

std::optional<int> ProgramModel::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int ProgramModel::agent_index(std::string_view a) const {
  auto it = std::find(agents_.begin(), agents_.end(), a);
  if (it == agents_.end()) throw Error("unknown agent '" + std::string(a) + "'");
  return static_cast<int>(it - agents_.begin());
}

std::vector<int> ProgramModel::designated() const {
  std::vector<int> out;
  for (int a = 0; a < static_cast<int>(size()); ++a) {
    if (designated_[a]) out.push_back(a);
  }
  return out;
}

// ---------------------------------------------------------------- updates

void check_standard(const UpdateResult& u, std::size_t source_size) {
  std::vector<int> src(u.target.size(), -1);
  for (auto [s, t] : u.relation) {
    if (s < 0 || t < 0 || static_cast<std::size_t>(s) >= source_size || static_cast<std::size_t>(t) >= u.target.size()) {
      throw Error("update relation out of range");
    }
    if (src[t] >= 0 && src[t] != s) throw Error("update is not standard: target " + u.target.id(t) + " has two sources");
    src[t] = s;
  }
  if (u.pairing.size() != u.target.size()) throw Error("update pairing is not total on the target");
}

StateSet eval_precondition(const StateModel& s, const Precondition& pre, const SentenceEval& eval) {
  if (pre.is_sentence()) return eval(s, pre.sentence());
  const ProgramModel& m = pre.model();
  // The designated set of m is irrelevant here: only pairs with the named action count.
  UpdateResult u = update_product(s, m, eval);
  StateSet inner = eval_precondition(u.target, pre.inner(), eval);
  StateSet out = s.none();
  const std::string& want = m.id(pre.action());
  for (int t = 0; t < static_cast<int>(u.target.size()); ++t) {
    if (inner[t] && u.pairing[t].action == want) out.set(u.pairing[t].source);
  }
  return out;
}

namespace {

std::vector<int> agent_map(const StateModel& s, const ProgramModel& a) {
  // Program-model agent index for each state-model agent, or -1.
  std::vector<int> out;
  for (const auto& ag : s.agents()) {
    auto it = std::find(a.agents().begin(), a.agents().end(), ag);
    out.push_back(it == a.agents().end() ? -1 : static_cast<int>(it - a.agents().begin()));
  }
  return out;
}

}  // namespace

UpdateResult update_product(const StateModel& s, const ProgramModel& a, const SentenceEval& eval) {
  const int ns = static_cast<int>(s.size());
  const int na = static_cast<int>(a.size());
  std::vector<StateSet> pre;
  pre.reserve(na);
  for (int x = 0; x < na; ++x) pre.push_back(eval_precondition(s, a.pre(x), eval));

  UpdateResult u{StateModel(s.agents()), {}, {}};
  std::vector<int> idx(static_cast<std::size_t>(ns) * na, -1);
  for (int x = 0; x < ns; ++x) {
    for (int y = 0; y < na; ++y) {
      if (!pre[y][x]) continue;
      idx[x * na + y] = u.target.add_state("(" + s.id(x) + "," + a.id(y) + ")");
      u.pairing.push_back({x, a.id(y)});
    }
  }
  auto amap = agent_map(s, a);
  for (int ag = 0; ag < static_cast<int>(s.agents().size()); ++ag) {
    if (amap[ag] < 0) continue;
    for (int x = 0; x < ns; ++x) {
      for (int y = 0; y < na; ++y) {
        int from = idx[x * na + y];
        if (from < 0) continue;
        for (int x2 : s.successors(ag, x)) {
          for (int y2 : a.successors(amap[ag], y)) {
            int to = idx[x2 * na + y2];
            if (to >= 0) u.target.add_edge(ag, from, to);
          }
        }
      }
    }
  }
  for (const auto& [atom, set] : s.valuation()) {
    u.target.declare_atom(atom);
    for (int t = 0; t < static_cast<int>(u.target.size()); ++t) {
      if (set[u.pairing[t].source]) u.target.set_atom(atom, t);
    }
  }
  for (int x = 0; x < ns; ++x) {
    for (int y = 0; y < na; ++y) {
      if (idx[x * na + y] >= 0 && a.is_designated(y)) u.relation.emplace_back(x, idx[x * na + y]);
    }
  }
  check_standard(u, s.size());
  return u;
}

ProgramModel skip_model(std::vector<std::string> agents) {
  ProgramModel m(std::move(agents), "skip");
  int a = m.add_action("skip", Sentence::top());
  for (int g = 0; g < static_cast<int>(m.agents().size()); ++g) m.add_edge(g, a, a);
  m.designate(a);
  return m;
}

ProgramModel crash_model(std::vector<std::string> agents) { return ProgramModel(std::move(agents), "crash"); }

ProgramModel compose_program_models(const ProgramModel& p, const ProgramModel& q) {
  if (p.agents() != q.agents()) throw Error("composition of program models over different agents");
  auto left = std::make_shared<const ProgramModel>(p);
  ProgramModel out(p.agents(), "(" + p.name() + ";" + q.name() + ")");
  const int np = static_cast<int>(p.size()), nq = static_cast<int>(q.size());
  for (int x = 0; x < np; ++x) {
    for (int y = 0; y < nq; ++y) {
      out.add_action("(" + p.id(x) + "," + q.id(y) + ")", Precondition::diamond(left, x, q.pre(y)));
    }
  }
  for (int g = 0; g < static_cast<int>(p.agents().size()); ++g) {
    for (int x = 0; x < np; ++x) {
      for (int y = 0; y < nq; ++y) {
        for (int x2 : p.successors(g, x)) {
          for (int y2 : q.successors(g, y)) out.add_edge(g, x * nq + y, x2 * nq + y2);
        }
      }
    }
  }
  for (int x = 0; x < np; ++x) {
    for (int y = 0; y < nq; ++y) {
      if (p.is_designated(x) && q.is_designated(y)) out.designate(x * nq + y);
    }
  }
  return out;
}

ProgramModel union_program_models(const std::vector<ProgramModel>& ms, std::vector<std::string> agents) {
  std::string name;
  for (std::size_t i = 0; i < ms.size(); ++i) name += (i ? "+" : "") + ms[i].name();
  ProgramModel out(agents, ms.empty() ? "crash" : "(" + name + ")");
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const auto& m = ms[i];
    if (m.agents() != agents) throw Error("union of program models over different agents");
    int base = static_cast<int>(out.size());
    for (int x = 0; x < static_cast<int>(m.size()); ++x) {
      out.add_action("(" + m.id(x) + "," + std::to_string(i) + ")", m.pre(x));
    }
    for (int g = 0; g < static_cast<int>(agents.size()); ++g) {
      for (int x = 0; x < static_cast<int>(m.size()); ++x) {
        for (int y : m.successors(g, x)) out.add_edge(g, base + x, base + y);
      }
    }
    for (int x : m.designated()) out.designate(base + x);
  }
  return out;
}

ProgramModel signature_program(const Signature& sig, int index, const std::vector<Sentence>& args) {
  if (static_cast<int>(args.size()) != sig.n()) throw Error("signature program: wrong number of arguments");
  if (index < 0 || index >= sig.n()) throw Error("signature program: type index out of range");
  ProgramModel m(sig.agents(), sig.name());
  for (int j = 0; j < sig.n(); ++j) m.add_action(sig.types()[j], args[j]);
  for (int g = 0; g < static_cast<int>(sig.agents().size()); ++g) {
    for (auto [i, j] : sig.arrows(sig.agents()[g])) m.add_edge(g, i, j);
  }
  m.designate(index);
  return m;
}

ProgramModel power(const ProgramModel& p, int k) {
  if (k <= 0) return skip_model(p.agents());
  ProgramModel acc = p;
  for (int i = 1; i < k; ++i) acc = compose_program_models(acc, p);
  return acc;
}

UpdateResult identity_update(const StateModel& s) {
  UpdateResult u{s, {}, {}};
  for (int x = 0; x < static_cast<int>(s.size()); ++x) {
    u.relation.emplace_back(x, x);
    u.pairing.push_back({x, "skip"});
  }
  return u;
}

UpdateResult empty_update(const StateModel& s) { return UpdateResult{StateModel(s.agents()), {}, {}}; }

UpdateResult sequence_updates(const UpdateResult& u, const UpdateResult& v) {
  UpdateResult out{v.target, {}, {}};
  std::vector<int> src_of_mid(u.target.size(), -1);
  for (auto [s, m] : u.relation) src_of_mid[m] = s;
  for (auto [m, t] : v.relation) {
    if (src_of_mid[m] >= 0) out.relation.emplace_back(src_of_mid[m], t);
  }
  std::sort(out.relation.begin(), out.relation.end());
  for (const auto& pr : v.pairing) {
    const Pairing& first = u.pairing[pr.source];
    out.pairing.push_back({first.source, "(" + first.action + "," + pr.action + ")"});
  }
  return out;
}

UpdateResult union_updates(const std::vector<UpdateResult>& us, const StateModel& source) {
  UpdateResult out{StateModel(source.agents()), {}, {}};
  for (std::size_t i = 0; i < us.size(); ++i) {
    const auto& u = us[i];
    int base = static_cast<int>(out.target.size());
    std::string tag = "," + std::to_string(i) + ")";
    for (int t = 0; t < static_cast<int>(u.target.size()); ++t) {
      out.target.add_state("(" + u.target.id(t) + tag);
      out.pairing.push_back({u.pairing[t].source, "(" + u.pairing[t].action + tag});
    }
    for (int g = 0; g < static_cast<int>(source.agents().size()); ++g) {
      for (int t = 0; t < static_cast<int>(u.target.size()); ++t) {
        for (int t2 : u.target.successors(g, t)) out.target.add_edge(g, base + t, base + t2);
      }
    }
    for (const auto& [atom, set] : u.target.valuation()) {
      out.target.declare_atom(atom);
      for (int t : members(set)) out.target.set_atom(atom, base + t);
    }
    for (auto [s, t] : u.relation) out.relation.emplace_back(s, base + t);
  }
  for (const auto& [atom, set] : source.valuation()) out.target.declare_atom(atom);
  std::sort(out.relation.begin(), out.relation.end());
  return out;
}

// ---------------------------------------------------------------- JSON

namespace {

using json = nlohmann::json;

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string(what) + " JSON: " + e.what());
  }
}

template <class M>
void read_edges(const json& j, M& m, const Signature& sig, const std::function<int(const std::string&)>& index) {
  if (!j.contains("agents")) return;
  if (!j.at("agents").is_object()) throw Error("'agents' must be an object");
  for (const auto& [agent, pairs] : j.at("agents").items()) {
    if (!sig.has_agent(agent)) throw Error("model mentions undeclared agent '" + agent + "'");
    for (const auto& pr : pairs) {
      if (!pr.is_array() || pr.size() != 2) throw Error("edge must be a pair");
      m.add_edge(agent, index(pr[0].template get<std::string>()), index(pr[1].template get<std::string>()));
    }
  }
}

}  // namespace

StateModel model_from_json(std::string_view text, const Signature& sig) {
  json j = parse_json(text, "model");
  try {
    StateModel m(sig.agents());
    for (const auto& id : j.at("states")) m.add_state(id.get<std::string>());
    auto index = [&](const std::string& id) { return m.index_of(id); };
    read_edges(j, m, sig, index);
    if (j.contains("valuation")) {
      for (const auto& [atom, states] : j.at("valuation").items()) {
        m.declare_atom(atom);
        for (const auto& id : states) m.set_atom(atom, index(id.get<std::string>()));
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(std::string("model JSON: ") + e.what());
  }
}

std::string model_to_json(const StateModel& s) {
  nlohmann::ordered_json j;
  j["states"] = s.ids();
  nlohmann::ordered_json ag = nlohmann::ordered_json::object();
  for (int g = 0; g < static_cast<int>(s.agents().size()); ++g) {
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (int x = 0; x < static_cast<int>(s.size()); ++x) {
      for (int y : s.successors(g, x)) list.push_back({s.id(x), s.id(y)});
    }
    ag[s.agents()[g]] = list;
  }
  j["agents"] = ag;
  nlohmann::ordered_json val = nlohmann::ordered_json::object();
  for (const auto& [atom, set] : s.valuation()) {
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (int x : members(set)) list.push_back(s.id(x));
    val[atom] = list;
  }
  j["valuation"] = val;
  return j.dump(2) + "\n";
}

ProgramModel program_model_from_json(std::string_view text, const Signature& sig) {
  json j = parse_json(text, "program model");
  try {
    ProgramModel m(sig.agents());
    const json& pre = j.at("pre");
    for (const auto& id : j.at("states")) {
      std::string name = id.get<std::string>();
      if (!pre.contains(name)) throw Error("program model: no precondition for '" + name + "'");
      m.add_action(name, parse_sentence(pre.at(name).get<std::string>(), sig));
    }
    auto index = [&](const std::string& id) {
      auto a = m.find(id);
      if (!a) throw Error("program model: unknown action '" + id + "'");
      return *a;
    };
    read_edges(j, m, sig, index);
    for (const auto& id : j.at("designated")) m.designate(index(id.get<std::string>()));
    return m;
  } catch (const json::exception& e) {
    throw Error(std::string("program model JSON: ") + e.what());
  }
}

std::string program_model_to_json(const ProgramModel& p) {
  nlohmann::ordered_json j;
  std::vector<std::string> ids;
  for (int a = 0; a < static_cast<int>(p.size()); ++a) ids.push_back(p.id(a));
  j["states"] = ids;
  nlohmann::ordered_json ag = nlohmann::ordered_json::object();
  for (int g = 0; g < static_cast<int>(p.agents().size()); ++g) {
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (int x = 0; x < static_cast<int>(p.size()); ++x) {
      for (int y : p.successors(g, x)) list.push_back({p.id(x), p.id(y)});
    }
    ag[p.agents()[g]] = list;
  }
  j["agents"] = ag;
  j["valuation"] = nlohmann::ordered_json::object();
  nlohmann::ordered_json pre = nlohmann::ordered_json::object();
  for (int a = 0; a < static_cast<int>(p.size()); ++a) pre[p.id(a)] = p.pre(a).render();
  j["pre"] = pre;
  nlohmann::ordered_json des = nlohmann::ordered_json::array();
  for (int a : p.designated()) des.push_back(p.id(a));
  j["designated"] = des;
  return j.dump(2) + "\n";
}

}  // namespace del
