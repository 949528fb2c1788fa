#include "del/semantics.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "del/bisim.hpp"

namespace del {

namespace {

bool top_level_star(const Program& p) {
  switch (p.kind()) {
    case ProgramKind::Star: return true;
    case ProgramKind::Seq:
    case ProgramKind::Union: return top_level_star(p.lhs()) || top_level_star(p.rhs());
    default: return false;
  }
}

// One iterate of [p*]: the current target, the relation from the original
// source states, and per target state the label used for comparison.
struct Iterate {
  StateModel model;
  Relation rel;  // (source, target)
  std::vector<std::string> labels;
  std::size_t hash = 0;
};

// Restricts to the part generated by the image of rel and divides out the
// greatest bisimulation that also respects preimages. The result induces an
// update equivalent to the input one.
Iterate minimize(const StateModel& m, const Relation& rel) {
  const int n = static_cast<int>(m.size());
  StateSet keep(n);
  std::deque<int> work;
  for (auto [s, t] : rel) {
    if (!keep[t]) {
      keep.set(t);
      work.push_back(t);
    }
  }
  while (!work.empty()) {
    int x = work.front();
    work.pop_front();
    for (int a = 0; a < static_cast<int>(m.agents().size()); ++a) {
      for (int y : m.successors(a, x)) {
        if (!keep[y]) {
          keep.set(y);
          work.push_back(y);
        }
      }
    }
  }
  std::vector<int> old;
  StateModel r = restrict_model(m, keep, &old);
  std::vector<int> fresh(n, -1);
  for (int i = 0; i < static_cast<int>(old.size()); ++i) fresh[old[i]] = i;
  std::vector<std::vector<int>> pre(r.size());
  for (auto [s, t] : rel) pre[fresh[t]].push_back(s);
  std::vector<std::string> label(r.size());
  for (std::size_t t = 0; t < r.size(); ++t) {
    std::sort(pre[t].begin(), pre[t].end());
    pre[t].erase(std::unique(pre[t].begin(), pre[t].end()), pre[t].end());
    for (int s : pre[t]) label[t] += std::to_string(s) + ",";
  }
  // Preimage labels become reserved atoms for the refinement only.
  StateModel labelled = r;
  for (std::size_t t = 0; t < r.size(); ++t) {
    if (!label[t].empty()) labelled.set_atom("\x01src:" + label[t], static_cast<int>(t));
  }
  auto cls = bisimulation_classes(labelled);
  int k = cls.empty() ? 0 : *std::max_element(cls.begin(), cls.end()) + 1;
  std::vector<int> rep(k, -1);
  for (int t = 0; t < static_cast<int>(r.size()); ++t) {
    if (rep[cls[t]] < 0) rep[cls[t]] = t;
  }
  Iterate it{StateModel(m.agents()), {}, {}};
  for (int c = 0; c < k; ++c) {
    it.model.add_state("q" + std::to_string(c));
    it.labels.push_back(label[rep[c]]);
  }
  for (int a = 0; a < static_cast<int>(m.agents().size()); ++a) {
    for (int t = 0; t < static_cast<int>(r.size()); ++t) {
      for (int u : r.successors(a, t)) it.model.add_edge(a, cls[t], cls[u]);
    }
  }
  for (const auto& [p, set] : r.valuation()) {
    it.model.declare_atom(p);
    for (int c = 0; c < k; ++c) {
      if (set[rep[c]]) it.model.set_atom(p, c);
    }
  }
  std::set<std::pair<int, int>> rr;
  for (auto [s, t] : rel) rr.emplace(s, cls[fresh[t]]);
  it.rel.assign(rr.begin(), rr.end());
  it.hash = invariant_hash(it.model, it.labels);
  return it;
}

class Checker {
 public:
  Checker(const Signature& sig, int fuel) : sig_(sig), fuel_(fuel) {}

  bool exact = true;

  SentenceEval callback() {
    return [this](const StateModel& m, const Sentence& s) { return eval(m, s); };
  }

  StateSet eval(const StateModel& m, const Sentence& f) {
    switch (f.kind()) {
      case SentenceKind::True: return m.all();
      case SentenceKind::False: return m.none();
      case SentenceKind::Atom: return m.truth(f.name());
      case SentenceKind::Not: return ~eval(m, f.sub());
      case SentenceKind::And: return eval(m, f.lhs()) & eval(m, f.rhs());
      case SentenceKind::Or: return eval(m, f.lhs()) | eval(m, f.rhs());
      case SentenceKind::Implies: return ~eval(m, f.lhs()) | eval(m, f.rhs());
      case SentenceKind::Box: return box(m, m.agent_index(f.name()), eval(m, f.sub()));
      case SentenceKind::Diamond: return ~box(m, m.agent_index(f.name()), ~eval(m, f.sub()));
      case SentenceKind::CBox: return ~reach(m, f.agents(), ~eval(m, f.sub()));
      case SentenceKind::CDiamond: return reach(m, f.agents(), eval(m, f.sub()));
      case SentenceKind::DynBox: return dyn_box(m, f.program(), f.sub());
      case SentenceKind::DynDiamond:
        return ~dyn_box(m, f.program(), Sentence::neg(f.sub()));
      case SentenceKind::Pre:
        // The domain of the induced update.
        return ~dyn_box(m, f.program(), Sentence::bottom());
    }
    throw Error("unknown sentence kind");
  }

  UpdateResult program(const StateModel& m, const Program& p) {
    switch (p.kind()) {
      case ProgramKind::Skip: return identity_update(m);
      case ProgramKind::Crash: return empty_update(m);
      case ProgramKind::Basic:
        return update_product(m, signature_program(sig_, p.type_index(), p.args()), callback());
      case ProgramKind::Seq: {
        UpdateResult u = program(m, p.lhs());
        UpdateResult v = program(u.target, p.rhs());
        return sequence_updates(u, v);
      }
      case ProgramKind::Union: return union_updates({program(m, p.lhs()), program(m, p.rhs())}, m);
      case ProgramKind::Star: break;
    }
    throw Error("iteration has no finite induced update; evaluate it under a box instead");
  }

 private:
  static StateSet box(const StateModel& m, int agent, const StateSet& t) {
    StateSet out = m.all();
    for (int x = 0; x < static_cast<int>(m.size()); ++x) {
      for (int y : m.successors(agent, x)) {
        if (!t[y]) {
          out.reset(x);
          break;
        }
      }
    }
    return out;
  }

  // States with a path (possibly empty) over the agents' arrows into target.
  static StateSet reach(const StateModel& m, const std::vector<std::string>& agents, const StateSet& target) {
    const int n = static_cast<int>(m.size());
    std::vector<std::vector<int>> pred(n);
    for (const auto& a : agents) {
      int g = m.agent_index(a);
      for (int x = 0; x < n; ++x) {
        for (int y : m.successors(g, x)) pred[y].push_back(x);
      }
    }
    StateSet out = target;
    std::deque<int> work;
    for (int x : members(target)) work.push_back(x);
    while (!work.empty()) {
      int y = work.front();
      work.pop_front();
      for (int x : pred[y]) {
        if (!out[x]) {
          out.set(x);
          work.push_back(x);
        }
      }
    }
    return out;
  }

  StateSet dyn_box(const StateModel& m, const Program& p, const Sentence& body) {
    if (top_level_star(p)) {
      switch (p.kind()) {
        case ProgramKind::Seq:
          return eval(m, Sentence::dyn_box(p.lhs(), Sentence::dyn_box(p.rhs(), body)));
        case ProgramKind::Union:
          return eval(m, Sentence::dyn_box(p.lhs(), body)) & eval(m, Sentence::dyn_box(p.rhs(), body));
        case ProgramKind::Star: return star_box(m, p.body(), body);
        default: break;
      }
    }
    UpdateResult u = program(m, p);
    StateSet t = eval(u.target, body);
    StateSet out = m.all();
    for (auto [s, x] : u.relation) {
      if (!t[x]) out.reset(s);
    }
    return out;
  }

  // [p*]body as the intersection of [p^k]body, stopping once the minimized
  // iterate repeats an earlier one up to isomorphism.
  StateSet star_box(const StateModel& m, const Program& p, const Sentence& body) {
    if (top_level_star(p)) throw Error("nested iteration is not supported");
    StateSet acc = m.all();
    Relation id;
    for (int x = 0; x < static_cast<int>(m.size()); ++x) id.emplace_back(x, x);
    Iterate cur = minimize(m, id);
    std::vector<Iterate> history;
    for (int k = 0;; ++k) {
      for (const auto& h : history) {
        if (h.hash == cur.hash && isomorphic(h.model, cur.model, h.labels, cur.labels)) return acc;
      }
      StateSet t = eval(cur.model, body);
      for (auto [s, x] : cur.rel) {
        if (!t[x]) acc.reset(s);
      }
      if (k >= fuel_) {
        exact = false;
        return acc;
      }
      UpdateResult u = program(cur.model, p);
      Relation next;
      std::vector<std::vector<int>> img(cur.model.size());
      for (auto [x, y] : u.relation) img[x].push_back(y);
      for (auto [s, x] : cur.rel) {
        for (int y : img[x]) next.emplace_back(s, y);
      }
      history.push_back(std::move(cur));
      cur = minimize(u.target, next);
    }
  }

  const Signature& sig_;
  int fuel_;
};

}  // namespace

Evaluation eval_sentence(const StateModel& s, const Sentence& phi, const Signature& sig, int fuel) {
  Checker c(sig, fuel);
  Evaluation e{c.eval(s, phi), true};
  e.exact = c.exact;
  return e;
}

StateSet truth_set(const StateModel& s, const Sentence& phi, const Signature& sig, int fuel) {
  Evaluation e = eval_sentence(s, phi, sig, fuel);
  if (!e.exact) throw GuardError("iteration did not converge within " + std::to_string(fuel) + " unfoldings");
  return e.states;
}

bool holds_at(const StateModel& s, int state, const Sentence& phi, const Signature& sig, int fuel) {
  return truth_set(s, phi, sig, fuel)[state];
}

UpdateResult eval_program(const StateModel& s, const Program& p, const Signature& sig, int fuel) {
  Checker c(sig, fuel);
  UpdateResult u = c.program(s, p);
  if (!c.exact) throw GuardError("iteration inside an action argument did not converge");
  return u;
}

std::optional<StarPath> diamond_star_paths(const StateModel& s, int state, const SimpleAction& a,
                                           const std::vector<std::string>& agents, const Sentence& phi,
                                           const Signature& sig) {
  if (agents.empty()) throw Error("empty agent set");
  OmegaArrowOracle oracle(sig);
  auto xs = oracle.reachable(a, agents);
  const int nx = static_cast<int>(xs.size());
  std::map<std::string, int> index;
  for (int i = 0; i < nx; ++i) index.emplace(render(xs[i]), i);
  std::vector<StateSet> pre, goal;
  for (const auto& x : xs) {
    pre.push_back(truth_set(s, pre_of(SimpleAction(x)), sig));
    goal.push_back(truth_set(s, Sentence::dyn_diamond(x, phi), sig));
  }
  // succ[g][i]: Omega successors of action i for agent g.
  std::vector<std::vector<std::vector<int>>> succ(agents.size(), std::vector<std::vector<int>>(nx));
  std::vector<int> gidx;
  for (std::size_t g = 0; g < agents.size(); ++g) {
    gidx.push_back(s.agent_index(agents[g]));
    for (int i = 0; i < nx; ++i) {
      for (const auto& y : oracle.successors(SimpleAction(xs[i]), agents[g])) succ[g][i].push_back(index.at(render(y)));
    }
  }
  const int ns = static_cast<int>(s.size());
  auto key = [&](int x, int i) { return x * nx + i; };
  std::vector<int> parent(static_cast<std::size_t>(ns) * nx, -2), via(static_cast<std::size_t>(ns) * nx, -1);
  std::deque<int> work{key(state, 0)};
  parent[key(state, 0)] = -1;
  while (!work.empty()) {
    int k = work.front();
    work.pop_front();
    int x = k / nx, i = k % nx;
    if (goal[i][x]) {
      StarPath path;
      for (int c = k; c >= 0; c = parent[c]) {
        path.states.push_back(c / nx);
        path.actions.push_back(xs[c % nx]);
        if (parent[c] >= 0) path.agents.push_back(agents[via[c]]);
      }
      std::reverse(path.states.begin(), path.states.end());
      std::reverse(path.actions.begin(), path.actions.end());
      std::reverse(path.agents.begin(), path.agents.end());
      return path;
    }
    if (!pre[i][x]) continue;
    for (std::size_t g = 0; g < agents.size(); ++g) {
      for (int y : s.successors(gidx[g], x)) {
        for (int j : succ[g][i]) {
          int k2 = key(y, j);
          if (parent[k2] != -2) continue;
          parent[k2] = k;
          via[k2] = static_cast<int>(g);
          work.push_back(k2);
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace del
