#include "del/decide.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <unordered_map>

#include "del/bisim.hpp"
#include "del/canon.hpp"
#include "del/semantics.hpp"

namespace del {

namespace {

constexpr std::uint64_t bit(int i) { return std::uint64_t{1} << i; }

std::unordered_map<Sentence, int, SentenceHash> index_delta(const std::vector<Sentence>& delta) {
  std::unordered_map<Sentence, int, SentenceHash> ix;
  for (int i = 0; i < static_cast<int>(delta.size()); ++i) ix.emplace(delta[i], i);
  return ix;
}

int require_member(const std::unordered_map<Sentence, int, SentenceHash>& ix, const Sentence& s) {
  auto it = ix.find(s);
  if (it == ix.end()) throw Error("closure is missing " + render(s));
  return it->second;
}

// How a non-free member's truth follows from other members of the atom.
struct Rule {
  enum Kind { Free, True, False, Not, And, CBox, DynBox } kind = Free;
  int a = -1, b = -1;       // Not: a; And: a, b; CBox: psi; DynBox: pre, nf([a]psi)
  std::vector<int> boxes;   // K_A members that must all hold (guarded by b for DynBox)
};

// One matched action of an eventuality search. pre < 0 means true.
struct Node {
  int pre = -1;
  int end = -1;  // member whose absence fulfils the eventuality here
  std::vector<std::pair<int, int>> succ;  // (agent index, node)
};

std::vector<Node> action_nodes(const FiltrationGraph& g, const Program& alpha, const std::vector<std::string>& agents,
                               const Sentence& psi, Rewriter& rw) {
  auto xs = rw.oracle().reachable(SimpleAction(alpha), agents);
  std::unordered_map<Program, int, ProgramHash> pos;
  for (int i = 0; i < static_cast<int>(xs.size()); ++i) pos.emplace(xs[i], i);
  std::vector<Node> nodes(xs.size());
  auto need = [&](const Sentence& s) {
    int i = g.index_of(s);
    if (i < 0) throw Error("closure is missing " + render(s));
    return i;
  };
  for (std::size_t i = 0; i < xs.size(); ++i) {
    nodes[i].pre = need(rw.normalize(Sentence::pre(xs[i])));
    nodes[i].end = need(rw.normalize(Sentence::dyn_box(xs[i], psi)));
    for (const auto& a : agents) {
      for (const auto& y : rw.oracle().successors(SimpleAction(xs[i]), a)) {
        nodes[i].succ.emplace_back(g.agent_index(a), pos.at(y));
      }
    }
  }
  return nodes;
}

std::vector<Node> common_nodes(const FiltrationGraph& g, const Sentence& cbox) {
  Node n;
  n.end = g.index_of(cbox.sub());
  for (const auto& a : cbox.agents()) n.succ.emplace_back(g.agent_index(a), 0);
  return {n};
}

// Live atoms with a fulfilling path from (atom, node 0), as a backward fixpoint.
std::vector<char> fulfilled(const FiltrationGraph& g, const std::vector<Node>& nodes) {
  const int n = static_cast<int>(g.size());
  const int m = static_cast<int>(nodes.size());
  std::vector<std::vector<char>> good(m, std::vector<char>(n, 0));
  auto pre_ok = [&](int b, int v) { return nodes[b].pre < 0 || g.contains(v, nodes[b].pre); };
  for (int b = 0; b < m; ++b) {
    for (int v = 0; v < n; ++v) good[b][v] = g.alive(v) && pre_ok(b, v) && !g.contains(v, nodes[b].end);
  }
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<std::vector<std::uint64_t>> masks(m);
    for (int b = 0; b < m; ++b) {
      for (int v = 0; v < n; ++v) {
        if (good[b][v]) masks[b].push_back(g.atoms()[v]);
      }
    }
    std::map<std::pair<Requirement, int>, bool> memo;  // (requirement, node)
    for (int b = 0; b < m; ++b) {
      for (int v = 0; v < n; ++v) {
        if (good[b][v] || !g.alive(v) || !pre_ok(b, v)) continue;
        for (auto [agent, c] : nodes[b].succ) {
          const Requirement& r = g.required(agent, v);
          auto [it, fresh] = memo.try_emplace({r, c}, false);
          if (fresh) {
            it->second = std::any_of(masks[c].begin(), masks[c].end(), [&](std::uint64_t w) { return r.met_by(w); });
          }
          bool hit = it->second;
          if (hit) {
            good[b][v] = 1;
            changed = true;
            break;
          }
        }
      }
    }
  }
  return good[0];
}

}  // namespace

std::size_t FiltrationGraph::alive_count() const {
  return static_cast<std::size_t>(std::count(alive_.begin(), alive_.end(), true));
}

int FiltrationGraph::index_of(const Sentence& s) const {
  for (int i = 0; i < static_cast<int>(delta_.size()); ++i) {
    if (delta_[i] == s) return i;
  }
  return -1;
}

int FiltrationGraph::agent_index(const std::string& a) const {
  auto it = std::find(agents_.begin(), agents_.end(), a);
  if (it == agents_.end()) throw Error("unknown agent " + a);
  return static_cast<int>(it - agents_.begin());
}

FiltrationGraph build_filtration(const Sentence& nf, Rewriter& rw, const DecideOptions& opt) {
  FiltrationGraph g;
  g.delta_ = rw.closure(nf);
  g.agents_ = rw.signature().agents();
  const int d = static_cast<int>(g.delta_.size());
  auto ix = index_delta(g.delta_);

  // Bits for non-negations in closure order; ~psi shares psi's bit.
  g.bit_.assign(d, -1);
  g.flip_.assign(d, false);
  int nbits = 0;
  for (int i = 0; i < d; ++i) {
    if (g.delta_[i].kind() != SentenceKind::Not) g.bit_[i] = nbits++;
  }
  for (int i = 0; i < d; ++i) {
    Sentence x = g.delta_[i];
    bool flip = false;
    while (x.kind() == SentenceKind::Not) {
      x = x.sub();
      flip = !flip;
    }
    g.bit_[i] = g.bit_[require_member(ix, x)];
    g.flip_[i] = flip;
  }
  if (static_cast<std::size_t>(nbits) > std::min<std::size_t>(opt.max_closure, 64)) {
    throw GuardError("closure has " + std::to_string(nbits) + " non-negation members");
  }

  std::vector<Rule> rules(d);
  for (int i = 0; i < d; ++i) {
    const Sentence& x = g.delta_[i];
    Rule& r = rules[i];
    switch (x.kind()) {
      case SentenceKind::Atom:
      case SentenceKind::Box: r.kind = Rule::Free; break;
      case SentenceKind::True: r.kind = Rule::True; break;
      case SentenceKind::False: r.kind = Rule::False; break;
      case SentenceKind::Not:
        r.kind = Rule::Not;
        r.a = require_member(ix, x.sub());
        break;
      case SentenceKind::And:
        r.kind = Rule::And;
        r.a = require_member(ix, x.lhs());
        r.b = require_member(ix, x.rhs());
        break;
      case SentenceKind::CBox:
        r.kind = Rule::CBox;
        r.a = require_member(ix, x.sub());
        for (const auto& a : x.agents()) r.boxes.push_back(require_member(ix, Sentence::box(a, x)));
        break;
      case SentenceKind::DynBox: {
        r.kind = Rule::DynBox;
        const Program& alpha = x.program();
        const Sentence& cb = x.sub();
        r.a = require_member(ix, rw.normalize(Sentence::pre(alpha)));
        r.b = require_member(ix, rw.normalize(Sentence::dyn_box(alpha, cb.sub())));
        for (const auto& a : cb.agents()) {
          for (const auto& beta : rw.oracle().successors(SimpleAction(alpha), a)) {
            r.boxes.push_back(require_member(ix, Sentence::box(a, Sentence::dyn_box(beta, cb))));
          }
        }
        break;
      }
      default: throw Error("not a normal form member: " + render(x));
    }
  }

  // Derived members in dependency order; the rewrite measure makes this acyclic.
  std::vector<int> order, free;
  std::vector<int> mark(d, 0);
  std::function<void(int)> visit = [&](int i) {
    if (mark[i] == 2) return;
    if (mark[i] == 1) throw Error("cyclic closure dependency at " + render(g.delta_[i]));
    mark[i] = 1;
    const Rule& r = rules[i];
    if (r.a >= 0) visit(r.a);
    if (r.b >= 0) visit(r.b);
    mark[i] = 2;
    if (r.kind == Rule::Free) {
      free.push_back(i);
    } else if (r.kind != Rule::Not) {
      order.push_back(i);
    }
  };
  for (int i = 0; i < d; ++i) visit(i);
  std::sort(free.begin(), free.end());

  const std::size_t nfree = free.size();
  if (nfree >= 63 || (std::size_t{1} << nfree) > opt.max_atoms) {
    throw GuardError("filtration would have 2^" + std::to_string(nfree) + " atoms");
  }
  const std::uint64_t count = std::uint64_t{1} << nfree;
  g.atoms_.reserve(count);
  for (std::uint64_t c = 0; c < count; ++c) {
    std::uint64_t m = 0;
    // The first member in rendering order is the most significant choice.
    for (std::size_t k = 0; k < nfree; ++k) {
      if ((c >> (nfree - 1 - k)) & 1U) m |= bit(g.bit_[free[k]]);
    }
    auto in = [&](int i) { return g.holds(m, i); };
    for (int i : order) {
      const Rule& r = rules[i];
      bool v = false;
      switch (r.kind) {
        case Rule::True: v = true; break;
        case Rule::And: v = in(r.a) && in(r.b); break;
        case Rule::CBox:
          v = in(r.a) && std::all_of(r.boxes.begin(), r.boxes.end(), in);
          break;
        case Rule::DynBox:
          v = in(r.b) && (!in(r.a) || std::all_of(r.boxes.begin(), r.boxes.end(), in));
          break;
        default: break;
      }
      if (v) m |= bit(g.bit_[i]);
    }
    g.atoms_.push_back(m);
  }

  g.req_.assign(g.agents_.size(), std::vector<Requirement>(count));
  for (int i = 0; i < d; ++i) {
    const Sentence& x = g.delta_[i];
    if (x.kind() != SentenceKind::Box) continue;
    int a = g.agent_index(x.name());
    int s = require_member(ix, x.sub());
    for (std::uint64_t u = 0; u < count; ++u) {
      if (!g.holds(g.atoms_[u], i)) continue;
      if (g.flip_[s]) {
        g.req_[a][u].clear |= bit(g.bit_[s]);
      } else {
        g.req_[a][u].set |= bit(g.bit_[s]);
      }
    }
  }
  g.alive_.assign(count, true);
  return g;
}

std::optional<GoodPath> good_path_search(const FiltrationGraph& g, int atom, const SimpleAction& alpha,
                                         const std::vector<std::string>& agents, const Sentence& psi, Rewriter& rw) {
  if (!g.alive(atom)) return std::nullopt;
  auto nodes = action_nodes(g, alpha.program(), agents, psi, rw);
  auto xs = rw.oracle().reachable(alpha, agents);
  const int n = static_cast<int>(g.size());
  auto key = [n](int v, int b) { return static_cast<long>(b) * n + v; };
  std::unordered_map<long, std::pair<long, int>> parent;  // node -> (previous node, agent)
  std::deque<std::pair<int, int>> queue;
  if (!g.contains(atom, nodes[0].pre)) return std::nullopt;
  parent.emplace(key(atom, 0), std::make_pair(-1L, -1));
  queue.emplace_back(atom, 0);
  while (!queue.empty()) {
    auto [v, b] = queue.front();
    queue.pop_front();
    if (!g.contains(v, nodes[b].end)) {
      GoodPath path;
      for (long k = key(v, b); k >= 0;) {
        path.atoms.push_back(static_cast<int>(k % n));
        path.actions.push_back(xs[k / n]);
        auto [prev, agent] = parent.at(k);
        if (agent >= 0) path.agents.push_back(g.agents()[agent]);
        k = prev;
      }
      std::reverse(path.atoms.begin(), path.atoms.end());
      std::reverse(path.actions.begin(), path.actions.end());
      std::reverse(path.agents.begin(), path.agents.end());
      return path;
    }
    for (auto [agent, c] : nodes[b].succ) {
      for (int w = 0; w < n; ++w) {
        if (!g.alive(w) || !g.edge(agent, v, w) || !g.contains(w, nodes[c].pre)) continue;
        if (parent.emplace(key(w, c), std::make_pair(key(v, b), agent)).second) queue.emplace_back(w, c);
      }
    }
  }
  return std::nullopt;
}

int eliminate(FiltrationGraph& g, Rewriter& rw) {
  const auto& delta = g.closure();
  const int d = static_cast<int>(delta.size());
  const int n = static_cast<int>(g.size());

  struct BoxMember {
    int member, agent, sub;
  };
  struct Eventuality {
    int member;
    std::vector<Node> nodes;
  };
  std::vector<BoxMember> boxes;
  std::vector<Eventuality> events;
  for (int i = 0; i < d; ++i) {
    const Sentence& x = delta[i];
    if (x.kind() == SentenceKind::Box) {
      boxes.push_back({i, g.agent_index(x.name()), g.index_of(x.sub())});
    } else if (x.kind() == SentenceKind::CBox) {
      events.push_back({i, common_nodes(g, x)});
    } else if (x.kind() == SentenceKind::DynBox) {
      events.push_back({i, action_nodes(g, x.program(), x.sub().agents(), x.sub().sub(), rw)});
    }
  }

  int rounds = 0;
  for (bool changed = true; changed;) {
    changed = false;
    ++rounds;
    // Unwitnessed ~K_A psi: no live successor lacks psi.
    std::vector<std::uint64_t> live;
    for (int v = 0; v < n; ++v) {
      if (g.alive(v)) live.push_back(g.atoms()[v]);
    }
    std::map<std::pair<Requirement, int>, bool> memo;  // (requirement, member)
    for (const auto& bm : boxes) {
      for (int u = 0; u < n; ++u) {
        if (!g.alive(u) || g.contains(u, bm.member)) continue;
        const Requirement& r = g.required(bm.agent, u);
        auto [it, fresh] = memo.try_emplace({r, bm.sub}, false);
        if (fresh) {
          it->second = std::any_of(live.begin(), live.end(),
                                   [&](std::uint64_t w) { return r.met_by(w) && !g.holds(w, bm.sub); });
        }
        if (!it->second) {
          g.kill(u);
          changed = true;
        }
      }
    }
    // Unfulfilled ~C_C psi and ~[a] C_C psi.
    for (const auto& ev : events) {
      bool any = false;
      for (int u = 0; u < n && !any; ++u) any = g.alive(u) && !g.contains(u, ev.member);
      if (!any) continue;
      auto good = fulfilled(g, ev.nodes);
      for (int u = 0; u < n; ++u) {
        if (g.alive(u) && !g.contains(u, ev.member) && !good[u]) {
          g.kill(u);
          changed = true;
        }
      }
    }
  }
  return rounds;
}

namespace {

// Copy of s on the kept states, renamed w0.. in BFS order from root.
StateModel rebuild(const StateModel& s, int root, const std::vector<char>& keep,
                   const std::function<bool(int, int, int)>& keep_edge, int& new_root) {
  const int n = static_cast<int>(s.size());
  std::vector<int> pos(n, -1);
  std::vector<int> order;
  std::deque<int> queue{root};
  pos[root] = 0;
  order.push_back(root);
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    for (int a = 0; a < static_cast<int>(s.agents().size()); ++a) {
      for (int y : s.successors(a, x)) {
        if (!keep[y] || pos[y] >= 0 || !keep_edge(a, x, y)) continue;
        pos[y] = static_cast<int>(order.size());
        order.push_back(y);
        queue.push_back(y);
      }
    }
  }
  StateModel t(s.agents());
  for (std::size_t i = 0; i < order.size(); ++i) t.add_state("w" + std::to_string(i));
  for (int x : order) {
    for (int a = 0; a < static_cast<int>(s.agents().size()); ++a) {
      for (int y : s.successors(a, x)) {
        if (pos[y] >= 0 && keep_edge(a, x, y)) t.add_edge(a, pos[x], pos[y]);
      }
    }
  }
  for (const auto& [p, set] : s.valuation()) {
    t.declare_atom(p);
    for (int x : order) {
      if (set[x]) t.set_atom(p, pos[x]);
    }
  }
  new_root = 0;
  return t;
}

Witness shrink(Witness w, const std::function<bool(const StateModel&, int)>& ok) {
  auto all_edges = [](int, int, int) { return true; };
  auto q = quotient(w.model);
  std::vector<char> keep(q.model.size(), 1);
  int root = 0;
  StateModel cur = rebuild(q.model, q.projection[w.state], keep, all_edges, root);
  if (!ok(cur, root)) return w;
  constexpr std::size_t kMaxStates = 40;
  constexpr std::size_t kMaxEdges = 400;
  if (cur.size() > kMaxStates) return {cur, root};
  for (int x = static_cast<int>(cur.size()) - 1; x > 0; --x) {
    if (x >= static_cast<int>(cur.size())) continue;
    std::vector<char> k(cur.size(), 1);
    k[x] = 0;
    int r = 0;
    auto cand = rebuild(cur, 0, k, all_edges, r);
    if (ok(cand, r)) cur = std::move(cand);
  }
  if (cur.edge_count() > kMaxEdges) return {cur, 0};
  for (int a = 0; a < static_cast<int>(cur.agents().size()); ++a) {
    for (int x = 0; x < static_cast<int>(cur.size()); ++x) {
      auto succ = cur.successors(a, x);
      for (int y : succ) {
        std::vector<char> k(cur.size(), 1);
        int r = 0;
        auto cand = rebuild(cur, 0, k, [&](int b, int u, int v) { return !(b == a && u == x && v == y); }, r);
        if (ok(cand, r)) {
          cur = std::move(cand);
          // Indices may have moved; restart this agent.
          x = -1;
          break;
        }
      }
    }
  }
  return {cur, 0};
}

}  // namespace

Decider::Decider(Signature sig, DecideOptions opt) : rw_(std::move(sig)), opt_(opt) {}

Verdict Decider::satisfiable(const Sentence& phi) {
  if (contains_star(phi)) throw Error("the decider takes iteration-free sentences");
  check_well_formed(phi, signature());
  Verdict v;
  v.nf = rw_.normalize(phi);
  auto g = build_filtration(v.nf, rw_, opt_);
  v.closure_size = g.closure().size();
  v.atoms = g.size();
  v.rounds = eliminate(g, rw_);
  v.survivors = g.alive_count();
  int root_member = g.index_of(v.nf);
  if (root_member < 0) throw Error("closure is missing its own sentence");
  int root = -1;
  for (int u = 0; u < static_cast<int>(g.size()) && root < 0; ++u) {
    if (g.alive(u) && g.contains(u, root_member)) root = u;
  }
  if (root < 0) return v;

  // The live part of the filtration, generated from the root atom.
  const int n = static_cast<int>(g.size());
  StateModel full(signature().agents());
  std::vector<int> pos(n, -1);
  std::vector<int> order{root};
  pos[root] = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    int u = order[i];
    for (int a = 0; a < static_cast<int>(g.agents().size()); ++a) {
      for (int w = 0; w < n; ++w) {
        if (g.alive(w) && pos[w] < 0 && g.edge(a, u, w)) {
          pos[w] = static_cast<int>(order.size());
          order.push_back(w);
        }
      }
    }
  }
  for (std::size_t i = 0; i < order.size(); ++i) full.add_state("w" + std::to_string(i));
  for (int u : order) {
    for (int a = 0; a < static_cast<int>(g.agents().size()); ++a) {
      for (int w : order) {
        if (g.edge(a, u, w)) full.add_edge(a, pos[u], pos[w]);
      }
    }
  }
  auto names = atoms_of(phi);
  for (const auto& p : atoms_of(v.nf)) names.insert(p);
  for (const auto& p : names) {
    full.declare_atom(p);
    int i = g.index_of(Sentence::atom(p));
    if (i < 0) continue;
    for (int u : order) {
      if (g.contains(u, i)) full.set_atom(p, pos[u]);
    }
  }

  const Signature& sig = signature();
  auto ok = [&](const StateModel& m, int s) { return holds_at(m, s, phi, sig) && holds_at(m, s, v.nf, sig); };
  Witness w{std::move(full), 0};
  if (!ok(w.model, w.state)) {
    throw Error("internal check failed: extracted model does not satisfy " + render(phi));
  }
  if (opt_.shrink_witness) w = shrink(std::move(w), ok);
  if (!ok(w.model, w.state)) {
    throw Error("internal check failed: reduced model does not satisfy " + render(phi));
  }
  v.sat = true;
  v.witness = std::move(w);
  return v;
}

bool Decider::valid(const Sentence& phi) { return !satisfiable(Sentence::neg(phi)).sat; }

std::optional<Witness> Decider::countermodel(const Sentence& phi) { return satisfiable(Sentence::neg(phi)).witness; }

Verdict satisfiable(const Sentence& phi, const Signature& sig, const DecideOptions& opt) {
  return Decider(sig, opt).satisfiable(phi);
}

bool valid(const Sentence& phi, const Signature& sig, const DecideOptions& opt) { return Decider(sig, opt).valid(phi); }

}  // namespace del
