#include "del/bisim.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace del {

namespace {

// Labelled graph view shared by state models and program models.
struct Graph {
  int n = 0;
  std::vector<std::vector<std::vector<int>>> succ;  // agent, node
};

// Coarsest partition refining `initial` that is stable under every agent:
// within a block, either all or none of the members reach a given block.
std::vector<int> refine(const Graph& g, std::vector<int> initial) {
  const int n = g.n;
  std::vector<std::vector<std::vector<int>>> pred(g.succ.size(), std::vector<std::vector<int>>(n));
  for (std::size_t a = 0; a < g.succ.size(); ++a) {
    for (int x = 0; x < n; ++x) {
      for (int y : g.succ[a][x]) pred[a][y].push_back(x);
    }
  }
  // Canonical block numbering of the initial colors.
  std::map<int, int> renum;
  std::vector<int> block(n);
  std::vector<std::vector<int>> members_of;
  for (int x = 0; x < n; ++x) {
    auto [it, fresh] = renum.emplace(initial[x], static_cast<int>(members_of.size()));
    if (fresh) members_of.emplace_back();
    block[x] = it->second;
    members_of[it->second].push_back(x);
  }
  std::deque<int> queue;
  std::vector<char> queued(members_of.size(), 1);
  for (int b = 0; b < static_cast<int>(members_of.size()); ++b) queue.push_back(b);

  std::vector<int> mark(n, 0);
  int stamp = 0;
  while (!queue.empty()) {
    int splitter = queue.front();
    queue.pop_front();
    queued[splitter] = 0;
    for (std::size_t a = 0; a < g.succ.size(); ++a) {
      ++stamp;
      std::vector<int> touched_blocks;
      for (int y : members_of[splitter]) {
        for (int x : pred[a][y]) {
          if (mark[x] == stamp) continue;
          mark[x] = stamp;
          touched_blocks.push_back(block[x]);
        }
      }
      std::sort(touched_blocks.begin(), touched_blocks.end());
      touched_blocks.erase(std::unique(touched_blocks.begin(), touched_blocks.end()), touched_blocks.end());
      for (int b : touched_blocks) {
        std::vector<int> in, out;
        for (int x : members_of[b]) (mark[x] == stamp ? in : out).push_back(x);
        if (out.empty()) continue;
        int nb = static_cast<int>(members_of.size());
        members_of[b] = std::move(out);
        for (int x : in) block[x] = nb;
        members_of.push_back(std::move(in));
        queued.push_back(0);
        for (int c : {b, nb}) {
          if (!queued[c]) {
            queued[c] = 1;
            queue.push_back(c);
          }
        }
      }
    }
  }
  // Renumber by smallest member.
  std::vector<int> out(n, -1);
  std::vector<int> id_of_block(members_of.size(), -1);
  int next = 0;
  for (int x = 0; x < n; ++x) {
    if (id_of_block[block[x]] < 0) id_of_block[block[x]] = next++;
    out[x] = id_of_block[block[x]];
  }
  return out;
}

Graph graph_of(const StateModel& s) {
  Graph g;
  g.n = static_cast<int>(s.size());
  g.succ.resize(s.agents().size());
  for (std::size_t a = 0; a < s.agents().size(); ++a) {
    for (int x = 0; x < g.n; ++x) g.succ[a].push_back(s.successors(static_cast<int>(a), x));
  }
  return g;
}

std::vector<int> valuation_colors(const StateModel& s, const std::set<std::string>& atoms) {
  std::map<std::vector<bool>, int> ids;
  std::vector<int> out;
  for (int x = 0; x < static_cast<int>(s.size()); ++x) {
    std::vector<bool> key;
    for (const auto& p : atoms) key.push_back(s.holds(p, x));
    out.push_back(ids.emplace(key, static_cast<int>(ids.size())).first->second);
  }
  return out;
}

std::set<std::string> atom_names(const StateModel& s) {
  std::set<std::string> out;
  for (const auto& [p, set] : s.valuation()) out.insert(p);
  return out;
}

}  // namespace

std::vector<int> bisimulation_classes(const StateModel& s) {
  return refine(graph_of(s), valuation_colors(s, atom_names(s)));
}

StateModel disjoint_union(const StateModel& s, const StateModel& t) {
  if (s.agents() != t.agents()) throw Error("bisimulation between models over different agents");
  StateModel u(s.agents());
  for (int x = 0; x < static_cast<int>(s.size()); ++x) u.add_state(s.id(x));
  for (int y = 0; y < static_cast<int>(t.size()); ++y) u.add_state(t.id(y) + "'");
  const int off = static_cast<int>(s.size());
  for (int a = 0; a < static_cast<int>(s.agents().size()); ++a) {
    for (int x = 0; x < static_cast<int>(s.size()); ++x) {
      for (int y : s.successors(a, x)) u.add_edge(a, x, y);
    }
    for (int x = 0; x < static_cast<int>(t.size()); ++x) {
      for (int y : t.successors(a, x)) u.add_edge(a, off + x, off + y);
    }
  }
  for (const auto& [p, set] : s.valuation()) {
    u.declare_atom(p);
    for (int x : members(set)) u.set_atom(p, x);
  }
  for (const auto& [p, set] : t.valuation()) {
    u.declare_atom(p);
    for (int x : members(set)) u.set_atom(p, off + x);
  }
  return u;
}

Relation largest_bisimulation(const StateModel& s, const StateModel& t) {
  StateModel u = disjoint_union(s, t);
  auto cls = bisimulation_classes(u);
  const int off = static_cast<int>(s.size());
  std::vector<std::vector<int>> by_class(u.size());
  for (int y = 0; y < static_cast<int>(t.size()); ++y) by_class[cls[off + y]].push_back(y);
  Relation r;
  for (int x = 0; x < off; ++x) {
    for (int y : by_class[cls[x]]) r.emplace_back(x, y);
  }
  return r;
}

bool bisimilar(const StateModel& s, int x, const StateModel& t, int y) {
  if (x < 0 || y < 0 || x >= static_cast<int>(s.size()) || y >= static_cast<int>(t.size())) {
    throw Error("unknown state in bisimilarity query");
  }
  StateModel u = disjoint_union(s, t);
  auto cls = bisimulation_classes(u);
  return cls[x] == cls[static_cast<int>(s.size()) + y];
}

bool bisimilar(const StateModel& s, const std::string& x, const StateModel& t, const std::string& y) {
  return bisimilar(s, s.index_of(x), t, t.index_of(y));
}

Quotient quotient(const StateModel& s) {
  auto cls = bisimulation_classes(s);
  int k = cls.empty() ? 0 : *std::max_element(cls.begin(), cls.end()) + 1;
  std::vector<int> rep(k, -1);
  for (int x = 0; x < static_cast<int>(s.size()); ++x) {
    if (rep[cls[x]] < 0) rep[cls[x]] = x;
  }
  Quotient q{StateModel(s.agents()), cls};
  for (int c = 0; c < k; ++c) q.model.add_state(s.id(rep[c]));
  for (int a = 0; a < static_cast<int>(s.agents().size()); ++a) {
    for (int x = 0; x < static_cast<int>(s.size()); ++x) {
      for (int y : s.successors(a, x)) q.model.add_edge(a, cls[x], cls[y]);
    }
  }
  for (const auto& [p, set] : s.valuation()) {
    q.model.declare_atom(p);
    for (int c = 0; c < k; ++c) {
      if (set[rep[c]]) q.model.set_atom(p, c);
    }
  }
  return q;
}

bool is_bisimulation(const StateModel& s, const StateModel& t, const Relation& r) {
  if (s.agents() != t.agents()) return false;
  std::set<std::pair<int, int>> rel(r.begin(), r.end());
  std::set<std::string> atoms = atom_names(s);
  for (const auto& p : atom_names(t)) atoms.insert(p);
  for (auto [x, y] : r) {
    if (x < 0 || y < 0 || x >= static_cast<int>(s.size()) || y >= static_cast<int>(t.size())) return false;
    for (const auto& p : atoms) {
      if (s.holds(p, x) != t.holds(p, y)) return false;
    }
    for (int a = 0; a < static_cast<int>(s.agents().size()); ++a) {
      for (int x2 : s.successors(a, x)) {
        const auto& ys = t.successors(a, y);
        if (std::none_of(ys.begin(), ys.end(), [&](int y2) { return rel.count({x2, y2}) > 0; })) return false;
      }
      for (int y2 : t.successors(a, y)) {
        const auto& xs = s.successors(a, x);
        if (std::none_of(xs.begin(), xs.end(), [&](int x2) { return rel.count({x2, y2}) > 0; })) return false;
      }
    }
  }
  return true;
}

bool is_total_bisimulation(const StateModel& s, const StateModel& t, const Relation& r) {
  if (!is_bisimulation(s, t, r)) return false;
  std::vector<char> left(s.size(), 0), right(t.size(), 0);
  for (auto [x, y] : r) {
    left[x] = 1;
    right[y] = 1;
  }
  return std::all_of(left.begin(), left.end(), [](char c) { return c; }) &&
         std::all_of(right.begin(), right.end(), [](char c) { return c; });
}

// ---------------------------------------------------------------- isomorphism

namespace {

std::vector<std::string> padded(const std::vector<std::string>& c, std::size_t n) {
  return c.empty() ? std::vector<std::string>(n) : c;
}

// Stable color refinement on one model (1-dimensional Weisfeiler-Leman),
// with colors expressed as canonical strings so that two models can be compared.
std::vector<std::string> wl_colors(const StateModel& m, const std::vector<std::string>& color,
                                   const std::set<std::string>& atoms) {
  const int n = static_cast<int>(m.size());
  std::vector<std::string> col(n);
  for (int x = 0; x < n; ++x) {
    std::string c = color[x] + "|";
    for (const auto& p : atoms) c += m.holds(p, x) ? '1' : '0';
    col[x] = c;
  }
  for (int round = 0; round < n + 1; ++round) {
    std::vector<std::string> next(n);
    for (int x = 0; x < n; ++x) {
      std::string sig = col[x];
      for (int a = 0; a < static_cast<int>(m.agents().size()); ++a) {
        std::vector<std::string> succ;
        for (int y : m.successors(a, x)) succ.push_back(col[y]);
        std::sort(succ.begin(), succ.end());
        sig += "[";
        for (const auto& s : succ) sig += s + ",";
        sig += "]";
      }
      next[x] = std::to_string(std::hash<std::string>{}(sig));
    }
    auto count = [](const std::vector<std::string>& v) { return std::set<std::string>(v.begin(), v.end()).size(); };
    bool stable = count(next) == count(col);
    col = std::move(next);
    if (stable) break;
  }
  return col;
}

}  // namespace

std::size_t invariant_hash(const StateModel& a, const std::vector<std::string>& color) {
  auto col = wl_colors(a, padded(color, a.size()), atom_names(a));
  std::sort(col.begin(), col.end());
  std::size_t h = a.size();
  for (const auto& c : col) h = h * 1000003u ^ std::hash<std::string>{}(c);
  return h;
}

bool isomorphic(const StateModel& a, const StateModel& b, const std::vector<std::string>& color_a,
                const std::vector<std::string>& color_b) {
  if (a.size() != b.size() || a.agents() != b.agents() || a.edge_count() != b.edge_count()) return false;
  std::set<std::string> atoms = atom_names(a);
  for (const auto& p : atom_names(b)) atoms.insert(p);
  // Refine both models jointly so that colors are comparable across them.
  StateModel u = disjoint_union(a, b);
  std::vector<std::string> cu = padded(color_a, a.size());
  auto cb = padded(color_b, b.size());
  cu.insert(cu.end(), cb.begin(), cb.end());
  auto col = wl_colors(u, cu, atoms);
  const int n = static_cast<int>(a.size());
  std::multiset<std::string> ha(col.begin(), col.begin() + n), hb(col.begin() + n, col.end());
  if (ha != hb) return false;

  std::vector<int> map(n, -1), used(n, 0);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::map<std::string, int> freq;
  for (int i = 0; i < n; ++i) ++freq[col[i]];
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return freq[col[x]] < freq[col[y]]; });

  const int na = static_cast<int>(a.agents().size());
  std::function<bool(int)> go = [&](int k) -> bool {
    if (k == n) return true;
    int x = order[k];
    for (int y = 0; y < n; ++y) {
      if (used[y] || col[n + y] != col[x]) continue;
      bool ok = true;
      for (int g = 0; g < na && ok; ++g) {
        for (int j = 0; j < k && ok; ++j) {
          int x2 = order[j], y2 = map[x2];
          if (a.has_edge(g, x, x2) != b.has_edge(g, y, y2)) ok = false;
          if (a.has_edge(g, x2, x) != b.has_edge(g, y2, y)) ok = false;
        }
        if (a.has_edge(g, x, x) != b.has_edge(g, y, y)) ok = false;
      }
      if (!ok) continue;
      map[x] = y;
      used[y] = 1;
      if (go(k + 1)) return true;
      used[y] = 0;
      map[x] = -1;
    }
    return false;
  };
  return go(0);
}

// ---------------------------------------------------------------- program models

Relation largest_program_bisimulation(const ProgramModel& p, const ProgramModel& q, const PreconditionEquivalence& eq) {
  if (p.agents() != q.agents()) throw Error("program-model bisimulation over different agents");
  const int np = static_cast<int>(p.size()), nq = static_cast<int>(q.size());
  const int n = np + nq;
  auto pre = [&](int x) -> const Precondition& { return x < np ? p.pre(x) : q.pre(x - np); };
  std::vector<int> color(n, -1);
  std::vector<int> reps;
  for (int x = 0; x < n; ++x) {
    for (std::size_t c = 0; c < reps.size() && color[x] < 0; ++c) {
      if (eq(pre(reps[c]), pre(x))) color[x] = static_cast<int>(c);
    }
    if (color[x] < 0) {
      color[x] = static_cast<int>(reps.size());
      reps.push_back(x);
    }
  }
  Graph g;
  g.n = n;
  g.succ.resize(p.agents().size());
  for (std::size_t a = 0; a < p.agents().size(); ++a) {
    for (int x = 0; x < np; ++x) g.succ[a].push_back(p.successors(static_cast<int>(a), x));
    for (int x = 0; x < nq; ++x) {
      std::vector<int> s;
      for (int y : q.successors(static_cast<int>(a), x)) s.push_back(np + y);
      g.succ[a].push_back(std::move(s));
    }
  }
  auto cls = refine(g, color);
  Relation r;
  for (int x = 0; x < np; ++x) {
    for (int y = 0; y < nq; ++y) {
      if (cls[x] == cls[np + y]) r.emplace_back(x, y);
    }
  }
  return r;
}

bool program_models_bisimilar(const ProgramModel& p, const ProgramModel& q, const PreconditionEquivalence& eq) {
  Relation r = largest_program_bisimulation(p, q, eq);
  for (int x : p.designated()) {
    if (std::none_of(r.begin(), r.end(), [&](auto pr) { return pr.first == x && q.is_designated(pr.second); })) {
      return false;
    }
  }
  for (int y : q.designated()) {
    if (std::none_of(r.begin(), r.end(), [&](auto pr) { return pr.second == y && p.is_designated(pr.first); })) {
      return false;
    }
  }
  return true;
}

Relation connect_updates(const UpdateResult& u, const Relation& r, const UpdateResult& v) {
  std::map<int, std::vector<int>> u_img, v_img;
  for (auto [s, t] : u.relation) u_img[s].push_back(t);
  for (auto [s, t] : v.relation) v_img[s].push_back(t);
  std::set<std::pair<int, int>> out;
  for (auto [s, s2] : r) {
    auto i = u_img.find(s);
    auto j = v_img.find(s2);
    if (i == u_img.end() || j == v_img.end()) continue;
    for (int t1 : i->second) {
      for (int t2 : j->second) out.emplace(t1, t2);
    }
  }
  return Relation(out.begin(), out.end());
}

}  // namespace del
