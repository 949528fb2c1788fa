#include "del/corpus.hpp"

#include <functional>
#include <vector>

namespace del {

StateModel gen_cn(int n) {
  if (n <= 0 || n % 2 != 0) throw Error("C_n needs an even positive n");
  const int m = 5 * n;
  StateModel s({"A", "B"});
  for (int i = 1; i <= m; ++i) s.add_state("a_" + std::to_string(i));
  for (int k = 1; k <= m; ++k) {
    int x = k - 1, y = k % m;  // a_k and a_{k+1}, 0-based
    const char* g = k % 2 == 1 ? "A" : "B";
    s.add_edge(g, x, y);
    s.add_edge(g, y, x);
  }
  s.declare_atom("p");
  s.declare_atom("q");
  for (int i = 1; i <= m; ++i) {
    if (i != 1 && i != 2 * n + 1) s.set_atom("p", i - 1);
  }
  s.set_atom("q", 4 * n);
  return s;
}

std::string private_state(int i, int k) { return "c^" + std::to_string(i) + "_" + std::to_string(k); }

std::pair<StateModel, StateModel> gen_private_pair(const std::map<int, int>& f, int j) {
  if (f.empty()) throw Error("private pair needs a nonempty J");
  if (!f.count(j)) throw Error("j must belong to J");
  for (auto [i, len] : f) {
    if (i <= 0 || len <= 0) throw Error("private pair needs positive indices and lengths");
  }
  StateModel s({"A", "B"});
  int a = s.add_state("a");
  int b = s.add_state("b");
  for (auto [i, len] : f) {
    for (int k = 1; k <= len; ++k) s.add_state(private_state(i, k));
  }
  for (int x = 0; x < static_cast<int>(s.size()); ++x) s.add_edge("A", x, x);
  s.add_edge("A", a, b);
  for (auto [i, len] : f) {
    s.add_edge("A", b, s.index_of(private_state(i, 1)));
    for (int k = 1; k < len; ++k) s.add_edge("A", s.index_of(private_state(i, k)), s.index_of(private_state(i, k + 1)));
    s.add_edge("B", s.index_of(private_state(i, len)), b);
  }
  s.declare_atom("p");
  for (int x = 0; x < static_cast<int>(s.size()); ++x) {
    if (x != b) s.set_atom("p", x);
  }
  StateModel t = s;
  t.add_edge("A", a, t.index_of(private_state(j, 1)));
  return {s, t};
}

StateModel gen_nofmp(int n) {
  if (n < 0) throw Error("depth must be nonnegative");
  StateModel s({"A"});
  std::function<void(std::vector<int>&, int)> grow = [&](std::vector<int>& seq, int parent) {
    int top = seq.empty() ? n + 1 : seq.back();
    for (int v = top - 1; v >= 0; --v) {
      seq.push_back(v);
      std::string id = "(";
      for (std::size_t i = 0; i < seq.size(); ++i) id += (i ? "," : "") + std::to_string(seq[i]);
      id += ")";
      int x = s.add_state(id);
      s.add_edge(0, parent, x);
      grow(seq, x);
      seq.pop_back();
    }
  };
  std::vector<int> seq;
  int root = s.add_state("()");
  grow(seq, root);
  return s;
}

}  // namespace del
