#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "del/bisim.hpp"
#include "del/corpus.hpp"
#include "del/semantics.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace del;
using deltest::Rng;

namespace {

Relation identity(const StateModel& s) {
  Relation r;
  for (int x = 0; x < static_cast<int>(s.size()); ++x) r.emplace_back(x, x);
  return r;
}

// A copy with the states renamed and listed in a shuffled order.
StateModel permuted(Rng& r, const StateModel& s) {
  std::vector<int> order(s.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), r);
  std::vector<int> pos(s.size());
  StateModel t(s.agents());
  for (std::size_t i = 0; i < order.size(); ++i) {
    pos[order[i]] = t.add_state("t" + std::to_string(order[i]));
  }
  for (int g = 0; g < static_cast<int>(s.agents().size()); ++g) {
    for (int x = 0; x < static_cast<int>(s.size()); ++x) {
      for (int y : s.successors(g, x)) t.add_edge(g, pos[x], pos[y]);
    }
  }
  for (const auto& [p, set] : s.valuation()) {
    t.declare_atom(p);
    for (int x : members(set)) t.set_atom(p, pos[x]);
  }
  return t;
}

}  // namespace

TEST_CASE("largest bisimulation contains the identity") {
  Rng r(3);
  for (int k = 0; k < 50; ++k) {
    auto s = deltest::random_model(r, {"A", "B"}, {"p"}, 1 + deltest::pick(r, 6));
    auto z = largest_bisimulation(s, s);
    std::set<std::pair<int, int>> zs(z.begin(), z.end());
    for (auto pr : identity(s)) CHECK(zs.count(pr));
    CHECK(bisimilar(s, 0, s, 0));
  }
}

TEST_CASE("duplicate states are bisimilar") {
  StateModel s({"A"});
  int x = s.add_state("x"), y = s.add_state("y"), z = s.add_state("z");
  s.add_edge("A", x, z);
  s.add_edge("A", y, z);
  s.set_atom("p", z);
  CHECK(bisimilar(s, x, s, y));
  CHECK_FALSE(bisimilar(s, x, s, z));
  auto oracle = deltest::naive_bisimulation(s, s);
  CHECK(oracle.count({x, y}));
  CHECK(quotient(s).model.size() == 2);
}

TEST_CASE("largest bisimulation agrees with the naive fixpoint") {
  Rng r(11);
  for (int k = 0; k < 200; ++k) {
    auto s = deltest::random_model(r, {"A", "B"}, {"p"}, 1 + deltest::pick(r, 6), 0.25);
    auto t = deltest::coin(r) ? permuted(r, s) : deltest::random_model(r, {"A", "B"}, {"p"}, 1 + deltest::pick(r, 6), 0.25);
    auto z = largest_bisimulation(s, t);
    std::set<std::pair<int, int>> zs(z.begin(), z.end());
    CHECK(zs == deltest::naive_bisimulation(s, t));
    CHECK(is_bisimulation(s, t, z));
  }
}

TEST_CASE("private pair: every state but a is related to itself") {
  auto [s, t] = gen_private_pair({{1, 2}, {2, 3}}, 1);
  auto z = largest_bisimulation(s, t);
  std::set<std::pair<int, int>> zs(z.begin(), z.end());
  for (int x = 0; x < static_cast<int>(s.size()); ++x) {
    if (s.id(x) == "a") continue;
    CHECK(zs.count({x, t.index_of(s.id(x))}));
  }
  CHECK_FALSE(bisimilar(s, "a", t, "a"));
  CHECK_THROWS_AS(bisimilar(s, "nope", t, "a"), Error);
}

TEST_CASE("total bisimulation checks") {
  Rng r(5);
  auto s = deltest::random_model(r, {"A", "B"}, {"p"}, 4);
  CHECK(is_total_bisimulation(s, s, identity(s)));
  CHECK_FALSE(is_total_bisimulation(s, s, {}));
  // Under a public announcement every target state is in the image, so
  // u^-1 ; I ; u covers both sides.
  auto sig = pub_signature();
  deltest::GenConfig c;
  for (int k = 0; k < 50; ++k) {
    auto m = deltest::random_model(r, sig.agents(), {"p", "q"}, 1 + deltest::pick(r, 5));
    auto u = eval_program(m, Program::basic(0, "Pub", {deltest::random_sentence(r, sig, c, 2)}), sig);
    CHECK(is_total_bisimulation(u.target, u.target, connect_updates(u, identity(m), u)));
  }
}

TEST_CASE("quotient") {
  Rng r(9);
  auto sig = pub_signature();
  deltest::GenConfig c;
  for (int k = 0; k < 100; ++k) {
    auto s = deltest::random_model(r, sig.agents(), {"p", "q"}, 1 + deltest::pick(r, 6), 0.3);
    auto q = quotient(s);
    CHECK(q.model.size() <= s.size());
    Relation proj;
    for (int x = 0; x < static_cast<int>(s.size()); ++x) proj.emplace_back(x, q.projection[x]);
    CHECK(is_total_bisimulation(s, q.model, proj));
    CHECK(isomorphic(quotient(q.model).model, q.model));
    auto phi = deltest::random_sentence(r, sig, c, 3);
    auto a = truth_set(s, phi, sig);
    auto b = truth_set(q.model, phi, sig);
    for (int x = 0; x < static_cast<int>(s.size()); ++x) CHECK(a[x] == b[q.projection[x]]);
  }
}

TEST_CASE("isomorphism") {
  Rng r(17);
  for (int k = 0; k < 100; ++k) {
    auto s = deltest::random_model(r, {"A", "B"}, {"p"}, 1 + deltest::pick(r, 7));
    auto t = permuted(r, s);
    CHECK(isomorphic(s, t));
    CHECK(invariant_hash(s) == invariant_hash(t));
    // Flip one valuation bit: same frame, different model.
    StateModel u = t;
    int x = deltest::pick(r, static_cast<int>(u.size()));
    u.set_atom("p", x, !u.holds("p", x));
    CHECK_FALSE(isomorphic(s, u));
  }
}

TEST_CASE("program model bisimulation and update equivalence") {
  auto sig = pri_signature();
  auto syntactic = [](const Precondition& a, const Precondition& b) { return a.render() == b.render(); };
  auto p = signature_program(sig, 0, {Sentence::atom("p"), Sentence::top()});
  // q duplicates the skp action; the copy is indistinguishable.
  ProgramModel q(sig.agents(), "Q");
  int pri = q.add_action("Pri", p.pre(0));
  int s1 = q.add_action("skp1", p.pre(1));
  int s2 = q.add_action("skp2", p.pre(1));
  q.add_edge("A", pri, pri);
  q.add_edge("B", pri, s1);
  for (int x : {s1, s2}) {
    q.add_edge("A", x, s1);
    q.add_edge("A", x, s2);
    q.add_edge("B", x, s2);
  }
  q.designate(pri);
  CHECK(program_models_bisimilar(p, q, syntactic));
  CHECK_FALSE(program_models_bisimilar(p, signature_program(sig, 1, {Sentence::atom("p"), Sentence::top()}), syntactic));

  Rng r(23);
  auto eval = [&](const StateModel& m, const Sentence& f) { return truth_set(m, f, sig); };
  for (int k = 0; k < 50; ++k) {
    auto s = deltest::random_model(r, sig.agents(), {"p", "q"}, 1 + deltest::pick(r, 5));
    auto up = update_product(s, p, eval);
    auto uq = update_product(s, q, eval);
    auto link = connect_updates(up, identity(s), uq);
    CHECK(deltest::equivalent_updates(up, uq));
    std::set<int> lhs, rhs;
    for (auto [x, y] : link) {
      lhs.insert(x);
      rhs.insert(y);
    }
    for (auto [x, y] : link) CHECK(bisimilar(up.target, x, uq.target, y));
    for (auto [x, t] : up.relation) CHECK(lhs.count(t));
    for (auto [x, t] : uq.relation) CHECK(rhs.count(t));
    CHECK(is_total_bisimulation(up.target, uq.target, largest_bisimulation(up.target, uq.target)));
  }
}

TEST_CASE("disjoint union keeps both sides") {
  auto c2 = gen_cn(2);
  auto d = disjoint_union(c2, c2);
  CHECK(d.size() == 20);
  CHECK(d.edge_count() == 2 * c2.edge_count());
}
