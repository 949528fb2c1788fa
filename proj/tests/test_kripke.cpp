#include <doctest.h>

#include <algorithm>
#include <set>

#include "del/bisim.hpp"
#include "del/corpus.hpp"
#include "del/kripke.hpp"
#include "del/semantics.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace del;
using deltest::Rng;

namespace {

SentenceEval evaluator(const Signature& sig) {
  return [sig](const StateModel& m, const Sentence& f) { return truth_set(m, f, sig); };
}

ProgramModel random_program_model(Rng& r, const Signature& sig, int n, const std::string& name) {
  deltest::GenConfig c;
  c.dynamic = false;
  ProgramModel p(sig.agents(), name);
  for (int i = 0; i < n; ++i) p.add_action("e" + std::to_string(i), deltest::random_sentence(r, sig, c, 1));
  for (int g = 0; g < static_cast<int>(sig.agents().size()); ++g) {
    for (int x = 0; x < n; ++x) {
      for (int y = 0; y < n; ++y) {
        if (deltest::coin(r, 0.4)) p.add_edge(g, x, y);
      }
    }
  }
  for (int x = 0; x < n; ++x) {
    if (deltest::coin(r)) p.designate(x);
  }
  return p;
}

bool total(const StateModel& s, const StateModel& t) {
  return is_total_bisimulation(s, t, largest_bisimulation(s, t));
}

void check_update_invariants(const StateModel& s, const ProgramModel& a, const UpdateResult& u) {
  // Standardness.
  std::set<int> targets;
  for (auto [x, t] : u.relation) CHECK(targets.insert(t).second);
  REQUIRE(u.pairing.size() == u.target.size());
  for (int t = 0; t < static_cast<int>(u.target.size()); ++t) {
    int x = u.pairing[t].source;
    for (const auto& [p, set] : s.valuation()) CHECK(u.target.holds(p, t) == set[x]);
  }
  for (int g = 0; g < static_cast<int>(s.agents().size()); ++g) {
    for (int t = 0; t < static_cast<int>(u.target.size()); ++t) {
      int act = *a.find(u.pairing[t].action);
      for (int t2 = 0; t2 < static_cast<int>(u.target.size()); ++t2) {
        int act2 = *a.find(u.pairing[t2].action);
        bool both = s.has_edge(g, u.pairing[t].source, u.pairing[t2].source) &&
                    std::find(a.successors(g, act).begin(), a.successors(g, act).end(), act2) !=
                        a.successors(g, act).end();
        CHECK(u.target.has_edge(g, t, t2) == both);
      }
    }
  }
}

}  // namespace

TEST_CASE("public announcement of p on C_2") {
  auto sig = pub_signature();
  auto c2 = gen_cn(2);
  auto u = update_product(c2, signature_program(sig, 0, {Sentence::atom("p")}), evaluator(sig));
  CHECK(u.target.size() == 8);
  std::set<std::string> ids(u.target.ids().begin(), u.target.ids().end());
  for (int i = 1; i <= 10; ++i) {
    bool kept = i != 1 && i != 5;
    CHECK(ids.count("(a_" + std::to_string(i) + ",Pub)") == (kept ? 1u : 0u));
  }
  REQUIRE(u.relation.size() == 8);
  for (auto [x, t] : u.relation) CHECK(u.target.id(t) == "(" + c2.id(x) + ",Pub)");
}

TEST_CASE("skip and crash program models") {
  Rng r(1);
  auto sig = pub_signature();
  for (int k = 0; k < 30; ++k) {
    auto s = deltest::random_model(r, sig.agents(), {"p", "q"}, 1 + deltest::pick(r, 5));
    auto u = update_product(s, skip_model(sig.agents()), evaluator(sig));
    CHECK(isomorphic(s, u.target));
    REQUIRE(u.relation.size() == s.size());
    for (auto [x, t] : u.relation) CHECK(u.target.id(t) == "(" + s.id(x) + ",skip)");
    auto v = update_product(s, crash_model(sig.agents()), evaluator(sig));
    CHECK(v.target.size() == 0);
    CHECK(v.relation.empty());
  }
}

TEST_CASE("signature program models") {
  auto pub = signature_program(pub_signature(), 0, {Sentence::atom("p")});
  CHECK(pub.size() == 1);
  CHECK(pub.designated() == std::vector<int>{0});
  CHECK(pub.pre(0).render() == "p");
  auto pri = signature_program(pri_signature(), 0, {Sentence::atom("p"), Sentence::top()});
  CHECK(pri.size() == 2);
  CHECK(pri.designated() == std::vector<int>{0});
  CHECK(pri.pre(1).render() == "true");
  CHECK(pri.successors(pri.agent_index("A"), 0) == std::vector<int>{0});
  CHECK(pri.successors(pri.agent_index("B"), 0) == std::vector<int>{1});
  CHECK_THROWS_AS(signature_program(pri_signature(), 0, {Sentence::atom("p")}), Error);
}

TEST_CASE("composition of program models") {
  auto sig = pri_signature();
  auto p = signature_program(sig, 0, {Sentence::atom("p"), Sentence::top()});
  auto q = signature_program(sig, 1, {Sentence::atom("q"), Sentence::atom("p")});
  auto pq = compose_program_models(p, q);
  CHECK(pq.size() == 4);
  CHECK(pq.pre(*pq.find("(Pri,skp)")).render() == "<(Pri,{Pri})> p");
  CHECK(pq.designated() == std::vector<int>{*pq.find("(Pri,skp)")});
}

TEST_CASE("union of program models") {
  auto sig = pub_signature();
  auto none = union_program_models({}, sig.agents());
  CHECK(none.size() == 0);
  Rng r(7);
  for (int k = 0; k < 20; ++k) {
    auto p = random_program_model(r, sig, 1 + deltest::pick(r, 3), "P");
    auto one = union_program_models({p}, sig.agents());
    auto s = deltest::random_model(r, sig.agents(), {"p", "q"}, 1 + deltest::pick(r, 4));
    auto a = update_product(s, p, evaluator(sig));
    auto b = update_product(s, one, evaluator(sig));
    CHECK(isomorphic(a.target, b.target));
  }
}

TEST_CASE("property: update invariants, composition and union") {
  Rng r(2024);
  auto sig = pub_signature();
  auto eval = evaluator(sig);
  for (int k = 0; k < 150; ++k) {
    auto s = deltest::random_model(r, sig.agents(), {"p", "q"}, 1 + deltest::pick(r, 5));
    auto p = random_program_model(r, sig, 1 + deltest::pick(r, 3), "P");
    auto q = random_program_model(r, sig, 1 + deltest::pick(r, 3), "Q");
    auto up = update_product(s, p, eval);
    check_update_invariants(s, p, up);

    // Composite model versus applying the two updates in turn.
    auto uc = update_product(s, compose_program_models(p, q), eval);
    auto us = sequence_updates(up, update_product(up.target, q, eval));
    CHECK(total(uc.target, us.target));
    CHECK(deltest::equivalent_updates(uc, us));

    // Union model versus the disjoint union of the two updates.
    auto uu = update_product(s, union_program_models({p, q}, sig.agents()), eval);
    auto ud = union_updates({up, update_product(s, q, eval)}, s);
    CHECK(uu.target.size() == ud.target.size());
    CHECK(total(uu.target, ud.target));
    CHECK(deltest::equivalent_updates(uu, ud));
    CHECK(uu.relation.size() == ud.relation.size());
  }
}

TEST_CASE("bounded powers") {
  auto p = signature_program(pri_signature(), 0, {Sentence::atom("p"), Sentence::top()});
  CHECK(power(p, 0).size() == 1);
  CHECK(power(p, 3).size() == 8);
}

TEST_CASE("model JSON round trip") {
  auto sig = pub_signature();
  auto c2 = gen_cn(2);
  auto back = model_from_json(model_to_json(c2), sig);
  CHECK(back.ids() == c2.ids());
  CHECK(model_to_json(back) == model_to_json(c2));
  CHECK_THROWS_AS(model_from_json(R"({"states":["x"],"agents":{"Z":[]}})", sig), Error);
  CHECK_THROWS_AS(model_from_json(R"({"states":["x"],"agents":{"A":[["x","y"]]}})", sig), Error);
  CHECK_THROWS_AS(model_from_json(R"({"states":["x","x"]})", sig), Error);
  auto pm = program_model_from_json(
      R"({"states":["e","f"],"agents":{"A":[["e","f"]]},"pre":{"e":"p","f":"K_A q"},"designated":["e"]})", sig);
  CHECK(pm.size() == 2);
  CHECK(pm.pre(1).render() == "K_A q");
  auto again = program_model_from_json(program_model_to_json(pm), sig);
  CHECK(program_model_to_json(again) == program_model_to_json(pm));
}
