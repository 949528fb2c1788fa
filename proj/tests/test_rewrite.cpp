#include <doctest.h>

#include <set>

#include "del/rewrite.hpp"
#include "del/semantics.hpp"
#include "support/gen.hpp"

using namespace del;
using deltest::Rng;

namespace {

// Core terms of the rewrite language, including Pre and compositions, in
// arbitrary (mostly non-normal) shapes.
Sentence random_core(Rng& r, const Signature& sig, int depth);

Program random_action(Rng& r, const Signature& sig, int depth) {
  auto basic = [&] {
    int i = deltest::pick(r, sig.n());
    std::vector<Sentence> args;
    for (int k = 0; k < sig.n(); ++k) args.push_back(random_core(r, sig, std::max(0, depth - 2)));
    return Program::basic(i, sig.types()[i], std::move(args));
  };
  if (depth <= 0 || deltest::coin(r, 0.6)) return basic();
  return Program::seq(random_action(r, sig, depth - 1), random_action(r, sig, depth - 1));
}

Sentence random_core(Rng& r, const Signature& sig, int depth) {
  if (depth <= 0 || deltest::coin(r, 0.2)) {
    switch (deltest::pick(r, 4)) {
      case 0: return Sentence::top();
      case 1: return Sentence::bottom();
      default: return Sentence::atom(deltest::coin(r) ? "p" : "q");
    }
  }
  auto sub = [&] { return random_core(r, sig, depth - 1); };
  const auto& agents = sig.agents();
  switch (deltest::pick(r, 9)) {
    case 0: return Sentence::neg(sub());
    case 1: return Sentence::conj(sub(), sub());
    case 2: return Sentence::implies(sub(), sub());
    case 3: return Sentence::box(agents[deltest::pick(r, static_cast<int>(agents.size()))], sub());
    case 4: return Sentence::cbox(deltest::random_agent_set(r, sig), sub());
    case 5: return Sentence::pre(random_action(r, sig, depth - 1));
    default: return Sentence::dyn_box(random_action(r, sig, depth - 1), sub());
  }
}

bool has_dynamic(const Sentence& s) {
  for (const auto& x : subsentences(s)) {
    if (x.kind() == SentenceKind::DynBox || x.kind() == SentenceKind::DynDiamond || x.kind() == SentenceKind::Pre) {
      return true;
    }
  }
  return false;
}

bool has_common(const Sentence& s) {
  for (const auto& x : subsentences(s)) {
    if (x.kind() == SentenceKind::CBox || x.kind() == SentenceKind::CDiamond) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("measure") {
  auto sig = pub_signature();
  CHECK(measure(Sentence::atom("p")).value == 3);
  CHECK(measure(parse_sentence("~p", sig)).value == 4);
  CHECK(measure(parse_sentence("[Pub(p)] q", sig)).value == 64);
  CHECK(measure(parse_sentence("p -> q", sig)).value == 9);
  CHECK(measure(parse_sentence("K_A p", sig)).value == 5);
  CHECK(measure(parse_sentence("C_{A,B} p", sig)).value == 4);
  // Pub(p) ; Pub(q) = 4^(4+1).
  CHECK(measure(parse_program("Pub(p) ; Pub(q)", sig)).value == 1024);
  CHECK(measure(Sentence::pre(parse_program("Pub(p)", sig))).value == 4);
  auto big = measure(parse_sentence("[Pub(p)][Pub(p)][Pub(p)][Pub(p)] q", sig), 64);
  CHECK(big.overflow);
  CHECK(big.str() == "overflow");
}

TEST_CASE("single rewrite steps") {
  auto sig = pub_signature();
  auto s1 = rewrite_step(parse_sentence("[Pub(p)] q", sig), sig);
  REQUIRE(s1);
  CHECK(s1->rule == "r4");
  CHECK(s1->result == Sentence::implies(Sentence::pre(parse_program("Pub(p)", sig)), Sentence::atom("q")));
  auto s2 = rewrite_step(Sentence::pre(parse_program("Pub(p)", sig)), sig);
  REQUIRE(s2);
  CHECK(s2->rule == "r2");
  CHECK(s2->result == Sentence::atom("p"));
  auto s3 = rewrite_step(parse_sentence("p -> q", sig), sig);
  REQUIRE(s3);
  CHECK(s3->rule == "r1");
  CHECK(render(s3->result) == "~(p & ~q)");
  auto s9 = rewrite_step(parse_sentence("[Pub(p) ; (Pub(q) ; Pub(r))] C_{A} p", sig), sig);
  REQUIRE(s9);
  CHECK(s9->rule == "r9");
  auto s8 = rewrite_step(parse_sentence("[Pub(p)][Pub(q)] C_{A} p", sig), sig);
  REQUIRE(s8);
  CHECK(s8->rule == "r8");
  CHECK(render(s8->result) == "[Pub(p) ; Pub(q)] C_{A} p");
  CHECK_FALSE(rewrite_step(parse_sentence("K_A p", sig), sig));
}

TEST_CASE("r7 expands along the canonical arrows") {
  auto sig = pri_signature();
  auto s = rewrite_step(parse_sentence("[Pri(p, true)] K_B q", sig), sig);
  REQUIRE(s);
  CHECK(s->rule == "r7");
  CHECK(render(s->result) == "Pre(Pri(p, true)) -> K_B [skp(p, true)] q");
  // No successors: the conjunction is empty.
  auto lone = Signature("solo", {"A", "B"}, {"X"}, {{"A", {{0, 0}}}});
  auto e = rewrite_step(parse_sentence("[X(p)] K_B q", lone), lone);
  REQUIRE(e);
  CHECK(render(e->result) == "Pre(X(p)) -> true");
}

TEST_CASE("normal forms") {
  auto sig = pub_signature();
  CHECK(normalize(parse_sentence("K_A p", sig), sig) == parse_sentence("K_A p", sig));
  CHECK(render(normalize(parse_sentence("[Pub(p)] q", sig), sig)) == "~(p & ~q)");
  auto star = normalize(parse_sentence("[Pub(p)][Pub(q)] C_{A,B} r", sig), sig);
  CHECK(render(star) == "[Pub(p) ; Pub(q)] C_{A,B} r");
  CHECK(is_normal_form(star));
  CHECK(is_normal_form(Sentence::top()));
  CHECK_FALSE(is_normal_form(parse_sentence("p -> q", sig)));
  CHECK_FALSE(is_normal_form(parse_sentence("[Pub(p) ; (Pub(q) ; Pub(r))] C_{A} p", sig)));
  CHECK(is_normal_form(parse_sentence("[(Pub(p) ; Pub(q)) ; Pub(r)] C_{A} p", sig)));
  auto tr = normalize_traced(parse_sentence("[Pub(p)] q", sig), sig, {.trace = true});
  REQUIRE(tr.trace.size() == 3);
  CHECK(tr.trace[0].rule == "r4");
  // Outermost first: r1 fires at the root before r2 inside it.
  CHECK(tr.trace[1].rule == "r1");
  CHECK(tr.trace[2].rule == "r2");
  CHECK_THROWS_AS(normalize(parse_sentence("[Pub(p)*] q", sig), sig), Error);
  CHECK_THROWS_AS(normalize_traced(parse_sentence("[Pub(p)][Pub(q)] K_A p", sig), sig, {.fuel = 2}), GuardError);
}

TEST_CASE("property: strict decrease, termination, and normal-form recognition") {
  Rng r(83);
  deltest::GenConfig c;
  c.depth = 4;
  c.max_dynamic = 3;
  for (const auto& sig : {pub_signature(), pri_signature()}) {
    Rewriter rw(sig);
    for (int k = 0; k < 400; ++k) {
      auto phi = deltest::random_sentence(r, sig, c, 4);
      auto res = rw.normalize_traced(phi, {.check_measure = true});
      CHECK(is_normal_form(res.nf));
      // Without common knowledge the normal form is purely modal.
      if (!has_common(phi)) CHECK_FALSE(has_dynamic(res.nf));
    }
  }
}

TEST_CASE("property: recognizer agrees with irreducibility") {
  Rng r(89);
  for (const auto& sig : {pub_signature(), pri_signature()}) {
    Rewriter rw(sig);
    for (int k = 0; k < 3000; ++k) {
      auto t = random_core(r, sig, 4);
      CHECK(is_normal_form(t) == !rw.step(t).has_value());
      auto nf = rw.normalize(t);
      CHECK(is_normal_form(nf));
      CHECK_FALSE(rw.step(nf).has_value());
    }
  }
}

TEST_CASE("property: normalization preserves truth sets") {
  Rng r(97);
  deltest::GenConfig c;
  for (const auto& sig : {pub_signature(), pri_signature()}) {
    Rewriter rw(sig);
    for (int k = 0; k < 250; ++k) {
      auto phi = deltest::random_sentence(r, sig, c, 3);
      auto s = deltest::random_model(r, sig.agents(), c.atoms, 1 + deltest::pick(r, 5));
      CHECK(truth_set(s, phi, sig) == truth_set(s, rw.normalize(phi), sig));
    }
  }
}

TEST_CASE("closure examples") {
  auto sig = pub_signature();
  auto p = Sentence::atom("p");
  CHECK(closure(p, sig) == std::vector<Sentence>{p});
  auto cp = parse_sentence("C_{A} p", sig);
  auto f = closure(cp, sig);
  std::set<std::string> rs;
  for (const auto& x : f) rs.insert(render(x));
  CHECK(rs == std::set<std::string>{"C_{A} p", "p", "K_A C_{A} p"});
  CHECK_THROWS_AS(closure(parse_sentence("p -> q", sig), sig), Error);
  auto big = normalize(parse_sentence("[Pub(p)] C_{A,B} (q & K_A r)", sig), sig);
  CHECK_THROWS_AS(closure(big, sig, 3), GuardError);
}

TEST_CASE("property: closure laws") {
  Rng r(101);
  deltest::GenConfig c;
  c.depth = 3;
  c.max_dynamic = 2;
  for (const auto& sig : {pub_signature(), pri_signature()}) {
    Rewriter rw(sig);
    for (int k = 0; k < 120; ++k) {
      auto phi = rw.normalize(deltest::random_sentence(r, sig, c, 3));
      std::vector<Sentence> delta;
      try {
        delta = rw.closure(phi, 2000);
      } catch (const GuardError&) {
        continue;
      }
      std::set<Sentence, bool (*)(const Sentence&, const Sentence&)> in(
          [](const Sentence& a, const Sentence& b) { return render_less(a, b); });
      in.insert(delta.begin(), delta.end());
      CHECK(in.count(phi));
      for (const auto& x : delta) {
        CHECK(is_normal_form(x));
        for (const auto& y : subsentences(x)) CHECK(in.count(y));
        if (x.kind() == SentenceKind::CBox) {
          for (const auto& g : x.agents()) CHECK(in.count(Sentence::box(g, x)));
        }
        if (x.kind() == SentenceKind::DynBox) {
          const auto& cb = x.sub();
          for (const auto& d : rw.oracle().reachable(SimpleAction(x.program()), cb.agents())) {
            auto dc = Sentence::dyn_box(d, cb);
            CHECK(in.count(dc));
            for (const auto& g : cb.agents()) CHECK(in.count(Sentence::box(g, dc)));
            CHECK(in.count(rw.normalize(Sentence::pre(d))));
            CHECK(in.count(rw.normalize(Sentence::dyn_box(d, cb.sub()))));
          }
        }
      }
      // Monotone: members' closures stay inside.
      for (int j = 0; j < 5 && !delta.empty(); ++j) {
        const auto& x = delta[deltest::pick(r, static_cast<int>(delta.size()))];
        for (const auto& y : rw.closure(x, 2000)) CHECK(in.count(y));
      }
    }
  }
}
