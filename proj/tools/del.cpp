// del: command-line front end. Exit 0 = success or true, 1 = false or UNSAT,
// 2 = usage, input or guard error.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "del/bisim.hpp"
#include "del/corpus.hpp"
#include "del/decide.hpp"
#include "del/kripke.hpp"
#include "del/pdl.hpp"
#include "del/rewrite.hpp"
#include "del/semantics.hpp"
#include "del/syntax.hpp"

using namespace del;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream f(out);
  if (!f) throw Error("cannot write " + out);
  f << text << "\n";
}

std::string set_text(const StateModel& s, const StateSet& xs) {
  std::string out = "{";
  for (int x : members(xs)) out += (out.size() > 1 ? ", " : "") + s.id(x);
  return out + "}";
}

// "1:2,2:3" -> {1: 2, 2: 3}
std::map<int, int> parse_lengths(const std::string& text) {
  std::map<int, int> f;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) throw Error("expected i:k in --f, got " + item);
    try {
      f[std::stoi(item.substr(0, colon))] = std::stoi(item.substr(colon + 1));
    } catch (const std::exception&) {
      throw Error("expected integers in --f, got " + item);
    }
  }
  return f;
}

std::vector<std::string> split_agents(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string a;
  while (std::getline(ss, a, ',')) {
    if (!a.empty()) out.push_back(a);
  }
  return out;
}

struct Inputs {
  std::string sig, model, model2, program, program2, formula, state, state2, out, witness;
  int unfold = 64;
  bool trace = false, valid = false;
};

int run_check(const Inputs& in) {
  auto sig = parse_signature(slurp(in.sig));
  auto s = model_from_json(slurp(in.model), sig);
  auto phi = parse_sentence(in.formula, sig);
  bool t = holds_at(s, s.index_of(in.state), phi, sig, in.unfold);
  std::cout << (t ? "true" : "false") << "\n";
  return t ? 0 : 1;
}

int run_eval(const Inputs& in) {
  auto sig = parse_signature(slurp(in.sig));
  auto s = model_from_json(slurp(in.model), sig);
  auto phi = parse_sentence(in.formula, sig);
  auto e = eval_sentence(s, phi, sig, in.unfold);
  std::cout << set_text(s, e.states) << "\n";
  // An inexact set is the intersection over the first k unfoldings.
  if (!e.exact) std::cout << "inexact: iteration cut off after " << in.unfold << " unfoldings\n";
  return 0;
}

int run_normalize(const Inputs& in) {
  auto sig = parse_signature(slurp(in.sig));
  auto phi = parse_sentence(in.formula, sig);
  Rewriter rw(sig);
  NormalizeOptions opt;
  opt.trace = in.trace;
  auto res = rw.normalize_traced(phi, opt);
  if (in.trace) {
    for (const auto& st : res.trace) std::cout << st.rule << "  " << render(st.result) << "\n";
  }
  std::cout << render(res.nf) << "\n";
  return 0;
}

int run_decide(const Inputs& in) {
  auto sig = parse_signature(slurp(in.sig));
  auto phi = parse_sentence(in.formula, sig);
  Decider d(sig);
  auto v = d.satisfiable(in.valid ? Sentence::neg(phi) : phi);
  if (in.valid) {
    std::cout << (v.sat ? "INVALID" : "VALID") << "\n";
  } else {
    std::cout << (v.sat ? "SAT" : "UNSAT") << "\n";
  }
  std::cout << "closure " << v.closure_size << ", atoms " << v.atoms << ", survivors " << v.survivors
            << ", rounds " << v.rounds << "\n";
  if (v.sat && !in.witness.empty()) {
    auto j = nlohmann::ordered_json::parse(model_to_json(v.witness->model));
    j["state"] = v.witness->model.id(v.witness->state);
    emit(j.dump(2), in.witness);
  }
  return v.sat != in.valid ? 0 : 1;
}

int run_translate(const Inputs& in) {
  auto sig = parse_signature(slurp(in.sig));
  auto phi = parse_sentence(in.formula, sig);
  std::cout << render(translate(phi, sig)) << "\n";
  return 0;
}

int run_bisim(const Inputs& in) {
  auto sig = parse_signature(slurp(in.sig));
  if (!in.program.empty()) {
    auto p = program_model_from_json(slurp(in.program), sig);
    auto q = program_model_from_json(slurp(in.program2), sig);
    Decider d(sig);
    // Preconditions match when the decider proves them equivalent; composed
    // preconditions are compared syntactically.
    PreconditionEquivalence eq = [&](const Precondition& a, const Precondition& b) {
      if (a.is_sentence() && b.is_sentence()) return d.valid(Sentence::iff(a.sentence(), b.sentence()));
      return a.render() == b.render();
    };
    bool same = program_models_bisimilar(p, q, eq);
    for (auto [x, y] : largest_program_bisimulation(p, q, eq)) std::cout << p.id(x) << " ~ " << q.id(y) << "\n";
    std::cout << (same ? "bisimilar" : "not bisimilar") << "\n";
    return same ? 0 : 1;
  }
  auto s = model_from_json(slurp(in.model), sig);
  auto t = model_from_json(slurp(in.model2.empty() ? in.model : in.model2), sig);
  if (!in.state.empty()) {
    bool same = bisimilar(s, in.state, t, in.state2.empty() ? in.state : in.state2);
    std::cout << (same ? "bisimilar" : "not bisimilar") << "\n";
    return same ? 0 : 1;
  }
  auto r = largest_bisimulation(s, t);
  for (auto [x, y] : r) std::cout << s.id(x) << " ~ " << t.id(y) << "\n";
  bool total = is_total_bisimulation(s, t, r);
  std::cout << (total ? "total" : "partial") << "\n";
  return total ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic epistemic logic toolkit"};
  app.require_subcommand(1);
  Inputs in;

  auto sig_opt = [&](CLI::App* c) { c->add_option("--sig", in.sig, "signature JSON")->required()->check(CLI::ExistingFile); };
  auto formula_opt = [&](CLI::App* c) { c->add_option("--formula,-f", in.formula, "sentence")->required(); };

  auto* check = app.add_subcommand("check", "truth of a sentence at a state");
  sig_opt(check);
  check->add_option("--model", in.model, "model JSON")->required()->check(CLI::ExistingFile);
  check->add_option("--state", in.state, "state id")->required();
  formula_opt(check);
  check->add_option("--unfold", in.unfold, "unfoldings allowed per iteration")->check(CLI::PositiveNumber);

  auto* eval = app.add_subcommand("eval", "truth set of a sentence");
  sig_opt(eval);
  eval->add_option("--model", in.model, "model JSON")->required()->check(CLI::ExistingFile);
  formula_opt(eval);
  eval->add_option("--unfold", in.unfold, "unfoldings allowed per iteration")->check(CLI::PositiveNumber);

  auto* normalize = app.add_subcommand("normalize", "rewrite to normal form");
  sig_opt(normalize);
  formula_opt(normalize);
  normalize->add_flag("--trace", in.trace, "print every rewrite step");

  auto* decide = app.add_subcommand("decide", "satisfiability of an iteration-free sentence");
  sig_opt(decide);
  formula_opt(decide);
  decide->add_flag("--valid", in.valid, "decide validity instead");
  decide->add_option("--witness", in.witness, "write the satisfying model here");

  auto* trans = app.add_subcommand("translate", "equivalent PDL sentence");
  sig_opt(trans);
  formula_opt(trans);

  auto* bisim = app.add_subcommand("bisim", "bisimulation between models or program models");
  sig_opt(bisim);
  auto* m1 = bisim->add_option("--model", in.model, "model JSON")->check(CLI::ExistingFile);
  bisim->add_option("--model2", in.model2, "second model JSON (default: the first)")
      ->check(CLI::ExistingFile)
      ->needs(m1);
  bisim->add_option("--state", in.state, "state of the first model")->needs(m1);
  bisim->add_option("--state2", in.state2, "state of the second model");
  auto* p1 = bisim->add_option("--program", in.program, "program model JSON")->check(CLI::ExistingFile)->excludes(m1);
  bisim->add_option("--program2", in.program2, "second program model JSON")->check(CLI::ExistingFile)->needs(p1);
  p1->needs("--program2");

  auto* gen = app.add_subcommand("gen", "example models and signatures");
  gen->require_subcommand(1);
  gen->add_option("--out,-o", in.out, "output file (default: stdout)");
  int n = 2;
  auto* cn = gen->add_subcommand("cn", "cycle model C_n");
  cn->add_option("--n", n, "even size parameter")->required();
  std::string lengths, side = "S";
  int j = 1;
  auto* priv = gen->add_subcommand("private", "S_f or T_{f,j}");
  priv->add_option("--f", lengths, "branch lengths, e.g. 1:2,2:3")->required();
  priv->add_option("--j", j, "branch that T links from a")->required();
  priv->add_option("--side", side, "S or T")->check(CLI::IsMember({"S", "T"}));
  auto* nofmp = gen->add_subcommand("nofmp", "decreasing-sequence model over {0..n}");
  nofmp->add_option("--n", n, "largest element")->required()->check(CLI::NonNegativeNumber);
  std::string kind, agents = "A,B";
  auto* sig = gen->add_subcommand("sig", "action signature");
  sig->add_option("kind", kind, "pub or pri")->required()->check(CLI::IsMember({"pub", "pri"}));
  sig->add_option("--agents", agents, "agents of pub, comma separated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*check) return run_check(in);
    if (*eval) return run_eval(in);
    if (*normalize) return run_normalize(in);
    if (*decide) return run_decide(in);
    if (*trans) return run_translate(in);
    if (*bisim) {
      if (in.model.empty() && in.program.empty()) throw Error("bisim needs --model or --program");
      return run_bisim(in);
    }
    if (*cn) emit(model_to_json(gen_cn(n)), in.out);
    if (*priv) {
      auto [s, t] = gen_private_pair(parse_lengths(lengths), j);
      emit(model_to_json(side == "S" ? s : t), in.out);
    }
    if (*nofmp) emit(model_to_json(gen_nofmp(n)), in.out);
    if (*sig) emit(signature_to_json(kind == "pub" ? pub_signature(split_agents(agents)) : pri_signature()), in.out);
    return 0;
  } catch (const GuardError& e) {
    std::cerr << "guard: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
