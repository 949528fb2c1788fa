#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>

#include "del/kripke.hpp"

namespace del {

// Cycle a_1..a_{5n} with alternating symmetric A/B edges (a_k - a_{k+1} is
// an A edge for odd k); p fails only at a_1 and a_{2n+1}; q holds only at
// a_{4n+1}. Requires n even and positive.
StateModel gen_cn(int n);

// S_f and T_{f,j} over states a, b, c^i_k (i in J, 1 <= k <= f(i)).
// A: every self loop, a->b, b->c^i_1, c^i_k->c^i_{k+1}; B: c^i_{f(i)}->b.
// T adds a->c^j_1. p fails only at b.
std::pair<StateModel, StateModel> gen_private_pair(const std::map<int, int>& f, int j);
std::string private_state(int i, int k);

// Strictly decreasing sequences over {0..n}, with an edge from each
// sequence to its one-point extensions; single agent A. The root is "()".
StateModel gen_nofmp(int n);

}  // namespace del
