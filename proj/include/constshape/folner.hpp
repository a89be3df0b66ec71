#pragma once

#include <optional>
#include <string>
#include <vector>

#include "constshape/coreset.hpp"
#include "constshape/lattice.hpp"

namespace constshape {

// Deterministic complete automaton on state set C + B with input alphabet F1.
// There is an edge a -f-> b exactly when f + a = L(b) + g for some g in F1;
// b is unique by the fundamental-domain property, and lands back in C + B
// whenever K is inside B and B is inside L(B) + F1.
struct SyncGraph {
  PointSet states;
  PointSet alphabet;  // F1, in canonical order
  std::vector<int> delta;  // delta[state * |F1| + letter] -> state
  int zero_state = -1;

  int next(int state, int letter) const {
    return delta[static_cast<std::size_t>(state) * alphabet.size() +
                 static_cast<std::size_t>(letter)];
  }
  std::size_t state_count() const { return states.size(); }
};

// Builds the graph for the given B. Preconditions checked exactly:
// K inside B and B inside L(B) + F1 (BadB names the failing inclusion).
SyncGraph build_graph(const ExpansionSystem& sys, const PointSet& B);
SyncGraph build_graph(const ExpansionSystem& sys, const PointSet& B, const PointSet& K,
                      const PointSet& C);

enum class SyncMode { Greedy, Exact };

// A word of letters (indices into the graph alphabet) sending every state to
// the zero state, or nullopt when some state cannot reach zero. Exact mode is
// a breadth-first search over state subsets (gated to <= 22 states) and
// returns the lexicographically least shortest word; greedy routes states one
// at a time and stays within (N-1)^2 letters. Existence itself is decided by
// reverse reachability of zero, which is linear.
std::optional<std::vector<int>> find_sync_word(const SyncGraph& g, SyncMode mode);

bool word_synchronizes(const SyncGraph& g, const std::vector<int>& word);

std::vector<Vec> word_letters(const SyncGraph& g, const std::vector<int>& word);

struct FolnerVerdict {
  bool is_folner = false;
  std::vector<Vec> word;   // synchronizing word, empty if none
  int n = 0;               // word length
  std::optional<Vec> witness_f;  // sum_i L^i(word_i), a member of F_n
  std::size_t state_count = 0;
  std::string cerny_style_bound;      // ((6 r_bar)^{3d} - (6 r_bar)^d)/6
  std::string word_length_bound;      // (N^3 - N)/6 for N = |states|
  bool witness_verified = false;      // f + C + B inside F_n, checked directly
  std::string note;
};

// Decides whether (F_n) is a Folner sequence. B defaults to the lattice ball
// of radius r_bar, enlarged to cover K when needed (any B with K inside B and
// B inside L(B)+F1 is admissible).
FolnerVerdict decide_folner(const ExpansionSystem& sys);
FolnerVerdict decide_folner(const ExpansionSystem& sys, const PointSet& B, SyncMode mode,
                            const std::vector<Vec>* forced_word = nullptr);

// Exact ratios |F_n delta (v + F_n)| / |F_n| for n in [n_lo, n_hi].
std::vector<Ratio> folner_profile(const ExpansionSystem& sys, const Vec& v, int n_lo, int n_hi);

// Textual edge list "state -[letter]-> state" and a dot digraph.
std::string graph_edge_list(const SyncGraph& g);
std::string graph_dot(const SyncGraph& g);

}  // namespace constshape
