#include "constshape/folner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <unordered_map>

#include "constshape/limits.hpp"

namespace constshape {

SyncGraph build_graph(const ExpansionSystem& sys, const PointSet& B) {
  CoreSets cs = core_sets(sys);
  return build_graph(sys, B, cs.K, cs.C);
}

SyncGraph build_graph(const ExpansionSystem& sys, const PointSet& B, const PointSet& K,
                      const PointSet& C) {
  if (!K.is_subset_of(B))
    fail(ErrorCode::BadB, "K is not inside B; missing " + K.set_minus(B).str());
  if (!B.is_subset_of(B.image(sys.L).sum(sys.F1)))
    fail(ErrorCode::BadB, "B is not inside L(B) + F1");

  SyncGraph g;
  g.states = C.sum(B);
  g.alphabet = sys.F1;
  g.zero_state = g.states.index_of(Vec::zero(sys.dim));
  if (g.zero_state < 0) fail(ErrorCode::Internal, "zero state missing from C + B");

  g.delta.assign(g.states.size() * g.alphabet.size(), -1);
  for (std::size_t si = 0; si < g.states.size(); ++si) {
    for (std::size_t li = 0; li < g.alphabet.size(); ++li) {
      Vec target = digit_strip(sys, g.alphabet[li] + g.states[si]).first;
      int ti = g.states.index_of(target);
      if (ti < 0)
        fail(ErrorCode::BadB, "state set C + B is not closed under transitions: " +
                                  g.states[si].str() + " -[" + g.alphabet[li].str() +
                                  "]-> " + target.str());
      g.delta[si * g.alphabet.size() + li] = ti;
    }
  }
  return g;
}

namespace {

// States from which the zero state is reachable (zero is an all-letter sink).
std::vector<bool> can_reach_zero(const SyncGraph& g) {
  std::size_t n = g.state_count(), m = g.alphabet.size();
  std::vector<std::vector<int>> preds(n);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t l = 0; l < m; ++l) preds[static_cast<std::size_t>(g.next(static_cast<int>(s), static_cast<int>(l)))].push_back(static_cast<int>(s));
  std::vector<bool> reach(n, false);
  std::deque<int> q{g.zero_state};
  reach[static_cast<std::size_t>(g.zero_state)] = true;
  while (!q.empty()) {
    int s = q.front();
    q.pop_front();
    for (int p : preds[static_cast<std::size_t>(s)])
      if (!reach[static_cast<std::size_t>(p)]) {
        reach[static_cast<std::size_t>(p)] = true;
        q.push_back(p);
      }
  }
  return reach;
}

// Shortest word from `from` to zero; ties broken by lexicographic letter
// order, which the alphabet's canonical order provides.
std::vector<int> route_to_zero(const SyncGraph& g, int from) {
  std::size_t n = g.state_count(), m = g.alphabet.size();
  std::vector<int> parent(n, -1), letter(n, -1);
  std::deque<int> q{from};
  std::vector<bool> seen(n, false);
  seen[static_cast<std::size_t>(from)] = true;
  while (!q.empty()) {
    int s = q.front();
    q.pop_front();
    if (s == g.zero_state) break;
    for (std::size_t l = 0; l < m; ++l) {
      int t = g.next(s, static_cast<int>(l));
      if (!seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = true;
        parent[static_cast<std::size_t>(t)] = s;
        letter[static_cast<std::size_t>(t)] = static_cast<int>(l);
        q.push_back(t);
      }
    }
  }
  std::vector<int> word;
  for (int s = g.zero_state; s != from; s = parent[static_cast<std::size_t>(s)])
    word.push_back(letter[static_cast<std::size_t>(s)]);
  std::reverse(word.begin(), word.end());
  return word;
}

std::optional<std::vector<int>> exact_sync_word(const SyncGraph& g) {
  std::size_t n = g.state_count(), m = g.alphabet.size();
  if (n > 22) fail(ErrorCode::ResourceLimit, "exact subset search gated to <= 22 states");
  using Mask = std::uint32_t;
  Mask full = (n == 32) ? ~Mask{0} : ((Mask{1} << n) - 1);
  Mask goal = Mask{1} << g.zero_state;
  std::unordered_map<Mask, std::pair<Mask, int>> parent;  // mask -> (prev, letter)
  std::deque<Mask> q{full};
  parent.emplace(full, std::make_pair(full, -1));
  while (!q.empty()) {
    Mask cur = q.front();
    q.pop_front();
    if (cur == goal) {
      std::vector<int> word;
      for (Mask s = goal; s != full;) {
        auto [prev, l] = parent.at(s);
        word.push_back(l);
        s = prev;
      }
      std::reverse(word.begin(), word.end());
      return word;
    }
    for (std::size_t l = 0; l < m; ++l) {
      Mask img = 0;
      for (std::size_t s = 0; s < n; ++s)
        if (cur & (Mask{1} << s)) img |= Mask{1} << g.next(static_cast<int>(s), static_cast<int>(l));
      if (!parent.count(img)) {
        parent.emplace(img, std::make_pair(cur, static_cast<int>(l)));
        q.push_back(img);
      }
    }
  }
  return std::nullopt;
}

std::optional<std::vector<int>> greedy_sync_word(const SyncGraph& g) {
  std::vector<bool> reach = can_reach_zero(g);
  for (bool b : reach)
    if (!b) return std::nullopt;
  std::size_t n = g.state_count();
  std::vector<int> current(n);
  for (std::size_t s = 0; s < n; ++s) current[s] = static_cast<int>(s);
  std::vector<int> word;
  while (true) {
    int pending = -1;
    for (std::size_t s = 0; s < n; ++s)
      if (current[s] != g.zero_state) {
        pending = current[s];
        break;
      }
    if (pending < 0) break;
    // Zero is absorbing, so routing one state never un-routes another.
    std::vector<int> route = route_to_zero(g, pending);
    for (int l : route) {
      for (std::size_t s = 0; s < n; ++s) current[s] = g.next(current[s], l);
      word.push_back(l);
    }
  }
  return word;
}

}  // namespace

std::optional<std::vector<int>> find_sync_word(const SyncGraph& g, SyncMode mode) {
  std::vector<bool> reach = can_reach_zero(g);
  for (bool b : reach)
    if (!b) return std::nullopt;
  if (mode == SyncMode::Exact) return exact_sync_word(g);
  return greedy_sync_word(g);
}

bool word_synchronizes(const SyncGraph& g, const std::vector<int>& word) {
  for (std::size_t s = 0; s < g.state_count(); ++s) {
    int cur = static_cast<int>(s);
    for (int l : word) cur = g.next(cur, l);
    if (cur != g.zero_state) return false;
  }
  return true;
}

std::vector<Vec> word_letters(const SyncGraph& g, const std::vector<int>& word) {
  std::vector<Vec> out;
  out.reserve(word.size());
  for (int l : word) out.push_back(g.alphabet[static_cast<std::size_t>(l)]);
  return out;
}

FolnerVerdict decide_folner(const ExpansionSystem& sys) {
  CoreSets cs = core_sets(sys);
  PointSet b = ball_points(sys.r_bar, sys.dim);
  std::string note;
  if (!cs.K.is_subset_of(b)) {
    // Any B containing K with B inside L(B)+F1 is admissible; a larger ball
    // keeps both (the second inclusion holds for every radius >= r_bar).
    b = ball_points(std::max(sys.r_bar, cs.K.norm_max()), sys.dim);
    note = "B enlarged beyond ball(r_bar) to cover K";
  }
  SyncMode mode = cs.C.sum(b).size() <= 22 ? SyncMode::Exact : SyncMode::Greedy;
  FolnerVerdict v = decide_folner(sys, b, mode, nullptr);
  if (!note.empty()) v.note = note + (v.note.empty() ? "" : "; " + v.note);
  return v;
}

FolnerVerdict decide_folner(const ExpansionSystem& sys, const PointSet& B, SyncMode mode,
                            const std::vector<Vec>* forced_word) {
  CoreSets cs = core_sets(sys);
  SyncGraph g = build_graph(sys, B, cs.K, cs.C);

  FolnerVerdict out;
  out.state_count = g.state_count();
  {
    double six_r = 6.0 * sys.r_bar;
    double bound = (std::pow(six_r, 3 * sys.dim) - std::pow(six_r, sys.dim)) / 6.0;
    std::ostringstream os;
    os.precision(0);
    os << std::fixed << std::ceil(bound);
    out.cerny_style_bound = os.str();
    double n = static_cast<double>(g.state_count());
    std::ostringstream os2;
    os2.precision(0);
    os2 << std::fixed << (n * n * n - n) / 6.0;
    out.word_length_bound = os2.str();
  }

  std::optional<std::vector<int>> word;
  if (forced_word) {
    std::vector<int> w;
    for (const Vec& letter : *forced_word) {
      int li = g.alphabet.index_of(letter);
      if (li < 0) fail(ErrorCode::Schema, "forced word uses a letter outside F1");
      w.push_back(li);
    }
    if (!word_synchronizes(g, w)) {
      out.is_folner = false;
      out.note = "forced word does not synchronize";
      return out;
    }
    word = w;
  } else {
    word = find_sync_word(g, mode);
  }

  if (!word) {
    out.is_folner = false;
    out.note = "some state cannot reach zero";
    return out;
  }
  out.is_folner = true;
  out.word = word_letters(g, *word);
  out.n = static_cast<int>(out.word.size());
  Vec f = compose_digits(sys, out.word);
  out.witness_f = f;

  // Direct inclusion check f + C + B inside F_n, membership by digit strip.
  out.witness_verified = true;
  for (const Vec& q : cs.C.sum(B)) {
    if (!in_support_level(sys, f + q, out.n)) {
      out.witness_verified = false;
      break;
    }
  }
  if (!out.witness_verified)
    fail(ErrorCode::Internal, "synchronizing word produced an unverified witness");
  return out;
}

std::vector<Ratio> folner_profile(const ExpansionSystem& sys, const Vec& v, int n_lo, int n_hi) {
  std::vector<Ratio> out;
  PointSet fn = support_iterate(sys, n_lo);
  for (int n = n_lo; n <= n_hi; ++n) {
    out.push_back(sym_diff_ratio(fn, v));
    if (n < n_hi) {
      if (fn.size() * static_cast<std::size_t>(sys.abs_det()) > limits().max_points)
        fail(ErrorCode::ResourceLimit, "profile level exceeds max_points");
      fn = fn.image(sys.L).sum(sys.F1);
    }
  }
  return out;
}

std::string graph_edge_list(const SyncGraph& g) {
  std::ostringstream os;
  for (std::size_t s = 0; s < g.state_count(); ++s)
    for (std::size_t l = 0; l < g.alphabet.size(); ++l)
      os << g.states[s].str() << " -[" << g.alphabet[l].str() << "]-> "
         << g.states[static_cast<std::size_t>(g.next(static_cast<int>(s), static_cast<int>(l)))].str() << "\n";
  return os.str();
}

std::string graph_dot(const SyncGraph& g) {
  std::ostringstream os;
  os << "digraph sync {\n";
  for (std::size_t s = 0; s < g.state_count(); ++s)
    os << "  n" << s << " [label=\"" << g.states[s].str() << "\"];\n";
  for (std::size_t s = 0; s < g.state_count(); ++s)
    for (std::size_t l = 0; l < g.alphabet.size(); ++l)
      os << "  n" << s << " -> n" << g.next(static_cast<int>(s), static_cast<int>(l))
         << " [label=\"" << g.alphabet[l].str() << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace constshape
